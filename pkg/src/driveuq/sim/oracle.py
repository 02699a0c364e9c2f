"""Geometric safety oracle: does the path implied by a steering angle stay
on the road for the next ~3 seconds of travel?"""

from __future__ import annotations

import math

import numpy as np

from . import geometry
from .track import Track
from .world import MAX_STEER_DEG, WHEELBASE, SimState

HORIZON_S = 3.0
N_SAMPLES = 30
LINE_MODE = "line"
ARC_MODE = "arc"

# below this tangent the arc is numerically a straight line
_MIN_TAN = 1e-9


def _line_points(state: SimState, angle_deg: float, length: float) -> np.ndarray:
    # the projected ray leaves the car at heading rotated by the steering angle
    direction = state.heading - math.radians(angle_deg)
    s = np.linspace(0.0, length, N_SAMPLES)
    return state.position + s[:, None] * np.array(
        [math.cos(direction), math.sin(direction)])


def _arc_points(state: SimState, angle_deg: float, length: float) -> np.ndarray:
    tan_d = math.tan(math.radians(abs(angle_deg)))
    if tan_d < _MIN_TAN:
        return _line_points(state, 0.0, length)
    radius = WHEELBASE / tan_d
    s = np.linspace(0.0, length, N_SAMPLES)
    phi = s / radius  # nonnegative arc angles; turn side applied via signs below
    sin_p, cos_p = np.sin(phi), np.cos(phi)
    ch, sh = math.cos(state.heading), math.sin(state.heading)
    # chord offsets in the car frame (x forward, y left) for a left turn
    fwd = radius * sin_p
    left = radius * (1.0 - cos_p)
    if angle_deg > 0:  # right turn mirrors the lateral component
        left = -left
    xs = state.position[0] + fwd * ch - left * sh
    ys = state.position[1] + fwd * sh + left * ch
    return np.stack([xs, ys], axis=1)


def safety_oracle(track: Track, state: SimState, angle_deg: float,
                  mode: str = LINE_MODE) -> bool:
    """True (safe) iff every sampled point of the projected path lies within
    half_width of the centerline. The sample includes the car's own position,
    so an off-road car is unsafe at any angle."""
    angle_deg = min(MAX_STEER_DEG, max(-MAX_STEER_DEG, float(angle_deg)))
    length = HORIZON_S * state.speed
    if mode == LINE_MODE:
        pts = _line_points(state, angle_deg, length)
    elif mode == ARC_MODE:
        pts = _arc_points(state, angle_deg, length)
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")
    dist, _, _, _ = geometry.nearest_on_polyline(track.centerline, pts)
    return bool((dist <= track.half_width).all())
