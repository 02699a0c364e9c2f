"""Car kinematics (bicycle model), crash detection, and state bookkeeping.

Sign conventions: world headings are radians, counter-clockwise positive;
steering is degrees with positive = right turn, so positive steering
decreases the heading. Lateral offsets are positive left of travel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import geometry
from .track import Track

DT = 1.0 / 6.0
SPEED = 6.7
WHEELBASE = 2.5
MAX_STEER_DEG = 25.0
RESPAWN_AHEAD = 5.0
REFRACTORY_S = 2.0


def clamp_steering(angle_deg: float) -> float:
    return min(MAX_STEER_DEG, max(-MAX_STEER_DEG, float(angle_deg)))


@dataclass(frozen=True)
class SimState:
    position: np.ndarray  # (2,) meters
    heading: float  # radians, CCW
    speed: float  # m/s
    steering: float  # degrees in [-25, 25]
    t: float  # seconds
    frame: int

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64)
        if pos.shape != (2,) or not np.isfinite(pos).all():
            raise ValueError("position must be a finite 2-vector")
        if not (math.isfinite(self.heading) and math.isfinite(self.t)):
            raise ValueError("non-finite state")
        if self.speed < 0:
            raise ValueError("speed must be nonnegative")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "steering", clamp_steering(self.steering))


@dataclass(frozen=True)
class Frame:
    """One rendered observation with its ground truth."""

    image: np.ndarray  # (H, W, 3) float32 in [0, 1]
    state: SimState
    lateral_offset: float
    road_heading: float


def initial_state(track: Track, speed: float = SPEED,
                  start_fraction: float = 0.0) -> SimState:
    """Car on the centerline at the given arc-length fraction, facing along it."""
    s = (start_fraction % 1.0) * track.perimeter
    point, heading = geometry.point_at_arclength(track.centerline, s)
    return SimState(position=point, heading=heading, speed=speed,
                    steering=0.0, t=0.0, frame=0)


def step(state: SimState, steering_cmd: float, dt: float = DT) -> SimState:
    """Advance one frame: turn by the bicycle model, then move along the new
    heading. t is recomputed as frame*dt so it never accumulates drift."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    steer = clamp_steering(steering_cmd)
    # positive steering = right turn = clockwise = heading decreases
    heading = state.heading + (state.speed / WHEELBASE) * math.tan(
        math.radians(-steer)) * dt
    pos = state.position + state.speed * dt * np.array(
        [math.cos(heading), math.sin(heading)])
    frame = state.frame + 1
    return SimState(position=pos, heading=heading, speed=state.speed,
                    steering=steer, t=frame * dt, frame=frame)


def lateral_offset(track: Track, position) -> tuple[float, float]:
    """(signed offset, road heading) of a position relative to the centerline."""
    return geometry.signed_offset(track.centerline, position)


def detect_crash(track: Track, state: SimState) -> bool:
    """True iff the car is strictly further than half_width off the centerline."""
    offset, _ = lateral_offset(track, state.position)
    return abs(offset) > track.half_width


def mirror_state(state: SimState) -> SimState:
    """Reflect across the x axis: y, heading, and steering all negate."""
    pos = state.position.copy()
    pos[1] = -pos[1]
    return replace(state, position=pos, heading=-state.heading,
                   steering=-state.steering)


def respawn_state(track: Track, state: SimState,
                  ahead: float = RESPAWN_AHEAD) -> SimState:
    """Back on the centerline `ahead` meters past the nearest point; the
    frame/time counters keep running."""
    _, seg, t_along, _ = geometry.nearest_on_polyline(track.centerline,
                                                      state.position)
    s = geometry.arclength_at(track.centerline, seg, t_along) + ahead
    point, heading = geometry.point_at_arclength(track.centerline, s)
    return replace(state, position=point, heading=heading, steering=0.0)
