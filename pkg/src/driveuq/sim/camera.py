"""Front-camera renderer: pinhole projection of the ground plane.

Each pixel below the horizon is cast onto the road plane and colored by its
distance to the track centerline (road surface, edge lines, dashed center
line) or as grass; rows above the horizon are sky. Pure function of
(track, state, resolution); the image is float32 RGB in [0, 1].
"""

from __future__ import annotations

import math

import numpy as np

from . import geometry
from .track import Track
from .world import SimState

CAM_HEIGHT = 1.4
PITCH_DEG = 10.0
HFOV_DEG = 110.0
MAX_DEPTH = 45.0

FULL_RESOLUTION = (66, 200)
FAST_RESOLUTION = (33, 100)

GRASS = (0.13, 0.30, 0.13)
SKY = (0.38, 0.55, 0.75)
ROAD = (0.42, 0.42, 0.42)
EDGE = (0.90, 0.85, 0.25)
DASH = (0.95, 0.95, 0.95)

EDGE_BAND = 0.35  # m inside the road border painted as edge line
DASH_HALF_WIDTH = 0.15
DASH_PERIOD = 3.0
DASH_ON = 1.5

_grid_cache: dict = {}


def _pixel_grid(resolution):
    """(u columns, v rows, focal px) for a resolution, cached.

    The principal point sits at ((H-1)/2, (W-1)/2) so that column c and
    column W-1-c are exact mirror rays.
    """
    h, w = resolution
    if (h, w) not in _grid_cache:
        if h < 2 or w < 2:
            raise ValueError(f"degenerate resolution {resolution}")
        f = ((w - 1) / 2.0) / math.tan(math.radians(HFOV_DEG) / 2.0)
        u = np.arange(w, dtype=np.float64) - (w - 1) / 2.0
        v = np.arange(h, dtype=np.float64) - (h - 1) / 2.0
        _grid_cache[(h, w)] = (u, v, f)
    return _grid_cache[(h, w)]


def render_camera(track: Track, state: SimState,
                  resolution=FULL_RESOLUTION) -> np.ndarray:
    u, v, f = _pixel_grid(resolution)
    h, w = resolution
    img = np.empty((h, w, 3), dtype=np.float32)
    img[:] = np.asarray(GRASS, dtype=np.float32)

    phi = math.radians(PITCH_DEG)
    sphi, cphi = math.sin(phi), math.cos(phi)
    dir_z = -f * sphi - v * cphi  # per-row vertical ray component
    sky_rows = dir_z >= -1e-12
    img[sky_rows] = np.asarray(SKY, dtype=np.float32)

    ground_rows = ~sky_rows
    if not ground_rows.any():
        return img
    t_row = CAM_HEIGHT / -dir_z[ground_rows]
    fwd = t_row * (f * cphi - v[ground_rows] * sphi)  # forward ground distance
    lat = t_row[:, None] * u[None, :]  # lateral, positive to the right

    heading = state.heading
    ch, sh = math.cos(heading), math.sin(heading)
    px, py = float(state.position[0]), float(state.position[1])
    wx = px + fwd[:, None] * ch + lat * sh
    wy = py + fwd[:, None] * sh - lat * ch

    in_range = fwd[:, None] ** 2 + lat ** 2 <= MAX_DEPTH * MAX_DEPTH
    sub = np.zeros(in_range.shape + (3,), dtype=np.float32)
    sub[:] = np.asarray(GRASS, dtype=np.float32)

    pts = track.centerline
    starts_d = np.hypot(pts[:, 0] - px, pts[:, 1] - py)
    seg_len_max = float(geometry.segment_lengths(pts).max())
    cand = np.flatnonzero(starts_d <= MAX_DEPTH + seg_len_max + track.half_width + 1.0)
    if cand.size and in_range.any():
        queries = np.stack([wx[in_range], wy[in_range]], axis=1)
        dist, seg, t_along, _ = geometry.nearest_on_polyline(pts, queries, cand)
        cum = geometry.cumulative_lengths(pts)
        s_along = cum[seg] + t_along * (cum[seg + 1] - cum[seg])

        colors = np.empty((len(queries), 3), dtype=np.float32)
        colors[:] = np.asarray(GRASS, dtype=np.float32)
        on_road = dist <= track.half_width
        colors[on_road] = np.asarray(ROAD, dtype=np.float32)
        edge = on_road & (dist > track.half_width - EDGE_BAND)
        colors[edge] = np.asarray(EDGE, dtype=np.float32)
        dash = (dist <= DASH_HALF_WIDTH) & (s_along % DASH_PERIOD < DASH_ON)
        colors[dash] = np.asarray(DASH, dtype=np.float32)
        sub[in_range] = colors

    img[ground_rows] = sub
    return img
