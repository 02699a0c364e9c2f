"""Track definition, validation, JSON persistence, and bundled presets."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import geometry

TRACK_FORMAT_VERSION = 1

DEFAULT_HALF_WIDTH = 4.0


@dataclass(frozen=True)
class Track:
    """Closed centerline polyline plus a constant road half-width (meters)."""

    name: str
    half_width: float
    centerline: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        pts = geometry.as_polyline(self.centerline)
        check_self_clearance(pts, self.half_width)
        object.__setattr__(self, "centerline", pts)

    @property
    def perimeter(self) -> float:
        return geometry.perimeter(self.centerline)

    def mirrored(self) -> "Track":
        return Track(self.name + "-mirror", self.half_width,
                     geometry.mirror_points(self.centerline))


def check_self_clearance(pts: np.ndarray, half_width: float,
                         window: float | None = None):
    """Reject centerlines whose road surface would overlap itself.

    Any two points further apart than `window` along the loop must be at
    least 2*half_width apart in the plane; nearby-along-track points are
    exempt because curvature legitimately brings them close.
    """
    if window is None:
        window = max(8.0 * half_width, 20.0)
    cum = geometry.cumulative_lengths(pts)[:-1]
    total = float(geometry.perimeter(pts))
    if total <= 2 * window:
        return  # loop too short for any pair to clear the window
    ds = np.abs(cum[:, None] - cum[None, :])
    arc_sep = np.minimum(ds, total - ds)
    d = pts[:, None, :] - pts[None, :, :]
    eucl = np.hypot(d[..., 0], d[..., 1])
    bad = (arc_sep > window) & (eucl < 2.0 * half_width)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"track self-intersects at half-width scale: points {i} and {j} "
            f"are {eucl[i, j]:.2f} m apart ({arc_sep[i, j]:.1f} m along track)")


def min_turn_radius(pts: np.ndarray) -> float:
    """Smallest circumradius over consecutive point triples (curvature check)."""
    a = pts
    b = np.roll(pts, -1, axis=0)
    c = np.roll(pts, -2, axis=0)
    ab = np.hypot(*(b - a).T)
    bc = np.hypot(*(c - b).T)
    ca = np.hypot(*(a - c).T)
    area2 = np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                   - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    with np.errstate(divide="ignore"):
        radius = np.where(area2 > 1e-12, ab * bc * ca / (2.0 * area2), np.inf)
    return float(radius.min())


def save_track(track: Track, path: str):
    data = {"version": TRACK_FORMAT_VERSION, "name": track.name,
            "half_width": track.half_width,
            "centerline": [[float(x), float(y)] for x, y in track.centerline]}
    with open(path, "w") as fh:
        json.dump(data, fh)
        fh.write("\n")


def load_track(path: str) -> Track:
    with open(path) as fh:
        data = json.load(fh)
    version = data.get("version", TRACK_FORMAT_VERSION)
    if version != TRACK_FORMAT_VERSION:
        raise ValueError(f"unsupported track format version {version}")
    for key in ("name", "half_width", "centerline"):
        if key not in data:
            raise ValueError(f"track file missing {key!r}")
    return Track(data["name"], float(data["half_width"]),
                 np.asarray(data["centerline"], dtype=np.float64))


def _oval_points(straight: float = 80.0, radius: float = 30.0,
                 spacing: float = 1.5) -> np.ndarray:
    """Stadium: two straights joined by semicircles, counter-clockwise."""
    n_str = max(2, int(round(straight / spacing)))
    n_arc = max(3, int(round(math.pi * radius / spacing)))
    xs = np.linspace(-straight / 2, straight / 2, n_str, endpoint=False)
    bottom = np.stack([xs, np.full_like(xs, -radius)], axis=1)
    ang = np.linspace(-math.pi / 2, math.pi / 2, n_arc, endpoint=False)
    right = np.stack([straight / 2 + radius * np.cos(ang),
                      radius * np.sin(ang)], axis=1)
    top = np.stack([-xs, np.full_like(xs, radius)], axis=1)
    ang2 = np.linspace(math.pi / 2, 3 * math.pi / 2, n_arc, endpoint=False)
    left = np.stack([-straight / 2 + radius * np.cos(ang2),
                     radius * np.sin(ang2)], axis=1)
    return np.concatenate([bottom, right, top, left])


def _figure8_points(a: float = 33.0, c: float = 30.0, n: int = 320) -> np.ndarray:
    """Peanut-shaped loop (Cassini oval, a > c): two lobes with a narrow
    waist, so curvature changes sign without the centerline crossing itself."""
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    r2 = c * c * np.cos(2 * theta) + np.sqrt(a ** 4 - c ** 4 * np.sin(2 * theta) ** 2)
    r = np.sqrt(r2)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)


def _serpentine_points(base: float = 40.0, amplitude: float = 6.0,
                       lobes: int = 5, n: int = 400) -> np.ndarray:
    """Wavy ring: radius oscillates around `base`, alternating curvature."""
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    r = base + amplitude * np.sin(lobes * theta)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)


_PRESETS = {
    "oval": _oval_points,
    "figure8": _figure8_points,
    "serpentine": _serpentine_points,
}


def preset_track(name: str, half_width: float = DEFAULT_HALF_WIDTH) -> Track:
    if name not in _PRESETS:
        raise ValueError(f"unknown track preset {name!r}; "
                         f"choose from {sorted(_PRESETS)}")
    return Track(name, half_width, _PRESETS[name]())


def resolve_track(spec: str, half_width: float = DEFAULT_HALF_WIDTH) -> Track:
    """Preset name or path to a track JSON file."""
    if spec in _PRESETS:
        return preset_track(spec, half_width)
    if os.path.exists(spec):
        return load_track(spec)
    raise FileNotFoundError(f"no track preset or file named {spec!r}")
