"""Closed-polyline geometry: nearest points, arc length, tangents.

Polylines are (M, 2) float arrays with implicit closure (segment i runs from
point i to point (i+1) mod M). All distances are meters.
"""

from __future__ import annotations

import numpy as np


def as_polyline(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("polyline must be an (M, 2) array")
    if pts.shape[0] >= 2 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]  # explicit closure -> implicit
    if pts.shape[0] < 3:
        raise ValueError("polyline needs at least 3 distinct points")
    if not np.isfinite(pts).all():
        raise ValueError("polyline contains non-finite coordinates")
    e = np.roll(pts, -1, axis=0) - pts
    if (np.hypot(e[:, 0], e[:, 1]) < 1e-9).any():
        raise ValueError("polyline has zero-length segments")
    return pts


def segment_lengths(pts: np.ndarray) -> np.ndarray:
    e = np.roll(pts, -1, axis=0) - pts
    return np.hypot(e[:, 0], e[:, 1])


def cumulative_lengths(pts: np.ndarray) -> np.ndarray:
    """(M+1,) running arc length; last entry is the perimeter."""
    out = np.zeros(len(pts) + 1)
    np.cumsum(segment_lengths(pts), out=out[1:])
    return out


def perimeter(pts: np.ndarray) -> float:
    return float(segment_lengths(pts).sum())


def nearest_on_polyline(pts: np.ndarray, queries: np.ndarray,
                        candidates: np.ndarray | None = None):
    """Closest centerline point for each query.

    queries: (Q, 2). candidates optionally restricts the segment indices
    searched (callers prefilter for speed). Returns (dist, seg_index, t_along,
    closest) with shapes (Q,), (Q,), (Q,), (Q, 2); seg_index refers to the
    full polyline and ties go to the lowest index.
    """
    q = np.asarray(queries, dtype=np.float64)
    single = q.ndim == 1
    if single:
        q = q[None]
    m = len(pts)
    cand = np.arange(m) if candidates is None else np.asarray(candidates)
    a = pts[cand]
    e = pts[(cand + 1) % m] - a
    inv_l2 = 1.0 / (e * e).sum(axis=1)
    d = q[:, None, :] - a[None, :, :]
    t = np.clip((d * e).sum(axis=-1) * inv_l2, 0.0, 1.0)
    closest = a + t[..., None] * e
    diff = q[:, None, :] - closest
    d2 = (diff * diff).sum(axis=-1)
    j = np.argmin(d2, axis=1)
    rows = np.arange(len(q))
    dist = np.sqrt(d2[rows, j])
    seg = cand[j]
    t_best = t[rows, j]
    pt_best = closest[rows, j]
    if single:
        return float(dist[0]), int(seg[0]), float(t_best[0]), pt_best[0]
    return dist, seg, t_best, pt_best


def segment_tangent(pts: np.ndarray, i) -> np.ndarray:
    """Unit tangent(s) of segment i (scalar or array of indices)."""
    m = len(pts)
    e = pts[(np.asarray(i) + 1) % m] - pts[i]
    return e / np.hypot(e[..., 0], e[..., 1])[..., None]


def signed_offset(pts: np.ndarray, query) -> tuple[float, float]:
    """(lateral offset, road heading) at the query point.

    Offset is positive to the left of travel direction; road heading is the
    tangent angle in radians.
    """
    dist, seg, _, closest = nearest_on_polyline(pts, query)
    tan = segment_tangent(pts, seg)
    rel = np.asarray(query, dtype=np.float64) - closest
    cross = tan[0] * rel[1] - tan[1] * rel[0]
    side = 1.0 if cross > 0 else (-1.0 if cross < 0 else 0.0)
    return side * dist, float(np.arctan2(tan[1], tan[0]))


def arclength_at(pts: np.ndarray, seg: int, t: float) -> float:
    cum = cumulative_lengths(pts)
    return float(cum[seg] + t * (cum[seg + 1] - cum[seg]))


def point_at_arclength(pts: np.ndarray, s: float) -> tuple[np.ndarray, float]:
    """(point, tangent heading) at arc length s, wrapped around the loop."""
    cum = cumulative_lengths(pts)
    total = cum[-1]
    s = s % total
    seg = int(np.searchsorted(cum, s, side="right") - 1)
    seg = min(seg, len(pts) - 1)
    seg_len = cum[seg + 1] - cum[seg]
    t = (s - cum[seg]) / seg_len
    tan = segment_tangent(pts, seg)
    return pts[seg] + t * (pts[(seg + 1) % len(pts)] - pts[seg]), float(
        np.arctan2(tan[1], tan[0]))


def mirror_points(pts: np.ndarray) -> np.ndarray:
    """Reflect across the x axis (y -> -y); point order is preserved."""
    out = pts.copy()
    out[:, 1] = -out[:, 1]
    return out
