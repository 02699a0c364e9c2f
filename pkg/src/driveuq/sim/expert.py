"""Scripted pure-pursuit driver used to collect labeled data."""

from __future__ import annotations

import math

from . import geometry
from .track import Track
from .world import WHEELBASE, SimState, clamp_steering

LOOKAHEAD = 8.0


def expert_steering(track: Track, state: SimState,
                    lookahead: float = LOOKAHEAD) -> float:
    """Steer toward the centerline point `lookahead` meters ahead.

    Pure pursuit: the command is the bicycle-model angle whose arc passes
    through the goal point. Raises if the car has strayed more than twice the
    half-width from the road.
    """
    pts = track.centerline
    dist, seg, t_along, _ = geometry.nearest_on_polyline(pts, state.position)
    if dist > 2.0 * track.half_width:
        raise ValueError(f"car is {dist:.1f} m from the track; "
                         "expert needs it within twice the half-width")
    s = geometry.arclength_at(pts, seg, t_along) + lookahead
    goal, _ = geometry.point_at_arclength(pts, s)
    dx = goal[0] - state.position[0]
    dy = goal[1] - state.position[1]
    d = math.hypot(dx, dy)
    # alpha > 0 means the goal lies left of the heading -> steer left (negative)
    alpha = math.atan2(dy, dx) - state.heading
    alpha = math.atan2(math.sin(alpha), math.cos(alpha))
    steer = -math.degrees(math.atan2(2.0 * WHEELBASE * math.sin(alpha), d))
    return clamp_steering(steer)
