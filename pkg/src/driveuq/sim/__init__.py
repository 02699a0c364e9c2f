"""Headless 2-D driving world: tracks, kinematics, camera, expert, oracle."""

from .camera import (FAST_RESOLUTION, FULL_RESOLUTION, MAX_DEPTH,
                     render_camera)
from .expert import LOOKAHEAD, expert_steering
from .oracle import ARC_MODE, HORIZON_S, LINE_MODE, N_SAMPLES, safety_oracle
from .track import (DEFAULT_HALF_WIDTH, Track, load_track, min_turn_radius,
                    preset_track, resolve_track, save_track)
from .world import (DT, MAX_STEER_DEG, REFRACTORY_S, RESPAWN_AHEAD, SPEED,
                    WHEELBASE, Frame, SimState, clamp_steering, detect_crash,
                    initial_state, lateral_offset, mirror_state,
                    respawn_state, step)

__all__ = [
    "ARC_MODE", "DEFAULT_HALF_WIDTH", "DT", "FAST_RESOLUTION",
    "FULL_RESOLUTION", "Frame", "HORIZON_S", "LINE_MODE", "LOOKAHEAD",
    "MAX_DEPTH", "MAX_STEER_DEG", "N_SAMPLES", "REFRACTORY_S",
    "RESPAWN_AHEAD", "SPEED", "SimState", "Track", "WHEELBASE",
    "clamp_steering", "detect_crash", "expert_steering", "initial_state",
    "lateral_offset", "load_track", "min_turn_radius", "mirror_state",
    "preset_track", "render_camera", "resolve_track", "respawn_state",
    "safety_oracle", "save_track", "step",
]
