"""Simulated end-effector: velocity jogging on six pose axes, save/return, vacuum.

Motion commands are velocity set-points that stay active until replaced or
stopped; each tick integrates the active command over one frame period on
exactly one axis. SavePose/ReturnToSaved use a single register and restore the
pose bit-exactly. Loop has no motion effect and is only counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .domain import RobotCommand
from .errors import NoSavedPoseError

# Motion commands: axis index (0..2 position, 0..2 orientation) and direction.
_MOTION = {
    RobotCommand.X_POS: ("position", 0, +1.0),
    RobotCommand.X_NEG: ("position", 0, -1.0),
    RobotCommand.Y_POS: ("position", 1, +1.0),
    RobotCommand.Y_NEG: ("position", 1, -1.0),
    RobotCommand.Z_POS: ("position", 2, +1.0),
    RobotCommand.Z_NEG: ("position", 2, -1.0),
    RobotCommand.RX_POS: ("orientation", 0, +1.0),
    RobotCommand.RX_NEG: ("orientation", 0, -1.0),
    RobotCommand.RY_POS: ("orientation", 1, +1.0),
    RobotCommand.RY_NEG: ("orientation", 1, -1.0),
    RobotCommand.RZ_POS: ("orientation", 2, +1.0),
    RobotCommand.RZ_NEG: ("orientation", 2, -1.0),
}


def wrap_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class SimConfig:
    """Jog speeds and the frame period the simulation integrates over."""

    linear_speed: float = 0.05  # m/s
    angular_speed: float = 0.2  # rad/s
    frame_dt: float = 0.015  # s, one glove frame

    def __post_init__(self):
        if self.linear_speed <= 0 or self.angular_speed <= 0:
            raise ValueError("speeds must be positive")
        if self.frame_dt <= 0:
            raise ValueError("frame_dt must be positive")


@dataclass
class RobotState:
    """Pose, vacuum flag, saved-pose register, and the command in force."""

    position: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    orientation: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    saved_pose: Optional[tuple[tuple[float, float, float], tuple[float, float, float]]] = None
    vacuum: bool = False
    active_command: Optional[RobotCommand] = None
    loop_count: int = 0  # Loop is undefined motion-wise; we only record it

    def copy(self) -> "RobotState":
        return RobotState(
            position=list(self.position),
            orientation=list(self.orientation),
            saved_pose=self.saved_pose,
            vacuum=self.vacuum,
            active_command=self.active_command,
            loop_count=self.loop_count,
        )


def apply_command(state: RobotState, command: RobotCommand, config: SimConfig) -> RobotState:
    """Handle one command; returns a new state, the input is untouched.

    Motion commands change only the active set-point; integration happens in
    tick. ReturnToSaved with an empty register raises and leaves the caller's
    state unchanged.
    """
    if command == RobotCommand.RETURN_TO_SAVED and state.saved_pose is None:
        raise NoSavedPoseError("ReturnToSaved with no saved pose")
    out = state.copy()
    if command in _MOTION:
        out.active_command = command
    elif command == RobotCommand.STOP:
        out.active_command = None
    elif command == RobotCommand.SAVE_POSE:
        out.saved_pose = (tuple(out.position), tuple(out.orientation))
    elif command == RobotCommand.RETURN_TO_SAVED:
        pos, orient = out.saved_pose
        out.position = list(pos)
        out.orientation = list(orient)
    elif command == RobotCommand.VACUUM_ON:
        out.vacuum = True
    elif command == RobotCommand.VACUUM_OFF:
        out.vacuum = False
    elif command == RobotCommand.LOOP:
        out.loop_count += 1
    else:
        raise ValueError(f"unhandled command {command!r}")
    return out


def tick(state: RobotState, config: SimConfig) -> RobotState:
    """Integrate the active motion command over one frame period.

    Exactly one pose component changes; orientation angles are wrapped to
    (-pi, pi]. Without an active motion command this is the identity.
    """
    if state.active_command is None or state.active_command not in _MOTION:
        return state.copy()
    group, axis, direction = _MOTION[state.active_command]
    out = state.copy()
    if group == "position":
        out.position[axis] += direction * config.linear_speed * config.frame_dt
    else:
        out.orientation[axis] = wrap_angle(
            out.orientation[axis] + direction * config.angular_speed * config.frame_dt
        )
    return out


def to_snapshot(state: RobotState, t: int) -> dict:
    """JSON-ready pose snapshot for the service channel and CLI trace mode."""
    return {
        "t": int(t),
        "position": [float(v) for v in state.position],
        "orientation": [float(v) for v in state.orientation],
        "vacuum": bool(state.vacuum),
        "active_command": state.active_command.value if state.active_command else None,
        "saved": state.saved_pose is not None,
    }
