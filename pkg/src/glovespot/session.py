"""One live spotting session: cascade decisions driving the simulated robot.

The same driver backs the offline `spot` subcommand and the streaming
service, so a recorded stream replayed offline and the identical frames sent
over a socket produce identical decision traces by construction. The driver
owns the robot state: an emitted command is applied before the per-frame
tick, and frames without an emission let the current motion continue.
"""

from __future__ import annotations

import itertools
import time
from typing import Optional

from .domain import SensorFrame
from .robot import RobotState, SimConfig, apply_command, tick, to_snapshot
from .spotter import CascadeModel, GestureSpotter

_session_counter = itertools.count(1)


class SessionDriver:
    """Sequential frame pipeline: spot, map, actuate, snapshot."""

    def __init__(self, cascade: CascadeModel, sim: Optional[SimConfig] = None):
        self.session_id = next(_session_counter)
        self.cascade = cascade
        self.sim = sim or SimConfig()
        self.spotter = GestureSpotter(cascade)
        self.robot = RobotState()
        self.frame_count = 0
        self.started_at = time.time()

    def process(self, frame: SensorFrame) -> dict:
        """Advance one frame; returns the reply payload for this frame."""
        result, command = self.spotter.step(frame)
        if command is not None:
            self.robot = apply_command(self.robot, command, self.sim)
        self.robot = tick(self.robot, self.sim)
        self.frame_count += 1
        active = self.spotter.active_label
        return {
            "t": frame.t,
            "decision": f"G{active}" if active is not None else "NonCommunicative",
            "label": result.label.name if result.label is not None else None,
            "confidence": result.confidence,
            "command": None if command is None else command.value,
            "robot": to_snapshot(self.robot, frame.t),
        }

    def reset(self) -> None:
        """Forget stream position and robot pose; the model stays loaded."""
        self.spotter.reset()
        self.robot = RobotState()
        self.frame_count = 0
