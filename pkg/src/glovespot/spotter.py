"""Streaming recognition: per-frame cascade classification with veto and debounce.

Two networks run in series on the same 44-entry lag feature. The first scores
communicative gestures; if it accepts, the second (when present) scores known
non-gesture shapes and its acceptance vetoes the first. A communicative label
must persist for a minimum number of consecutive frames before its command is
emitted, which suppresses single-frame flicker during hand transitions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import (
    FEATURE_SIZE,
    FrameHistory,
    GestureLabel,
    RobotCommand,
    SensorFrame,
    extract_feature,
    map_command,
)
from .errors import InvalidTopologyError
from .network import Network, forward

# Commands that act once per gesture onset rather than continuously.
ONE_SHOT_COMMANDS = frozenset({
    RobotCommand.SAVE_POSE,
    RobotCommand.RETURN_TO_SAVED,
    RobotCommand.LOOP,
    RobotCommand.VACUUM_ON,
    RobotCommand.VACUUM_OFF,
})


@dataclass(frozen=True)
class CascadeModel:
    """The trained pair of networks plus the streaming decision settings."""

    net_comm: Network
    net_non: Optional[Network] = None
    lag: int = 1
    accept_threshold: float = 0.5
    debounce_frames: int = 1
    one_shot_edge: bool = True  # emit one-shot commands only at gesture onset

    def __post_init__(self):
        if self.net_comm.input_size != FEATURE_SIZE:
            raise InvalidTopologyError(
                f"communicative network input width {self.net_comm.input_size} != {FEATURE_SIZE}"
            )
        if self.net_non is not None and self.net_non.input_size != FEATURE_SIZE:
            raise InvalidTopologyError(
                f"non-gesture network input width {self.net_non.input_size} != {FEATURE_SIZE}"
            )
        if not 0.0 < self.accept_threshold < 1.0:
            raise ValueError(f"accept_threshold must lie in (0,1), got {self.accept_threshold}")
        if self.debounce_frames < 1:
            raise ValueError(f"debounce_frames must be >= 1, got {self.debounce_frames}")
        if self.lag < 1:
            raise ValueError(f"lag must be >= 1, got {self.lag}")

    @property
    def library_size(self) -> int:
        return self.net_comm.output_size


@dataclass(frozen=True)
class ClassifyResult:
    """Argmax-with-threshold outcome for one network on one feature."""

    accepted: bool
    index: int  # 1-based class index of the argmax (ties -> lowest index)
    confidence: float
    outputs: np.ndarray


def classify(net: Network, feature, threshold: float) -> ClassifyResult:
    """Accept the argmax class iff its output reaches the threshold.

    np.argmax already returns the first maximum, which implements the
    lowest-index tie-break.
    """
    outputs = forward(net, feature).output
    k = int(np.argmax(outputs))
    conf = float(outputs[k])
    return ClassifyResult(accepted=conf >= threshold, index=k + 1, confidence=conf, outputs=outputs)


@dataclass(frozen=True)
class SpotResult:
    """One frame's cascade decision with the raw output vectors."""

    t: int
    decision: str  # "communicative" | "non_communicative"
    label: Optional[GestureLabel]
    confidence: Optional[float]
    confidences_comm: np.ndarray
    confidences_non: Optional[np.ndarray] = None

    @property
    def is_communicative(self) -> bool:
        return self.decision == "communicative"


def spot(cascade: CascadeModel, feature, t: int = -1) -> SpotResult:
    """Run the two-network cascade on one feature vector.

    The non-gesture network is consulted only after the communicative network
    accepts, and its own acceptance takes priority: the frame is then declared
    non-communicative no matter how confident the first network was.
    """
    comm = classify(cascade.net_comm, feature, cascade.accept_threshold)
    if not comm.accepted:
        return SpotResult(t=t, decision="non_communicative", label=None, confidence=None,
                          confidences_comm=comm.outputs)
    if cascade.net_non is not None:
        non = classify(cascade.net_non, feature, cascade.accept_threshold)
        if non.accepted:
            return SpotResult(t=t, decision="non_communicative", label=None, confidence=None,
                              confidences_comm=comm.outputs, confidences_non=non.outputs)
        return SpotResult(t=t, decision="communicative", label=GestureLabel.communicative(comm.index),
                          confidence=comm.confidence, confidences_comm=comm.outputs,
                          confidences_non=non.outputs)
    return SpotResult(t=t, decision="communicative", label=GestureLabel.communicative(comm.index),
                      confidence=comm.confidence, confidences_comm=comm.outputs)


@dataclass
class SpotterState:
    """Mutable per-stream state: frame ring, debounce counter, last command."""

    history: FrameHistory
    candidate: Optional[int] = None  # communicative index being counted
    run_length: int = 0
    active_label: Optional[int] = None  # debounced label currently in force
    last_command: Optional[RobotCommand] = None

    @classmethod
    def fresh(cls, cascade: CascadeModel) -> "SpotterState":
        return cls(history=FrameHistory(maxlen=max(cascade.lag + 1, 8)))

    def reset(self) -> None:
        self.history.clear()
        self.candidate = None
        self.run_length = 0
        self.active_label = None
        self.last_command = None


def step(
    state: SpotterState, cascade: CascadeModel, frame: SensorFrame
) -> tuple[SpotterState, SpotResult, Optional[RobotCommand]]:
    """Advance one frame: classify, debounce, and maybe emit a command.

    A communicative label becomes active once it has appeared in
    debounce_frames consecutive results; a non-communicative result or a label
    switch resets the counter. While a label is active its command (mapped
    under the frame's current button state) is emitted every frame, except
    that one-shot commands fire only when they differ from the previous
    frame's command. state is updated in place and returned.
    """
    state.history.append(frame)
    feature = extract_feature(state.history, frame.t, cascade.lag)
    result = spot(cascade, feature, t=frame.t)

    if result.is_communicative:
        idx = result.label.index
        if idx == state.candidate:
            state.run_length = min(state.run_length + 1, cascade.debounce_frames)
        else:
            state.candidate = idx
            state.run_length = 1
    else:
        state.candidate = None
        state.run_length = 0
    state.active_label = state.candidate if state.run_length >= cascade.debounce_frames else None

    command: Optional[RobotCommand] = None
    if state.active_label is not None:
        command = map_command(state.active_label, frame.button)
    emitted = command
    if (
        command is not None
        and cascade.one_shot_edge
        and command in ONE_SHOT_COMMANDS
        and command == state.last_command
    ):
        emitted = None  # suppress repeats of a one-shot while the gesture holds
    state.last_command = command
    return state, result, emitted


class GestureSpotter:
    """Convenience wrapper pairing a cascade with its streaming state."""

    def __init__(self, cascade: CascadeModel):
        self.cascade = cascade
        self.state = SpotterState.fresh(cascade)

    def step(self, frame: SensorFrame) -> tuple[SpotResult, Optional[RobotCommand]]:
        _, result, command = step(self.state, self.cascade, frame)
        return result, command

    @property
    def active_label(self) -> Optional[int]:
        return self.state.active_label

    def reset(self) -> None:
        self.state.reset()


def latency_probe(cascade: CascadeModel, feature_count: int, seed: int = 0) -> dict:
    """Wall-time statistics for full per-frame steps over random frames.

    Returns {"count", "mean_ms", "p99_ms"}; the timing fields are None for an
    empty probe.
    """
    if feature_count < 0:
        raise ValueError("feature_count must be >= 0")
    if feature_count == 0:
        return {"count": 0, "mean_ms": None, "p99_ms": None}
    rng = np.random.default_rng(seed)
    state = SpotterState.fresh(cascade)
    times = np.empty(feature_count)
    for i in range(feature_count):
        frame = SensorFrame(t=i, sensors=rng.uniform(0.0, 1.0, 22), button=False)
        start = time.perf_counter()
        step(state, cascade, frame)
        times[i] = time.perf_counter() - start
    return {
        "count": feature_count,
        "mean_ms": float(times.mean() * 1e3),
        "p99_ms": float(np.percentile(times, 99) * 1e3),
    }
