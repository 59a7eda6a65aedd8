"""Core vocabulary: sensor frames, lag-paired features, gesture labels, commands.

A frame is 22 normalized joint-angle readings plus a two-state button. The
classifier input is a 44-entry vector pairing the readings at time t-n with
those at time t. Communicative gestures G1..G10 map to end-effector commands,
doubled by the button state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import DimensionError, MissingFrameError, StreamOrderError

N_SENSORS = 22
FEATURE_SIZE = 2 * N_SENSORS
FRAME_PERIOD_S = 0.015  # one frame per 15 ms
COMMAND_LIBRARY_SIZE = 10  # gestures beyond G10 are recognition-only


@dataclass(frozen=True)
class SensorFrame:
    """One glove reading: frame index, 22 values in [0,1], button state."""

    t: int
    sensors: np.ndarray
    button: bool = False

    def __post_init__(self):
        sens = np.asarray(self.sensors, dtype=float)
        if sens.shape != (N_SENSORS,):
            raise DimensionError(f"frame needs exactly {N_SENSORS} sensor values, got shape {sens.shape}")
        if self.t < 0:
            raise ValueError(f"frame index must be non-negative, got {self.t}")
        if np.any(sens < 0.0) or np.any(sens > 1.0):
            raise ValueError("sensor values must lie in [0,1]")
        object.__setattr__(self, "sensors", sens)


@dataclass(frozen=True)
class GestureLabel:
    """A communicative gesture (G1..GK), a trained non-gesture (N1..NM), or unknown."""

    kind: str  # "communicative" | "non_gesture" | "unknown"
    index: int = 0  # 1-based within its library; 0 for unknown

    _KINDS = ("communicative", "non_gesture", "unknown")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown label kind {self.kind!r}")
        if self.kind == "unknown":
            if self.index != 0:
                raise ValueError("unknown labels carry no index")
        elif self.index < 1:
            raise ValueError(f"{self.kind} label index must be >= 1, got {self.index}")

    @classmethod
    def communicative(cls, index: int) -> "GestureLabel":
        return cls("communicative", index)

    @classmethod
    def non_gesture(cls, index: int) -> "GestureLabel":
        return cls("non_gesture", index)

    @classmethod
    def unknown(cls) -> "GestureLabel":
        return cls("unknown", 0)

    @property
    def name(self) -> str:
        if self.kind == "communicative":
            return f"G{self.index}"
        if self.kind == "non_gesture":
            return f"N{self.index}"
        return "Unknown"

    @classmethod
    def parse(cls, text: str) -> "GestureLabel":
        """Inverse of .name: 'G5' -> communicative 5, 'N2' -> non-gesture 2."""
        if text == "Unknown":
            return cls.unknown()
        if len(text) >= 2 and text[0] in "GN" and text[1:].isdigit():
            idx = int(text[1:])
            if idx >= 1:
                kind = "communicative" if text[0] == "G" else "non_gesture"
                return cls(kind, idx)
        raise ValueError(f"cannot parse gesture label {text!r}")


class RobotCommand(str, Enum):
    """Closed set of end-effector commands reachable from the gesture map."""

    STOP = "Stop"
    X_POS = "X+"
    X_NEG = "X-"
    Y_POS = "Y+"
    Y_NEG = "Y-"
    Z_POS = "Z+"
    Z_NEG = "Z-"
    RX_POS = "RX+"
    RX_NEG = "RX-"
    RY_POS = "RY+"
    RY_NEG = "RY-"
    RZ_POS = "RZ+"
    RZ_NEG = "RZ-"
    SAVE_POSE = "SavePose"
    RETURN_TO_SAVED = "ReturnToSaved"
    LOOP = "Loop"
    VACUUM_ON = "VacuumOn"
    VACUUM_OFF = "VacuumOff"


# (gesture index, button ON) and (gesture index, button OFF) command columns.
# Button ON selects translations for G2..G7, OFF the matching rotations.
_COMMAND_TABLE = {
    1: (RobotCommand.STOP, RobotCommand.STOP),
    2: (RobotCommand.X_POS, RobotCommand.RX_POS),
    3: (RobotCommand.X_NEG, RobotCommand.RX_NEG),
    4: (RobotCommand.Y_POS, RobotCommand.RY_POS),
    5: (RobotCommand.Y_NEG, RobotCommand.RY_NEG),
    6: (RobotCommand.Z_POS, RobotCommand.RZ_POS),
    7: (RobotCommand.Z_NEG, RobotCommand.RZ_NEG),
    8: (RobotCommand.SAVE_POSE, RobotCommand.SAVE_POSE),
    9: (RobotCommand.RETURN_TO_SAVED, RobotCommand.LOOP),
    10: (RobotCommand.VACUUM_ON, RobotCommand.VACUUM_OFF),
}


def map_command(label: Union[GestureLabel, int], button: bool) -> Optional[RobotCommand]:
    """Command for a communicative gesture under the given button state.

    Gestures beyond G10 are recognition-only and yield None. Non-communicative
    labels are a caller error.
    """
    if isinstance(label, GestureLabel):
        if label.kind != "communicative":
            raise ValueError(f"only communicative gestures map to commands, got {label.name}")
        index = label.index
    else:
        index = int(label)
        if index < 1:
            raise ValueError(f"gesture index must be >= 1, got {index}")
    row = _COMMAND_TABLE.get(index)
    if row is None:
        return None
    return row[0] if button else row[1]


@dataclass(frozen=True)
class CalibrationProfile:
    """Per-sensor raw min/max used to map raw glove units onto [0,1]."""

    raw_min: np.ndarray
    raw_max: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.raw_min, dtype=float)
        hi = np.asarray(self.raw_max, dtype=float)
        if lo.shape != (N_SENSORS,) or hi.shape != (N_SENSORS,):
            raise DimensionError(f"calibration needs {N_SENSORS} min and max values")
        if np.any(hi <= lo):
            raise ValueError("each sensor's raw max must exceed its raw min")
        object.__setattr__(self, "raw_min", lo)
        object.__setattr__(self, "raw_max", hi)

    @classmethod
    def identity(cls) -> "CalibrationProfile":
        return cls(np.zeros(N_SENSORS), np.ones(N_SENSORS))


def normalize(raw_frame, calib: CalibrationProfile) -> np.ndarray:
    """(raw - min) / (max - min) per sensor, clamped into [0,1]."""
    raw = np.asarray(raw_frame, dtype=float)
    if raw.shape != (N_SENSORS,):
        raise DimensionError(f"raw frame needs {N_SENSORS} values, got shape {raw.shape}")
    scaled = (raw - calib.raw_min) / (calib.raw_max - calib.raw_min)
    return np.clip(scaled, 0.0, 1.0)


class FrameHistory:
    """Bounded ring of recent frames, ordered by strictly increasing t."""

    def __init__(self, maxlen: int = 256):
        if maxlen < 1:
            raise ValueError("maxlen must be positive")
        self._frames: deque[SensorFrame] = deque(maxlen=maxlen)

    def __len__(self) -> int:
        return len(self._frames)

    def append(self, frame: SensorFrame) -> None:
        if self._frames and frame.t <= self._frames[-1].t:
            raise StreamOrderError(f"frame index {frame.t} does not follow {self._frames[-1].t}")
        self._frames.append(frame)

    def clear(self) -> None:
        self._frames.clear()

    @property
    def latest(self) -> Optional[SensorFrame]:
        return self._frames[-1] if self._frames else None

    def at_or_before(self, t: int) -> SensorFrame:
        """Newest frame with index <= t, or the earliest retained frame.

        The fallback covers both the stream start (t before frame 0) and
        requests older than the ring retains.
        """
        if not self._frames:
            raise MissingFrameError("history is empty")
        for f in reversed(self._frames):
            if f.t <= t:
                return f
        return self._frames[0]


def extract_feature(history: FrameHistory, t: int, n: int) -> np.ndarray:
    """44-entry vector: sensors at t-n followed by sensors at t.

    When t-n precedes the stream start the earliest retained frame stands in,
    so the pipeline is defined from the very first frame.
    """
    if n < 1:
        raise ValueError(f"lag must be >= 1, got {n}")
    now = history.at_or_before(t)
    if now.t != t:
        raise MissingFrameError(f"frame {t} not in history")
    past = history.at_or_before(t - n)
    return np.concatenate([past.sensors, now.sensors])


def one_hot(label: Union[GestureLabel, int], library_size: int) -> np.ndarray:
    """Target vector with 1.0 at the label's slot and 0.0 elsewhere."""
    index = label.index if isinstance(label, GestureLabel) else int(label)
    if not 1 <= index <= library_size:
        raise ValueError(f"label index {index} outside library of size {library_size}")
    vec = np.zeros(library_size)
    vec[index - 1] = 1.0
    return vec
