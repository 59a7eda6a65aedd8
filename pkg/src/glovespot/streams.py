"""Newline-delimited JSON stream files and ground-truth annotations.

One frame per line: {"t": int, "sensors": [22 floats], "button": bool,
"truth": optional string}. Truth strings are "warmup", "hold:G5", or
"transition:G5>G6" and mark what the hand was doing when the frame was made.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .domain import SensorFrame
from .errors import StreamOrderError


@dataclass(frozen=True)
class TruthTag:
    """Ground truth for one frame: warm-up, a held gesture, or a transition."""

    kind: str  # "warmup" | "hold" | "transition"
    label: Optional[str] = None  # held gesture, or transition source
    target: Optional[str] = None  # transition destination

    def __post_init__(self):
        if self.kind == "warmup":
            if self.label is not None or self.target is not None:
                raise ValueError("warmup carries no labels")
        elif self.kind == "hold":
            if not self.label or self.target is not None:
                raise ValueError("hold needs exactly a held label")
        elif self.kind == "transition":
            if not self.label or not self.target:
                raise ValueError("transition needs source and destination labels")
        else:
            raise ValueError(f"unknown truth kind {self.kind!r}")

    @property
    def text(self) -> str:
        if self.kind == "warmup":
            return "warmup"
        if self.kind == "hold":
            return f"hold:{self.label}"
        return f"transition:{self.label}>{self.target}"

    @classmethod
    def warmup(cls) -> "TruthTag":
        return cls("warmup")

    @classmethod
    def hold(cls, label: str) -> "TruthTag":
        return cls("hold", label)

    @classmethod
    def transition(cls, source: str, target: str) -> "TruthTag":
        return cls("transition", source, target)

    @classmethod
    def parse(cls, text: str) -> "TruthTag":
        if text == "warmup":
            return cls.warmup()
        if text.startswith("hold:"):
            return cls.hold(text[len("hold:"):])
        if text.startswith("transition:"):
            body = text[len("transition:"):]
            source, sep, target = body.partition(">")
            if not sep:
                raise ValueError(f"malformed transition truth {text!r}")
            return cls.transition(source, target)
        raise ValueError(f"cannot parse truth string {text!r}")


# A stream is handled in memory as a list of (frame, truth-or-None) pairs.
StreamItem = tuple[SensorFrame, Optional[TruthTag]]


def frame_to_obj(frame: SensorFrame, truth: Optional[TruthTag] = None) -> dict:
    """JSON-ready dict for one frame line."""
    obj = {"t": int(frame.t), "sensors": [float(v) for v in frame.sensors], "button": bool(frame.button)}
    if truth is not None:
        obj["truth"] = truth.text
    return obj


def obj_to_frame(obj: dict) -> StreamItem:
    """Parse one frame line object back into (SensorFrame, truth)."""
    if not isinstance(obj, dict):
        raise ValueError(f"stream line must be a JSON object, got {type(obj).__name__}")
    for key in ("t", "sensors"):
        if key not in obj:
            raise ValueError(f"stream line missing field {key!r}")
    frame = SensorFrame(t=int(obj["t"]), sensors=obj["sensors"], button=bool(obj.get("button", False)))
    truth_text = obj.get("truth")
    truth = TruthTag.parse(truth_text) if truth_text is not None else None
    return frame, truth


def write_stream(path: Union[str, Path], items: Iterable[StreamItem]) -> int:
    """Write (frame, truth) pairs as NDJSON; returns the line count."""
    path = Path(path)
    count = 0
    with path.open("w") as fh:
        for frame, truth in items:
            fh.write(json.dumps(frame_to_obj(frame, truth)) + "\n")
            count += 1
    return count


def read_stream(path: Union[str, Path]) -> list[StreamItem]:
    """Read an NDJSON stream file, enforcing strictly increasing frame indices."""
    path = Path(path)
    items: list[StreamItem] = []
    last_t = -1
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            frame, truth = obj_to_frame(obj)
            if frame.t <= last_t:
                raise StreamOrderError(f"{path}:{lineno}: frame index {frame.t} does not follow {last_t}")
            last_t = frame.t
            items.append((frame, truth))
    return items
