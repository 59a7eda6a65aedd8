"""Deterministic synthetic glove streams: templates, scripted sequences, noise.

Templates are random well-separated poses in the unit 22-cube. A scenario
script holds each pose for a while and moves linearly between consecutive
poses, with seeded Gaussian jitter on every frame. A confusable triplet
relocates one template onto another pair's transition path, so the moving
hand passes close to a third gesture mid-transition. Non-gesture classes are
harvested from annotated transitions at evenly spaced interior frames.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .domain import N_SENSORS, GestureLabel, SensorFrame
from .errors import GenerationError, HarvestError
from .streams import StreamItem, TruthTag

TEMPLATE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class GestureTemplate:
    """Canonical hand shape for one communicative gesture."""

    label: int  # communicative index, 1-based
    pose: np.ndarray  # 22 values in [0,1]
    name: str = ""

    def __post_init__(self):
        pose = np.asarray(self.pose, dtype=float)
        if pose.shape != (N_SENSORS,):
            raise GenerationError(f"template pose needs {N_SENSORS} values, got shape {pose.shape}")
        if np.any(pose < 0.0) or np.any(pose > 1.0):
            raise GenerationError("template pose values must lie in [0,1]")
        if self.label < 1:
            raise GenerationError(f"template label must be >= 1, got {self.label}")
        object.__setattr__(self, "pose", pose)
        if not self.name:
            object.__setattr__(self, "name", f"G{self.label}")


@dataclass(frozen=True)
class ScriptStep:
    """One scripted hold: which gesture and for how many frames."""

    label: str
    hold: int

    def __post_init__(self):
        GestureLabel.parse(self.label)
        if self.hold < 1:
            raise ValueError(f"hold frames must be >= 1, got {self.hold}")


@dataclass(frozen=True)
class ScenarioScript:
    """Declarative recipe for a synthetic session.

    Holds are fixed per step; each transition duration is drawn from the
    inclusive transition_frames range. button_plan gives one button state per
    step (default all off) and repeats across repetitions.
    """

    steps: tuple[ScriptStep, ...]
    transition_frames: tuple[int, int] = (10, 30)
    noise_sigma: float = 0.01
    repetitions: int = 1
    seed: int = 0
    button_plan: Optional[tuple[bool, ...]] = None

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ValueError("script needs at least one step")
        object.__setattr__(self, "steps", steps)
        lo, hi = self.transition_frames
        if not (1 <= lo <= hi):
            raise ValueError(f"transition range must satisfy 1 <= min <= max, got {self.transition_frames}")
        object.__setattr__(self, "transition_frames", (int(lo), int(hi)))
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.button_plan is not None:
            plan = tuple(bool(b) for b in self.button_plan)
            if len(plan) != len(steps):
                raise ValueError(f"button_plan length {len(plan)} != steps length {len(steps)}")
            object.__setattr__(self, "button_plan", plan)


@dataclass
class AnnotatedStream:
    """Frames plus parallel per-frame ground truth."""

    frames: list[SensorFrame]
    truth: list[TruthTag]

    def __post_init__(self):
        if len(self.frames) != len(self.truth):
            raise ValueError("frames and truth must have equal length")

    def __len__(self) -> int:
        return len(self.frames)

    def items(self) -> list[StreamItem]:
        return list(zip(self.frames, self.truth))


def make_templates(count: int, seed: int, min_separation: float = 1.5) -> list[GestureTemplate]:
    """Sample `count` poses so every pair is at least min_separation apart.

    Seeded rejection sampling in the unit 22-cube; deterministic per seed.
    Raises GenerationError when the separation cannot be met within the
    attempt budget.
    """
    if count < 1:
        raise GenerationError(f"count must be >= 1, got {count}")
    if min_separation <= 0:
        raise GenerationError("min_separation must be positive")
    rng = np.random.default_rng(seed)
    poses: list[np.ndarray] = []
    budget = 10000 * count
    attempts = 0
    while len(poses) < count:
        if attempts >= budget:
            raise GenerationError(
                f"could not place {count} poses with min_separation {min_separation} "
                f"in {budget} attempts; try a smaller separation"
            )
        attempts += 1
        cand = rng.uniform(0.0, 1.0, N_SENSORS)
        if all(np.linalg.norm(cand - p) >= min_separation for p in poses):
            poses.append(cand)
    return [GestureTemplate(label=i + 1, pose=p) for i, p in enumerate(poses)]


def make_confusable_triplet(
    templates: Sequence[GestureTemplate],
    a: int,
    b: int,
    c: int,
    tightness: float = 0.2,
    min_separation: float = 1.5,
) -> list[GestureTemplate]:
    """Relocate template c next to the midpoint of the a-to-b segment.

    The new pose sits exactly `tightness` from the midpoint, along the a-to-b
    direction, so a linear a->b transition passes within tightness of c.
    Separation against all templates other than a and b is re-verified.
    """
    if len({a, b, c}) != 3:
        raise GenerationError(f"triplet labels must be distinct, got {(a, b, c)}")
    by_label = {t.label: t for t in templates}
    for lbl in (a, b, c):
        if lbl not in by_label:
            raise GenerationError(f"label G{lbl} not present in templates")
    pa, pb = by_label[a].pose, by_label[b].pose
    mid = 0.5 * (pa + pb)
    gap = np.linalg.norm(pb - pa)
    if tightness < 0 or tightness >= gap / 2:
        raise GenerationError(f"tightness must be in [0, {gap / 2:.3f}) for this pair, got {tightness}")
    direction = (pb - pa) / gap if gap > 0 else np.zeros(N_SENSORS)

    placed = None
    for sign in (1.0, -1.0):
        cand = mid + sign * tightness * direction
        if np.any(cand < 0.0) or np.any(cand > 1.0):
            continue
        others = [t.pose for t in templates if t.label not in (a, b, c)]
        if all(np.linalg.norm(cand - p) >= min_separation for p in others):
            placed = cand
            break
    if placed is None:
        raise GenerationError(
            f"relocating G{c} near the G{a}->G{b} midpoint breaks min_separation {min_separation}"
        )
    out = []
    for t in templates:
        if t.label == c:
            out.append(GestureTemplate(label=t.label, pose=placed, name=t.name))
        else:
            out.append(t)
    return out


def _template_index(templates: Sequence[GestureTemplate]) -> dict[str, np.ndarray]:
    return {t.name: t.pose for t in templates}


def generate_stream(script: ScenarioScript, templates: Sequence[GestureTemplate]) -> AnnotatedStream:
    """Render a script into an annotated frame stream.

    Each step contributes hold frames at its pose; between consecutive steps a
    seeded duration is drawn from the script's transition range and the pose
    moves linearly, strictly between the two endpoints. Seeded Gaussian noise
    is added to every frame and the result clamped to [0,1]. Frame indices run
    consecutively from 0. The button switches when the new hold begins.
    """
    poses = _template_index(templates)
    plan = script.button_plan or tuple(False for _ in script.steps)
    sequence = []
    for _ in range(script.repetitions):
        sequence.extend((step.label, step.hold, btn) for step, btn in zip(script.steps, plan))
    for label, _, _ in sequence:
        if label not in poses:
            raise GenerationError(f"no template for script label {label!r}")

    rng = np.random.default_rng(script.seed)
    lo, hi = script.transition_frames
    sigma = script.noise_sigma
    frames: list[SensorFrame] = []
    truth: list[TruthTag] = []
    t = 0

    def emit(pose: np.ndarray, tag: TruthTag, button: bool) -> None:
        nonlocal t
        if sigma > 0:
            pose = pose + rng.normal(0.0, sigma, N_SENSORS)
        frames.append(SensorFrame(t=t, sensors=np.clip(pose, 0.0, 1.0), button=button))
        truth.append(tag)
        t += 1

    prev_label: Optional[str] = None
    prev_button = False
    for label, hold, button in sequence:
        pose = poses[label]
        if prev_label is not None:
            duration = int(rng.integers(lo, hi, endpoint=True))
            start = poses[prev_label]
            tag = TruthTag.transition(prev_label, label)
            for j in range(1, duration + 1):
                frac = j / (duration + 1)
                emit(start + frac * (pose - start), tag, prev_button)
        tag = TruthTag.hold(label)
        for _ in range(hold):
            emit(pose, tag, button)
        prev_label, prev_button = label, button
    return AnnotatedStream(frames=frames, truth=truth)


def transition_segments(stream: AnnotatedStream) -> list[tuple[str, str, int, int]]:
    """Contiguous transition runs as (source, target, first_index, last_index)."""
    segs = []
    i = 0
    n = len(stream)
    while i < n:
        tag = stream.truth[i]
        if tag.kind == "transition":
            j = i
            while j + 1 < n and stream.truth[j + 1] == tag:
                j += 1
            segs.append((tag.label, tag.target, i, j))
            i = j + 1
        else:
            i += 1
    return segs


def harvest_non_gestures(
    stream: AnnotatedStream,
    transition_specs: Sequence[tuple[str, str, int]],
    lag: int,
    samples_per_transition: Optional[int] = None,
) -> list[tuple[np.ndarray, int]]:
    """Collect lag-paired features from named transitions as non-gesture classes.

    Each spec (source, target, count) contributes `count` distinct classes,
    sampled at evenly spaced interior frames of every matching transition run
    (fractions 1/(count+1) .. count/(count+1)). samples_per_transition caps how
    many matching runs are used per spec (None means all). Class indices are
    1-based and assigned in spec order. Feature vectors pair the frame at the
    sampled position with the frame lag steps earlier, exactly as the online
    pipeline would see them.
    """
    if lag < 1:
        raise HarvestError(f"lag must be >= 1, got {lag}")
    segs = transition_segments(stream)
    out: list[tuple[np.ndarray, int]] = []
    base = 0
    for source, target, count in transition_specs:
        if count < 1:
            raise HarvestError(f"spec count must be >= 1, got {count}")
        matching = [s for s in segs if s[0] == source and s[1] == target]
        if not matching:
            raise HarvestError(f"no {source}->{target} transition in stream")
        if samples_per_transition is not None:
            matching = matching[:samples_per_transition]
        for _, _, first, last in matching:
            length = last - first + 1
            for i in range(count):
                pos = first + ((length - 1) * (i + 1)) // (count + 1)
                now = stream.frames[pos]
                past = stream.frames[max(pos - lag, 0)]
                feature = np.concatenate([past.sensors, now.sensors])
                out.append((feature, base + i + 1))
        base += count
    return out


# ---------------------------------------------------------------------------
# File formats


def templates_to_obj(templates: Sequence[GestureTemplate], seed: Optional[int] = None,
                     min_separation: Optional[float] = None) -> dict:
    obj = {
        "format_version": TEMPLATE_FORMAT_VERSION,
        "templates": [
            {"label": t.label, "name": t.name, "pose": [float(v) for v in t.pose]}
            for t in templates
        ],
    }
    if seed is not None:
        obj["seed"] = int(seed)
    if min_separation is not None:
        obj["min_separation"] = float(min_separation)
    return obj


def obj_to_templates(obj: dict) -> list[GestureTemplate]:
    if not isinstance(obj, dict) or "templates" not in obj:
        raise GenerationError("template document must be a JSON object with a 'templates' field")
    out = []
    for entry in obj["templates"]:
        out.append(GestureTemplate(label=int(entry["label"]), pose=entry["pose"], name=entry.get("name", "")))
    return out


def save_templates(templates: Sequence[GestureTemplate], path: Union[str, Path], **meta) -> None:
    Path(path).write_text(json.dumps(templates_to_obj(templates, **meta)) + "\n")


def load_templates(path: Union[str, Path]) -> list[GestureTemplate]:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GenerationError(f"{path} is not valid JSON: {exc}") from exc
    return obj_to_templates(obj)


def script_to_obj(script: ScenarioScript) -> dict:
    obj = {
        "steps": [{"label": s.label, "hold": s.hold} for s in script.steps],
        "transition": list(script.transition_frames),
        "sigma": script.noise_sigma,
        "reps": script.repetitions,
        "seed": script.seed,
    }
    if script.button_plan is not None:
        obj["button"] = list(script.button_plan)
    return obj


def obj_to_script(obj: dict) -> ScenarioScript:
    if not isinstance(obj, dict) or "steps" not in obj:
        raise ValueError("scenario script must be a JSON object with a 'steps' field")
    steps = tuple(ScriptStep(label=s["label"], hold=int(s.get("hold", 30))) for s in obj["steps"])
    return ScenarioScript(
        steps=steps,
        transition_frames=tuple(obj.get("transition", (10, 30))),
        noise_sigma=float(obj.get("sigma", 0.01)),
        repetitions=int(obj.get("reps", 1)),
        seed=int(obj.get("seed", 0)),
        button_plan=tuple(obj["button"]) if "button" in obj else None,
    )


def save_script(script: ScenarioScript, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(script_to_obj(script)) + "\n")


def load_script(path: Union[str, Path]) -> ScenarioScript:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    return obj_to_script(obj)
