"""Experiment harness: training-set assembly, streaming evaluation, scoring.

An experiment trains the cascade from synthetic templates, renders a long
scripted evaluation stream (a fixed gesture sequence repeated with fresh
noise), runs the spotter over it frame by frame, and scores each held gesture
instance against the per-frame truth channel.

Scoring taxonomy, per hold instance: recognized means the correct label was
active at least once inside the hold and no wrong label ever was; a wrong
label inside the hold, or a wrong-label run confined to the approach
transition, makes the instance a substitution (the wrong-label report is what
the operator's robot reacts to while the hand is still arriving); a hold with
no activity at all is a deletion. Emission runs inside transition windows are
additionally tabulated per transition, correct-label early fires included.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .domain import one_hot
from .errors import ExperimentError, GenerationError
from .estimator import GestureNetClassifier
from .spotter import CascadeModel, GestureSpotter, latency_probe
from .streams import TruthTag
from .synth import (
    AnnotatedStream,
    GestureTemplate,
    ScenarioScript,
    ScriptStep,
    generate_stream,
    harvest_non_gestures,
    make_confusable_triplet,
    make_templates,
)

# Evaluation order for the 10-gesture library.
SEQUENCE_10 = (8, 2, 3, 4, 5, 6, 7, 1, 9, 10)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full recipe for one training-plus-evaluation run.

    Defaults mirror the reference protocol: 20 training repetitions per
    gesture, 10000 epochs at learning_rate = momentum = 0.1, and a
    100-repetition evaluation sequence at 1% sensor noise. The confusable
    triplet plants G7 on the G5-to-G6 transition path so the characteristic
    mid-transition confusion exists to be measured.
    """

    library_size: int = 10
    lag: int = 1
    train_reps: int = 20
    epochs: int = 10000
    learning_rate: float = 0.1
    momentum: float = 0.1
    non_gesture_specs: tuple = ()
    eval_repetitions: int = 100
    noise_sigma: float = 0.01
    template_seed: int = 26
    train_seed: int = 101
    eval_seed: int = 202
    debounce_frames: int = 1
    accept_threshold: float = 0.5
    hold_frames: int = 30
    transition_frames: tuple = (10, 30)
    min_separation: float = 1.5
    confusable_triplet: bool = True
    triplet_tightness: float = 0.2
    hidden_layers: tuple = (44,)
    non_gesture_negatives: bool = True  # teach the rejector what gestures look like
    measure_latency: bool = False  # wall-time is non-deterministic; off by default

    def __post_init__(self):
        object.__setattr__(self, "non_gesture_specs",
                           tuple((str(a), str(b), int(c)) for a, b, c in self.non_gesture_specs))
        object.__setattr__(self, "transition_frames", tuple(int(v) for v in self.transition_frames))
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        if self.library_size < 1:
            raise ValueError("library_size must be >= 1")
        if self.confusable_triplet and self.library_size < 7:
            raise ValueError("the confusable triplet needs at least 7 gestures")
        if self.lag < 1 or self.train_reps < 1 or self.epochs < 1 or self.hold_frames < 1:
            raise ValueError("lag, train_reps, epochs, and hold_frames must be >= 1")
        if self.eval_repetitions < 0:
            raise ValueError("eval_repetitions must be >= 0")
        if not 0.0 <= self.learning_rate <= 1.0 or not 0.0 <= self.momentum <= 1.0:
            raise ValueError("learning_rate and momentum must lie in [0,1]")
        if not 0.0 < self.accept_threshold < 1.0:
            raise ValueError("accept_threshold must lie in (0,1)")
        if self.debounce_frames < 1:
            raise ValueError("debounce_frames must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")

    def config_hash(self) -> str:
        digest = hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode())
        return digest.hexdigest()[:12]

    def sequence(self) -> tuple:
        """Gesture order of one evaluation repetition."""
        if self.library_size == 10:
            return SEQUENCE_10
        order = np.random.default_rng(self.eval_seed).permutation(self.library_size) + 1
        return tuple(int(g) for g in order)


# Named experiment presets. test1: consecutive-frame pairing, no rejector.
# test2: lag-3 pairing so a mid-transition feature's halves disagree.
# test3: lag-3 plus three trained non-gesture classes. test4: the test3
# protocol on a 30-gesture library.
# Shared spotter operating point for the four protocols.  The threshold sits
# between the confidence of a matched pose pair (~0.99) and a half-matched one
# (~0.88); the debounce is tuned so transitions through the confusable pose
# activate it only when the walk lingers there longer than a typical crossing.
_OPERATING_POINT = {"accept_threshold": 0.9, "debounce_frames": 12}

_PRESETS = {
    "test1": {"lag": 1, **_OPERATING_POINT},
    "test2": {"lag": 3, **_OPERATING_POINT},
    "test3": {"lag": 3, "non_gesture_specs": (("G5", "G6", 2), ("G6", "G7", 1)),
              **_OPERATING_POINT},
    "test4": {"lag": 3, "non_gesture_specs": (("G5", "G6", 2), ("G6", "G7", 1)),
              "library_size": 30, **_OPERATING_POINT},
}
PRESET_NAMES = tuple(_PRESETS)


def preset_config(name: str, **overrides) -> ExperimentConfig:
    """Build one of the named evaluation protocols, with overrides applied."""
    if name not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return ExperimentConfig(**{**_PRESETS[name], **overrides})


def build_templates(config: ExperimentConfig) -> list[GestureTemplate]:
    templates = make_templates(config.library_size, seed=config.template_seed,
                               min_separation=config.min_separation)
    if config.confusable_triplet:
        templates = make_confusable_triplet(templates, 5, 6, 7, config.triplet_tightness,
                                            min_separation=config.min_separation)
    return templates


def build_training_set(templates: Sequence[GestureTemplate], config: ExperimentConfig):
    """Noisy lag-paired renders of each template, plus harvested non-gestures.

    Returns ((X_comm, T_comm), non) where non is None without specs and
    otherwise (X_non, T_non) over the harvested classes; when
    non_gesture_negatives is set, the communicative inputs are appended to the
    rejector's set with all-zero target rows.
    """
    by_label = {t.label: t for t in templates}
    for g in range(1, config.library_size + 1):
        if g not in by_label:
            raise GenerationError(f"missing template for G{g}")
    rng = np.random.default_rng(config.train_seed)
    rows, targets = [], []
    for g in range(1, config.library_size + 1):
        pose = by_label[g].pose
        for _ in range(config.train_reps):
            # a held pose straddles the lag window: both halves are the same
            # shape under independent sensor noise
            past = np.clip(pose + rng.normal(0.0, config.noise_sigma, pose.size), 0.0, 1.0)
            now = np.clip(pose + rng.normal(0.0, config.noise_sigma, pose.size), 0.0, 1.0)
            rows.append(np.concatenate([past, now]))
            targets.append(one_hot(g, config.library_size))
    comm = (np.vstack(rows), np.vstack(targets))

    if not config.non_gesture_specs:
        return comm, None

    harvest_stream = generate_stream(_harvest_script(config), templates)
    samples = harvest_non_gestures(harvest_stream, config.non_gesture_specs, lag=config.lag)
    n_classes = sum(count for _, _, count in config.non_gesture_specs)
    X_non = np.vstack([feat for feat, _ in samples])
    T_non = np.vstack([one_hot(cls, n_classes) for _, cls in samples])
    if config.non_gesture_negatives:
        X_non = np.vstack([X_non, comm[0]])
        T_non = np.vstack([T_non, np.zeros((comm[0].shape[0], n_classes))])
    return comm, (X_non, T_non)


def _harvest_script(config: ExperimentConfig) -> ScenarioScript:
    """Hold sequence covering every transition named in the non-gesture specs."""
    path: list[str] = []
    for source, target, _ in config.non_gesture_specs:
        if not path or path[-1] != source:
            path.append(source)
        path.append(target)
    return ScenarioScript(
        steps=tuple(ScriptStep(label, config.hold_frames) for label in path),
        transition_frames=config.transition_frames,
        noise_sigma=config.noise_sigma,
        repetitions=config.train_reps,
        seed=config.train_seed + 1,
    )


@dataclass
class TrainedSystem:
    """Everything a live session needs: the cascade and its templates."""

    cascade: CascadeModel
    templates: list[GestureTemplate]
    comm_loss: list[float]
    non_loss: Optional[list[float]] = None


def _check_converged(loss_history: Sequence[float]) -> None:
    """Reject a run whose loss went non-finite; names the offending epoch."""
    for i, value in enumerate(loss_history):
        if not np.isfinite(value):
            raise ExperimentError(f"training diverged at epoch {i + 1}")


def _fit_network(X, T, config: ExperimentConfig, seed: int):
    est = GestureNetClassifier(
        hidden_layers=config.hidden_layers,
        learning_rate=config.learning_rate,
        momentum=config.momentum,
        epochs=config.epochs,
        seed=seed,
        shuffle=True,
    )
    est.fit(X, T)
    _check_converged(est.loss_history_)
    return est.network_, est.loss_history_


def train_cascade(config: ExperimentConfig) -> TrainedSystem:
    """Build templates, assemble the training sets, and fit both networks."""
    templates = build_templates(config)
    comm, non = build_training_set(templates, config)
    net_comm, comm_loss = _fit_network(comm[0], comm[1], config, seed=config.train_seed)
    net_non, non_loss = (None, None)
    if non is not None:
        net_non, non_loss = _fit_network(non[0], non[1], config, seed=config.train_seed + 7)
    cascade = CascadeModel(
        net_comm=net_comm,
        net_non=net_non,
        lag=config.lag,
        accept_threshold=config.accept_threshold,
        debounce_frames=config.debounce_frames,
    )
    return TrainedSystem(cascade=cascade, templates=templates,
                         comm_loss=comm_loss, non_loss=non_loss)


# ---------------------------------------------------------------------------
# Scoring


@dataclass
class GestureTally:
    instances: int = 0
    recognized: int = 0
    substituted: int = 0
    deleted: int = 0
    insertion_runs: int = 0  # label runs confined to this gesture's approach windows

    @property
    def rr(self) -> Optional[float]:
        if self.instances == 0:
            return None
        return 100.0 * self.recognized / self.instances


@dataclass
class TransitionTally:
    windows: int = 0
    windows_with_emission: int = 0  # windows where any command went out
    # windows where a command went out under a label that is neither the
    # window's source nor its target: the actuations a transition must not
    # cause (the flanking holds' own streams legitimately spill into the
    # window edges)
    windows_with_foreign_emission: int = 0
    runs: dict = field(default_factory=dict)  # label name -> confined-run count


@dataclass
class ScoreCard:
    per_gesture: dict  # gesture index -> GestureTally
    transitions: dict  # "G5>G6" -> TransitionTally

    def mean_rr(self) -> Optional[float]:
        rates = [t.rr for t in self.per_gesture.values() if t.rr is not None]
        if not rates:
            return None
        return float(np.mean(rates))


def _segments(truth: Sequence[TruthTag]) -> list[tuple]:
    """Maximal truth runs as (tag, start, end) in stream order."""
    segs = []
    i = 0
    while i < len(truth):
        j = i
        while j + 1 < len(truth) and truth[j + 1] == truth[i]:
            j += 1
        segs.append((truth[i], i, j))
        i = j + 1
    return segs


def score(
    active_labels: Sequence[Optional[int]],
    commands: Sequence,
    truth: Sequence[TruthTag],
    library_size: int,
    warmup_frames: int = 0,
) -> ScoreCard:
    """Tally the taxonomy over one annotated stream.

    active_labels holds the debounced communicative index in force at each
    frame (None otherwise); commands the emitted command per frame. The first
    warmup_frames frames, and any frames truth-tagged warmup, never count.
    """
    n = len(truth)
    if len(active_labels) != n or len(commands) != n:
        raise ValueError("active_labels, commands, and truth must share the frame axis")

    labels: list[Optional[int]] = list(active_labels)
    cmds = list(commands)
    for i in range(n):
        if i < warmup_frames or truth[i].kind == "warmup":
            labels[i] = None
            cmds[i] = None

    # maximal runs of a single active label
    runs: list[tuple[int, int, int]] = []  # (label, start, end)
    i = 0
    while i < n:
        if labels[i] is None:
            i += 1
            continue
        j = i
        while j + 1 < n and labels[j + 1] == labels[i]:
            j += 1
        runs.append((labels[i], i, j))
        i = j + 1

    per_gesture: dict[int, GestureTally] = {g: GestureTally() for g in range(1, library_size + 1)}
    transitions: dict[str, TransitionTally] = {}
    segs = _segments(truth)

    # per-transition tabulation, and substitution charges against the
    # following hold for wrong-label runs confined to its approach window
    charged: dict[int, bool] = {}  # hold segment index -> wrong approach run seen
    for k, (tag, start, end) in enumerate(segs):
        if tag.kind != "transition":
            continue
        key = f"{tag.label}>{tag.target}"
        tally = transitions.setdefault(key, TransitionTally())
        tally.windows += 1
        if any(c is not None for c in cmds[start:end + 1]):
            tally.windows_with_emission += 1
        source_index = int(tag.label[1:]) if tag.label.startswith("G") else None
        edge_labels = {source_index, int(tag.target[1:]) if tag.target.startswith("G") else None}
        if any(cmds[i] is not None and labels[i] not in edge_labels
               for i in range(start, end + 1)):
            tally.windows_with_foreign_emission += 1
        confined = [(lbl, s, e) for lbl, s, e in runs if s >= start and e <= end]
        for lbl, _, _ in confined:
            name = f"G{lbl}"
            tally.runs[name] = tally.runs.get(name, 0) + 1
        target_index = int(tag.target[1:]) if tag.target.startswith("G") else None
        if target_index in per_gesture:
            per_gesture[target_index].insertion_runs += len(confined)
        # a wrong label fired while the hand was still arriving: the upcoming
        # hold is what the operator lost to it
        wrong = [lbl for lbl, _, _ in confined if lbl != target_index]
        if wrong and k + 1 < len(segs) and segs[k + 1][0].kind == "hold":
            charged[k + 1] = True

    for k, (tag, start, end) in enumerate(segs):
        if tag.kind != "hold":
            continue
        g = int(tag.label[1:]) if tag.label.startswith("G") else None
        if g not in per_gesture:
            continue
        tally = per_gesture[g]
        tally.instances += 1
        window = labels[start:end + 1]
        correct = any(lbl == g for lbl in window)
        wrong_inside = any(lbl is not None and lbl != g for lbl in window)
        if wrong_inside or charged.get(k, False):
            tally.substituted += 1
        elif correct:
            tally.recognized += 1
        else:
            tally.deleted += 1
    return ScoreCard(per_gesture=per_gesture, transitions=transitions)


# ---------------------------------------------------------------------------
# End-to-end evaluation


def _eval_script(config: ExperimentConfig) -> ScenarioScript:
    steps = tuple(ScriptStep(f"G{g}", config.hold_frames) for g in config.sequence())
    return ScenarioScript(
        steps=steps,
        transition_frames=config.transition_frames,
        noise_sigma=config.noise_sigma,
        repetitions=config.eval_repetitions,
        seed=config.eval_seed,
    )


def spot_stream(system: TrainedSystem, stream: AnnotatedStream):
    """Run the spotter over a stream; returns per-frame (active_label, command)."""
    spotter = GestureSpotter(system.cascade)
    active: list[Optional[int]] = []
    commands = []
    for frame in stream.frames:
        _, command = spotter.step(frame)
        active.append(spotter.active_label)
        commands.append(command)
    return active, commands


@dataclass
class EvalReport:
    """Scored outcome of one experiment, JSON- and Markdown-renderable."""

    config: ExperimentConfig
    sequence: tuple
    card: ScoreCard
    latency: dict
    frames_scored: int

    @property
    def mean_rr(self) -> Optional[float]:
        return self.card.mean_rr()

    def gesture_rows(self) -> list[dict]:
        rows = []
        for g in self.sequence:
            tally = self.card.per_gesture[g]
            rows.append({
                "label": f"G{g}",
                "rr": tally.rr,
                "instances": tally.instances,
                "recognized": tally.recognized,
                "substitutions": tally.substituted,
                "insertions": tally.insertion_runs,
                "deletions": tally.deleted,
            })
        return rows

    def to_obj(self) -> dict:
        # tuples flattened to lists so the document equals its JSON round trip
        config_obj = json.loads(json.dumps(asdict(self.config)))
        return {
            "config": config_obj,
            "config_hash": self.config.config_hash(),
            "sequence": [f"G{g}" for g in self.sequence],
            "per_gesture": self.gesture_rows(),
            "mean_rr": self.mean_rr,
            "transitions": {
                key: {
                    "windows": t.windows,
                    "windows_with_emission": t.windows_with_emission,
                    "windows_with_foreign_emission": t.windows_with_foreign_emission,
                    "runs": dict(sorted(t.runs.items())),
                }
                for key, t in sorted(self.card.transitions.items())
            },
            "latency": self.latency,
            "frames_scored": self.frames_scored,
        }


def evaluate(system: TrainedSystem, config: ExperimentConfig) -> EvalReport:
    """Stream the evaluation sequence through the spotter and score it."""
    if config.eval_repetitions == 0:
        card = ScoreCard(per_gesture={g: GestureTally() for g in range(1, config.library_size + 1)},
                         transitions={})
        return EvalReport(config=config, sequence=config.sequence(), card=card,
                          latency={"mean_ms": None, "p99_ms": None}, frames_scored=0)
    stream = generate_stream(_eval_script(config), system.templates)
    active, commands = spot_stream(system, stream)
    card = score(active, commands, stream.truth, config.library_size, warmup_frames=config.lag)
    latency = {"mean_ms": None, "p99_ms": None}
    if config.measure_latency:
        probe = latency_probe(system.cascade, 10000, seed=config.eval_seed)
        latency = {"mean_ms": probe["mean_ms"], "p99_ms": probe["p99_ms"]}
    return EvalReport(config=config, sequence=config.sequence(), card=card,
                      latency=latency, frames_scored=len(stream))


def run_experiment(config: ExperimentConfig) -> EvalReport:
    """Train the cascade and evaluate it under one config."""
    return evaluate(train_cascade(config), config)


# ---------------------------------------------------------------------------
# Report rendering


def emit_report(report: EvalReport, fmt: str = "json") -> str:
    """Render a report as a JSON document or a Markdown table."""
    if fmt == "json":
        return json.dumps(report.to_obj(), sort_keys=True, indent=2) + "\n"
    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [
        "# Recognition report",
        "",
        f"Config hash: `{report.config.config_hash()}`",
        "",
        "| Gesture | RR [%] | Instances | Substitutions | Insertions | Deletions |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for row in report.gesture_rows():
        if row["instances"] == 0:
            continue
        lines.append(
            f"| {row['label']} | {row['rr']:.1f} | {row['instances']} | {row['substitutions']} "
            f"| {row['insertions']} | {row['deletions']} |"
        )
    if report.mean_rr is not None:
        lines.append(f"| **Mean** | **{report.mean_rr:.1f}** | | | | |")
    if report.card.transitions:
        lines += ["", "## Transition windows", "",
                  "| Transition | Windows | With emission | Foreign emission | Confined runs |",
                  "| --- | --- | --- | --- | --- |"]
        for key, t in sorted(report.card.transitions.items()):
            runs = ", ".join(f"{k}:{v}" for k, v in sorted(t.runs.items())) or "none"
            lines.append(f"| {key} | {t.windows} | {t.windows_with_emission} "
                         f"| {t.windows_with_foreign_emission} | {runs} |")
    return "\n".join(lines) + "\n"


def write_report(report: EvalReport, results_dir: Union[str, Path]) -> Path:
    """Write report.json and report.md under a config-hash-named directory."""
    out = Path(results_dir) / f"exp-{report.config.config_hash()}"
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(emit_report(report, "json"))
    (out / "report.md").write_text(emit_report(report, "markdown"))
    return out
