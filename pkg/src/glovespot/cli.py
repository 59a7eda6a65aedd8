"""Command-line surface: generate data, train, evaluate, replay, serve.

Exit codes: 0 success, 1 usage error, 2 runtime error (missing or malformed
files, failed experiments). The `spot` subcommand replays a recorded stream
through the same session driver the live service uses, so its decision trace
matches a served session fed the same frames.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .errors import GlovespotError
from .harness import (
    ExperimentConfig,
    preset_config,
    run_experiment,
    train_cascade,
    write_report,
)
from .model_io import load_cascade, save_cascade
from .session import SessionDriver
from .streams import read_stream, write_stream
from .synth import (
    generate_stream,
    load_script,
    load_templates,
    make_confusable_triplet,
    make_templates,
    save_templates,
)


def load_experiment_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig JSON file; a "preset" key names a base recipe."""
    obj = json.loads(Path(path).read_text())
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    preset = obj.pop("preset", None)
    try:
        if preset is not None:
            return preset_config(preset, **obj)
        return ExperimentConfig(**obj)
    except TypeError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def cmd_gen_templates(args) -> int:
    templates = make_templates(args.count, seed=args.seed, min_separation=args.min_separation)
    if args.confusable:
        templates = make_confusable_triplet(templates, 5, 6, 7, args.tightness,
                                            min_separation=args.min_separation)
    save_templates(templates, args.out, seed=args.seed)
    print(f"wrote {len(templates)} templates to {args.out}")
    return 0


def cmd_gen_stream(args) -> int:
    templates = load_templates(args.templates)
    script = load_script(args.script)
    if args.seed is not None:
        script = dataclasses.replace(script, seed=args.seed)
    stream = generate_stream(script, templates)
    count = write_stream(args.out, stream.items())
    print(f"wrote {count} frames to {args.out}")
    return 0


def cmd_train(args) -> int:
    config = load_experiment_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, train_seed=args.seed)
    system = train_cascade(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_cascade(system.cascade, out / "cascade.json")
    save_templates(system.templates, out / "templates.json", seed=config.template_seed)
    print(f"trained cascade written to {out / 'cascade.json'}")
    print(f"final loss: comm {system.comm_loss[-1]:.6f}"
          + (f", non {system.non_loss[-1]:.6f}" if system.non_loss else ""))
    return 0


def cmd_eval(args) -> int:
    config = load_experiment_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, eval_seed=args.seed)
    report = run_experiment(config)
    out = write_report(report, args.out)
    mean = "n/a (no instances)" if report.mean_rr is None else f"{report.mean_rr:.2f}%"
    print(f"mean RR: {mean}")
    print(f"report written to {out}")
    return 0


def cmd_spot(args) -> int:
    cascade = load_cascade(args.model)
    items = read_stream(args.stream)
    driver = SessionDriver(cascade)
    sink = open(args.out, "w") if args.out else sys.stdout
    try:
        for frame, _ in items:
            sink.write(json.dumps(driver.process(frame)) + "\n")
    finally:
        if sink is not sys.stdout:
            sink.close()
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import BIND_ENV_VAR, DEFAULT_BIND, create_app, parse_bind

    cascade = load_cascade(args.model)
    templates = load_templates(args.templates) if args.templates else None
    bind = args.bind or os.environ.get(BIND_ENV_VAR) or DEFAULT_BIND
    host, port = parse_bind(bind)
    app = create_app(cascade, templates)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glovespot",
                                     description="continuous glove-gesture spotting toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-templates", help="sample a separated gesture template library")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=26)
    p.add_argument("--min-separation", type=float, default=1.5)
    p.add_argument("--tightness", type=float, default=0.2)
    p.add_argument("--no-confusable", dest="confusable", action="store_false",
                   help="skip planting G7 on the G5-G6 transition path")
    p.add_argument("--out", required=True, help="output templates JSON file")
    p.set_defaults(func=cmd_gen_templates)

    p = sub.add_parser("gen-stream", help="render a scripted stream to NDJSON")
    p.add_argument("--templates", required=True)
    p.add_argument("--script", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the script's noise seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_stream)

    p = sub.add_parser("train", help="train a cascade from an experiment config")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    p.add_argument("--seed", type=int, default=None, help="override train_seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="run a full experiment and write its report")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    p.add_argument("--seed", type=int, default=None, help="override eval_seed")
    p.add_argument("--out", default="results", help="results directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("spot", help="replay a recorded stream, one decision line per frame")
    p.add_argument("--model", required=True, help="cascade JSON file")
    p.add_argument("--stream", required=True, help="NDJSON stream file")
    p.add_argument("--out", default=None, help="decision trace file (default stdout)")
    p.set_defaults(func=cmd_spot)

    p = sub.add_parser("serve", help="serve the live spotting session endpoint")
    p.add_argument("--model", required=True, help="cascade JSON file")
    p.add_argument("--templates", default=None, help="templates JSON for the UI")
    p.add_argument("--bind", default=None,
                   help="host:port (default: GLOVESPOT_BIND env var, else 127.0.0.1:8765)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 for --help
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except GlovespotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
