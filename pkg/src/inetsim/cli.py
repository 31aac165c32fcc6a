"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .errors import ConfigError, DataError

STAGE_COMMANDS = {
    "extract": ("extract",),
    "features": ("features",),
    "compare": ("compare",),
    "baseline": ("baseline",),
    "analyze": ("analyze",),
    "report": ("report",),
    "run": pipeline.STAGES,
}


def _measures(text):
    return [m.strip() for m in text.split(",") if m.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inetsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGE_COMMANDS:
        p = sub.add_parser(name, help="run all stages" if name == "run" else f"run the {name} stage")
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="output directory (relative to the config file)")
        p.add_argument("--measures", type=_measures,
                       help="comma-separated subset of ges,ejs,deltacon,cgs,sv1,sv2,sv3")
        p.add_argument("--jobs", type=int, help="worker processes")
    fx = sub.add_parser("fixture", help="write a synthetic fixture corpus")
    fx.add_argument("--preset", choices=sorted(_presets()), default="twins")
    fx.add_argument("--spec", help="JSON FixtureSpec overrides")
    fx.add_argument("--out", required=True)
    return parser


def _presets():
    from .fixtures import PRESETS

    return PRESETS


def _fixture(args):
    import dataclasses

    from .fixtures import FixtureSpec, generate

    spec = dataclasses.asdict(_presets()[args.preset])
    if args.spec:
        try:
            spec.update(json.loads(args.spec))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--spec is not valid JSON: {exc}") from None
    try:
        fs = FixtureSpec(**spec)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    for path in generate(fs, args.out):
        print(path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "fixture":
            _fixture(args)
            return 0
        out = str(Path(args.out).resolve()) if args.out else None
        cfg = pipeline.load_config(args.config, seed=args.seed, out=out,
                                   measures=args.measures, jobs=args.jobs)
        manifest = pipeline.run(cfg, STAGE_COMMANDS[args.command])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    for stage in STAGE_COMMANDS[args.command]:
        print(f"{stage}: {manifest.status.get(stage)}")
    for key, value in sorted(manifest.counters.items()):
        print(f"  {key} = {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
