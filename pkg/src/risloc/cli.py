"""Command-line entry points: run sweeps, validate configs, dump scenes.

Usage:
    risloc simulate --config sweep.json [--out results.csv] [--trials N]
                    [--seed S] [--threads T] [--override key=value ...]
    risloc validate --config sweep.json
    risloc scene --config sweep.json --render [--out scene.json]
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .errors import ConfigError, SimulationError
from .harness import (
    config_from_dict,
    derive_seed,
    random_scene,
    run_sweep,
    write_csv,
)


def _apply_override(data: dict, dotted: str, raw: str) -> None:
    """Set a dotted config path to a JSON-parsed (or bare string) value."""
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{dotted}: cannot descend into non-object")
    node[keys[-1]] = value


def _load_with_overrides(args) -> "SweepConfig":
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    for item in args.override or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, raw = item.split("=", 1)
        _apply_override(data, key, raw)
    config = config_from_dict(data)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if getattr(args, "out", None):
        config = replace(config, output_csv=args.out)
    return config


def _cmd_simulate(args) -> int:
    config = _load_with_overrides(args)
    if config.output_csv:
        # fail on an unwritable destination before any computation
        try:
            with open(config.output_csv, "a", encoding="utf-8"):
                pass
        except OSError as exc:
            print(f"error: cannot write {config.output_csv}: {exc}", file=sys.stderr)
            return 2
    rows = run_sweep(
        config,
        threads=args.threads,
        progress=(lambda row: print(row.to_csv(), flush=True)) if args.verbose else None,
    )
    out = config.output_csv
    if out:
        write_csv(rows, out, config)
        print(f"wrote {len(rows)} rows to {out}")
    else:
        from .harness import CSV_HEADER

        print(CSV_HEADER)
        for row in rows:
            print(row.to_csv())
    return 0


def _cmd_validate(args) -> int:
    try:
        _load_with_overrides(args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    print("ok")
    return 0


def _cmd_scene(args) -> int:
    config = _load_with_overrides(args)
    base = config.scenario
    k = config.k_axis[0]
    rng = np.random.default_rng(derive_seed(config.master_seed, 0, 0, 0, 0, 0))
    targets = random_scene(rng, k, base.layout, config.scene, base.f_samp, base.zc_length)
    scene = {
        "cell": [base.layout.cell_width, base.layout.cell_height],
        "ap": list(base.layout.p_ap),
        "ris": list(base.layout.p_ris),
        "pr": list(base.layout.p_pr),
        "ris_boresight_deg": base.layout.ris_boresight_deg,
        "targets": [list(t) for t in targets],
        "blockage_ap": base.blockage_ap,
        "blockage_targets": [0] * k,
    }
    text = json.dumps(scene, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote scene to {args.out}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risloc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo sweep")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    sim.add_argument("--trials", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--threads", type=int, default=1)
    sim.add_argument("--override", action="append", metavar="KEY=VALUE")
    sim.add_argument("--verbose", action="store_true")
    sim.set_defaults(func=_cmd_simulate)

    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("--config", required=True)
    val.add_argument("--trials", type=int, default=None)
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--override", action="append", metavar="KEY=VALUE")
    val.set_defaults(func=_cmd_validate)

    scene = sub.add_parser("scene", help="emit one generated scene as JSON")
    scene.add_argument("--config", required=True)
    scene.add_argument("--render", action="store_true")
    scene.add_argument("--out", default=None)
    scene.add_argument("--trials", type=int, default=None)
    scene.add_argument("--seed", type=int, default=None)
    scene.add_argument("--override", action="append", metavar="KEY=VALUE")
    scene.set_defaults(func=_cmd_scene)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
