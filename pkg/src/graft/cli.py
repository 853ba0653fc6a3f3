"""Command-line entry point: synth, ingest, transfer, baseline, eval, sweep.

Every subcommand writes exactly the files named by its --out flags, keeps all
randomness behind --seed, and is byte-reproducible given identical flags.
Exit codes: 0 success, 1 pipeline/file error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import evalkit, synthbench
from .config import TransferConfig, _parse_value, build_config, parse_config_file
from .errors import GraftError
from .hetgraph import read_graph, write_graph
from .ingest import accumulate, read_events, snapshot_series
from .selection import metapath_distance_matrices
from .transfer import run_transfer, write_report

log = logging.getLogger(__name__)

SWEEP_CSV_VERSION = "# sweep_csv v1"
METHODS = ("transfer", "nt", "dt", "rw")

_CONFIG_KEYS = (
    "theta", "lam", "lam_selection", "lam_construction", "ridge", "d1", "d2",
    "z_entity", "z_edge", "max_path_len", "mu", "distance_cap",
    "selection_tol", "selection_max_iters", "construction_tol",
    "construction_max_iters", "eta0", "seed",
)

# paper-protocol defaults for the variables a sweep axis does not vary
_SWEEP_FIXED = {
    "size": {"n_target": 900, "dynamic_factor": 0.1, "maturity": 0.5},
    "dynfactor": {"n_source": 1200, "n_target": 600, "maturity": 0.5},
    "maturity": {"n_source": 1200, "n_target": 600, "dynamic_factor": 0.2},
    "mu": {"n_source": 1200, "n_target": 600, "dynamic_factor": 0.2, "maturity": 0.5},
}


def _config_value(key: str):
    def parse(text: str):
        try:
            return _parse_value(key, text)
        except GraftError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline configuration")
    for key in _CONFIG_KEYS:
        group.add_argument(
            f"--{key.replace('_', '-')}",
            dest=f"cfg_{key}",
            type=_config_value(key),
            default=argparse.SUPPRESS,
            metavar="V",
            help=f"override config key {key}",
        )


def _build_config_from_args(args: argparse.Namespace) -> TransferConfig:
    file_overrides = {}
    config_path = getattr(args, "config", None)
    if config_path:
        file_overrides = parse_config_file(Path(config_path).read_text(encoding="utf-8"))
    flag_overrides = {
        key: getattr(args, f"cfg_{key}")
        for key in _CONFIG_KEYS
        if hasattr(args, f"cfg_{key}")
    }
    return build_config(file_overrides, flag_overrides)


def _cmd_synth(args) -> int:
    spec = synthbench.SynthSpec(
        n_source=args.n_source,
        n_target=args.n_target,
        dynamic_factor=args.dynamic_factor,
        maturity=args.maturity,
        n_types=args.n_types,
        edge_prob=args.edge_prob,
        seed=args.seed,
    )
    gs, gt_truth, gt_hat = synthbench.generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(gs, out / "source.graph")
    write_graph(gt_truth, out / "target_truth.graph")
    write_graph(gt_hat, out / "target_partial.graph")
    meta = {"spec": spec.to_dict(), "measured": synthbench.measured_stats(gs, gt_truth, gt_hat)}
    (out / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_ingest(args) -> int:
    events = read_events(args.events)
    if args.window is None:
        write_graph(accumulate(events), args.out)
        return 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, snap in enumerate(snapshot_series(events, args.window)):
        write_graph(snap, out / f"snapshot_{k:04d}.graph")
    return 0


def _cmd_transfer(args) -> int:
    source = read_graph(args.source)
    target = read_graph(args.target)
    config = _build_config_from_args(args)
    if args.dump_similarity:
        dump_dir = Path(args.dump_similarity)
        dump_dir.mkdir(parents=True, exist_ok=True)
        for sim in metapath_distance_matrices(source, config):
            name = f"sim_{sim.provenance.label()}.csv"
            np.savetxt(dump_dir / name, sim.matrix, delimiter=",", fmt="%.17g")
    graph, report = run_transfer(source, target, config)
    write_graph(graph, args.out)
    if args.report:
        write_report(report, args.report)
    return 0


def _cmd_baseline(args) -> int:
    target = read_graph(args.target)
    if args.method == "nt":
        estimate = evalkit.baseline_nt(target)
    else:
        if not args.source:
            raise GraftError(f"method {args.method!r} requires --source")
        source = read_graph(args.source)
        if args.method == "dt":
            estimate = evalkit.baseline_dt(source, target)
        else:
            estimate = evalkit.baseline_random_walk(source, target, _build_config_from_args(args))
    write_graph(estimate, args.out)
    return 0


def _cmd_eval(args) -> int:
    result = evalkit.score(read_graph(args.estimate), read_graph(args.truth))
    text = json.dumps(result.to_dict(), sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def _sweep_cell(cell: tuple) -> list:
    """One (axis, value, method, seed) run; returns a CSV row. Worker-safe."""
    axis, value, method, seed, config_dict = cell
    try:
        fixed = dict(_SWEEP_FIXED[axis])
        if axis == "size":
            fixed["n_source"] = int(value)
        elif axis == "dynfactor":
            fixed["dynamic_factor"] = float(value)
        elif axis == "maturity":
            fixed["maturity"] = float(value)
        spec = synthbench.SynthSpec(seed=seed, **fixed)
        gs, gt_truth, gt_hat = synthbench.generate(spec)
        config_dict = dict(config_dict, seed=seed)
        if axis == "mu":
            config_dict["mu"] = float(value)
        config = TransferConfig(**config_dict)
        if method == "transfer":
            estimate, _ = run_transfer(gs, gt_hat, config)
        elif method == "nt":
            estimate = evalkit.baseline_nt(gt_hat)
        elif method == "dt":
            estimate = evalkit.baseline_dt(gs, gt_hat)
        else:
            estimate = evalkit.baseline_random_walk(gs, gt_hat, config)
        result = evalkit.score(estimate, gt_truth)
    except GraftError as exc:
        return [axis, value, method, seed, "", "", "", f"error: {exc}"]
    return [
        axis, value, method, seed,
        f"{result.entity_f1:.6f}", f"{result.edge_f1:.6f}", f"{result.combined_f1:.6f}", "ok",
    ]


def _cmd_sweep(args) -> int:
    methods = [m for m in args.methods.split(",") if m]
    if not methods:
        raise GraftError("no methods given")
    for m in methods:
        if m not in METHODS:
            raise GraftError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    seeds = [int(s) for s in args.seeds.split(",") if s]
    if not seeds:
        raise GraftError("no seeds given")
    raw_values = [v for v in args.values.split(",") if v]
    if not raw_values:
        raise GraftError("no axis values given")
    values = [int(v) for v in raw_values] if args.axis == "size" else [float(v) for v in raw_values]
    config_dict = _build_config_from_args(args).to_dict()
    cells = [
        (args.axis, value, method, seed, config_dict)
        for value in values
        for method in methods
        for seed in seeds
    ]
    cells.sort(key=lambda c: (c[1], c[2], c[3]))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(cell) for cell in cells]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(SWEEP_CSV_VERSION + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["axis", "value", "method", "seed", "entity_f1", "edge_f1", "combined_f1", "status"])
        writer.writerows(rows)
    failures = sum(1 for row in rows if row[-1] != "ok")
    if failures:
        log.error("%d of %d sweep rows failed", failures, len(rows))
        return 1
    return 0


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graft",
        description="Dependency-graph transfer toolkit: generate benchmarks, "
        "ingest event streams, run the transfer pipeline, and evaluate results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic benchmark instance")
    p.add_argument("--n-source", type=int, required=True)
    p.add_argument("--n-target", type=int, required=True)
    p.add_argument("--dynamic-factor", type=float, default=0.1)
    p.add_argument("--maturity", type=float, default=0.5)
    p.add_argument("--n-types", type=int, default=3)
    p.add_argument("--edge-prob", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="build a graph from a JSONL event stream")
    p.add_argument("--events", required=True)
    p.add_argument("--window", type=int, default=None, help="snapshot window in ms; makes --out a directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("transfer", help="run the full transfer pipeline")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="also write the run report JSON here")
    p.add_argument("--config", default=None, help="key=value config file; explicit flags win")
    p.add_argument("--dump-similarity", default=None, metavar="DIR",
                   help="write each meta-path distance matrix as CSV")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("baseline", help="run a baseline method")
    p.add_argument("--method", required=True, choices=["nt", "dt", "rw"])
    p.add_argument("--source", default=None)
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("eval", help="score an estimated graph against a ground truth")
    p.add_argument("--estimate", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", default=None, help="also write the JSON result here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="grid of synthetic runs, written as CSV")
    p.add_argument("--axis", required=True, choices=sorted(_SWEEP_FIXED))
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.add_argument("--methods", required=True, help=f"comma-separated subset of: {', '.join(METHODS)}")
    p.add_argument("--seeds", default="0", help="comma-separated generator seeds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--config", default=None)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_sweep)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("GRAFT_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        level=levels.get(level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = _make_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
