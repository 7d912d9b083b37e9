"""Command-line entry point: ``ncpursuit <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io
from .experiments import ExperimentConfig, run_experiment
from .heatmap import render_heatmap
from .recovery import AdaptiveProjection, FixedFraction, RankGreedy, select_columns
from .scoring import compute_scores, normalize_columns
from .synth import (
    ClusteredInliers,
    ClusteredOutliers,
    NearSubspaceOutliers,
    NoisyInliers,
    OutlierSubspace,
    UnionInliers,
    Unstructured,
    generate,
    permuted_regression_dataset,
)
from .theory import THEOREMS, ConditionParams, evaluate_condition

SWEEP_DEFAULTS = {
    "phase": ({"n_i": [8, 16, 24, 32, 40], "n_o": [100, 500, 1000, 2000]},
              {"M1": 50, "r": 4}, ("ANCP", "SNCP")),
    "noise-sweep": ({"snr": [0.25, 1, 4, 16, 100]},
                    {"M1": 200, "r": 5, "r_o": 10, "n_i": 100, "n_o": 100}, ("ANCP", "SNCP")),
    "separation": ({"n_o": [40]}, {"M1": 100, "r": 8, "n_i": 180, "h": 4}, ("ANCP", "SNCP", "CoP")),
    "perm-reg": ({"n_o": [20, 50, 100]}, {"d": 10, "m": 10, "n_i": 200}, ("ANCP", "SNCP")),
}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_assignment(text: str, listy: bool):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    name, value = text.split("=", 1)
    if listy:
        return name, [_parse_value(v) for v in value.split(",") if v]
    return name, _parse_value(value)


def _grid_arg(text):
    return _parse_assignment(text, True)


def _set_arg(text):
    return _parse_assignment(text, False)


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncpursuit", description="Closed-form robust PCA via leverage statistics.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("score", help="score every column of a matrix CSV")
    s.add_argument("--input", required=True)
    s.add_argument("--method", default="sncp", type=str.lower, choices=["ancp", "sncp", "cop"])
    s.add_argument("--out", help="score CSV path (default: stdout)")
    s.add_argument("--rank-tol", type=float, default=1e-10)
    s.add_argument("--rank-ratio", type=float, help="effective rank cut relative to s1 (e.g. 0.05 on noisy data)")

    r = sub.add_parser("recover", help="recover the inlier subspace of a matrix CSV")
    r.add_argument("--input", required=True)
    r.add_argument("--dim", type=int, help="target subspace dimension")
    r.add_argument("--method", default="sncp", type=str.lower, choices=["ancp", "sncp", "cop"])
    r.add_argument("--strategy", default="rank-greedy",
                   choices=["rank-greedy", "fixed-fraction", "adaptive-projection"])
    r.add_argument("--outlier-fraction", type=float, default=0.5)
    r.add_argument("--tol", type=float)
    r.add_argument("--rank-tol", type=float, default=1e-10)
    r.add_argument("--rank-ratio", type=float)
    r.add_argument("--out", help="RecoveryResult JSON path (default: stdout)")

    g = sub.add_parser("synth", help="generate a synthetic dataset (data.csv + truth.json)")
    g.add_argument("--model", required=True,
                   choices=["unstructured", "outlier-subspace", "clustered-outliers", "union",
                            "clustered-inliers", "near-subspace", "perm-reg"])
    g.add_argument("--m1", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--ni", type=int)
    g.add_argument("--no", type=int, default=0)
    g.add_argument("--ro", type=int)
    g.add_argument("--h", type=int, default=4)
    g.add_argument("--eta", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--m", type=int, help="number of clusters (union) or observation dim (perm-reg)")
    g.add_argument("--d", type=int, help="cluster dim (union) or regressor dim (perm-reg)")
    g.add_argument("--nik", type=_int_list, help="comma-separated cluster sizes (union)")
    g.add_argument("--sigma-n", type=float, help="wrap the model with noisy inliers")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir", default=".")

    for kind, (grid, fixed, methods) in SWEEP_DEFAULTS.items():
        w = sub.add_parser(kind, help=f"{kind} Monte-Carlo sweep")
        w.add_argument("--config", help="JSON file with ExperimentConfig fields")
        w.add_argument("--grid", type=_grid_arg, action="append", default=[],
                       metavar="NAME=V1,V2,...", help=f"swept parameter (default {grid})")
        w.add_argument("--set", type=_set_arg, action="append", default=[],
                       metavar="NAME=VALUE", help=f"fixed parameter (default {fixed})")
        w.add_argument("--methods", default=",".join(m.lower() for m in methods))
        w.add_argument("--trials", type=int)
        w.add_argument("--seed", type=int, default=0)
        w.add_argument("--out", help="ResultTable CSV path (default: stdout)")
        w.add_argument("--svg", help="also write a heatmap over the first two grid parameters")
        w.add_argument("--svg-method", help="method shown in the heatmap")
        w.add_argument("--no-timing", action="store_true", help="write mean_ms as 0 for byte-stable output")
        w.add_argument("--workers", type=int, default=1)
        w.add_argument("--rank-ratio", type=float,
                       help="effective rank cut relative to s1 (noisy data defaults to 1/20)")

    t = sub.add_parser("theory", help="evaluate theorem sufficient conditions")
    t.add_argument("--params", required=True, help="JSON params, keyed by theorem id or with a 'theorem' field")
    t.add_argument("--out")
    return p


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_score(args):
    D = io.read_matrix_csv(args.input)
    x = compute_scores(D, args.method, rank_tol=args.rank_tol, rank_ratio=args.rank_ratio)
    if args.out:
        io.write_scores_csv(args.out, x)
    else:
        sys.stdout.write("index,score,method\n")
        for i, v in enumerate(x.values):
            sys.stdout.write(f"{i},{float(v)!r},{x.method}\n")


def _cmd_recover(args):
    D = io.read_matrix_csv(args.input)
    Dn = normalize_columns(D)
    x = compute_scores(Dn, args.method, normalized=True, rank_tol=args.rank_tol, rank_ratio=args.rank_ratio)
    if args.strategy != "fixed-fraction" and args.dim is None:
        raise ValueError(f"--dim is required for the {args.strategy} strategy")
    tol = {} if args.tol is None else {"tol": args.tol}
    if args.strategy == "rank-greedy":
        strat = RankGreedy(args.dim, **tol)
    elif args.strategy == "fixed-fraction":
        strat = FixedFraction(args.outlier_fraction, rank=args.dim, **tol)
    else:
        strat = AdaptiveProjection(args.dim, **tol)
    result = select_columns(Dn, x, strat)
    payload = io.recovery_to_dict(result, x.method, strat)
    _emit(json.dumps(payload) + "\n", args.out)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError(f"model {args.model} requires --{', --'.join(m.replace('_', '-') for m in missing)}")


def _cmd_synth(args):
    if args.model == "perm-reg":
        _need(args, "d", "m", "ni")
        ds = permuted_regression_dataset(args.d, args.m, args.ni, args.no, args.seed)
    else:
        if args.model == "union":
            _need(args, "m1", "m", "d", "nik")
            spec = UnionInliers(args.m1, args.m, args.d, tuple(args.nik), args.no)
        else:
            _need(args, "m1", "r", "ni")
            if args.model == "unstructured":
                spec = Unstructured(args.m1, args.r, args.ni, args.no)
            elif args.model == "outlier-subspace":
                _need(args, "ro")
                spec = OutlierSubspace(args.m1, args.r, args.ro, args.ni, args.no)
            elif args.model == "clustered-outliers":
                _need(args, "eta")
                spec = ClusteredOutliers(args.m1, args.r, args.ni, args.no, args.eta)
            elif args.model == "clustered-inliers":
                _need(args, "gamma")
                spec = ClusteredInliers(args.m1, args.r, args.ni, args.gamma, args.no, args.ro)
            else:
                spec = NearSubspaceOutliers(args.m1, args.r, args.ni, args.no, args.h)
        if args.sigma_n is not None:
            spec = NoisyInliers(spec, args.sigma_n)
        ds = generate(spec, args.seed)
    data_path, truth_path = io.write_dataset(args.out_dir, ds)
    print(f"wrote {data_path} ({ds.D.shape[0]}x{ds.D.shape[1]}) and {truth_path}", file=sys.stderr)


def _cmd_sweep(args):
    grid, fixed, methods = SWEEP_DEFAULTS[args.command]
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        data.setdefault("kind", args.command)
        if data["kind"] != args.command:
            raise ValueError(f"config kind {data['kind']!r} does not match subcommand {args.command!r}")
        cfg = ExperimentConfig.from_dict(data)
    else:
        grid = dict(args.grid) if args.grid else dict(grid)
        fixed = {**fixed, **dict(args.set)}
        for name in grid:
            fixed.pop(name, None)
        cfg = ExperimentConfig(kind=args.command, grid=grid, fixed=fixed,
                               methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
                               trials=args.trials, master_seed=args.seed, rank_ratio=args.rank_ratio)
    table = run_experiment(cfg, workers=args.workers)
    _emit(table.to_csv(timing=not args.no_timing), args.out)
    if args.svg:
        params = table.grid_params
        if len(params) < 2:
            raise ValueError("--svg needs a grid over two parameters")
        render_heatmap(table, params[0], params[1], args.svg, method=_svg_method(args, cfg))


def _svg_method(args, cfg):
    if args.svg_method:
        for m in cfg.methods:
            if m.lower() == args.svg_method.lower():
                return m
        raise ValueError(f"--svg-method {args.svg_method!r} is not among {list(cfg.methods)}")
    return cfg.methods[-1] if len(cfg.methods) > 1 else cfg.methods[0]


def _cmd_theory(args):
    with open(args.params, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("params file must hold a JSON object")
    if "theorem" in data:
        report = evaluate_condition(ConditionParams.from_dict(data)).to_dict()
        out = {data["theorem"]: report}
    else:
        bad = [k for k in data if k not in THEOREMS]
        if bad:
            raise ValueError(f"unknown theorem key(s) {bad}; expected {list(THEOREMS)}")
        out = {k: evaluate_condition(ConditionParams.from_dict(v, theorem=k)).to_dict() for k, v in data.items()}
    _emit(json.dumps(out, indent=1, sort_keys=True) + "\n", args.out)


_COMMANDS = {"score": _cmd_score, "recover": _cmd_recover, "synth": _cmd_synth, "theory": _cmd_theory}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = _COMMANDS.get(args.command, _cmd_sweep)
    try:
        handler(args)
    except (ValueError, OSError, KeyError, np.linalg.LinAlgError) as exc:
        print(f"ncpursuit {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
