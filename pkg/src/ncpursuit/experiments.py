"""Monte-Carlo harness: grids of generated datasets, scored and recovered by
each method, aggregated into a ``ResultTable``.

Every trial's dataset seed is derived from the master seed, the experiment
kind, all grid coordinates and the trial index. Methods within a trial share
the dataset, so method comparisons are paired.
"""
from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .linalg import NOISY_RANK_RATIO, recovery_error
from .recovery import (
    EXACT_RECOVERY_THRESHOLD,
    AdaptiveProjection,
    FixedFraction,
    InsufficientRankError,
    RankGreedy,
    select_columns,
    separation_holds,
    trial_success_residual,
)
from .rng import derive_seed
from .scoring import METHODS, compute_scores, normalize_columns
from .synth import MODEL_NAMES, NoisyInliers, generate, permuted_regression_dataset

logger = logging.getLogger(__name__)

KINDS = ("phase", "noise-sweep", "separation", "perm-reg")
SUCCESS_RULES = ("exact", "residual", "score")

_DEFAULT_RULE = {"phase": "exact", "noise-sweep": "residual", "separation": "score", "perm-reg": "exact"}
_DEFAULT_MODEL = {"phase": "unstructured", "noise-sweep": "outlier-subspace",
                  "separation": "near-subspace"}
_DEFAULT_TRIALS = {"phase": 20, "noise-sweep": 20, "separation": 50, "perm-reg": 50}


@dataclass
class ExperimentConfig:
    """One sweep.

    ``grid`` maps swept parameter names to value lists (the cartesian product is
    run); ``fixed`` holds the remaining model parameters. ``strategy`` is an
    optional dict such as ``{"kind": "fixed-fraction", "outlier_fraction": 0.3}``.
    """

    kind: str
    grid: dict[str, list]
    fixed: dict[str, Any] = field(default_factory=dict)
    methods: tuple[str, ...] = ("ANCP", "SNCP")
    trials: int | None = None
    master_seed: int = 0
    success_rule: str | None = None
    strategy: dict | None = None
    rank_ratio: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if not self.grid or any(len(v) == 0 for v in self.grid.values()):
            raise ValueError("grid must be nonempty with at least one value per parameter")
        self.methods = tuple(_canonical_method(m) for m in self.methods)
        if not self.methods:
            raise ValueError("at least one method is required")
        if self.trials is None:
            self.trials = _DEFAULT_TRIALS[self.kind]
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.success_rule is None:
            self.success_rule = _DEFAULT_RULE[self.kind]
        if self.success_rule not in SUCCESS_RULES:
            raise ValueError(f"unknown success rule {self.success_rule!r}; expected one of {SUCCESS_RULES}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["methods"] = list(self.methods)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        data = dict(data)
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        if "methods" in data:
            data["methods"] = tuple(data["methods"])
        return cls(**data)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


def _canonical_method(m: str) -> str:
    for name in METHODS:
        if name.lower() == str(m).lower():
            return name
    raise ValueError(f"unknown method {m!r}; expected one of {METHODS}")


@dataclass
class ResultRow:
    grid: dict[str, Any]
    method: str
    success_rate: float
    mean_error: float
    mean_ms: float
    trials: int
    seed: int
    error: str | None = None


@dataclass
class ResultTable:
    config: ExperimentConfig
    rows: list[ResultRow]

    @property
    def grid_params(self) -> list[str]:
        return list(self.config.grid)

    def header(self) -> str:
        cols = [f"grid_{p}" for p in self.grid_params]
        return ",".join(cols + ["method", "success_rate", "mean_error", "mean_ms", "trials", "seed"])

    def to_csv(self, timing: bool = True) -> str:
        lines = [self.header()]
        for row in self.rows:
            vals = [_fmt(row.grid[p]) for p in self.grid_params]
            vals += [row.method, _fmt(row.success_rate), _fmt(row.mean_error),
                     _fmt(round(row.mean_ms, 3) if timing else 0.0), str(row.trials), str(row.seed)]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"

    def write_csv(self, path, timing: bool = True) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv(timing=timing))

    def lookup(self, method: str, **coords) -> ResultRow:
        for row in self.rows:
            if row.method == method and all(row.grid[k] == v for k, v in coords.items()):
                return row
        raise KeyError(f"no row for {method} at {coords}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def build_dataset(kind: str, params: dict, seed: int):
    """Generate the dataset for one trial from merged fixed + grid parameters."""
    params = dict(params)
    if kind == "perm-reg":
        return permuted_regression_dataset(int(params["d"]), int(params["m"]),
                                           int(params["n_i"]), int(params["n_o"]), seed)
    model = params.pop("model", _DEFAULT_MODEL[kind])
    if model not in MODEL_NAMES or model == "noisy":
        raise ValueError(f"unknown model {model!r}")
    snr = params.pop("snr", None)
    sigma_n = params.pop("sigma_n", None)
    cls = MODEL_NAMES[model]
    names = {f.name for f in dataclasses.fields(cls)}
    missing = [n for n in names if n not in params and
               cls.__dataclass_fields__[n].default is dataclasses.MISSING]
    if missing:
        raise ValueError(f"model {model!r} is missing parameter(s): {', '.join(sorted(missing))}")
    kwargs = {k: v for k, v in params.items() if k in names}
    if "n_i_k" in kwargs:
        kwargs["n_i_k"] = tuple(kwargs["n_i_k"])
    spec = cls(**kwargs)
    if snr is not None:
        sigma_n = 1.0 / math.sqrt(float(snr))
    if sigma_n is not None:
        spec = NoisyInliers(spec, float(sigma_n))
    return generate(spec, seed)


def _target_rank(kind: str, params: dict) -> int:
    if kind == "perm-reg":
        return int(params["d"])
    if "r" in params:
        return int(params["r"])
    return int(params["m"]) * int(params["d"])


def make_strategy(cfg: ExperimentConfig, params: dict, M2: int, n_o: int):
    r = _target_rank(cfg.kind, params)
    spec = dict(cfg.strategy or {})
    kind = spec.pop("kind", "fixed-fraction" if cfg.kind == "noise-sweep" else "rank-greedy")
    if kind == "rank-greedy":
        return RankGreedy(rank=r, **spec)
    if kind == "fixed-fraction":
        spec.setdefault("outlier_fraction", n_o / M2 if M2 else 0.5)
        spec.setdefault("rank", r)
        return FixedFraction(**spec)
    if kind == "adaptive-projection":
        return AdaptiveProjection(rank=r, **spec)
    raise ValueError(f"unknown strategy kind {kind!r}")


def _rank_ratio(cfg: ExperimentConfig, ds) -> float | None:
    if cfg.rank_ratio is not None:
        return cfg.rank_ratio
    return NOISY_RANK_RATIO if isinstance(ds.spec, NoisyInliers) else None


def run_trial(cfg: ExperimentConfig, params: dict, ds, method: str) -> tuple[bool, float, float]:
    """Score, recover and judge one dataset. Returns (success, recovery error, ms)."""
    t0 = time.perf_counter()
    Dn = normalize_columns(ds.D)
    x = compute_scores(Dn, method, normalized=True, rank_ratio=_rank_ratio(cfg, ds))
    strat = make_strategy(cfg, params, ds.D.shape[1], ds.n_o)
    try:
        result = select_columns(Dn, x, strat)
    except InsufficientRankError:
        result = None
    elapsed = (time.perf_counter() - t0) * 1e3

    err = recovery_error(ds.U_true, result.basis) if result is not None else float("nan")
    if cfg.success_rule == "exact":
        ok = result is not None and err < EXACT_RECOVERY_THRESHOLD
    elif cfg.success_rule == "residual":
        ok = result is not None and trial_success_residual(Dn, result.basis, ds.outlier_mask)
    else:
        ok = separation_holds(x, ds.outlier_mask)
    return ok, err, elapsed


def trial_seed(cfg: ExperimentConfig, point: dict, trial: int) -> int:
    coords = tuple(sorted((k, repr(v)) for k, v in point.items()))
    return derive_seed(cfg.master_seed, cfg.kind, coords, trial)


def _run_point(cfg: ExperimentConfig, point: dict) -> list[ResultRow]:
    params = {**cfg.fixed, **point}
    n = len(cfg.methods)
    succ = np.zeros((n, cfg.trials), dtype=bool)
    errs = np.full((n, cfg.trials), np.nan)
    ms = np.zeros((n, cfg.trials))
    try:
        for t in range(cfg.trials):
            ds = build_dataset(cfg.kind, params, trial_seed(cfg, point, t))
            for k, method in enumerate(cfg.methods):
                succ[k, t], errs[k, t], ms[k, t] = run_trial(cfg, params, ds, method)
    except (ValueError, TypeError, np.linalg.LinAlgError) as exc:
        logger.warning("grid point %s aborted: %s", point, exc)
        return [ResultRow(dict(point), m, float("nan"), float("nan"), float("nan"),
                          cfg.trials, cfg.master_seed, error=str(exc)) for m in cfg.methods]
    rows = []
    for k, method in enumerate(cfg.methods):
        finite = errs[k][np.isfinite(errs[k])]
        rows.append(ResultRow(
            grid=dict(point), method=method,
            success_rate=float(succ[k].mean()),
            mean_error=float(finite.mean()) if finite.size else float("nan"),
            mean_ms=float(ms[k].mean()),
            trials=cfg.trials, seed=cfg.master_seed))
    return rows


def grid_points(cfg: ExperimentConfig) -> list[dict]:
    keys = list(cfg.grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(cfg.grid[k] for k in keys))]


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ResultTable:
    """Run every grid point; rows come out in grid order, then method order."""
    points = grid_points(cfg)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point, [cfg] * len(points), points))
    else:
        chunks = [_run_point(cfg, p) for p in points]
    return ResultTable(config=cfg, rows=[row for chunk in chunks for row in chunk])
