"""Numeric sufficient conditions for exact recovery and the concentration
facts they rest on.

Each condition is a direct transcription ``lhs > rhs``; ``evaluate_condition``
reports both sides together with every summand so a phase boundary can be
overlaid on empirical success maps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import SubspaceBasis, SvdFactors, orthonormalize, thin_svd
from .scoring import normalize_columns
from .synth import (ClusteredOutliers, NoisyInliers, OutlierSubspace, UnionInliers,
                    random_unit_vectors)

THEOREMS = ("T1", "T2", "T3", "T4", "T5", "T6")

# probability floor 1 - k * delta
_FLOOR_MULTIPLIER = {"T1": 3, "T2": 2, "T3": 3, "T4": 3, "T5": 4, "T6": 3}

_REQUIRED = {
    "T1": (),
    "T2": ("r_o", "affinity"),
    "T3": ("r_o", "affinity"),
    "T4": ("sigma_n", "t_min", "t_max"),
    "T5": ("eta", "q_perp"),
    "T6": ("m", "d", "n_i_k", "vartheta"),
}


@dataclass
class ConditionParams:
    """Model parameters for one theorem.

    ``affinity`` is ``||U_o^T U_perp||`` for T2 and ``||U^T U_o||`` for T3
    (spectral norms). ``q_perp`` is ``||q^T U_perp||_2`` for T5.
    """

    theorem: str
    n_i: int
    n_o: int
    r: int
    M1: int
    psi: float
    delta: float = 0.05
    r_o: int | None = None
    affinity: float | None = None
    sigma_n: float | None = None
    t_min: float | None = None
    t_max: float | None = None
    eta: float | None = None
    q_perp: float | None = None
    m: int | None = None
    d: int | None = None
    n_i_k: tuple[int, ...] | None = None
    vartheta: float | None = None

    @classmethod
    def from_dict(cls, data: dict, theorem: str | None = None) -> ConditionParams:
        data = dict(data)
        if theorem is not None:
            data.setdefault("theorem", theorem)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        for name in ("theorem", "n_i", "n_o", "r", "M1", "psi"):
            if name not in data:
                raise ValueError(f"missing required field {name!r}")
        if data.get("n_i_k") is not None:
            data["n_i_k"] = tuple(int(k) for k in data["n_i_k"])
        return cls(**data)


@dataclass
class ConditionReport:
    theorem: str
    lhs: float
    rhs: float
    holds: bool
    probability_floor: float
    terms: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
                "probability_floor": self.probability_floor, "terms": dict(self.terms),
                "notes": list(self.notes)}


def deviation(n: float, N: float, delta: float, scale: float = 4.0, log_coef: float = 4.0 / 3.0) -> float:
    """``max(log_coef * log(2N/delta), sqrt(scale * (n/N) * log(2N/delta)))``."""
    L = math.log(2 * N / delta)
    return max(log_coef * L, math.sqrt(scale * (n / N) * L))


def _validate(p: ConditionParams):
    if p.theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {p.theorem!r}; expected one of {THEOREMS}")
    for name in _REQUIRED[p.theorem]:
        if getattr(p, name) is None:
            raise ValueError(f"{p.theorem} requires field {name!r}")
    if not 0 < p.delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {p.delta}")
    for name in ("n_i", "n_o", "r", "M1"):
        if getattr(p, name) < 1:
            raise ValueError(f"{name} must be positive, got {getattr(p, name)}")
    if p.psi < 0:
        raise ValueError(f"psi must be >= 0, got {p.psi}")
    if p.affinity is not None and not 0 <= p.affinity <= 1:
        raise ValueError(f"affinity must lie in [0, 1], got {p.affinity}")
    if p.q_perp is not None and not 0 <= p.q_perp <= 1:
        raise ValueError(f"q_perp must lie in [0, 1], got {p.q_perp}")
    if p.theorem == "T4" and p.t_min > p.t_max:
        raise ValueError(f"t_min ({p.t_min}) exceeds t_max ({p.t_max})")
    if p.theorem == "T6":
        if len(p.n_i_k) != p.m or any(k < 1 for k in p.n_i_k):
            raise ValueError(f"n_i_k must list {p.m} positive cluster sizes")
    if p.theorem in ("T2", "T3") and p.r_o < 1:
        raise ValueError(f"r_o must be positive, got {p.r_o}")


def _inlier_term(p: ConditionParams) -> tuple[float, float]:
    ratio = p.n_i / p.r
    return ratio, deviation(p.n_i, p.r, p.delta)


def evaluate_condition(p: ConditionParams) -> ConditionReport:
    """Evaluate the sufficient condition of theorem ``p.theorem``."""
    _validate(p)
    th, dl, psi = p.theorem, p.delta, p.psi
    left: dict[str, float] = {}
    terms: dict[str, float] = {}  # right-hand summands
    notes: list[str] = []

    if th != "T6":
        ratio, dev = _inlier_term(p)
        left["inlier_mean"] = ratio
        left["inlier_deviation"] = dev
        base_lhs = ratio - dev

    if th == "T1":
        lhs = base_lhs
        terms["outlier_mean"] = (psi - 1) * p.n_o / p.M1
        terms["outlier_deviation"] = deviation(p.n_o, p.M1, dl, scale=16.0, log_coef=8.0 / 3.0)
    elif th == "T2":
        lhs = base_lhs
        terms["outlier_mean"] = p.affinity * psi * p.n_o / p.r_o
        terms["outlier_deviation"] = p.affinity * psi * deviation(p.n_o, p.r_o, dl, scale=1.0)
    elif th == "T3":
        lhs = base_lhs
        terms["inlier_leakage"] = p.affinity**2 * (ratio + dev)
        terms["outlier_mean"] = p.n_o / p.r_o
        terms["outlier_deviation"] = deviation(p.n_o, p.r_o, dl)
    elif th == "T4":
        s = p.sigma_n
        factor = (math.sqrt(1 + s**2) - p.t_max * s) ** 2 / (1 + s**2)
        left["noise_factor"] = factor
        lhs = factor * base_lhs
        terms["noise_cross"] = 2 * s * p.n_i * p.t_max**2
        terms["outlier"] = psi * (p.n_o / p.M1 + deviation(p.n_o, p.M1, dl))
        terms["noise_outlier"] = s**2 * psi / (1 + s**2) * (p.n_i / p.M1 + deviation(p.n_i, p.M1, dl))
        notes.append("probability floor follows the theorem statement (1 - 3 delta); "
                     "the argument behind it only yields 1 - 7 delta")
    elif th == "T5":
        lhs = base_lhs
        e2 = p.eta**2
        terms["centre"] = p.n_o * psi * p.q_perp**2 / (1 + e2)
        terms["spread_mean"] = psi * e2 * p.n_o / ((1 + e2) * p.M1)
        terms["spread_deviation"] = e2 * psi / (1 + e2) * deviation(p.n_o, p.M1, dl, scale=1.0)
        terms["cross"] = (p.eta * math.sqrt(psi) / (1 + e2) * p.q_perp
                          * (p.n_o / math.sqrt(p.M1) + 2 * math.sqrt(p.n_o)
                             + math.sqrt(2 * p.n_o * math.log(1 / dl) / (p.M1 - 1))))
    else:  # T6
        L = math.log(2 * p.m * p.d / dl)
        per_cluster = [k / p.d - max(4.0 / 3.0 * L, math.sqrt(4 * k / p.d * L)) for k in p.n_i_k]
        smallest = min(per_cluster)
        left["vartheta"] = p.vartheta
        left["min_cluster"] = smallest
        lhs = p.vartheta * smallest
        terms["outlier_mean"] = (psi - 1) * p.n_o / p.M1
        terms["outlier_deviation"] = 2 * deviation(p.n_o, p.M1, dl)

    rhs = float(sum(terms.values()))
    floor = max(0.0, 1 - _FLOOR_MULTIPLIER[th] * dl)
    breakdown = {f"lhs.{k}": float(v) for k, v in left.items()}
    breakdown.update({f"rhs.{k}": float(v) for k, v in terms.items()})
    return ConditionReport(theorem=th, lhs=float(lhs), rhs=rhs, holds=bool(lhs > rhs),
                           probability_floor=floor, terms=breakdown, notes=notes)


def sphere_concentration_bounds(n: int, N: int, delta: float) -> tuple[float, float]:
    """(upper, lower) bounds on the sup/inf of ``sum_i (u^T g_i)^2``."""
    dev = deviation(n, N, delta)
    return n / N + dev, n / N - dev


def sphere_concentration_extremes(n: int, N: int, seed: int) -> tuple[float, float]:
    """Exact sup and inf over unit ``u`` of ``sum_i (u^T g_i)^2`` for a sphere sample.

    These are the extreme squared singular values of the ``N x n`` sample; the
    inf is zero when ``n < N``.
    """
    if N <= 2:
        raise ValueError(f"concentration bounds need N > 2, got N={N}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    G = random_unit_vectors(N, n, seed, "sphere-sample")
    s = np.linalg.svd(G, compute_uv=False)
    sup = float(s[0] ** 2)
    inf = float(s[N - 1] ** 2) if n >= N else 0.0
    return sup, inf


def abs_projection_bound(n: int, N: int, delta: float) -> float:
    return n / math.sqrt(N) + 2 * math.sqrt(n) + math.sqrt(2 * n * math.log(1 / delta) / (N - 1))


def abs_projection_extreme(n: int, N: int, seed: int, delta: float = 0.05,
                           probes: int = 100) -> tuple[float, float, bool]:
    """Certified lower bound on ``sup_u sum_i |u^T g_i|`` and its concentration upper bound.

    The sup is not a spectral quantity, so it is bounded from below by the best
    of the sample directions themselves and ``probes`` random unit directions.
    Returns ``(value, bound, value < bound)``.
    """
    if N <= 2:
        raise ValueError(f"concentration bounds need N > 2, got N={N}")
    G = random_unit_vectors(N, n, seed, "abs-sample")
    P = random_unit_vectors(N, probes, seed, "abs-probes")
    best = float(np.max(np.abs(P.T @ G).sum(axis=1))) if probes else 0.0
    block = 512
    for start in range(0, n, block):
        sums = np.abs(G[:, start:start + block].T @ G).sum(axis=1)
        best = max(best, float(sums.max()))
    bound = abs_projection_bound(n, N, delta)
    return best, bound, best < bound


def extract_t_extremes(F: SvdFactors, outlier_mask) -> tuple[float, float]:
    """Min and max over inliers of ``||S^-2 t_i|| / (t_i^T S^-2 t_i)``, ``t_i = S v_i``."""
    mask = np.asarray(outlier_mask, dtype=bool)
    if mask.shape != (F.right.shape[1],):
        raise ValueError(f"mask length {mask.size} does not match {F.right.shape[1]} columns")
    inl = np.flatnonzero(~mask)
    if inl.size == 0:
        raise ValueError("no inlier columns")
    T = F.t[:, inl]
    W = T / (F.sigma**2)[:, None]
    ratios = np.linalg.norm(W, axis=0) / np.einsum("ij,ij->j", T, W)
    return float(ratios.min()), float(ratios.max())


def compute_vartheta(bases: list[SubspaceBasis]) -> float:
    """``inf`` over unit ``a`` in ``U`` of ``sum_k ||a^T U_k||^2``.

    ``U`` is the direct sum of the cluster subspaces; the value is the
    smallest eigenvalue of ``U^T (sum_k U_k U_k^T) U``.
    """
    if not bases:
        raise ValueError("need at least one cluster basis")
    ambient = {b.ambient for b in bases}
    if len(ambient) != 1:
        raise ValueError(f"cluster bases live in different ambient spaces: {sorted(ambient)}")
    stacked = np.hstack([b.basis for b in bases])
    U = orthonormalize(stacked)
    if U.dim != stacked.shape[1]:
        raise ValueError(f"cluster subspaces are not independent: they span {U.dim} < {stacked.shape[1]} dimensions")
    C = U.basis.T @ stacked
    return float(np.linalg.eigvalsh(C @ C.T)[0])


def affinity_outlier_complement(U: SubspaceBasis, U_o: SubspaceBasis) -> float:
    """Spectral norm ``||U_o^T U_perp||``."""
    return float(np.linalg.norm(U.project_out(U_o.basis), 2))


def affinity_inlier_outlier(U: SubspaceBasis, U_o: SubspaceBasis) -> float:
    """Spectral norm ``||U^T U_o||``."""
    return float(np.linalg.norm(U.basis.T @ U_o.basis, 2))


def params_from_dataset(ds, theorem: str, delta: float = 0.05) -> ConditionParams:
    """Fill a ``ConditionParams`` from a generated dataset's ground truth."""
    spec = ds.spec.base if isinstance(ds.spec, NoisyInliers) else ds.spec
    n_o = ds.n_o
    n_i = ds.D.shape[1] - n_o
    common = dict(theorem=theorem, n_i=n_i, n_o=n_o, r=ds.U_true.dim, M1=ds.D.shape[0],
                  psi=ds.psi, delta=delta)
    if theorem in ("T2", "T3"):
        if not isinstance(spec, OutlierSubspace):
            raise ValueError(f"{theorem} needs an outlier-subspace dataset")
        U_o = ds.aux["U_o"]
        aff = (affinity_outlier_complement(ds.U_true, U_o) if theorem == "T2"
               else affinity_inlier_outlier(ds.U_true, U_o))
        return ConditionParams(**common, r_o=spec.r_o, affinity=min(aff, 1.0))
    if theorem == "T4":
        if not isinstance(ds.spec, NoisyInliers):
            raise ValueError("T4 needs a noisy dataset")
        F = thin_svd(normalize_columns(ds.D))
        t_min, t_max = extract_t_extremes(F, ds.outlier_mask)
        return ConditionParams(**common, sigma_n=ds.spec.sigma_n, t_min=t_min, t_max=t_max)
    if theorem == "T5":
        if not isinstance(spec, ClusteredOutliers):
            raise ValueError("T5 needs a clustered-outlier dataset")
        return ConditionParams(**common, eta=spec.eta, q_perp=min(ds.aux["q_perp"], 1.0))
    if theorem == "T6":
        if not isinstance(spec, UnionInliers):
            raise ValueError("T6 needs a union-of-subspaces dataset")
        return ConditionParams(**common, m=spec.m, d=spec.d, n_i_k=tuple(spec.n_i_k),
                               vartheta=compute_vartheta(ds.aux["cluster_bases"]))
    return ConditionParams(**common)


__all__ = [
    "THEOREMS", "ConditionParams", "ConditionReport", "evaluate_condition", "deviation",
    "sphere_concentration_bounds", "sphere_concentration_extremes", "abs_projection_bound",
    "abs_projection_extreme", "extract_t_extremes", "compute_vartheta",
    "affinity_outlier_complement", "affinity_inlier_outlier", "params_from_dataset",
]
