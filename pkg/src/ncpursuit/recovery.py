"""From scores to a recovered subspace, plus the trial success rules."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .linalg import (
    SubspaceBasis,
    as_data_matrix,
    complement_residual_norms,
    orthonormalize,
    recovery_error,
)
from .scoring import ScoreVector

EXACT_RECOVERY_THRESHOLD = 1e-3


class InsufficientRankError(ValueError):
    pass


@dataclass(frozen=True)
class RankGreedy:
    """Walk columns by descending score, keeping those that raise the rank."""

    rank: int
    tol: float = 1e-8

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"target rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class FixedFraction:
    """Keep the top ``ceil((1 - outlier_fraction) * M2)`` columns.

    With ``rank`` set, the basis is truncated to the ``rank`` leading left
    singular vectors of the kept columns (useful on noisy data).
    """

    outlier_fraction: float = 0.5
    rank: int | None = None
    tol: float = 1e-10

    def __post_init__(self):
        if not 0 <= self.outlier_fraction < 1:
            raise ValueError(f"outlier_fraction must lie in [0, 1), got {self.outlier_fraction}")
        if self.rank is not None and self.rank < 1:
            raise ValueError(f"target rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class AdaptiveProjection:
    """Take the best remaining column, project it out of the data, discard
    columns whose residual falls below ``tol``, repeat until ``rank``."""

    rank: int
    tol: float = 1e-6

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"target rank must be >= 1, got {self.rank}")


SelectionStrategy = Union[RankGreedy, FixedFraction, AdaptiveProjection]


@dataclass(frozen=True)
class RecoveryResult:
    basis: SubspaceBasis
    selected: list[int]
    scores: ScoreVector

    @property
    def dim(self) -> int:
        return self.basis.dim


def strategy_name(strat: SelectionStrategy) -> str:
    return {RankGreedy: "rank-greedy", FixedFraction: "fixed-fraction",
            AdaptiveProjection: "adaptive-projection"}[type(strat)]


def score_order(values: np.ndarray) -> np.ndarray:
    """Indices by descending score; ties go to the lowest index."""
    return np.argsort(-np.asarray(values, dtype=float), kind="stable")


def _rank_greedy(D, order, strat: RankGreedy) -> list[int]:
    selected: list[int] = []
    rank = 0
    for j in order:
        s = np.linalg.svd(D[:, selected + [int(j)]], compute_uv=False)
        new_rank = int(np.count_nonzero(s > strat.tol * s[0])) if s[0] > 0 else 0
        if new_rank > rank:
            selected.append(int(j))
            rank = new_rank
            if rank == strat.rank:
                return selected
    raise InsufficientRankError(
        f"insufficient rank: columns span only {rank} of the requested {strat.rank} dimensions")


def _adaptive(D, x, strat: AdaptiveProjection) -> tuple[list[int], np.ndarray]:
    R = D.copy()
    alive = np.linalg.norm(R, axis=0) > strat.tol
    selected: list[int] = []
    Q = []
    order = score_order(x)
    while len(selected) < strat.rank:
        live = order[alive[order]]
        if live.size == 0:
            raise InsufficientRankError(
                f"insufficient rank: columns span only {len(selected)} of the requested {strat.rank} dimensions")
        j = int(live[0])
        q = R[:, j] / np.linalg.norm(R[:, j])
        Q.append(q)
        selected.append(j)
        R -= np.outer(q, q @ R)
        alive &= np.linalg.norm(R, axis=0) > strat.tol
        alive[j] = False
    return selected, np.column_stack(Q)


def select_columns(D, x: ScoreVector, strat: SelectionStrategy) -> RecoveryResult:
    """Build the recovered basis from the highest-scoring columns of ``D``."""
    D = as_data_matrix(D)
    values = np.asarray(x.values, dtype=float)
    if values.size != D.shape[1]:
        raise ValueError(f"score length {values.size} does not match {D.shape[1]} columns")
    if isinstance(strat, RankGreedy):
        selected = _rank_greedy(D, score_order(values), strat)
        basis = orthonormalize(D[:, selected], tol=strat.tol)
    elif isinstance(strat, FixedFraction):
        keep = math.ceil((1 - strat.outlier_fraction) * D.shape[1])
        selected = [int(j) for j in score_order(values)[:keep]]
        Y = D[:, selected]
        if strat.rank is None:
            basis = orthonormalize(Y, tol=strat.tol)
        else:
            full = orthonormalize(Y, tol=strat.tol)
            if full.dim < strat.rank:
                raise InsufficientRankError(
                    f"insufficient rank: kept columns span {full.dim} < {strat.rank} dimensions")
            U, _, _ = np.linalg.svd(Y, full_matrices=False)
            basis = orthonormalize(U[:, :strat.rank])
    elif isinstance(strat, AdaptiveProjection):
        selected, Q = _adaptive(D, values, strat)
        basis = orthonormalize(Q)
    else:
        raise TypeError(f"unknown selection strategy {strat!r}")
    return RecoveryResult(basis=basis, selected=selected, scores=x)


def _check_mask(n: int, outlier_mask) -> np.ndarray:
    mask = np.asarray(outlier_mask, dtype=bool)
    if mask.shape != (n,):
        raise ValueError(f"mask length {mask.size} does not match {n} entries")
    if mask.all() or not mask.any():
        raise ValueError("mask must contain both inliers and outliers")
    return mask


def separation_holds(x: ScoreVector, outlier_mask) -> bool:
    """Strict separation: smallest inlier score above largest outlier score."""
    values = np.asarray(x.values, dtype=float)
    mask = _check_mask(values.size, outlier_mask)
    return bool(values[~mask].min() > values[mask].max())


def trial_success_exact(U_true: SubspaceBasis, U_hat: SubspaceBasis,
                        threshold: float = EXACT_RECOVERY_THRESHOLD) -> bool:
    return recovery_error(U_true, U_hat) < threshold


def trial_success_residual(D, U_hat: SubspaceBasis, outlier_mask) -> bool:
    """Every inlier residual to ``U_hat`` strictly below every outlier residual."""
    f = complement_residual_norms(D, U_hat)
    mask = _check_mask(f.size, outlier_mask)
    return bool(f[~mask].max() < f[mask].min())
