"""Normalized Coherence scores (ANCP, SNCP), the CoP baseline, and the
closed-form quadratic innovation direction.

All scores are "larger means more inlier-like". ANCP is the inverse leverage
``1/||v_i||^2`` of each column; SNCP replaces the asymmetric similarity of the
leverage expansion by squared cosines between columns of ``V``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_RANK_TOL, SvdFactors, as_data_matrix, thin_svd

METHODS = ("ANCP", "SNCP", "CoP")

# column block size for pairwise Gram sums; bounds memory at block * M2 doubles
_BLOCK = 1024


@dataclass(frozen=True)
class ScoreVector:
    method: str
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class InnovationDirection:
    index: int
    direction: np.ndarray
    value: float


def normalize_columns(D) -> np.ndarray:
    """Scale each column to unit l2 norm. Raises on an all-zero column."""
    D = as_data_matrix(D)
    norms = np.linalg.norm(D, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ValueError(f"column {int(zero[0])} is all zeros and cannot be normalized")
    return D / norms


def _column_sq_norms(V: np.ndarray) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    sq = np.einsum("ij,ij->j", V, V)
    zero = np.flatnonzero(sq == 0)
    if zero.size:
        raise ValueError(f"right singular vector column {int(zero[0])} is zero")
    return sq


def _squared_gram_row_sums(X: np.ndarray) -> np.ndarray:
    # sum_j (x_i^T x_j)^2 for every column i, in column blocks
    n = X.shape[1]
    out = np.empty(n)
    for start in range(0, n, _BLOCK):
        G = X[:, start:start + _BLOCK].T @ X
        out[start:start + _BLOCK] = np.einsum("ij,ij->i", G, G)
    return out


def ancp_scores(V) -> ScoreVector:
    """Inverse leverage scores ``x(i) = 1 / ||v_i||^2``."""
    return ScoreVector("ANCP", 1.0 / _column_sq_norms(V))


def sncp_scores(V) -> ScoreVector:
    """``x(i) = sum_j cos^2(v_i, v_j)``, self term included."""
    V = np.asarray(V, dtype=float)
    Vn = V / np.sqrt(_column_sq_norms(V))
    return ScoreVector("SNCP", _squared_gram_row_sums(Vn))


def cop_scores(D) -> ScoreVector:
    """Coherence values ``x(i) = sum_j (d_i^T d_j)^2`` of a column-normalized matrix."""
    D = as_data_matrix(D)
    return ScoreVector("CoP", _squared_gram_row_sums(D))


def innovation_direction(F: SvdFactors, i: int) -> InnovationDirection:
    """Minimizer of ``||D^T c||_2`` subject to ``c^T d_i = 1``.

    Uses the rank-deficient-safe form ``U' S^-2 t_i / (t_i^T S^-2 t_i)``, which
    equals ``(D D^T)^-1 d_i / (d_i^T (D D^T)^-1 d_i)`` when ``D`` has full row rank.
    """
    M2 = F.right.shape[1]
    if not 0 <= i < M2:
        raise IndexError(f"column index {i} out of range for {M2} columns")
    t_i = F.sigma * F.right[:, i]
    w = t_i / F.sigma**2
    denom = float(t_i @ w)
    if denom == 0:
        raise ValueError(f"column {i} is zero")
    c = F.left @ (w / denom)
    D = F.reconstruct()
    value = float(np.sum((D.T @ c) ** 2))
    return InnovationDirection(index=i, direction=c, value=value)


def compute_scores(D, method: str, rank_tol: float = DEFAULT_RANK_TOL,
                   rank_ratio: float | None = None, normalized: bool = False) -> ScoreVector:
    """Normalize ``D`` (unless already done) and score it with ``method``.

    ``rank_ratio`` switches the effective rank to the count of singular values
    above ``rank_ratio * s1`` (use 1/20 on noisy data).
    """
    key = method.upper()
    Dn = as_data_matrix(D) if normalized else normalize_columns(D)
    if key == "COP":
        return cop_scores(Dn)
    if key not in ("ANCP", "SNCP"):
        raise ValueError(f"unknown scoring method {method!r}; expected one of {METHODS}")
    F = thin_svd(Dn, rank_tol=rank_ratio if rank_ratio is not None else rank_tol)
    return ancp_scores(F.right) if key == "ANCP" else sncp_scores(F.right)
