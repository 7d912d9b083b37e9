"""Dense linear-algebra primitives shared by every other module.

Data matrices are plain ``numpy`` arrays of shape ``(M1, M2)`` whose columns are
the data points. Bases and SVD factors are wrapped in small frozen dataclasses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-10
NOISY_RANK_RATIO = 1.0 / 20.0


def as_data_matrix(D) -> np.ndarray:
    """Validate and return ``D`` as a 2-D float array."""
    D = np.asarray(D, dtype=float)
    if D.ndim == 1:
        D = D[:, None]
    if D.ndim != 2 or D.shape[0] < 1 or D.shape[1] < 1:
        raise ValueError(f"data matrix must be 2-D and nonempty, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise ValueError("non-finite input")
    return D


def _fix_signs(left: np.ndarray, right: np.ndarray | None = None):
    # largest-magnitude entry of every left vector made positive
    if left.shape[1] == 0:
        return left, right
    idx = np.argmax(np.abs(left), axis=0)
    signs = np.sign(left[idx, np.arange(left.shape[1])])
    signs[signs == 0] = 1.0
    left = left * signs
    if right is not None:
        right = right * signs[:, None]
    return left, right


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``D = left @ diag(sigma) @ right`` restricted to the effective rank."""

    left: np.ndarray
    sigma: np.ndarray
    right: np.ndarray

    @property
    def effective_rank(self) -> int:
        return int(self.sigma.size)

    @property
    def t(self) -> np.ndarray:
        """Columns ``t_i = Sigma v_i`` (coordinates of ``d_i`` in ``left``)."""
        return self.sigma[:, None] * self.right

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.sigma) @ self.right


@dataclass(frozen=True)
class SubspaceBasis:
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError(f"basis must be 2-D, got shape {b.shape}")
        if b.shape[1] > b.shape[0]:
            raise ValueError(f"basis dim {b.shape[1]} exceeds ambient dim {b.shape[0]}")
        object.__setattr__(self, "basis", b)

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project_out(self, X: np.ndarray) -> np.ndarray:
        """``(I - U U^T) X``."""
        return X - self.basis @ (self.basis.T @ X)


def thin_svd(D, rank_tol: float = DEFAULT_RANK_TOL) -> SvdFactors:
    """Thin SVD keeping singular values larger than ``rank_tol * s1``.

    Signs are fixed so that each left singular vector has a positive
    largest-magnitude entry, which makes ``right`` reproducible.
    """
    D = as_data_matrix(D)
    if not np.any(D):
        raise ValueError("zero matrix")
    U, s, Vt = np.linalg.svd(D, full_matrices=False)
    keep = int(np.count_nonzero(s > rank_tol * s[0]))
    left, right = _fix_signs(U[:, :keep], Vt[:keep])
    return SvdFactors(left=left, sigma=s[:keep].copy(), right=right)


def estimate_rank(sigma, ratio: float = NOISY_RANK_RATIO) -> int:
    """Number of singular values strictly above ``ratio * sigma[0]``."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0:
        raise ValueError("empty singular value vector")
    if sigma[0] <= 0:
        raise ValueError("largest singular value must be positive")
    return max(1, int(np.count_nonzero(sigma > ratio * sigma[0])))


def orthonormalize(columns, tol: float = DEFAULT_RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis for the numerical column space of ``columns``.

    The rank cut is relative to the largest singular value; an all-zero input
    yields a basis with zero columns.
    """
    X = np.asarray(columns, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite input")
    if X.shape[1] == 0 or not np.any(X):
        return SubspaceBasis(np.zeros((X.shape[0], 0)))
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    keep = int(np.count_nonzero(s > tol * s[0]))
    left, _ = _fix_signs(U[:, :keep])
    return SubspaceBasis(left)


def complement_residual_norms(D, U: SubspaceBasis) -> np.ndarray:
    """Per-column ``||(I - U U^T) d_k||_2``."""
    D = as_data_matrix(D)
    if D.shape[0] != U.ambient:
        raise ValueError(f"dimension mismatch: data has {D.shape[0]} rows, basis is in R^{U.ambient}")
    return np.linalg.norm(U.project_out(D), axis=0)


def recovery_error(U_true: SubspaceBasis, U_hat: SubspaceBasis) -> float:
    """``||(I - U U^T) U_hat||_F / ||U||_F``; zero iff ``span(U_hat)`` lies in ``span(U)``."""
    if U_true.dim == 0 or U_hat.dim == 0:
        raise ValueError("recovery error undefined for a 0-dimensional basis")
    if U_true.ambient != U_hat.ambient:
        raise ValueError(f"ambient dimension mismatch: {U_true.ambient} vs {U_hat.ambient}")
    num = np.linalg.norm(U_true.project_out(U_hat.basis), "fro")
    return float(num / np.sqrt(U_true.dim))
