"""Seeded synthetic data for every inlier/outlier model used in the analysis.

Outlier columns always come first (``D = [B A]``); the mask makes the ordering
explicit. Each block of columns draws from its own named substream (see
:mod:`ncpursuit.rng`), so a dataset is a pure function of ``(spec, seed)``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .linalg import SubspaceBasis, orthonormalize
from .rng import column_normals, substream

# floor on ||(I - U U^T) q|| for the clustered-outlier centre
Q_RESIDUAL_FLOOR = 0.1


@dataclass(frozen=True)
class Unstructured:
    """Inliers uniform on the unit sphere of U, outliers uniform on the whole sphere."""

    M1: int
    r: int
    n_i: int
    n_o: int


@dataclass(frozen=True)
class OutlierSubspace:
    """Outliers uniform on the unit sphere of a random ``r_o``-dimensional subspace."""

    M1: int
    r: int
    r_o: int
    n_i: int
    n_o: int


@dataclass(frozen=True)
class NoisyInliers:
    """Inlier block of ``base`` replaced by ``(A + sigma_n N) / sqrt(1 + sigma_n^2)``."""

    base: Any
    sigma_n: float


@dataclass(frozen=True)
class ClusteredOutliers:
    """Outliers ``(q + eta f_i) / sqrt(1 + eta^2)`` around a fixed direction ``q``."""

    M1: int
    r: int
    n_i: int
    n_o: int
    eta: float


@dataclass(frozen=True)
class UnionInliers:
    """Inliers drawn from ``m`` random ``d``-dimensional subspaces whose direct sum is U."""

    M1: int
    m: int
    d: int
    n_i_k: tuple[int, ...]
    n_o: int


@dataclass(frozen=True)
class ClusteredInliers:
    """Inliers ``U (w + gamma z_i)`` normalized; outliers on the sphere, or in a
    random ``r_o``-dimensional subspace when ``r_o`` is given."""

    M1: int
    r: int
    n_i: int
    gamma: float
    n_o: int = 0
    r_o: int | None = None


@dataclass(frozen=True)
class NearSubspaceOutliers:
    """Outliers ``[U H] G`` with ``H`` spanning ``h`` extra random directions and
    ``G`` standard Gaussian, columns normalized."""

    M1: int
    r: int
    n_i: int
    n_o: int
    h: int = 4


ModelSpec = Union[Unstructured, OutlierSubspace, NoisyInliers, ClusteredOutliers,
                  UnionInliers, ClusteredInliers, NearSubspaceOutliers]

MODEL_NAMES = {
    "unstructured": Unstructured,
    "outlier-subspace": OutlierSubspace,
    "noisy": NoisyInliers,
    "clustered-outliers": ClusteredOutliers,
    "union": UnionInliers,
    "clustered-inliers": ClusteredInliers,
    "near-subspace": NearSubspaceOutliers,
}


@dataclass(frozen=True)
class Dataset:
    D: np.ndarray
    U_true: SubspaceBasis
    outlier_mask: np.ndarray
    spec: Any
    seed: int
    psi: float | None
    snr: float | None = None
    aux: dict = field(default_factory=dict)

    @property
    def n_o(self) -> int:
        return int(self.outlier_mask.sum())

    @property
    def outliers(self) -> np.ndarray:
        return self.D[:, self.outlier_mask]

    @property
    def inliers(self) -> np.ndarray:
        return self.D[:, ~self.outlier_mask]


def spec_to_dict(spec) -> dict:
    """JSON-friendly description of a model spec."""
    out = {"model": _model_name(spec)}
    for f in dataclasses.fields(spec):
        v = getattr(spec, f.name)
        if dataclasses.is_dataclass(v):
            v = spec_to_dict(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def _model_name(spec) -> str:
    for name, cls in MODEL_NAMES.items():
        if type(spec) is cls:
            return name
    if isinstance(spec, PermutedRegression):
        return "perm-reg"
    raise TypeError(f"unknown model spec {spec!r}")


def random_unit_vectors(N: int, n: int, seed: int, tag: str = "unit") -> np.ndarray:
    """``n`` i.i.d. columns uniform on the unit sphere of ``R^N``."""
    if N < 1 or n < 0:
        raise ValueError(f"need N >= 1 and n >= 0, got N={N}, n={n}")
    G = column_normals(seed, tag, N, n)
    norms = np.linalg.norm(G, axis=0)
    # a Gaussian column is zero with probability 0; guard anyway
    norms[norms == 0] = 1.0
    return G / norms


def random_subspace(N: int, d: int, seed: int, tag: str = "subspace") -> SubspaceBasis:
    """Rotation-invariant random ``d``-dimensional subspace of ``R^N``."""
    if d > N:
        raise ValueError(f"subspace dimension {d} exceeds ambient dimension {N}")
    if d < 0:
        raise ValueError(f"subspace dimension must be >= 0, got {d}")
    G = column_normals(seed, tag, N, d)
    Q, R = np.linalg.qr(G)
    # sign fix makes Q Haar-distributed and deterministic
    Q = Q * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))
    return SubspaceBasis(Q)


def _in_subspace(U: SubspaceBasis, n: int, seed: int, tag: str) -> np.ndarray:
    S = column_normals(seed, tag, U.dim, n)
    X = U.basis @ S
    return X / np.linalg.norm(X, axis=0)


def _require(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


def _validate(spec):
    if isinstance(spec, NoisyInliers):
        _require(spec.sigma_n >= 0, f"sigma_n must be >= 0, got {spec.sigma_n}")
        _require(not isinstance(spec.base, NoisyInliers), "noisy model cannot wrap another noisy model")
        _validate(spec.base)
        return
    if isinstance(spec, UnionInliers):
        _require(spec.m >= 1 and spec.d >= 1, "m and d must be >= 1")
        _require(spec.m * spec.d <= spec.M1, f"m*d = {spec.m * spec.d} exceeds M1 = {spec.M1}")
        _require(len(spec.n_i_k) == spec.m, f"n_i_k has {len(spec.n_i_k)} entries, expected m = {spec.m}")
        _require(all(k >= 1 for k in spec.n_i_k), "every cluster count must be >= 1")
        _require(spec.n_o >= 0, "n_o must be >= 0")
        return
    _require(spec.M1 >= 1, f"M1 must be >= 1, got {spec.M1}")
    _require(1 <= spec.r <= spec.M1, f"r must lie in [1, M1], got r={spec.r}, M1={spec.M1}")
    _require(spec.n_i >= 1, f"n_i must be >= 1, got {spec.n_i}")
    _require(spec.n_o >= 0, f"n_o must be >= 0, got {spec.n_o}")
    if isinstance(spec, OutlierSubspace):
        _require(1 <= spec.r_o <= spec.M1, f"r_o must lie in [1, M1], got {spec.r_o}")
    if isinstance(spec, ClusteredOutliers):
        _require(spec.eta > 0, f"eta must be > 0, got {spec.eta}")
    if isinstance(spec, ClusteredInliers):
        _require(spec.gamma > 0, f"gamma must be > 0, got {spec.gamma}")
        if spec.r_o is not None:
            _require(1 <= spec.r_o <= spec.M1, f"r_o must lie in [1, M1], got {spec.r_o}")
    if isinstance(spec, NearSubspaceOutliers):
        _require(spec.h >= 1 and spec.r + spec.h <= spec.M1, f"need 1 <= h and r + h <= M1, got h={spec.h}")


def _outlier_subspace_block(M1, r_o, n_o, U, seed):
    # resample until U_o is not contained in U and U is not contained in U_o
    for attempt in range(100):
        U_o = random_subspace(M1, r_o, seed, tag=f"outlier-subspace/{attempt}")
        if np.linalg.norm(U.project_out(U_o.basis)) > 1e-8 and \
                np.linalg.norm(U_o.project_out(U.basis)) > 1e-8:
            return _in_subspace(U_o, n_o, seed, "outliers"), U_o
    raise ValueError("could not draw an outlier subspace distinct from U")


def _generate_clean(spec, seed: int):
    """Returns ``(B, A, U, aux)`` for the noiseless models."""
    aux: dict = {}
    if isinstance(spec, UnionInliers):
        bases = [random_subspace(spec.M1, spec.d, seed, tag=f"cluster-basis/{k}") for k in range(spec.m)]
        U = orthonormalize(np.hstack([b.basis for b in bases]))
        if U.dim != spec.m * spec.d:
            raise ValueError(f"cluster subspaces span {U.dim} < m*d = {spec.m * spec.d} dimensions")
        A = np.hstack([_in_subspace(b, n, seed, f"inliers/{k}")
                       for k, (b, n) in enumerate(zip(bases, spec.n_i_k))])
        B = random_unit_vectors(spec.M1, spec.n_o, seed, "outliers")
        aux["cluster_bases"] = bases
        return B, A, U, aux

    U = random_subspace(spec.M1, spec.r, seed, tag="inlier-subspace")
    if isinstance(spec, ClusteredInliers):
        w = substream(seed, "cluster-centre").standard_normal(spec.r)
        w /= np.linalg.norm(w)
        Z = random_unit_vectors(spec.r, spec.n_i, seed, "cluster-offsets")
        S = w[:, None] + spec.gamma * Z
        A = U.basis @ S
        A /= np.linalg.norm(A, axis=0)
        aux["w"] = w
    else:
        A = _in_subspace(U, spec.n_i, seed, "inliers")

    if isinstance(spec, Unstructured):
        B = random_unit_vectors(spec.M1, spec.n_o, seed, "outliers")
    elif isinstance(spec, OutlierSubspace) or (isinstance(spec, ClusteredInliers) and spec.r_o is not None):
        B, U_o = _outlier_subspace_block(spec.M1, spec.r_o, spec.n_o, U, seed)
        aux["U_o"] = U_o
    elif isinstance(spec, ClusteredInliers):
        B = random_unit_vectors(spec.M1, spec.n_o, seed, "outliers")
    elif isinstance(spec, ClusteredOutliers):
        gen = substream(seed, "cluster-outlier-centre")
        while True:
            q = gen.standard_normal(spec.M1)
            q /= np.linalg.norm(q)
            if np.linalg.norm(U.project_out(q[:, None])) >= Q_RESIDUAL_FLOOR:
                break
        Fm = random_unit_vectors(spec.M1, spec.n_o, seed, "outlier-offsets")
        B = (q[:, None] + spec.eta * Fm) / np.sqrt(1 + spec.eta**2)
        aux["q"] = q
        aux["q_perp"] = float(np.linalg.norm(U.project_out(q[:, None])))
    elif isinstance(spec, NearSubspaceOutliers):
        H = random_subspace(spec.M1, spec.h, seed, tag="extra-directions")
        G = column_normals(seed, "outlier-mixing", spec.r + spec.h, spec.n_o)
        B = np.hstack([U.basis, H.basis]) @ G
        B /= np.linalg.norm(B, axis=0)
        aux["H"] = H
    else:
        raise TypeError(f"unknown model spec {spec!r}")
    return B, A, U, aux


def psi_of(B, U: SubspaceBasis) -> float:
    """``max_i 1 / ||(I - U U^T) b_i||^2`` over unit-normalized outlier columns."""
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[1] == 0:
        raise ValueError("psi needs at least one outlier")
    Bn = B / np.linalg.norm(B, axis=0)
    res2 = np.sum(U.project_out(Bn) ** 2, axis=0)
    if np.min(res2) <= 1e-24:
        raise ValueError("degenerate outlier (psi infinite): an outlier lies in the inlier subspace")
    return float(np.max(1.0 / res2))


def compute_psi(ds: Dataset) -> float:
    return psi_of(ds.outliers, ds.U_true)


def generate(spec, seed: int) -> Dataset:
    """Draw a dataset from ``spec``; outliers occupy the leading columns."""
    _validate(spec)
    sigma_n = 0.0
    base = spec
    if isinstance(spec, NoisyInliers):
        sigma_n = float(spec.sigma_n)
        base = spec.base
    B, A, U, aux = _generate_clean(base, seed)

    snr = None
    if isinstance(spec, NoisyInliers):
        E = sigma_n * random_unit_vectors(A.shape[0], A.shape[1], seed, "noise")
        if sigma_n > 0:
            snr = float(np.sum(A**2) / np.sum(E**2))
        A = (A + E) / np.sqrt(1 + sigma_n**2)

    D = np.hstack([B, A])
    mask = np.zeros(D.shape[1], dtype=bool)
    mask[:B.shape[1]] = True
    psi = psi_of(B, U) if B.shape[1] else None
    return Dataset(D=D, U_true=U, outlier_mask=mask, spec=spec, seed=int(seed),
                   psi=psi, snr=snr, aux=aux)


@dataclass(frozen=True)
class PermutedRegression:
    d: int
    m: int
    n_i: int
    n_o: int


def permuted_regression_dataset(d: int, m: int, n_i: int, n_o: int, seed: int) -> Dataset:
    """Stack ``Z = [X; Y]`` where ``Y = Theta X`` has ``n_o`` columns shuffled.

    The displaced columns are moved by a derangement among themselves and are
    placed first. ``U_true`` is the ``d``-dimensional column space of
    ``[I; Theta]``, which contains every undisplaced column.
    """
    if d < 1 or m < 1:
        raise ValueError(f"d and m must be >= 1, got d={d}, m={m}")
    if n_i < 0 or n_o < 0 or n_i + n_o <= d:
        raise ValueError(f"need n_i + n_o > d, got n_i={n_i}, n_o={n_o}, d={d}")
    if n_o == 1:
        raise ValueError("a single displaced column cannot be permuted without a fixed point")
    n = n_i + n_o
    X = column_normals(seed, "regressors", d, n)
    Theta = substream(seed, "coefficients").standard_normal((m, d))
    Y = Theta @ X
    gen = substream(seed, "displacement")
    perm = np.arange(n_o)
    while n_o and np.any(perm == np.arange(n_o)):
        perm = gen.permutation(n_o)
    Y[:, :n_o] = Y[:, perm]
    Z = np.vstack([X, Y])
    Z /= np.linalg.norm(Z, axis=0)
    U = orthonormalize(np.vstack([np.eye(d), Theta]))
    mask = np.zeros(n, dtype=bool)
    mask[:n_o] = True
    psi = psi_of(Z[:, :n_o], U) if n_o else None
    return Dataset(D=Z, U_true=U, outlier_mask=mask, spec=PermutedRegression(d, m, n_i, n_o),
                   seed=int(seed), psi=psi, aux={"Theta": Theta, "permutation": perm})
