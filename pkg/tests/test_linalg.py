import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncpursuit.linalg import (
    SubspaceBasis,
    complement_residual_norms,
    estimate_rank,
    orthonormalize,
    recovery_error,
    thin_svd,
)


def _random_orthogonal(n, rng):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def test_thin_svd_identity():
    F = thin_svd(np.eye(3), rank_tol=1e-12)
    np.testing.assert_allclose(F.sigma, [1, 1, 1])
    assert F.effective_rank == 3


def test_thin_svd_duplicated_column():
    # D D^T = diag(2, 1) -> singular values sqrt(2), 1
    D = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    F = thin_svd(D)
    np.testing.assert_allclose(F.sigma, [np.sqrt(2), 1.0], atol=1e-14)
    assert F.effective_rank == 2


def test_thin_svd_random_reconstruction():
    D = np.random.default_rng(7).standard_normal((20, 50))
    F = thin_svd(D)
    assert np.linalg.norm(D - F.reconstruct()) <= 1e-8 * np.linalg.norm(D)


@pytest.mark.parametrize("seed", range(100))
def test_thin_svd_invariants_many_seeds(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(2, 30, size=2)
    D = rng.standard_normal((m, n))
    F = thin_svd(D)
    assert np.linalg.norm(D - F.reconstruct()) <= 1e-8 * np.linalg.norm(D)
    np.testing.assert_allclose(F.left.T @ F.left, np.eye(F.effective_rank), atol=1e-10)
    assert np.all(F.sigma > 0) and np.all(np.diff(F.sigma) <= 0)
    assert abs(np.sum(F.right**2) - F.effective_rank) <= 1e-9


def test_thin_svd_rank_deficient_cut():
    rng = np.random.default_rng(1)
    D = rng.standard_normal((30, 3)) @ rng.standard_normal((3, 40))
    F = thin_svd(D)
    assert F.effective_rank == 3
    assert np.linalg.norm(D - F.reconstruct()) <= 1e-8 * np.linalg.norm(D)


def test_thin_svd_sign_convention_is_deterministic():
    D = np.random.default_rng(2).standard_normal((10, 15))
    F1, F2 = thin_svd(D), thin_svd(D.copy())
    np.testing.assert_array_equal(F1.right, F2.right)
    idx = np.argmax(np.abs(F1.left), axis=0)
    assert np.all(F1.left[idx, np.arange(F1.effective_rank)] > 0)


def test_thin_svd_errors():
    with pytest.raises(ValueError, match="zero matrix"):
        thin_svd(np.zeros((3, 4)))
    bad = np.ones((2, 2))
    bad[0, 1] = np.nan
    with pytest.raises(ValueError, match="non-finite input"):
        thin_svd(bad)


@pytest.mark.parametrize("sigma, ratio, expected", [
    ((10, 1, 0.4), 0.05, 2),
    ((1, 1, 1), 0.05, 3),
    ((5, 0.2), 1 / 20, 1),
])
def test_estimate_rank(sigma, ratio, expected):
    assert estimate_rank(sigma, ratio) == expected


def test_estimate_rank_default_ratio_and_empty():
    assert estimate_rank([20.0, 1.01, 0.99]) == 2
    with pytest.raises(ValueError):
        estimate_rank([])


def test_orthonormalize_collinear():
    B = orthonormalize(np.array([[1.0, 2.0], [0.0, 0.0]]))
    assert B.dim == 1
    np.testing.assert_allclose(np.abs(B.basis[:, 0]), [1.0, 0.0])


def test_orthonormalize_identity_and_zero():
    assert orthonormalize(np.eye(3)).dim == 3
    Z = orthonormalize(np.zeros((4, 2)))
    assert Z.dim == 0 and Z.ambient == 4


def test_orthonormalize_random_matches_svd_rank():
    X = np.random.default_rng(3).standard_normal((50, 4))
    B = orthonormalize(X)
    assert B.dim == np.linalg.matrix_rank(X) == 4
    np.testing.assert_allclose(B.basis.T @ B.basis, np.eye(4), atol=1e-10)
    # spans the same space: projecting X onto B leaves nothing
    assert np.linalg.norm(B.project_out(X)) < 1e-10


def test_complement_residuals_identity():
    U = SubspaceBasis(np.array([[1.0], [0.0]]))
    np.testing.assert_allclose(complement_residual_norms(np.eye(2), U), [0.0, 1.0])


def test_complement_residuals_inliers_vanish():
    rng = np.random.default_rng(4)
    U = orthonormalize(rng.standard_normal((30, 3)))
    A = U.basis @ rng.standard_normal((3, 25))
    assert np.all(complement_residual_norms(A, U) < 1e-10)


def test_complement_residuals_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        complement_residual_norms(np.eye(3), SubspaceBasis(np.eye(2)[:, :1]))


def test_recovery_error_trivial_cases():
    U = SubspaceBasis(np.array([[1.0], [0.0]]))
    assert recovery_error(U, U) == 0.0
    V = SubspaceBasis(np.array([[0.0], [1.0]]))
    assert recovery_error(U, V) == pytest.approx(1.0)


def test_recovery_error_projector_oracle():
    rng = np.random.default_rng(5)
    U = orthonormalize(rng.standard_normal((12, 3)))
    for tilt in [0.0, 0.1, 0.5, 1.0]:
        w = U.project_out(rng.standard_normal((12, 1)))
        w /= np.linalg.norm(w)
        X = np.column_stack([U.basis[:, :2], np.cos(tilt) * U.basis[:, 2:] + np.sin(tilt) * w])
        U_hat = orthonormalize(X)
        P_perp = np.eye(12) - U.basis @ U.basis.T
        expected = np.linalg.norm(P_perp @ U_hat.basis, "fro") / np.linalg.norm(U.basis, "fro")
        assert recovery_error(U, U_hat) == pytest.approx(expected, abs=1e-12)
        assert recovery_error(U, U_hat) == pytest.approx(abs(np.sin(tilt)) / np.sqrt(3), abs=1e-10)


def test_recovery_error_zero_dim_rejected():
    with pytest.raises(ValueError):
        recovery_error(SubspaceBasis(np.zeros((3, 0))), SubspaceBasis(np.eye(3)[:, :1]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 4), dim_hat=st.integers(1, 4))
def test_recovery_error_basis_invariance(seed, dim, dim_hat):
    rng = np.random.default_rng(seed)
    U = orthonormalize(rng.standard_normal((9, dim)))
    U_hat = orthonormalize(rng.standard_normal((9, dim_hat)))
    e = recovery_error(U, U_hat)
    U2 = SubspaceBasis(U.basis @ _random_orthogonal(dim, rng))
    U_hat2 = SubspaceBasis(U_hat.basis @ _random_orthogonal(dim_hat, rng))
    assert recovery_error(U2, U_hat2) == pytest.approx(e, abs=1e-12)
    assert 0 <= e <= np.sqrt(dim_hat) / np.sqrt(dim) + 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_complement_residuals_rotation_invariance(seed):
    rng = np.random.default_rng(seed)
    D = rng.standard_normal((8, 11))
    U = orthonormalize(rng.standard_normal((8, 3)))
    Q = _random_orthogonal(8, rng)
    f = complement_residual_norms(D, U)
    g = complement_residual_norms(Q @ D, SubspaceBasis(Q @ U.basis))
    np.testing.assert_allclose(f, g, atol=1e-12)
