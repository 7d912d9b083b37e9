import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncpursuit.linalg import SubspaceBasis, orthonormalize, recovery_error
from ncpursuit.recovery import (
    AdaptiveProjection,
    FixedFraction,
    InsufficientRankError,
    RankGreedy,
    select_columns,
    separation_holds,
    trial_success_exact,
    trial_success_residual,
)
from ncpursuit.scoring import ScoreVector, compute_scores, normalize_columns
from ncpursuit.synth import NoisyInliers, OutlierSubspace, Unstructured, generate


def _sv(values, method="ANCP"):
    return ScoreVector(method, np.asarray(values, dtype=float))


E1E1E2 = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def test_rank_greedy_identity():
    assert select_columns(np.eye(3), _sv([3, 2, 1]), RankGreedy(2)).selected == [0, 1]


def test_rank_greedy_skips_duplicate():
    res = select_columns(E1E1E2, _sv([2, 2, 1]), RankGreedy(2))
    assert res.selected == [0, 2]
    assert res.dim == 2


def test_rank_greedy_ties_broken_by_lowest_index():
    res = select_columns(np.eye(4), _sv([1, 1, 1, 1]), RankGreedy(2))
    assert res.selected == [0, 1]


def test_rank_greedy_insufficient_rank():
    with pytest.raises(InsufficientRankError, match="insufficient rank"):
        select_columns(E1E1E2, _sv([2, 2, 1]), RankGreedy(3))


def test_adaptive_projection_skips_redundant_columns():
    D = normalize_columns(np.array([[1.0, 1.0, 1.0, 0.0], [0.0, 1e-9, 0.0, 1.0]]))
    res = select_columns(D, _sv([4, 3, 2, 1]), AdaptiveProjection(2))
    assert res.selected == [0, 3]
    with pytest.raises(InsufficientRankError):
        select_columns(E1E1E2, _sv([2, 2, 1]), AdaptiveProjection(3))


def test_fixed_fraction_keeps_ceiling():
    x = _sv([5, 4, 3, 2, 1])
    res = select_columns(np.eye(5), x, FixedFraction(outlier_fraction=0.5))
    assert res.selected == [0, 1, 2]
    assert res.dim == 3
    res = select_columns(np.eye(5), x, FixedFraction(outlier_fraction=0.5, rank=2))
    assert res.dim == 2


def test_strategy_validation():
    with pytest.raises(ValueError):
        RankGreedy(0)
    with pytest.raises(ValueError):
        FixedFraction(outlier_fraction=1.0)
    with pytest.raises(ValueError, match="does not match"):
        select_columns(np.eye(3), _sv([1, 2]), RankGreedy(1))


@pytest.fixture(scope="module")
def unstructured_seed11():
    return generate(Unstructured(M1=50, r=4, n_i=100, n_o=500), seed=11)


def test_pipeline_recovers_unstructured(unstructured_seed11):
    ds = unstructured_seed11
    x = compute_scores(ds.D, "SNCP")
    res = select_columns(normalize_columns(ds.D), x, RankGreedy(4))
    assert recovery_error(ds.U_true, res.basis) < 1e-3
    assert trial_success_exact(ds.U_true, res.basis)
    assert res.dim == 4 and len(set(res.selected)) == 4


@pytest.mark.parametrize("strat", [RankGreedy(4), AdaptiveProjection(4)])
def test_strategies_select_only_inliers_when_separated(unstructured_seed11, strat):
    ds = unstructured_seed11
    for method in ("ANCP", "SNCP"):
        x = compute_scores(ds.D, method)
        assert separation_holds(x, ds.outlier_mask)
        res = select_columns(normalize_columns(ds.D), x, strat)
        assert not ds.outlier_mask[res.selected].any()
        assert trial_success_exact(ds.U_true, res.basis)
        np.testing.assert_allclose(res.basis.basis.T @ res.basis.basis, np.eye(4), atol=1e-10)


@pytest.mark.parametrize("x, mask, expected", [
    ((1, 1, 9, 9), (True, True, False, False), True),
    ((5, 1, 4, 9), (True, False, False, False), False),
    ((2, 3, 3, 4), (True, True, False, False), False),  # equal extremes, strict
])
def test_separation_holds(x, mask, expected):
    assert separation_holds(_sv(x), np.array(mask)) is expected


def test_separation_requires_both_classes():
    with pytest.raises(ValueError):
        separation_holds(_sv([1, 2]), np.array([True, True]))
    with pytest.raises(ValueError):
        separation_holds(_sv([1, 2]), np.array([False, False]))


def test_trial_success_exact_trivial():
    U = SubspaceBasis(np.eye(3)[:, :1])
    assert trial_success_exact(U, U)
    assert not trial_success_exact(U, SubspaceBasis(np.eye(3)[:, 1:2]))


def test_trial_success_residual_trivial():
    U = SubspaceBasis(np.eye(3)[:, :2])
    D = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    mask = np.array([True, False, False])
    assert trial_success_residual(D, U, mask)
    # basis orthogonal to every column: all residuals equal the unit norms
    W = SubspaceBasis(np.eye(4)[:, 3:])
    D4 = np.vstack([D, np.zeros((1, 3))])
    assert not trial_success_residual(D4, W, mask)


def test_trial_success_residual_high_snr_pipeline():
    ds = generate(NoisyInliers(OutlierSubspace(M1=200, r=5, r_o=10, n_i=100, n_o=100), 0.1), seed=3)
    Dn = normalize_columns(ds.D)
    x = compute_scores(Dn, "SNCP", normalized=True, rank_ratio=1 / 20)
    res = select_columns(Dn, x, FixedFraction(outlier_fraction=0.5, rank=5))
    assert trial_success_residual(Dn, res.basis, ds.outlier_mask)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_select_columns_deterministic(seed):
    rng = np.random.default_rng(seed)
    D = normalize_columns(rng.standard_normal((6, 20)))
    x = _sv(rng.integers(0, 4, size=20))  # many ties
    for strat in (RankGreedy(3), AdaptiveProjection(3), FixedFraction(0.3)):
        a = select_columns(D, x, strat)
        b = select_columns(D.copy(), x, strat)
        assert a.selected == b.selected
        np.testing.assert_array_equal(a.basis.basis, b.basis.basis)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r=st.integers(1, 5))
def test_rank_greedy_spans_exactly_r(seed, r):
    rng = np.random.default_rng(seed)
    D = normalize_columns(rng.standard_normal((8, 15)))
    res = select_columns(D, _sv(rng.standard_normal(15)), RankGreedy(r))
    assert res.dim == r and len(set(res.selected)) == r
    # the kept columns themselves lie in the returned span
    assert np.linalg.norm(res.basis.project_out(D[:, res.selected])) < 1e-10


def test_selection_respects_separation_on_generated_data():
    # separation => greedy picks inliers only, checked across several seeds
    hits = 0
    for seed in range(10):
        ds = generate(Unstructured(M1=30, r=3, n_i=40, n_o=60), seed=seed)
        x = compute_scores(ds.D, "ANCP")
        if separation_holds(x, ds.outlier_mask):
            hits += 1
            res = select_columns(normalize_columns(ds.D), x, RankGreedy(3))
            assert not ds.outlier_mask[res.selected].any()
            assert recovery_error(ds.U_true, res.basis) < 1e-3
    assert hits > 0


def test_orthonormalize_used_for_basis_is_span_of_selection():
    D = normalize_columns(np.random.default_rng(0).standard_normal((5, 9)))
    res = select_columns(D, _sv(np.arange(9)[::-1]), RankGreedy(2))
    ref = orthonormalize(D[:, res.selected])
    assert recovery_error(ref, res.basis) < 1e-12
