import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kyfan.distances import distance_profile, jordan_decomposition
from kyfan.errors import CompletenessViolated, DimensionMismatch, ElementNotPositive, SingularNormalizer
from kyfan.measurements import (
    measure_pair,
    optimal_pvm,
    outcome_probabilities,
    povm_excess,
    povm_from_vectors,
    random_rank_one_povm,
    validate_povm,
    verify_measurement_bound,
)
from kyfan.sampling import random_density_matrix

seeds = st.integers(0, 2**32 - 1)

# rho - sigma = diag(0.2, 0.1, -0.3): s = (0.3, 0.2, 0.1), D = (0.15, 0.25, 0.3)
RHO3 = np.diag([0.5, 0.3, 0.2])
SIGMA3 = np.diag([0.3, 0.2, 0.5])


def _pair(d, seed):
    rng = np.random.default_rng(seed)
    return random_density_matrix(d, seed=rng), random_density_matrix(d, seed=rng)


def test_computational_basis_measurement():
    povm = validate_povm([np.diag(e) for e in np.eye(3)])
    assert povm.small_trace and povm.n_outcomes == 3
    np.testing.assert_allclose(outcome_probabilities(povm, RHO3), [0.5, 0.3, 0.2])
    stats = measure_pair(povm, RHO3, SIGMA3)
    np.testing.assert_allclose(stats.gaps_sorted, [0.3, 0.2, 0.1])
    np.testing.assert_allclose(stats.classical_profile(), [0.15, 0.25, 0.3])


def test_large_trace_element_can_exceed_partitioned_distance():
    povm = validate_povm([np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])])
    assert not povm.small_trace
    np.testing.assert_allclose(povm.traces, [2.0, 1.0])
    excess = povm_excess(povm, RHO3, SIGMA3)
    # gaps (0.3, 0.3, 0) against s = (0.3, 0.2, 0.1)
    np.testing.assert_allclose(excess, [0.0, 0.05, 0.0], atol=1e-15)


def test_validation_errors():
    with pytest.raises(ElementNotPositive) as info:
        validate_povm([np.diag([1.5, 0.0]), np.diag([-0.5, 1.0])])
    assert info.value.index == 1
    with pytest.raises(CompletenessViolated):
        validate_povm([np.diag([1.0, 0.0]), np.diag([0.0, 0.9])])
    povm = validate_povm([np.eye(2)])
    with pytest.raises(DimensionMismatch):
        outcome_probabilities(povm, np.eye(3) / 3)


def test_singular_normalizer():
    with pytest.raises(SingularNormalizer):
        povm_from_vectors([[1, 0, 0], [0, 1, 0], [1, 1, 0]])


@given(st.integers(1, 5), st.integers(0, 4), seeds)
def test_random_rank_one_povm(d, extra, seed):
    povm = random_rank_one_povm(d, d + extra, seed)
    assert povm.n_outcomes == d + extra
    assert povm.completeness_residual <= 1e-9
    assert povm.small_trace
    for e in povm.elements:
        assert np.linalg.matrix_rank(e, tol=1e-9) == 1


@given(st.integers(1, 5), seeds)
def test_outcomes_are_distributions(d, seed):
    rho, _ = _pair(d, seed)
    p = outcome_probabilities(random_rank_one_povm(d, d + 2, seed), rho)
    assert p.min() >= -1e-12
    assert p.sum() == pytest.approx(1.0, abs=1e-12)


@given(st.integers(1, 5), seeds)
def test_optimal_pvm_gaps_are_singular_values(d, seed):
    rho, sigma = _pair(d, seed)
    pvm = optimal_pvm(rho, sigma)
    assert pvm.n_outcomes == d
    for i, a in enumerate(pvm.elements):
        np.testing.assert_allclose(a @ a, a, atol=1e-12)
        for b in pvm.elements[i + 1:]:
            np.testing.assert_allclose(a @ b, 0, atol=1e-12)
    stats = measure_pair(pvm, rho, sigma)
    np.testing.assert_allclose(stats.gaps_sorted, jordan_decomposition(rho, sigma).s, atol=1e-12)
    np.testing.assert_allclose(np.abs(stats.p - stats.q), jordan_decomposition(rho, sigma).s, atol=1e-12)


@given(st.integers(1, 4), seeds)
def test_rank_one_povms_never_beat_partitioned_distance(d, seed):
    rho, sigma = _pair(d, seed)
    rng = np.random.default_rng(seed)
    for _ in range(5):
        povm = random_rank_one_povm(d, int(rng.integers(d, d + 5)), rng)
        assert povm_excess(povm, rho, sigma).max() <= 1e-12


def test_verify_report():
    rho, sigma = _pair(3, 8)
    report = verify_measurement_bound(rho, sigma, 2, trials=40, seed=1)
    assert report.within_bound and report.saturated
    assert report.bound == distance_profile(rho, sigma)[2]
    assert report.max_observed == pytest.approx(report.bound, abs=1e-12)


def test_alias_names():
    from kyfan import check_corollary_51, check_gap_submajorization, verify_measurement_bound, verify_relt0

    assert verify_relt0 is verify_measurement_bound
    assert check_corollary_51 is check_gap_submajorization
