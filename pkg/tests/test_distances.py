import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kyfan.distances import (
    classical_partitioned_distance,
    classical_profile,
    difference_singular_values,
    distance_profile,
    jordan_decomposition,
    ky_fan_norm,
    max_over_constrained_operators,
    mixture,
    optimal_projectors,
    partitioned_distance,
    sorted_gaps,
    strong_convexity_margins,
    top_eigenprojector,
    top_eigenvalue_sum,
    trace_distance,
)
from kyfan.errors import DimensionMismatch, KOutOfRange, LengthMismatch, NotDistribution, NotHermitian
from kyfan.sampling import (
    diagonal_state,
    ginibre,
    random_density_matrix,
    random_hermitian,
    random_probability_vector,
    random_pure_state,
    random_unitary,
)
from kyfan.states import qubit_from_bloch

from conftest import oracle_eigvals_desc, oracle_profile, oracle_singular_values

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def _pair(d, seed):
    rng = np.random.default_rng(seed)
    return random_density_matrix(d, seed=rng), random_density_matrix(d, seed=rng)


# diag(0.2 x 5) vs diag(0, 0, 0, 0.5, 0.5): difference has |eigenvalues| 0.3, 0.3, 0.2, 0.2, 0.2
UNIFORM5 = np.eye(5) / 5
TAIL5 = np.diag([0, 0, 0, 0.5, 0.5])
UNIFORM5_TAIL5_PROFILE = [0.15, 0.3, 0.4, 0.5, 0.6]


def test_diagonal_profile_fixture():
    np.testing.assert_allclose(distance_profile(UNIFORM5, TAIL5).values, UNIFORM5_TAIL5_PROFILE, atol=1e-15)
    np.testing.assert_allclose(oracle_profile(UNIFORM5, TAIL5), UNIFORM5_TAIL5_PROFILE, atol=1e-15)


def test_qubit_fixture():
    # |u - v| = |(0.6, -0.8, 0)| = 1
    rho, sigma = qubit_from_bloch([0.6, 0, 0]), qubit_from_bloch([0, 0.8, 0])
    assert partitioned_distance(rho, sigma, 1) == pytest.approx(0.25, abs=1e-15)
    assert partitioned_distance(rho, sigma, 2) == pytest.approx(0.5, abs=1e-15)


def test_orthogonal_pure_states():
    e0, e1 = np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0])
    np.testing.assert_allclose(distance_profile(e0, e1).values, [0.5, 1.0, 1.0])


@given(dims, seeds)
def test_profile_matches_oracle(d, seed):
    rho, sigma = _pair(d, seed)
    np.testing.assert_allclose(distance_profile(rho, sigma).values, oracle_profile(rho, sigma), atol=1e-12)


@given(dims, seeds)
def test_symmetry_is_exact(d, seed):
    rho, sigma = _pair(d, seed)
    assert np.array_equal(distance_profile(rho, sigma).values, distance_profile(sigma, rho).values)


@given(dims, seeds)
def test_profile_shape(d, seed):
    rho, sigma = _pair(d, seed)
    prof = distance_profile(rho, sigma)
    v = prof.values
    assert np.all(np.diff(v) >= -1e-15)
    assert np.all(v >= 0) and v[-1] <= 1 + 1e-12
    # increments are decreasing singular values
    assert np.all(np.diff(np.diff(np.concatenate([[0.0], v]))) <= 1e-15)
    assert prof[d] == trace_distance(rho, sigma)
    assert list(prof) == prof.tolist()


@given(dims, seeds)
def test_identity_of_indiscernibles(d, seed):
    rho = random_density_matrix(d, seed=seed)
    assert np.all(distance_profile(rho, rho).values == 0)


@given(st.integers(2, 5), seeds)
def test_triangle_inequality(d, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density_matrix(d, seed=rng) for _ in range(3))
    lhs = distance_profile(a, c).values
    rhs = distance_profile(a, b).values + distance_profile(b, c).values
    assert np.all(rhs - lhs >= -1e-12)


@given(st.integers(2, 6), seeds)
def test_pure_state_collapse(d, seed):
    rng = np.random.default_rng(seed)
    v = distance_profile(random_pure_state(d, rng), random_pure_state(d, rng)).values
    assert v[0] == pytest.approx(v[-1] / 2, abs=1e-12)
    np.testing.assert_allclose(v[1:], v[-1], atol=1e-12)


@given(st.integers(1, 5), seeds)
def test_unitary_invariance(d, seed):
    rho, sigma = _pair(d, seed)
    u = random_unitary(d, seed)
    moved = distance_profile(u @ rho.matrix @ u.conj().T, u @ sigma.matrix @ u.conj().T).values
    np.testing.assert_allclose(moved, distance_profile(rho, sigma).values, atol=1e-12)


@given(st.integers(1, 6), seeds)
def test_commuting_states_reduce_to_classical(d, seed):
    rng = np.random.default_rng(seed)
    p, q = random_probability_vector(d, rng), random_probability_vector(d, rng)
    u = random_unitary(d, rng)
    quantum = distance_profile(diagonal_state(p, u), diagonal_state(q, u)).values
    np.testing.assert_allclose(quantum, classical_profile(p, q), atol=1e-12)


@given(st.integers(1, 6), seeds)
def test_ky_fan_norm_general_matrices(d, seed):
    x = ginibre(d, d + 1, np.random.default_rng(seed))
    s = oracle_singular_values(x)
    for k in range(1, d + 1):
        assert ky_fan_norm(x, k) == pytest.approx(s[:k].sum(), rel=1e-10)


def test_ky_fan_norm_rejects_bad_k():
    with pytest.raises(KOutOfRange):
        ky_fan_norm(np.eye(3), 4)
    with pytest.raises(KOutOfRange):
        ky_fan_norm(np.eye(3), 0)
    with pytest.raises(KOutOfRange):
        distance_profile(UNIFORM5, TAIL5)[6]


def test_mismatched_dimensions():
    with pytest.raises(DimensionMismatch):
        distance_profile(np.eye(2) / 2, np.eye(3) / 3)


@given(dims, seeds)
def test_jordan_decomposition(d, seed):
    rho, sigma = _pair(d, seed)
    jd = jordan_decomposition(rho, sigma)
    diff = rho.matrix - sigma.matrix
    np.testing.assert_allclose(jd.R - jd.T, diff, atol=1e-12)
    np.testing.assert_allclose(jd.R @ jd.T, 0, atol=1e-12)
    assert oracle_eigvals_desc(jd.R)[-1] >= -1e-12
    assert oracle_eigvals_desc(jd.T)[-1] >= -1e-12
    # traceless difference: equal mass on both sides
    assert jd.kappa.sum() == pytest.approx(jd.tau.sum(), abs=1e-12)
    np.testing.assert_allclose(jd.s, difference_singular_values(rho, sigma))
    vecs = jd.ranked_vectors()
    for j, v in enumerate(vecs):
        assert abs(np.vdot(v, diff @ v).real) == pytest.approx(jd.s[j], abs=1e-12)


def test_jordan_ties_go_to_r_side():
    rho, sigma = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert jordan_decomposition(rho, sigma).ranking == ((0, 0), (1, 0))
    pr, pt = optimal_projectors(rho, sigma, 1)
    np.testing.assert_allclose(pr, np.diag([1.0, 0.0]))
    np.testing.assert_allclose(pt, 0)
    jd = jordan_decomposition(np.diag([0.5, 0.25, 0.25]), np.diag([0.25, 0.5, 0.25]))
    assert jd.ranking[0] == (0, 0)
    assert jd.kernel_vectors.shape[1] == 1


def test_equal_states_give_empty_projectors():
    rho = random_density_matrix(3, seed=4)
    for k in (1, 3):
        pr, pt = optimal_projectors(rho, rho, k)
        assert np.all(pr == 0) and np.all(pt == 0)


def test_jordan_accepts_hermitian_arrays():
    jd = jordan_decomposition(np.diag([1.0, -2.0]), np.zeros((2, 2)))
    assert jd.kappa.tolist() == [1.0] and jd.tau.tolist() == [2.0]
    with pytest.raises(NotHermitian):
        jordan_decomposition(np.array([[0, 1.0], [0, 0]]), np.zeros((2, 2)))


@given(dims, seeds)
def test_optimal_projectors_attain_distance(d, seed):
    rho, sigma = _pair(d, seed)
    diff = rho.matrix - sigma.matrix
    prof = distance_profile(rho, sigma)
    for k in range(1, d + 1):
        pr, pt = optimal_projectors(rho, sigma, k)
        np.testing.assert_allclose(pr @ pt, 0, atol=1e-12)
        rank = np.trace(pr).real + np.trace(pt).real
        assert rank <= k + 1e-12
        assert np.trace((pr - pt) @ diff).real == pytest.approx(2 * prof[k], abs=1e-12)


def test_classical_distance_fixture():
    p, q = [0.5, 0.5, 0.0], [0.2, 0.3, 0.5]
    np.testing.assert_allclose(classical_profile(p, q), [0.25, 0.4, 0.5])
    assert classical_partitioned_distance(p, q, 2) == pytest.approx(0.4)
    np.testing.assert_allclose(sorted_gaps(p, q, 5), [0.5, 0.3, 0.2, 0, 0])


def test_classical_distance_validation():
    with pytest.raises(NotDistribution):
        classical_profile([0.5, 0.6], [0.5, 0.5])
    with pytest.raises(NotDistribution):
        classical_profile([1.1, -0.1], [0.5, 0.5])
    with pytest.raises(LengthMismatch):
        classical_partitioned_distance([1.0], [0.5, 0.5], 1)


@given(st.integers(1, 6), seeds)
def test_max_principle(d, seed):
    h = random_hermitian(d, seed)
    lam = oracle_eigvals_desc(h)
    for k in range(1, d + 1):
        top = top_eigenvalue_sum(h, k)
        assert top == pytest.approx(lam[:k].sum(), abs=1e-12)
        assert np.trace(top_eigenprojector(h, k) @ h).real == pytest.approx(top, abs=1e-12)
        assert max_over_constrained_operators(h, k, trials=20, seed=seed) <= top + 1e-9


@given(st.integers(1, 4), st.integers(1, 5), seeds)
def test_strong_convexity(d, n, seed):
    rng = np.random.default_rng(seed)
    p, q = random_probability_vector(n, rng), random_probability_vector(n, rng)
    rhos = [random_density_matrix(d, seed=rng) for _ in range(n)]
    sigmas = [random_density_matrix(d, seed=rng) for _ in range(n)]
    assert strong_convexity_margins(p, rhos, q, sigmas).min() >= -1e-12
    # same weights: joint convexity
    assert strong_convexity_margins(p, rhos, p, sigmas).min() >= -1e-12


def test_mixture_weights_checked():
    with pytest.raises(LengthMismatch):
        mixture([0.5, 0.5], [np.eye(2) / 2])
