import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kyfan.errors import InvalidRank, NotHermitian, NotPositive, NotSquare, OutsideBall, TraceNotOne, WrongDimension
from kyfan.sampling import (
    diagonal_state,
    haar_vector,
    random_density_matrix,
    random_probability_vector,
    random_pure_state,
    random_unitary,
)
from kyfan.states import DensityMatrix, bloch_from_qubit, pure_state, qubit_from_bloch, validate_density

seeds = st.integers(0, 2**32 - 1)


def test_maximally_mixed_accepted():
    rho = validate_density(np.diag([0.5, 0.5]))
    assert rho.dim == 2
    assert rho.purity() == pytest.approx(0.5)


def test_trace_deviation_reported():
    with pytest.raises(TraceNotOne) as info:
        validate_density(np.diag([0.6, 0.6]))
    assert info.value.deviation == pytest.approx(0.2)
    assert "TraceNotOne(+0.2)" in str(info.value)


def test_negative_eigenvalue_reported():
    with pytest.raises(NotPositive) as info:
        validate_density(np.diag([1.1, -0.1]))
    assert info.value.min_eigenvalue == pytest.approx(-0.1)


def test_hermiticity_checked_first():
    with pytest.raises(NotHermitian):
        validate_density(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(NotSquare):
        validate_density(np.ones((2, 3)) / 2)


def test_tolerance_is_configurable():
    m = np.diag([0.5 + 1e-9, 0.5])
    with pytest.raises(TraceNotOne):
        validate_density(m)
    assert validate_density(m, tol=1e-8).dim == 2


def test_density_matrix_is_read_only():
    rho = validate_density(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0
    assert rho == DensityMatrix(np.eye(2) / 2)
    assert hash(rho) == hash(DensityMatrix(np.eye(2) / 2))


@given(st.integers(1, 6), seeds)
def test_random_density_matrix_is_valid(d, seed):
    rho = random_density_matrix(d, seed=seed)
    validate_density(rho.matrix)
    assert np.array_equal(rho.matrix, rho.matrix.conj().T)


@given(st.integers(1, 6), st.data())
def test_random_density_matrix_rank(d, data):
    rank = data.draw(st.integers(1, d))
    rho = random_density_matrix(d, rank, seed=data.draw(seeds))
    lam = np.linalg.eigvalsh(rho.matrix)
    assert np.sum(lam > 1e-10) == rank


def test_invalid_rank():
    with pytest.raises(InvalidRank):
        random_density_matrix(3, 4, seed=0)
    with pytest.raises(InvalidRank):
        random_density_matrix(3, 0, seed=0)


def test_seeded_generation_is_reproducible():
    a = random_density_matrix(4, seed=42)
    b = random_density_matrix(4, seed=42)
    assert a == b
    np.testing.assert_array_equal(random_unitary(3, seed=9), random_unitary(3, seed=9))


@given(st.integers(1, 6), seeds)
def test_random_unitary_is_unitary(d, seed):
    u = random_unitary(d, seed)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


def test_haar_vector_first_moment():
    # E|<0|psi>|^2 = 1/d for Haar vectors
    rng = np.random.default_rng(1)
    d = 4
    samples = [abs(haar_vector(d, rng)[0]) ** 2 for _ in range(4000)]
    assert np.mean(samples) == pytest.approx(1 / d, abs=0.01)


@given(st.integers(1, 6), seeds)
def test_pure_state_purity(d, seed):
    rho = random_pure_state(d, seed)
    assert rho.purity() == pytest.approx(1.0, abs=1e-12)
    assert pure_state([3, 4j]).matrix[0, 0] == pytest.approx(0.36)


def test_diagonal_state_in_basis():
    u = random_unitary(3, seed=2)
    rho = diagonal_state([0.7, 0.2, 0.1], u)
    np.testing.assert_allclose(u.conj().T @ rho.matrix @ u, np.diag([0.7, 0.2, 0.1]), atol=1e-14)
    p = random_probability_vector(5, seed=3)
    assert p.sum() == pytest.approx(1.0) and p.min() >= 0


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_round_trip(x, y, z):
    u = np.array([x, y, z])
    if np.linalg.norm(u) > 1:
        u = u / np.linalg.norm(u)
    rho = qubit_from_bloch(u)
    validate_density(rho.matrix)
    np.testing.assert_allclose(bloch_from_qubit(rho), u, atol=1e-14)


def test_bloch_errors():
    with pytest.raises(OutsideBall):
        qubit_from_bloch([1.0, 0.1, 0.0])
    qubit_from_bloch([1.0 + 5e-11, 0.0, 0.0])
    with pytest.raises(WrongDimension):
        bloch_from_qubit(np.eye(3) / 3)
