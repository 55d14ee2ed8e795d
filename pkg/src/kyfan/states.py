"""Validated density matrices and the qubit Bloch-ball parametrization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPositive, NotSquare, OutsideBall, TraceNotOne, WrongDimension
from .linalg import as_matrix, hermitian_eigensystem, hermiticity_residual

STATE_TOL = 1e-10

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A Hermitian, positive semidefinite, unit-trace matrix.

    Instances built directly are trusted; use :func:`validate_density` for
    anything coming from outside the library.  The wrapped array is made
    read-only.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigensystem(self.matrix).eigenvalues

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def validate_density(m, tol: float = STATE_TOL) -> DensityMatrix:
    """Check the density-matrix invariants and return a :class:`DensityMatrix`.

    Raises :class:`NotHermitian`, :class:`TraceNotOne` (with the signed
    deviation) or :class:`NotPositive` (with the most negative eigenvalue).
    The accepted matrix is symmetrized exactly.
    """
    if isinstance(m, DensityMatrix):
        return m
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"state must be square, got shape {m.shape}")
    residual = hermiticity_residual(m)
    if residual > tol:
        raise NotHermitian(residual)
    m = 0.5 * (m + m.conj().T)
    deviation = float(np.real(np.trace(m))) - 1.0
    if abs(deviation) > tol:
        raise TraceNotOne(deviation)
    lowest = float(hermitian_eigensystem(m).eigenvalues[-1])
    if lowest < -tol:
        raise NotPositive(lowest)
    return DensityMatrix(m)


def as_state(x, tol: float = STATE_TOL) -> DensityMatrix:
    return x if isinstance(x, DensityMatrix) else validate_density(x, tol)


def pure_state(psi) -> DensityMatrix:
    """Rank-one state ``|psi><psi|`` for a (not necessarily normalized) ket."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ValueError("zero vector has no associated state")
    psi = psi / norm
    m = np.outer(psi, psi.conj())
    return DensityMatrix(0.5 * (m + m.conj().T))


def qubit_from_bloch(u, tol: float = STATE_TOL) -> DensityMatrix:
    """The qubit state ``(I + u . sigma) / 2``."""
    u = np.asarray(u, dtype=float).reshape(3)
    length = float(np.linalg.norm(u))
    if length > 1.0 + tol:
        raise OutsideBall(f"Bloch vector length {length:.12g} exceeds 1")
    m = 0.5 * (np.eye(2, dtype=np.complex128) + u[0] * PAULI[0] + u[1] * PAULI[1] + u[2] * PAULI[2])
    return DensityMatrix(m)


def bloch_from_qubit(rho) -> np.ndarray:
    """Bloch vector ``u_a = tr(rho sigma_a)`` of a qubit state."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    if m.shape != (2, 2):
        raise WrongDimension(f"Bloch vectors exist only for qubits, got shape {m.shape}")
    return np.array([np.real(np.trace(m @ s)) for s in PAULI])
