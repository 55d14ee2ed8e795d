"""POVMs, measurement statistics and the measurement form of ``D_k``.

Among POVMs whose elements all have trace at most one, the largest
classical partitioned distance ``D_k^down(p, q)`` of the outcome
distributions equals ``D_k(rho, sigma)``; the projective measurement onto the
eigenvectors of ``rho - sigma`` attains it for every ``k`` at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distances import _matrix_of, distance_profile, jordan_decomposition, sorted_gaps, _check_k
from .errors import CompletenessViolated, DimensionMismatch, ElementNotPositive, NotSquare, SingularNormalizer, ValidationError
from .linalg import as_matrix, hermitian_eigensystem, hermiticity_residual, psd_inv_sqrt
from .sampling import haar_vector, make_rng

POSITIVITY_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
SMALL_TRACE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Povm:
    """Validated POVM; build with :func:`validate_povm`."""

    elements: tuple[np.ndarray, ...]
    traces: np.ndarray
    completeness_residual: float
    small_trace: bool

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def validate_povm(elements, positivity_tol: float = POSITIVITY_TOL, completeness_tol: float = COMPLETENESS_TOL) -> Povm:
    """Check positivity of each element and completeness of the set.

    ``small_trace`` records whether every element has trace at most one,
    the hypothesis under which the measurement characterization of ``D_k``
    holds.
    """
    mats = [as_matrix(e) for e in elements]
    if not mats:
        raise ValidationError("a POVM needs at least one element")
    d = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            raise NotSquare(f"element {i} has shape {m.shape}, expected {(d, d)}")
    cleaned = []
    for i, m in enumerate(mats):
        if hermiticity_residual(m) > positivity_tol:
            raise ElementNotPositive(i, float("nan"))
        m = 0.5 * (m + m.conj().T)
        lowest = float(hermitian_eigensystem(m).eigenvalues[-1])
        if lowest < -positivity_tol:
            raise ElementNotPositive(i, lowest)
        m.setflags(write=False)
        cleaned.append(m)
    total = sum(cleaned)
    residual = float(np.max(np.abs(total - np.eye(d))))
    if residual > completeness_tol:
        raise CompletenessViolated(residual)
    traces = np.array([np.real(np.trace(m)) for m in cleaned])
    return Povm(tuple(cleaned), traces, residual, bool(np.all(traces <= 1.0 + SMALL_TRACE_TOL)))


@dataclass(frozen=True)
class MeasurementStats:
    """Outcome distributions of one POVM on two states."""

    p: np.ndarray
    q: np.ndarray
    gaps_sorted: np.ndarray
    padded_length: int = field(default=0)

    def classical_profile(self) -> np.ndarray:
        """``(D_1^down, ..., D_L^down)`` over the padded gap vector."""
        return 0.5 * np.cumsum(self.gaps_sorted)


def outcome_probabilities(povm: Povm, rho) -> np.ndarray:
    m = _matrix_of(rho)
    if m.shape[0] != povm.dim:
        raise DimensionMismatch(f"state has dimension {m.shape[0]}, POVM acts on {povm.dim}")
    # tr(M rho) = sum_ij M_ij rho_ji
    return np.array([np.real(np.sum(e * m.T)) for e in povm.elements])


def measure_pair(povm: Povm, rho, sigma) -> MeasurementStats:
    p, q = outcome_probabilities(povm, rho), outcome_probabilities(povm, sigma)
    length = max(povm.n_outcomes, povm.dim)
    return MeasurementStats(p, q, sorted_gaps(p, q, length), length)


def optimal_pvm(rho, sigma) -> Povm:
    """Rank-one projectors onto the eigenvectors of ``rho - sigma``.

    Elements follow the decreasing singular-value order, so for this PVM the
    sorted gaps coincide with ``s(rho - sigma)``.  Kernel eigenvectors
    complete the set to a resolution of the identity.
    """
    jd = jordan_decomposition(rho, sigma)
    vectors = jd.ranked_vectors() + [jd.kernel_vectors[:, i] for i in range(jd.kernel_vectors.shape[1])]
    return validate_povm([np.outer(v, v.conj()) for v in vectors])


def povm_from_vectors(vectors, floor: float = 1e-10) -> Povm:
    """Rank-one POVM ``S^{-1/2}|psi_m><psi_m|S^{-1/2}`` with ``S = sum |psi_m><psi_m|``."""
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    a = [np.outer(v, v.conj()) for v in vecs]
    w = psd_inv_sqrt(sum(a), floor=floor)
    phis = [w @ v for v in vecs]
    return validate_povm([np.outer(f, f.conj()) for f in phis])


def random_rank_one_povm(dim: int, n_outcomes: int, seed=None, max_attempts: int = 50) -> Povm:
    """Random rank-one POVM from Haar vectors, resampled if the normalizer is singular."""
    if n_outcomes < dim:
        raise ValueError(f"need at least dim={dim} outcomes, got {n_outcomes}")
    rng = make_rng(seed)
    for _ in range(max_attempts):
        try:
            return povm_from_vectors([haar_vector(dim, rng) for _ in range(n_outcomes)])
        except SingularNormalizer:
            continue
    raise SingularNormalizer(f"no well-conditioned sample in {max_attempts} attempts")


@dataclass(frozen=True)
class MeasurementBoundReport:
    k: int
    bound: float
    max_observed: float
    optimal_value: float
    trials: int
    within_bound: bool
    saturated: bool


def verify_measurement_bound(rho, sigma, k: int, trials: int, seed=None, tol: float = 1e-9) -> MeasurementBoundReport:
    """Compare ``D_k`` with ``D_k^down`` over random rank-one POVMs and the optimal PVM.

    ``within_bound``: no sampled POVM beats ``D_k`` by more than ``tol``.
    ``saturated``: the optimal PVM reaches ``D_k`` within ``tol``.
    """
    profile = distance_profile(rho, sigma)
    d = profile.dim
    _check_k(k, d)
    bound = profile[k]
    rng = make_rng(seed)
    optimal = float(measure_pair(optimal_pvm(rho, sigma), rho, sigma).classical_profile()[k - 1])
    best = optimal
    for _ in range(trials):
        n = int(rng.integers(d, d + 5))
        value = float(measure_pair(random_rank_one_povm(d, n, rng), rho, sigma).classical_profile()[k - 1])
        best = max(best, value)
    return MeasurementBoundReport(
        k=k,
        bound=bound,
        max_observed=best,
        optimal_value=optimal,
        trials=trials,
        within_bound=bool(best <= bound + tol),
        saturated=bool(abs(optimal - bound) <= tol),
    )


verify_relt0 = verify_measurement_bound


def povm_excess(povm: Povm, rho, sigma) -> np.ndarray:
    """``D_k^down(p, q) - D_k(rho, sigma)`` for ``k = 1 .. max(n, d)``.

    Both profiles are extended by padding with zeros, so ``D_k`` stays at the
    trace distance beyond ``d``.  Positive entries are only possible when some
    element has trace above one.
    """
    stats = measure_pair(povm, rho, sigma)
    s = jordan_decomposition(rho, sigma).s
    s = np.concatenate([s, np.zeros(stats.padded_length - s.size)])
    return stats.classical_profile() - 0.5 * np.cumsum(s)
