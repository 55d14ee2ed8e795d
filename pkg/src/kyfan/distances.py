"""Ky Fan norms and the partitioned trace distances built from them.

For density matrices ``rho`` and ``sigma`` on a ``d``-dimensional space the
k-th partitioned trace distance is half the Ky Fan k-norm of ``rho - sigma``,
i.e. half the sum of its ``k`` largest singular values.  ``D_d`` is the usual
trace distance and ``D_1`` is half the operator norm of the difference.

Singular values of the (Hermitian) difference are always taken as absolute
eigenvalues, and the whole profile ``(D_1, ..., D_d)`` comes from a single
eigendecomposition so that ties are resolved identically for every ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, KOutOfRange, LengthMismatch, NotDistribution, NotSquare
from .linalg import HERMITIAN_TOL, as_matrix, hermitian_eigensystem, projector, singular_values
from .sampling import make_rng, random_unitary
from .states import DensityMatrix, as_state

ZERO_EIGENVALUE_TOL = 1e-12
PROBABILITY_SUM_TOL = 1e-9
NEGATIVE_PROBABILITY_TOL = 1e-12


def _check_k(k: int, upper: int):
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= upper):
        raise KOutOfRange(f"k must be an integer in [1, {upper}], got {k!r}")


def ky_fan_norm(x, k: int) -> float:
    """Sum of the ``k`` largest singular values of ``x``.

    ``k = 1`` is the operator norm and ``k = min(rows, cols)`` the trace norm.
    """
    s = singular_values(x)
    _check_k(k, s.size)
    return float(np.sum(s[:k]))


@dataclass(frozen=True)
class JordanDecomposition:
    """Split of ``rho - sigma`` into positive parts ``R - T`` with orthogonal supports.

    ``kappa``/``r_vectors`` are the positive eigenpairs of the difference,
    ``tau``/``t_vectors`` the negated negative ones, both decreasing.
    ``kernel_vectors`` span the eigenvalues below the zero threshold.
    ``s`` is the decreasing merge of ``kappa`` and ``tau``, zero-padded to
    ``d``; ``ranking`` lists ``(side, index)`` in that merged order, with
    ``side`` 0 for R and 1 for T (R wins ties).
    """

    R: np.ndarray
    T: np.ndarray
    kappa: np.ndarray
    r_vectors: np.ndarray
    tau: np.ndarray
    t_vectors: np.ndarray
    kernel_vectors: np.ndarray
    s: np.ndarray
    ranking: tuple[tuple[int, int], ...]

    @property
    def dim(self) -> int:
        return self.R.shape[0]

    def ranked_vectors(self) -> list[np.ndarray]:
        """Eigenvectors of the difference in decreasing singular-value order."""
        sides = (self.r_vectors, self.t_vectors)
        return [sides[side][:, i] for side, i in self.ranking]


def _matrix_of(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return x.matrix
    m = as_matrix(x)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    return m


def _difference_eigensystem(a: np.ndarray, b: np.ndarray):
    """Eigensystem of ``a - b``, computed from a canonical argument order.

    The pair is ordered by raw bytes so that swapping the arguments negates
    the same floating-point spectrum bit for bit; distances are then exactly
    symmetric.
    """
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
    swapped = a.tobytes() > b.tobytes()
    first, second = (b, a) if swapped else (a, b)
    es = hermitian_eigensystem(first - second, tol=HERMITIAN_TOL)
    if not swapped:
        return es.eigenvalues, es.eigenvectors
    return -es.eigenvalues[::-1], es.eigenvectors[:, ::-1]


def _jordan(a: np.ndarray, b: np.ndarray, zero_tol: float) -> JordanDecomposition:
    lam, vecs = _difference_eigensystem(a, b)
    d = lam.size
    pos = np.flatnonzero(lam >= zero_tol)
    neg = np.flatnonzero(lam <= -zero_tol)[::-1]
    ker = np.flatnonzero(np.abs(lam) < zero_tol)
    kappa, tau = lam[pos], -lam[neg]
    rv, tv = vecs[:, pos], vecs[:, neg]
    merged = sorted(
        [(-kappa[i], 0, i) for i in range(kappa.size)] + [(-tau[j], 1, j) for j in range(tau.size)]
    )
    s = np.zeros(d)
    s[: len(merged)] = [-m[0] for m in merged]
    return JordanDecomposition(
        R=(rv * kappa) @ rv.conj().T,
        T=(tv * tau) @ tv.conj().T,
        kappa=kappa,
        r_vectors=rv,
        tau=tau,
        t_vectors=tv,
        kernel_vectors=vecs[:, ker],
        s=s,
        ranking=tuple((side, i) for _, side, i in merged),
    )


def jordan_decomposition(rho, sigma, zero_tol: float = ZERO_EIGENVALUE_TOL) -> JordanDecomposition:
    """Jordan decomposition of ``rho - sigma``.

    Either argument may be a :class:`DensityMatrix` or any Hermitian array
    (unnormalized channel outputs are compared this way).
    """
    return _jordan(_matrix_of(rho), _matrix_of(sigma), zero_tol)


def difference_singular_values(rho, sigma) -> np.ndarray:
    """``s(rho - sigma)``, decreasing, length ``d``."""
    return jordan_decomposition(rho, sigma).s


@dataclass(frozen=True)
class DistanceProfile:
    """All partitioned trace distances ``(D_1, ..., D_d)`` of a pair."""

    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size

    def __getitem__(self, k: int) -> float:
        """``D_k`` for 1-based ``k``."""
        _check_k(k, self.dim)
        return float(self.values[k - 1])

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(float(v) for v in self.values)

    def tolist(self) -> list[float]:
        return [float(v) for v in self.values]


def profile_from_singular_values(s) -> DistanceProfile:
    return DistanceProfile(0.5 * np.cumsum(np.asarray(s, dtype=float)))


def distance_profile(rho, sigma) -> DistanceProfile:
    return profile_from_singular_values(difference_singular_values(rho, sigma))


def partitioned_distance(rho, sigma, k: int) -> float:
    """``D_k(rho, sigma)``: half the Ky Fan k-norm of ``rho - sigma``."""
    profile = distance_profile(rho, sigma)
    return profile[k]


def trace_distance(rho, sigma) -> float:
    profile = distance_profile(rho, sigma)
    return profile[profile.dim]


def _distribution(p, name: str) -> np.ndarray:
    v = np.asarray(p, dtype=float).ravel()
    if v.size == 0:
        raise NotDistribution(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise NotDistribution(f"{name} has non-finite entries")
    if v.min() < -NEGATIVE_PROBABILITY_TOL:
        raise NotDistribution(f"{name} has negative entry {v.min():.3e}")
    total = float(v.sum())
    if abs(total - 1.0) > PROBABILITY_SUM_TOL:
        raise NotDistribution(f"{name} sums to {total!r}, not 1")
    return v / total


def sorted_gaps(p, q, length: int | None = None) -> np.ndarray:
    """``|p_i - q_i|`` in decreasing order, zero-padded to ``length``."""
    p, q = np.asarray(p, dtype=float).ravel(), np.asarray(q, dtype=float).ravel()
    if p.size != q.size:
        raise LengthMismatch(f"length mismatch: {p.size} vs {q.size}")
    gaps = np.sort(np.abs(p - q), kind="stable")[::-1]
    if length is not None and length > gaps.size:
        gaps = np.concatenate([gaps, np.zeros(length - gaps.size)])
    return gaps


def classical_partitioned_distance(p, q, k: int) -> float:
    """Half the sum of the ``k`` largest ``|p_i - q_i|``; ``k = n`` is the L1 distance."""
    p, q = _distribution(p, "p"), _distribution(q, "q")
    if p.size != q.size:
        raise LengthMismatch(f"length mismatch: {p.size} vs {q.size}")
    _check_k(k, p.size)
    return float(0.5 * np.cumsum(sorted_gaps(p, q))[k - 1])


def classical_profile(p, q) -> np.ndarray:
    p, q = _distribution(p, "p"), _distribution(q, "q")
    return 0.5 * np.cumsum(sorted_gaps(p, q))


def optimal_projectors(rho, sigma, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Projectors ``(P_R, P_T)`` with ``tr[(P_R - P_T)(rho - sigma)] = 2 D_k``.

    ``P_R`` spans the positive eigenvectors whose eigenvalue is among the
    top-k singular values, ``P_T`` the matching negative ones.  Ties at the
    k-th value go to the R side first.
    """
    jd = jordan_decomposition(rho, sigma)
    _check_k(k, jd.dim)
    chosen = jd.ranking[:k]
    r_idx = [i for side, i in chosen if side == 0]
    t_idx = [i for side, i in chosen if side == 1]
    return projector(jd.r_vectors[:, r_idx]), projector(jd.t_vectors[:, t_idx])


def top_eigenvalue_sum(h, k: int) -> float:
    lam = hermitian_eigensystem(h).eigenvalues
    _check_k(k, lam.size)
    return float(np.sum(lam[:k]))


def top_eigenprojector(h, k: int) -> np.ndarray:
    es = hermitian_eigensystem(h)
    _check_k(k, es.eigenvalues.size)
    return projector(es.eigenvectors[:, :k])


def _capped_simplex_point(d: int, k: int, rng) -> np.ndarray:
    """Random vector in ``[0, 1]^d`` summing to ``k``."""
    x = rng.random(d)
    lo, hi = -1.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if np.clip(x + mid, 0.0, 1.0).sum() < k:
            lo = mid
        else:
            hi = mid
    t = np.clip(x + 0.5 * (lo + hi), 0.0, 1.0)
    free = (t > 0.0) & (t < 1.0)
    if free.any():
        t[free] += (k - t.sum()) / free.sum()
    return t


def max_over_constrained_operators(h, k: int, trials: int, seed=None) -> float:
    """Largest ``tr(Theta H)`` seen over random feasible ``Theta`` and the top eigenprojector.

    Half the trials draw rank-k projectors, the other half operators with
    ``0 <= Theta <= 1`` and ``tr Theta = k``.  The maximum principle says the
    result equals :func:`top_eigenvalue_sum` and no sample exceeds it.
    """
    h = as_matrix(h)
    d = h.shape[0]
    _check_k(k, d)
    rng = make_rng(seed)
    best = float(np.real(np.trace(top_eigenprojector(h, k) @ h)))
    for trial in range(trials):
        u = random_unitary(d, rng)
        if trial % 2 == 0:
            theta = projector(u[:, :k])
        else:
            theta = (u * _capped_simplex_point(d, k, rng)) @ u.conj().T
        best = max(best, float(np.real(np.trace(theta @ h))))
    return best


def mixture(weights, states) -> DensityMatrix:
    """Convex combination ``sum_i w_i rho_i``."""
    w = np.asarray(weights, dtype=float)
    mats = [as_state(s).matrix for s in states]
    if len(mats) != w.size:
        raise LengthMismatch(f"{w.size} weights for {len(mats)} states")
    return DensityMatrix(sum(wi * m for wi, m in zip(w, mats)))


def strong_convexity_margins(p, rhos, q, sigmas) -> np.ndarray:
    """Per-k slack of ``sum p_i D_k(rho_i, sigma_i) + L1(p, q) - D_k(mix_p rho, mix_q sigma)``.

    Non-negative entries mean the strong convexity bound holds.
    """
    p, q = _distribution(p, "p"), _distribution(q, "q")
    lhs = distance_profile(mixture(p, rhos), mixture(q, sigmas)).values
    rhs = sum(pi * distance_profile(r, s).values for pi, r, s in zip(p, rhos, sigmas))
    return rhs + 0.5 * np.abs(p - q).sum() - lhs
