"""Dense complex matrix helpers and a cyclic Jacobi Hermitian eigensolver.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
eigensolver is implemented here rather than delegated to LAPACK so that the
whole numeric pathway (eigenvalues, singular values, matrix square roots)
runs through one small, auditable routine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotFinite, NotHermitian, NotPositive, NotSquare, SingularNormalizer

HERMITIAN_TOL = 1e-10
JACOBI_REL_TOL = 1e-14
MAX_SWEEPS = 100


def as_matrix(x) -> np.ndarray:
    """Return ``x`` as a finite 2-D ``complex128`` array (copying if needed)."""
    a = np.array(x, dtype=np.complex128)
    if a.ndim != 2:
        raise NotSquare(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotFinite("matrix has NaN or infinite entries")
    return a


def dagger(x: np.ndarray) -> np.ndarray:
    return x.conj().T


def hermiticity_residual(h: np.ndarray) -> float:
    """Largest entry of ``|H - H^dagger|``."""
    if h.size == 0:
        return 0.0
    return float(np.max(np.abs(h - h.conj().T)))


@dataclass(frozen=True)
class HermitianEigensystem:
    """Eigenvalues in decreasing order, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _jacobi(a: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray, int]:
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    norm = np.linalg.norm(a)
    threshold = JACOBI_REL_TOL * norm
    offdiag = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(float(np.sum(np.abs(a[offdiag]) ** 2))) if n > 1 else 0.0
        if off <= threshold:
            return np.real(np.diag(a)).copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                theta = 0.5 * math.atan2(2.0 * mag, a[p, p].real - a[q, q].real)
                c, s = math.cos(theta), math.sin(theta)
                # columns: A <- A W with W = diag(1, conj(phase)) [[c, -s], [s, c]]
                sp = s * phase.conjugate()
                cp = c * phase.conjugate()
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap + sp * aq
                a[:, q] = cp * aq - s * ap
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap + sp.conjugate() * aq
                a[q, :] = cp.conjugate() * aq - s * ap
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp + sp * vq
                v[:, q] = cp * vq - s * vp
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps (off-diagonal mass {off:.3e})")


def hermitian_eigensystem(h, tol: float = HERMITIAN_TOL, max_sweeps: int = MAX_SWEEPS) -> HermitianEigensystem:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    The input is checked for hermiticity (max-entry residual at most ``tol``)
    and symmetrized before iterating.  Iteration stops once the Frobenius
    norm of the off-diagonal part falls below ``1e-14 * ||H||_F``.

    Eigenvalues are returned in decreasing order; ties keep solver order.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {h.shape}")
    residual = hermiticity_residual(h)
    if residual > tol:
        raise NotHermitian(residual)
    a = 0.5 * (h + h.conj().T)
    evals, evecs, sweeps = _jacobi(a, max_sweeps)
    order = np.argsort(-evals, kind="stable")
    return HermitianEigensystem(evals[order], evecs[:, order], sweeps)


def eigvalsh_desc(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    return hermitian_eigensystem(h, tol).eigenvalues


def singular_values(x) -> np.ndarray:
    """Singular values in decreasing order, ``min(rows, cols)`` of them.

    Hermitian input uses absolute eigenvalues directly; anything else goes
    through the eigenvalues of the smaller Gram matrix, with tiny negative
    round-off clamped to zero before the square root.
    """
    x = as_matrix(x)
    rows, cols = x.shape
    if rows == cols and hermiticity_residual(x) == 0.0:
        return np.sort(np.abs(hermitian_eigensystem(x).eigenvalues))[::-1]
    gram = x.conj().T @ x if rows >= cols else x @ x.conj().T
    lam = hermitian_eigensystem(gram, tol=math.inf).eigenvalues
    clamp = 1e-12 * max(1.0, float(lam[0])) if lam.size else 0.0
    if lam.size and lam[-1] < -clamp:
        raise NoConvergence(f"Gram matrix eigenvalue {lam[-1]:.3e} is not clampable to zero")
    return np.sqrt(np.clip(lam, 0.0, None))


def psd_sqrt(h, clamp: float = 1e-10) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-clamp, 0)`` are treated as zero; anything more
    negative raises :class:`NotPositive`.
    """
    es = hermitian_eigensystem(h)
    lam = es.eigenvalues
    if lam.size and lam[-1] < -clamp:
        raise NotPositive(float(lam[-1]))
    v = es.eigenvectors
    return (v * np.sqrt(np.clip(lam, 0.0, None))) @ v.conj().T


def psd_inv_sqrt(h, floor: float = 1e-10) -> np.ndarray:
    """``H^{-1/2}`` for positive definite ``H`` with smallest eigenvalue above ``floor``."""
    es = hermitian_eigensystem(h)
    lam = es.eigenvalues
    if lam.size and lam[-1] < floor:
        raise SingularNormalizer(f"smallest eigenvalue {lam[-1]:.3e} below floor {floor:.1e}")
    v = es.eigenvectors
    return (v / np.sqrt(lam)) @ v.conj().T


def projector(columns: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the span of orthonormal ``columns``."""
    if columns.shape[1] == 0:
        return np.zeros((columns.shape[0], columns.shape[0]), dtype=np.complex128)
    return columns @ columns.conj().T


def max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0
