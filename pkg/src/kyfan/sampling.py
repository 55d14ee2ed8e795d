"""Seeded random matrices: Haar unitaries, Ginibre states, probability vectors.

All generators accept ``seed`` as an ``int``, a :class:`numpy.random.SeedSequence`
or an existing :class:`numpy.random.Generator`.  Integer seeds are fed to
PCG64 (numpy's default 64-bit bit generator), so a given seed reproduces
bit-identical output for a fixed numpy version.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidRank
from .states import DensityMatrix


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def ginibre(rows: int, cols: int, rng) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussians (unit variance per entry)."""
    rng = make_rng(rng)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary from a Ginibre QR with the R-diagonal phases removed."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    z = ginibre(dim, dim, seed)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_vector(dim: int, seed=None) -> np.ndarray:
    z = ginibre(dim, 1, seed)[:, 0]
    return z / np.linalg.norm(z)


def random_density_matrix(dim: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """``G G^dagger / tr(G G^dagger)`` with ``G`` a ``dim x rank`` Ginibre sample."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InvalidRank(f"rank must lie in [1, {dim}], got {rank}")
    g = ginibre(dim, rank, seed)
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.real(np.trace(m)))


def random_pure_state(dim: int, seed=None) -> DensityMatrix:
    return random_density_matrix(dim, 1, seed)


def random_hermitian(dim: int, seed=None, scale: float = 1.0) -> np.ndarray:
    g = ginibre(dim, dim, seed)
    return scale * 0.5 * (g + g.conj().T)


def random_probability_vector(n: int, seed=None) -> np.ndarray:
    """Uniform sample from the probability simplex (flat Dirichlet)."""
    return make_rng(seed).dirichlet(np.ones(n))


def diagonal_state(probabilities, basis: np.ndarray | None = None) -> DensityMatrix:
    """State with the given spectrum, diagonal in ``basis`` (default computational)."""
    p = np.asarray(probabilities, dtype=float)
    if basis is None:
        return DensityMatrix(np.diag(p).astype(np.complex128))
    m = (basis * p) @ basis.conj().T
    return DensityMatrix(0.5 * (m + m.conj().T))
