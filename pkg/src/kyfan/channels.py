"""Quantum operations in Kraus form and their effect on partitioned distances.

A channel ``E(rho) = sum_m E_m rho E_m^dagger`` is classified by two Gram
sums: ``sum E_m^dagger E_m`` (input side: trace preserving / non-increasing)
and ``sum E_m E_m^dagger`` (output side: unital / the sub-unital condition
``sum E_m E_m^dagger <= 1``).  Trace-preserving channels meeting the
sub-unital condition, bistochastic channels in particular, never increase
any ``D_k``.  Arbitrary trace-preserving channels can.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .distances import jordan_decomposition, _matrix_of
from .errors import DimensionMismatch, NotTracePreserving, ParameterOutOfRange, ShapeMismatch, TraceIncreasing, ValidationError, ZeroTrace
from .linalg import as_matrix, hermitian_eigensystem, psd_inv_sqrt, psd_sqrt
from .majorization import SubmajorizationReport, weakly_submajorized
from .measurements import Povm
from .sampling import ginibre, make_rng, random_unitary
from .states import DensityMatrix, as_state

CHANNEL_TOL = 1e-9


@dataclass(frozen=True)
class ChannelFlags:
    trace_preserving: bool
    trace_nonincreasing: bool
    unital: bool
    teor0: bool
    tp_residual: float
    nonincreasing_excess: float
    unital_residual: float
    teor0_excess: float

    @property
    def bistochastic(self) -> bool:
        return self.trace_preserving and self.unital


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Validated Kraus channel; build with :func:`build_channel`."""

    kraus: tuple[np.ndarray, ...]
    flags: ChannelFlags

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def trace_preserving(self) -> bool:
        return self.flags.trace_preserving

    @property
    def unital(self) -> bool:
        return self.flags.unital

    @property
    def teor0(self) -> bool:
        return self.flags.teor0

    @property
    def bistochastic(self) -> bool:
        return self.flags.bistochastic

    def __call__(self, rho) -> DensityMatrix:
        return apply(self, rho)


def _spectral_extremes(h: np.ndarray) -> tuple[float, float]:
    lam = hermitian_eigensystem(h).eigenvalues
    return float(lam[0]), float(lam[-1])


def build_channel(kraus, tol: float = CHANNEL_TOL) -> KrausChannel:
    """Validate Kraus operators and compute the classification flags.

    Raises :class:`TraceIncreasing` when ``sum E^dagger E`` exceeds the identity
    by more than ``tol``: such a map is not a quantum operation.
    """
    ops = [as_matrix(e) for e in kraus]
    if not ops:
        raise ValidationError("a channel needs at least one Kraus operator")
    shape = ops[0].shape
    for i, e in enumerate(ops):
        if e.shape != shape:
            raise ShapeMismatch(f"Kraus operator {i} has shape {e.shape}, expected {shape}")
    dim_out, dim_in = shape
    g_in = sum(e.conj().T @ e for e in ops)
    g_out = sum(e @ e.conj().T for e in ops)
    hi_in, lo_in = _spectral_extremes(g_in)
    hi_out, lo_out = _spectral_extremes(g_out)
    if hi_in > 1.0 + tol:
        raise TraceIncreasing(hi_in - 1.0)
    for e in ops:
        e.setflags(write=False)
    flags = ChannelFlags(
        trace_preserving=max(hi_in - 1.0, 1.0 - lo_in) <= tol,
        trace_nonincreasing=True,
        unital=max(hi_out - 1.0, 1.0 - lo_out) <= tol,
        teor0=hi_out <= 1.0 + tol,
        tp_residual=max(hi_in - 1.0, 1.0 - lo_in),
        nonincreasing_excess=hi_in - 1.0,
        unital_residual=max(hi_out - 1.0, 1.0 - lo_out),
        teor0_excess=hi_out - 1.0,
    )
    return KrausChannel(tuple(ops), flags)


def apply_unnormalized(channel: KrausChannel, rho) -> tuple[np.ndarray, float]:
    """``E(rho)`` without renormalization, and its trace (success probability)."""
    m = _matrix_of(rho)
    if m.shape != (channel.dim_in, channel.dim_in):
        raise DimensionMismatch(f"input has shape {m.shape}, channel expects dimension {channel.dim_in}")
    out = sum(e @ m @ e.conj().T for e in channel.kraus)
    out = 0.5 * (out + out.conj().T)
    return out, float(np.real(np.trace(out)))


def apply(channel: KrausChannel, rho) -> DensityMatrix:
    """Output state ``E(rho) / tr E(rho)``."""
    out, prob = apply_unnormalized(channel, rho)
    if prob <= 1e-15:
        raise ZeroTrace("channel output has zero trace")
    return DensityMatrix(out if channel.trace_preserving else out / prob)


def identity_channel(dim: int) -> KrausChannel:
    return build_channel([np.eye(dim)])


def unitary_channel(u) -> KrausChannel:
    return build_channel([u])


def _check_unit_interval(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise ParameterOutOfRange(f"{name} must lie in [0, 1], got {value!r}")


def weyl_operators(dim: int) -> list[np.ndarray]:
    """The ``dim**2`` clock-and-shift operators ``X^a Z^b``, identity first."""
    shift = np.roll(np.eye(dim), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a, b in itertools.product(range(dim), repeat=2)
    ]


def depolarizing(dim: int, p: float) -> KrausChannel:
    """``rho -> (1 - p) rho + p I / dim`` via a Weyl twirl."""
    _check_unit_interval("p", p)
    ops = weyl_operators(dim)
    weights = [1.0 - p + p / dim**2] + [p / dim**2] * (len(ops) - 1)
    return build_channel([np.sqrt(w) * u for w, u in zip(weights, ops) if w > 0.0])


def phase_damping(lam: float) -> KrausChannel:
    _check_unit_interval("lambda", lam)
    return build_channel([np.diag([1.0, np.sqrt(1.0 - lam)]), np.diag([0.0, np.sqrt(lam)])])


def amplitude_damping(gamma: float) -> KrausChannel:
    _check_unit_interval("gamma", gamma)
    return build_channel([
        np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]]),
        np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]]),
    ])


def unitary_mixture(weights, unitaries) -> KrausChannel:
    """``rho -> sum_m w_m U_m rho U_m^dagger``; always bistochastic."""
    w = np.asarray(weights, dtype=float)
    if w.size != len(unitaries):
        raise ShapeMismatch(f"{w.size} weights for {len(unitaries)} unitaries")
    if w.min() < 0.0 or abs(w.sum() - 1.0) > CHANNEL_TOL:
        raise ParameterOutOfRange("weights must form a probability vector")
    return build_channel([np.sqrt(wi) * as_matrix(u) for wi, u in zip(w, unitaries)])


def coarse_graining(f, dim_out: int | None = None) -> KrausChannel:
    """Classical relabelling ``|i> -> |f(i)>`` with Kraus operators ``|f(i)><i|``.

    Trace preserving for any ``f``; violates the sub-unital condition as
    soon as two inputs share an output.  ``dim_out`` defaults to ``len(f)``.
    """
    f = [int(x) for x in f]
    dim_in = len(f)
    dim_out = dim_in if dim_out is None else dim_out
    if min(f) < 0 or max(f) >= dim_out:
        raise ParameterOutOfRange(f"outcome map values must lie in [0, {dim_out})")
    ops = []
    for i, j in enumerate(f):
        e = np.zeros((dim_out, dim_in))
        e[j, i] = 1.0
        ops.append(e)
    return build_channel(ops)


def measurement_channel(povm: Povm) -> KrausChannel:
    """Non-selective measurement ``rho -> sum_m M_m^{1/2} rho M_m^{1/2}``."""
    return build_channel([psd_sqrt(m) for m in povm.elements])


def random_bistochastic_channel(dim: int, seed=None) -> KrausChannel:
    """Mixture of 2 to 5 Haar unitaries with flat-Dirichlet weights."""
    rng = make_rng(seed)
    n = int(rng.integers(2, 6))
    return unitary_mixture(rng.dirichlet(np.ones(n)), [random_unitary(dim, rng) for _ in range(n)])


def random_subunital_channel(dim_in: int, dim_out: int, seed=None, n_kraus: int | None = None) -> KrausChannel:
    """Random trace-non-increasing channel obeying ``sum E E^dagger <= 1``.

    Ginibre Kraus operators are rescaled so that the larger of the two Gram
    sums has norm ``u`` for a uniform ``u`` in ``(0.5, 1]``.
    """
    rng = make_rng(seed)
    n = int(rng.integers(1, 5)) if n_kraus is None else n_kraus
    ops = [ginibre(dim_out, dim_in, rng) for _ in range(n)]
    g_in = sum(e.conj().T @ e for e in ops)
    g_out = sum(e @ e.conj().T for e in ops)
    top = max(_spectral_extremes(g_in)[0], _spectral_extremes(g_out)[0])
    scale = np.sqrt((1.0 - 0.5 * rng.random()) / top)
    return build_channel([scale * e for e in ops])


def random_tp_channel(dim_in: int, dim_out: int, seed=None, n_kraus: int = 3) -> KrausChannel:
    """Random trace-preserving channel from a Ginibre-sampled Stinespring isometry."""
    if n_kraus * dim_out < dim_in:
        raise ParameterOutOfRange("need n_kraus * dim_out >= dim_in for an isometry")
    g = ginibre(n_kraus * dim_out, dim_in, seed)
    v = g @ psd_inv_sqrt(g.conj().T @ g)
    return build_channel([v[m * dim_out:(m + 1) * dim_out, :] for m in range(n_kraus)])


@dataclass(frozen=True)
class ContractivityRow:
    k: int
    d_in: float
    d_out: float
    violated: bool

    @property
    def increase(self) -> float:
        return self.d_out - self.d_in


@dataclass(frozen=True)
class ContractivityReport:
    """Per-k comparison of input and output distances, plus ``s_out <_w s_in``."""

    rows: tuple[ContractivityRow, ...]
    s_in: np.ndarray
    s_out: np.ndarray
    submajorization: SubmajorizationReport
    teor0: bool
    unnormalized: bool

    @property
    def any_violation(self) -> bool:
        return any(r.violated for r in self.rows)

    @property
    def max_increase(self) -> float:
        return max(r.increase for r in self.rows)


def _padded(s: np.ndarray, length: int) -> np.ndarray:
    return np.concatenate([s, np.zeros(length - s.size)]) if length > s.size else s


def contractivity_report(channel: KrausChannel, rho, sigma, unnormalized: bool = False,
                         tol: float = CHANNEL_TOL) -> ContractivityReport:
    """Compare ``D_k`` before and after the channel for every ``k``.

    Spaces of different dimension are compared after zero-padding the
    singular values to the larger dimension, so ``D_k`` past a space's
    dimension equals its trace distance.  Channels that are not trace
    preserving are accepted only with ``unnormalized=True``; their raw,
    unnormalized outputs are compared.
    """
    if not (channel.trace_preserving or unnormalized):
        raise NotTracePreserving("channel is not trace preserving; pass unnormalized=True to compare raw outputs")
    rho, sigma = as_state(rho), as_state(sigma)
    out_rho, _ = apply_unnormalized(channel, rho)
    out_sigma, _ = apply_unnormalized(channel, sigma)
    length = max(channel.dim_in, channel.dim_out)
    s_in = _padded(jordan_decomposition(rho, sigma).s, length)
    s_out = _padded(jordan_decomposition(out_rho, out_sigma).s, length)
    d_in, d_out = 0.5 * np.cumsum(s_in), 0.5 * np.cumsum(s_out)
    rows = tuple(
        ContractivityRow(k + 1, float(a), float(b), bool(b > a + tol)) for k, (a, b) in enumerate(zip(d_in, d_out))
    )
    return ContractivityReport(rows, s_in, s_out, weakly_submajorized(s_out, s_in, tol), channel.teor0, unnormalized)
