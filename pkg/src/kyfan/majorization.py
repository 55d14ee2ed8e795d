"""Weak submajorization and majorization of non-negative vectors.

Vectors of different lengths are compared after zero-padding both to the
longer length; this is how measurement gaps ``|p - q|`` (one entry per
outcome) are compared with ``s(rho - sigma)`` (one entry per dimension).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import distance_profile, jordan_decomposition
from .errors import HypothesisViolated, NegativeEntry
from .measurements import SMALL_TRACE_TOL, Povm, measure_pair

MAJORIZATION_TOL = 1e-9
NEGATIVE_TOL = 1e-12


@dataclass(frozen=True)
class OrderedVector:
    """A non-negative vector with its decreasing rearrangement and prefix sums."""

    values: np.ndarray
    rearranged: np.ndarray
    prefix_sums: np.ndarray

    @classmethod
    def of(cls, values, length: int | None = None) -> "OrderedVector":
        v = np.asarray(values, dtype=float).ravel()
        if v.size and v.min() < -NEGATIVE_TOL:
            raise NegativeEntry(f"negative entry {v.min():.3e}")
        if length is not None and length > v.size:
            v = np.concatenate([v, np.zeros(length - v.size)])
        down = np.sort(v, kind="stable")[::-1]
        return cls(v, down, np.cumsum(down))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class SubmajorizationReport:
    """Outcome of ``x <_w y``; ``margins[k-1]`` is ``sum_k y - sum_k x``."""

    holds: bool
    margins: np.ndarray
    padded_length: int
    tol: float

    def __bool__(self):
        return self.holds

    @property
    def worst_margin(self) -> float:
        return float(self.margins.min()) if self.margins.size else 0.0

    @property
    def first_failure(self) -> int | None:
        bad = np.flatnonzero(self.margins < -self.tol)
        return int(bad[0]) + 1 if bad.size else None


def _padded_pair(x, y):
    xs = np.asarray(x.values if isinstance(x, OrderedVector) else x, dtype=float).ravel()
    ys = np.asarray(y.values if isinstance(y, OrderedVector) else y, dtype=float).ravel()
    n = max(xs.size, ys.size)
    return OrderedVector.of(xs, n), OrderedVector.of(ys, n), n


def weakly_submajorized(x, y, tol: float = MAJORIZATION_TOL) -> SubmajorizationReport:
    """``x <_w y``: each prefix sum of ``x`` (decreasing) is at most that of ``y`` plus ``tol``."""
    ox, oy, n = _padded_pair(x, y)
    margins = oy.prefix_sums - ox.prefix_sums
    return SubmajorizationReport(bool(np.all(margins >= -tol)), margins, n, tol)


def majorized(x, y, tol: float = MAJORIZATION_TOL) -> bool:
    """``x < y``: weak submajorization with equal totals."""
    report = weakly_submajorized(x, y, tol)
    if not report.holds:
        return False
    return bool(abs(report.margins[-1]) <= tol) if report.margins.size else True


@dataclass(frozen=True)
class GapSubmajorizationResult:
    weak: bool
    full: bool
    report: SubmajorizationReport
    l1_distance: float
    trace_distance: float


def check_gap_submajorization(povm: Povm, rho, sigma, tol: float = MAJORIZATION_TOL) -> GapSubmajorizationResult:
    """Check ``|p - q| <_w s(rho - sigma)`` for a POVM with all traces at most one.

    ``full`` additionally requires the L1 distance of the outcomes to equal
    the trace distance, in which case the relation is a full majorization.
    """
    if not povm.small_trace:
        worst = float(povm.traces.max())
        raise HypothesisViolated(f"POVM element with trace {worst:.6g} > 1 (+{SMALL_TRACE_TOL:g})")
    stats = measure_pair(povm, rho, sigma)
    s = jordan_decomposition(rho, sigma).s
    report = weakly_submajorized(stats.gaps_sorted, s, tol)
    l1 = 0.5 * float(np.sum(stats.gaps_sorted))
    td = float(distance_profile(rho, sigma).values[-1])
    full = report.holds and abs(l1 - td) <= tol and majorized(stats.gaps_sorted, s, 2 * tol)
    return GapSubmajorizationResult(report.holds, bool(full), report, l1, td)


check_corollary_51 = check_gap_submajorization
