"""Randomized property suites and the black-box channel probe.

Each suite trial draws its instance from ``SeedSequence(seed, spawn_key=(i,))``
so any single trial can be replayed from ``(suite, dim, seed, i)`` alone,
and a suite's report does not depend on how trials were scheduled.

Every assertion is expressed as a *margin* that must stay above ``-tol``;
the report keeps the worst margin seen per assertion.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import channels as ch
from .distances import classical_profile, distance_profile, jordan_decomposition, strong_convexity_margins
from .errors import OracleReturnedInvalidState, SingularNormalizer, UnknownSuite, ValidationError
from .majorization import check_gap_submajorization, weakly_submajorized
from .measurements import Povm, measure_pair, optimal_pvm, povm_excess, random_rank_one_povm, validate_povm
from .linalg import psd_inv_sqrt
from .sampling import diagonal_state, ginibre, make_rng, random_density_matrix, random_pure_state, random_unitary
from .states import DensityMatrix, validate_density

PROBE_TOL = 1e-7


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return make_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _random_state(dim, rng) -> DensityMatrix:
    return random_density_matrix(dim, int(rng.integers(1, dim + 1)), rng)


def _conjugate(u, rho: DensityMatrix) -> DensityMatrix:
    m = u @ rho.matrix @ u.conj().T
    return DensityMatrix(0.5 * (m + m.conj().T))


# --- metric -----------------------------------------------------------------

METRIC_TOLS = {
    "non_negative": 1e-10,
    "identity_zero": 1e-10,
    "distinct_positive": 0.0,
    "symmetry": 0.0,
    "triangle": 1e-10,
    "upper_bound": 1e-12,
    "monotone_in_k": 1e-12,
    "slack_in_k": 1e-12,
    "unitary_invariance": 1e-9,
    "pure_collapse": 1e-10,
    "commuting_classical": 1e-10,
}


def _metric_trial(dim, rng):
    rho, sigma, omega = (_random_state(dim, rng) for _ in range(3))
    p_rs = distance_profile(rho, sigma).values
    p_sr = distance_profile(sigma, rho).values
    p_ro = distance_profile(rho, omega).values
    p_os = distance_profile(omega, sigma).values
    s1 = jordan_decomposition(rho, sigma).s[0]
    u = random_unitary(dim, rng)
    p_u = distance_profile(_conjugate(u, rho), _conjugate(u, sigma)).values
    psi, phi = random_pure_state(dim, rng), random_pure_state(dim, rng)
    p_pure = distance_profile(psi, phi).values
    collapse = [abs(p_pure[0] - 0.5 * p_pure[-1])] + [abs(v - p_pure[-1]) for v in p_pure[1:]]
    basis = random_unitary(dim, rng)
    mu, nu = rng.dirichlet(np.ones(dim)), rng.dirichlet(np.ones(dim))
    p_comm = distance_profile(diagonal_state(mu, basis), diagonal_state(nu, basis)).values
    margins = {
        "non_negative": min(p_rs.min(), p_ro.min(), p_os.min()),
        "identity_zero": -distance_profile(rho, rho).values.max(),
        "distinct_positive": p_rs[0] - 1e-10,
        "symmetry": -np.max(np.abs(p_rs - p_sr)),
        "triangle": np.min(p_ro + p_os - p_rs),
        "upper_bound": np.min(1.0 - np.concatenate([p_rs, p_pure])),
        "monotone_in_k": np.min(np.diff(p_rs)) if dim > 1 else 0.0,
        "slack_in_k": np.min(p_rs[:-1] + 0.5 * s1 - p_rs[1:]) if dim > 1 else 0.0,
        "unitary_invariance": -np.max(np.abs(p_u - p_rs)),
        "pure_collapse": -max(collapse),
        "commuting_classical": -np.max(np.abs(p_comm - classical_profile(mu, nu))),
    }
    return margins, {}


# --- convexity ----------------------------------------------------------------

CONVEXITY_TOLS = {"strong": 1e-10, "joint": 1e-10, "first_input": 1e-10, "second_input": 1e-10}


def _convexity_trial(dim, rng):
    n = int(rng.integers(1, 6))
    p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    rhos = [_random_state(dim, rng) for _ in range(n)]
    sigmas = [_random_state(dim, rng) for _ in range(n)]
    fixed = _random_state(dim, rng)
    margins = {
        "strong": strong_convexity_margins(p, rhos, q, sigmas).min(),
        "joint": strong_convexity_margins(p, rhos, p, sigmas).min(),
        "first_input": strong_convexity_margins(p, rhos, p, [fixed] * n).min(),
        "second_input": strong_convexity_margins(p, [fixed] * n, p, sigmas).min(),
    }
    return margins, {}


# --- povm_bound ---------------------------------------------------------------

POVM_TOLS = {"rank_one_bound": 1e-9, "optimal_saturates": 1e-9, "optimal_gaps_equal_s": 1e-9, "whole_distance_any_povm": 1e-9}


def random_general_povm(dim: int, n_outcomes: int, rng) -> Povm:
    """POVM ``S^{-1/2} G_m G_m^dagger S^{-1/2}`` with Ginibre ``G_m`` of random rank."""
    rng = make_rng(rng)
    for _ in range(50):
        parts = []
        for _ in range(n_outcomes):
            g = ginibre(dim, int(rng.integers(1, dim + 1)), rng)
            parts.append(g @ g.conj().T)
        try:
            w = psd_inv_sqrt(sum(parts))
        except SingularNormalizer:
            continue
        return validate_povm([w @ a @ w for a in parts])
    raise SingularNormalizer("no well-conditioned general POVM sample in 50 attempts")


def _povm_trial(dim, rng):
    rho, sigma = _random_state(dim, rng), _random_state(dim, rng)
    povm = random_rank_one_povm(dim, int(rng.integers(dim, dim + 5)), rng)
    excess = povm_excess(povm, rho, sigma)
    opt = measure_pair(optimal_pvm(rho, sigma), rho, sigma)
    s = jordan_decomposition(rho, sigma).s
    profile = distance_profile(rho, sigma).values
    general = random_general_povm(dim, int(rng.integers(2, dim + 3)), rng)
    gen_stats = measure_pair(general, rho, sigma)
    observations = {}
    if not general.small_trace:
        observations["general_povm_excess_below_d"] = float(povm_excess(general, rho, sigma)[: dim - 1].max(initial=0.0))
    margins = {
        "rank_one_bound": -excess.max(),
        "optimal_saturates": -np.max(np.abs(opt.classical_profile()[:dim] - profile)),
        "optimal_gaps_equal_s": -np.max(np.abs(opt.gaps_sorted[:dim] - s)),
        "whole_distance_any_povm": profile[-1] - 0.5 * gen_stats.gaps_sorted.sum(),
    }
    return margins, observations


# --- majorization -------------------------------------------------------------

MAJORIZATION_TOLS = {
    "gaps_weakly_submajorized": 1e-9,
    "optimal_full": 1e-9,
    "reflexive": 0.0,
    "transitive": 2e-9,
    "padding_invariant": 0.0,
}


def _random_doubly_substochastic(n, rng):
    perms = [np.eye(n)[rng.permutation(n)] for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    return rng.uniform(0.5, 1.0) * sum(wi * p for wi, p in zip(w, perms))


def _majorization_trial(dim, rng):
    rho, sigma = _random_state(dim, rng), _random_state(dim, rng)
    povm = random_rank_one_povm(dim, int(rng.integers(dim, dim + 5)), rng)
    weak = check_gap_submajorization(povm, rho, sigma)
    opt = check_gap_submajorization(optimal_pvm(rho, sigma), rho, sigma)
    n = dim + 2
    z = rng.random(n)
    y = _random_doubly_substochastic(n, rng) @ z
    x = _random_doubly_substochastic(n, rng) @ y
    plain = weakly_submajorized(x, z)
    padded = weakly_submajorized(np.concatenate([x, np.zeros(3)]), z)
    margins = {
        "gaps_weakly_submajorized": weak.report.worst_margin,
        "optimal_full": 0.0 if opt.full else -abs(opt.l1_distance - opt.trace_distance) - 1.0,
        "reflexive": weakly_submajorized(z, z).worst_margin,
        "transitive": plain.worst_margin,
        "padding_invariant": 0.0 if plain.holds == padded.holds else -1.0,
    }
    return margins, {}


# --- contractivity ------------------------------------------------------------

CONTRACTIVITY_TOLS = {
    "bistochastic_contractive": 1e-9,
    "bistochastic_submajorization": 1e-9,
    "subunital_contractive": 1e-9,
    "subunital_submajorization": 1e-9,
    "measurement_contractive": 1e-9,
    "measurement_bistochastic": 1e-9,
    "tp_whole_distance": 1e-9,
    "tp_output_is_state": 1e-9,
}


def _contract_margins(report):
    return -report.max_increase, report.submajorization.worst_margin


def _contractivity_trial(dim, rng):
    rho, sigma = _random_state(dim, rng), _random_state(dim, rng)
    bis = ch.random_bistochastic_channel(dim, rng)
    dim_out = int(rng.integers(max(1, dim - 1), dim + 2))
    sub = ch.random_subunital_channel(dim, dim_out, rng)
    meas = ch.measurement_channel(random_rank_one_povm(dim, int(rng.integers(dim, dim + 4)), rng))
    tp = ch.random_tp_channel(dim, dim_out, rng, n_kraus=int(rng.integers(1, 4)) + (dim > dim_out))
    b_inc, b_maj = _contract_margins(ch.contractivity_report(bis, rho, sigma))
    s_inc, s_maj = _contract_margins(ch.contractivity_report(sub, rho, sigma, unnormalized=not sub.trace_preserving))
    m_inc, _ = _contract_margins(ch.contractivity_report(meas, rho, sigma))
    tp_report = ch.contractivity_report(tp, rho, sigma)
    out = ch.apply(tp, rho).matrix
    lowest = float(np.linalg.eigvalsh(out)[0])
    observations = {"tp_max_partitioned_increase": tp_report.max_increase}
    margins = {
        "bistochastic_contractive": b_inc,
        "bistochastic_submajorization": b_maj,
        "subunital_contractive": s_inc,
        "subunital_submajorization": s_maj,
        "measurement_contractive": m_inc,
        "measurement_bistochastic": -max(meas.flags.tp_residual, meas.flags.unital_residual),
        "tp_whole_distance": tp_report.rows[-1].d_in - tp_report.rows[-1].d_out,
        "tp_output_is_state": -max(abs(np.trace(out).real - 1.0), -lowest, 0.0),
    }
    return margins, observations


SUITES: dict[str, tuple[Callable, dict[str, float]]] = {
    "metric": (_metric_trial, METRIC_TOLS),
    "convexity": (_convexity_trial, CONVEXITY_TOLS),
    "povm_bound": (_povm_trial, POVM_TOLS),
    "majorization": (_majorization_trial, MAJORIZATION_TOLS),
    "contractivity": (_contractivity_trial, CONTRACTIVITY_TOLS),
}


@dataclass(frozen=True)
class TrialFailure:
    trial: int
    assertion: str
    margin: float
    tol: float


@dataclass
class SuiteReport:
    name: str
    dim: int
    trials: int
    seed: int
    tolerances: dict[str, float]
    worst_margins: dict[str, float]
    failures: list[TrialFailure]
    observations: dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, include_time: bool = False) -> dict:
        out = {
            "suite": self.name,
            "dim": self.dim,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "worst_margins": dict(self.worst_margins),
            "tolerances": dict(self.tolerances),
            "failures": [
                {"trial": f.trial, "replay": [self.seed, f.trial], "assertion": f.assertion, "margin": f.margin}
                for f in self.failures
            ],
            "observations": dict(self.observations),
        }
        if include_time:
            out["wall_time"] = self.wall_time
        return out


def replay_trial(name: str, dim: int, seed: int, index: int) -> tuple[dict[str, float], dict[str, float]]:
    """Re-run a single trial; returns ``(margins, observations)``."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    trial, _ = SUITES[name]
    margins, obs = trial(dim, trial_rng(seed, index))
    return {k: float(v) for k, v in margins.items()}, {k: float(v) for k, v in obs.items()}


def _replay_star(args):
    return replay_trial(*args)


def run_suite(name: str, dim: int, trials: int, seed: int = 0, jobs: int = 1) -> SuiteReport:
    """Run ``trials`` random instances of a named suite.

    Suites: ``metric``, ``convexity``, ``povm_bound``, ``majorization``,
    ``contractivity``.  ``jobs > 1`` spreads trials over worker processes
    without changing the report.
    """
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if dim < 2 or trials < 1:
        raise ValueError("suites need dim >= 2 and trials >= 1")
    _, tols = SUITES[name]
    start = time.perf_counter()
    args = [(name, dim, seed, i) for i in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_replay_star, args, chunksize=max(1, trials // (4 * jobs))))
    else:
        results = [_replay_star(a) for a in args]
    worst = {key: np.inf for key in tols}
    failures = []
    observations: dict[str, float] = {}
    for i, (margins, obs) in enumerate(results):
        for key, margin in margins.items():
            worst[key] = min(worst[key], margin)
            if margin < -tols[key]:
                failures.append(TrialFailure(i, key, margin, tols[key]))
        for key, value in obs.items():
            observations[key] = max(observations.get(key, -np.inf), value)
    return SuiteReport(name, dim, trials, seed, dict(tols), worst, failures, observations, time.perf_counter() - start)


# --- black-box probe ------------------------------------------------------------

@dataclass(frozen=True)
class ProbeWitness:
    pair_index: int
    family: str
    rho: DensityMatrix
    sigma: DensityMatrix
    rho_out: DensityMatrix
    sigma_out: DensityMatrix
    d_in: np.ndarray
    d_out: np.ndarray

    @property
    def increases(self) -> np.ndarray:
        return self.d_out - self.d_in

    @property
    def k(self) -> int:
        return int(np.argmax(self.increases)) + 1


@dataclass(frozen=True)
class ProbeVerdict:
    pairs_probed: int
    max_increase: np.ndarray
    witness: ProbeWitness | None
    verdict: str
    tol: float

    @property
    def violates(self) -> bool:
        return self.verdict == "violates_teor0"

    @property
    def note(self) -> str:
        if self.violates:
            return (f"D_{self.witness.k} increased by {self.witness.increases.max():.6g} on probe pair "
                    f"{self.witness.pair_index}; the channel cannot satisfy sum E E^dagger <= 1")
        return ("no partitioned distance increased beyond tolerance; this is consistent with "
                "sum E E^dagger <= 1 but does not prove it")


def probe_pairs(dim: int, n_pairs: int, seed) -> list[tuple[str, DensityMatrix, DensityMatrix]]:
    """Probe set: 40% full-rank, 30% pure, 20% diagonal in a shared basis, 10% near-identical.

    Half the diagonal pairs use the computational basis, half a random one.
    """
    rng = make_rng(seed)
    n_full = round(0.4 * n_pairs)
    n_pure = round(0.3 * n_pairs)
    n_diag = round(0.2 * n_pairs)
    n_pert = max(0, n_pairs - n_full - n_pure - n_diag)
    pairs = []
    for _ in range(n_full):
        pairs.append(("full_rank", random_density_matrix(dim, dim, rng), random_density_matrix(dim, dim, rng)))
    for _ in range(n_pure):
        pairs.append(("pure", random_pure_state(dim, rng), random_pure_state(dim, rng)))
    for i in range(n_diag):
        basis = None if i % 2 == 0 else random_unitary(dim, rng)
        mu, nu = rng.dirichlet(np.ones(dim) * 0.5), rng.dirichlet(np.ones(dim) * 0.5)
        pairs.append(("diagonal", diagonal_state(mu, basis), diagonal_state(nu, basis)))
    for _ in range(n_pert):
        rho = random_density_matrix(dim, dim, rng)
        eps = 10.0 ** rng.uniform(-4, -1)
        other = random_density_matrix(dim, dim, rng)
        pairs.append(("perturbed", rho, DensityMatrix((1 - eps) * rho.matrix + eps * other.matrix)))
    return pairs[:n_pairs]


def _oracle_state(oracle, rho, tol):
    try:
        out = oracle(rho)
        return validate_density(out.matrix if isinstance(out, DensityMatrix) else out, tol)
    except ValidationError as exc:
        raise OracleReturnedInvalidState(f"oracle output is not a density matrix: {exc}") from exc


def blackbox_probe(oracle: Callable, dim_in: int, n_pairs: int, seed=0, tol: float = PROBE_TOL,
                   extra_pairs=(), jobs: int = 1, reentrant: bool = True,
                   state_tol: float = 1e-8) -> ProbeVerdict:
    """Audit a channel known only through ``oracle(state) -> state``.

    ``extra_pairs`` are probed first, then ``n_pairs`` generated pairs.  The
    first pair whose output ``D_k`` exceeds the input ``D_k`` by more than
    ``tol`` for some ``k`` becomes the witness.  ``jobs > 1`` uses threads
    and is ignored when ``reentrant`` is false.
    """
    pairs = [("user", validate_density(a), validate_density(b)) for a, b in extra_pairs]
    pairs += probe_pairs(dim_in, n_pairs, seed)

    def run(pair):
        family, rho, sigma = pair
        return family, rho, sigma, _oracle_state(oracle, rho, state_tol), _oracle_state(oracle, sigma, state_tol)

    if jobs > 1 and reentrant:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(run, pairs))
    else:
        outputs = [run(p) for p in pairs]

    max_increase = None
    witness = None
    for index, (family, rho, sigma, rho_out, sigma_out) in enumerate(outputs):
        length = max(rho.dim, rho_out.dim)
        s_in = jordan_decomposition(rho, sigma).s
        s_out = jordan_decomposition(rho_out, sigma_out).s
        d_in = 0.5 * np.cumsum(np.concatenate([s_in, np.zeros(length - s_in.size)]))
        d_out = 0.5 * np.cumsum(np.concatenate([s_out, np.zeros(length - s_out.size)]))
        inc = d_out - d_in
        max_increase = inc if max_increase is None else np.maximum(max_increase[: inc.size], inc)
        if witness is None and inc.max() > tol:
            witness = ProbeWitness(index, family, rho, sigma, rho_out, sigma_out, d_in, d_out)
    verdict = "violates_teor0" if witness is not None else "consistent_with_teor0"
    if max_increase is None:
        max_increase = np.zeros(dim_in)
    return ProbeVerdict(len(outputs), max_increase, witness, verdict, tol)
