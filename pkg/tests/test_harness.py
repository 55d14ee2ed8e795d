import numpy as np
import pytest

from kyfan import harness
from kyfan.channels import (
    amplitude_damping,
    apply,
    coarse_graining,
    depolarizing,
    identity_channel,
    random_bistochastic_channel,
)
from kyfan.distances import distance_profile
from kyfan.errors import OracleReturnedInvalidState, UnknownSuite
from kyfan.harness import blackbox_probe, probe_pairs, replay_trial, run_suite, trial_rng

UNIFORM5 = np.eye(5) / 5
TAIL5 = np.diag([0, 0, 0, 0.5, 0.5])


def test_trial_rng_is_per_index():
    a = trial_rng(7, 3).random(4)
    np.testing.assert_array_equal(a, trial_rng(7, 3).random(4))
    assert not np.array_equal(a, trial_rng(7, 4).random(4))
    assert not np.array_equal(a, trial_rng(8, 3).random(4))


@pytest.mark.parametrize("name", sorted(harness.SUITES))
@pytest.mark.parametrize("dim", [2, 3])
def test_suites_pass(name, dim):
    report = run_suite(name, dim, trials=20, seed=1)
    assert report.passed, report.failures
    assert set(report.worst_margins) == set(report.tolerances)
    for key, margin in report.worst_margins.items():
        assert margin >= -report.tolerances[key]


def test_parallel_report_matches_serial():
    serial = run_suite("povm_bound", 3, trials=12, seed=5)
    parallel = run_suite("povm_bound", 3, trials=12, seed=5, jobs=2)
    assert serial.to_dict() == parallel.to_dict()


def test_replay_reproduces_trial():
    first, _ = replay_trial("metric", 3, 9, 4)
    again, _ = replay_trial("metric", 3, 9, 4)
    assert first == again


def test_failures_carry_replay_seed(monkeypatch):
    def flaky(dim, rng):
        return {"check": -1.0 if rng.random() < 0.5 else 1.0}, {}

    monkeypatch.setitem(harness.SUITES, "flaky", (flaky, {"check": 1e-9}))
    report = run_suite("flaky", 2, trials=30, seed=3)
    assert not report.passed
    for entry in report.to_dict()["failures"]:
        margins, _ = replay_trial("flaky", 2, *entry["replay"])
        assert margins["check"] == entry["margin"] == -1.0


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope", 2, 1)


def test_general_povm_excess_is_recorded():
    report = run_suite("povm_bound", 3, trials=30, seed=2)
    assert "general_povm_excess_below_d" in report.observations


def test_probe_set_composition():
    pairs = probe_pairs(3, 50, seed=0)
    families = [f for f, _, _ in pairs]
    assert [families.count(f) for f in ("full_rank", "pure", "diagonal", "perturbed")] == [20, 15, 10, 5]
    assert pairs[0][1] == probe_pairs(3, 50, seed=0)[0][1]


@pytest.mark.parametrize("channel", [identity_channel(3), depolarizing(3, 0.4)])
def test_probe_passes_sub_unital_channels(channel):
    verdict = blackbox_probe(channel, 3, 40, seed=1)
    assert verdict.verdict == "consistent_with_teor0"
    assert verdict.witness is None and not verdict.violates
    assert "does not prove" in verdict.note


def test_qubit_tp_channels_cannot_violate():
    # D_1 = D_2 / 2 for every qubit pair, so trace-distance contraction covers all k
    channel = amplitude_damping(0.8)
    assert not channel.teor0
    verdict = blackbox_probe(channel, 2, 40, seed=0)
    assert not verdict.violates


def test_probe_finds_coarse_graining_violation():
    assert blackbox_probe(coarse_graining((0, 1, 1)), 3, 40, seed=0).violates


def test_probe_reports_supplied_pair_first():
    verdict = blackbox_probe(coarse_graining((0, 0, 0, 1, 1)), 5, 10, seed=0, extra_pairs=[(UNIFORM5, TAIL5)])
    w = verdict.witness
    assert verdict.pairs_probed == 11
    assert w.pair_index == 0 and w.family == "user"
    np.testing.assert_allclose(w.d_in, [0.15, 0.3, 0.4, 0.5, 0.6])
    np.testing.assert_allclose(w.d_out, [0.3, 0.6, 0.6, 0.6, 0.6])
    assert w.k == 2


def test_probe_threads_match_serial():
    ch = coarse_graining((0, 1, 1))
    a = blackbox_probe(ch, 3, 30, seed=4)
    b = blackbox_probe(lambda r: apply(ch, r), 3, 30, seed=4, jobs=3)
    c = blackbox_probe(ch, 3, 30, seed=4, jobs=3, reentrant=False)
    np.testing.assert_array_equal(a.max_increase, b.max_increase)
    np.testing.assert_array_equal(a.max_increase, c.max_increase)
    assert a.witness.pair_index == b.witness.pair_index


def test_probe_rejects_invalid_oracle_output():
    with pytest.raises(OracleReturnedInvalidState):
        blackbox_probe(lambda rho: 2 * np.asarray(rho), 2, 5)


def test_witness_reproduces_increase():
    ch = coarse_graining((0, 1, 1, 2))
    w = blackbox_probe(ch, 4, 40, seed=6).witness
    assert w is not None
    d_in = distance_profile(w.rho, w.sigma).values
    d_out = distance_profile(apply(ch, w.rho), apply(ch, w.sigma)).values
    np.testing.assert_allclose(d_in, w.d_in, atol=1e-9)
    np.testing.assert_allclose(d_out, w.d_out, atol=1e-9)
    assert (d_out - d_in).max() > 1e-7


@pytest.mark.parametrize("seed", range(5))
def test_probe_never_accuses_bistochastic_channels(seed):
    dim = 2 + seed % 3
    verdict = blackbox_probe(random_bistochastic_channel(dim, seed), dim, 40, seed=seed)
    assert verdict.verdict == "consistent_with_teor0"
