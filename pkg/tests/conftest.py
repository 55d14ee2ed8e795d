"""Shared fixtures, independent numpy oracles, and the acceptance summary."""
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def oracle_singular_values(x):
    """Decreasing singular values straight from LAPACK."""
    return np.linalg.svd(np.asarray(x, dtype=complex), compute_uv=False)


def oracle_profile(rho, sigma):
    a = rho.matrix if hasattr(rho, "matrix") else np.asarray(rho)
    b = sigma.matrix if hasattr(sigma, "matrix") else np.asarray(sigma)
    return 0.5 * np.cumsum(oracle_singular_values(a - b))


def oracle_eigvals_desc(h):
    return np.linalg.eigvalsh(np.asarray(h, dtype=complex))[::-1]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_criteria: dict[int, dict] = defaultdict(lambda: {"title": "", "outcomes": []})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        number, title = marker.args
        entry = _criteria[number]
        entry["title"] = title
        entry["outcomes"].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        verdict = "PASS" if all(entry["outcomes"]) else "FAIL"
        terminalreporter.write_line(f"AC{number:02d} {verdict}  {entry['title']} ({len(entry['outcomes'])} checks)")
