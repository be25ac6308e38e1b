import numpy as np
import pytest

from toeplitz_positivity.instances import random_map_instance
from toeplitz_positivity.positivity import Status

ACCEPTANCE_TITLES = {
    1: "lambda-family bounded verdict matches |1 - lambda| >= 1 on 200 points",
    2: "Weyl symbol amplitude and exponent at lambda = -1",
    3: "canonical map diag(1 - lambda, 1/(1 - lambda)) and Cayley cross-check",
    4: "direct and characterization routes agree on random maps",
    5: "map / kernel plane / kernel domination statuses coincide",
    6: "kernel domination is psd with a 2n-dimensional kernel",
    7: "truncated spectra and trace at lambda = -1, N = 40",
    8: "unitarity at lambda = 1 - exp(i pi/4), N = 40",
    9: "unboundedness evidence at lambda = 0.4",
    10: "projection idempotence and unit Weyl symbol of the identity",
    11: "Cayley round trips and push_weight functoriality",
}

_results: dict[int, list[bool]] = {}

STATUSES = (Status.STRICTLY_POSITIVE, Status.NOT_POSITIVE, Status.DEGENERATE_POSITIVE)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number): test backs the numbered acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    number = getattr(report, "acceptance_number", None)
    if number is not None:
        _results.setdefault(number, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance_number = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in ACCEPTANCE_TITLES.items():
        runs = _results.get(number)
        if runs is None:
            verdict = "NOT RUN"
        else:
            verdict = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"[{verdict:>7}] criterion {number:>2}: {title}")


@pytest.fixture(scope="session")
def map_corpus():
    """200 random ``(M, phi1, phi2, planted status)`` per dimension, statuses rotating."""
    rng = np.random.default_rng(20240601)
    corpus = []
    for n in (1, 2, 3):
        for i in range(200):
            status = STATUSES[i % 3]
            M, phi1, phi2 = random_map_instance(rng, n, status)
            corpus.append((M, phi1, phi2, status))
    return corpus
