"""Shared fixtures plus a per-criterion PASS/FAIL summary for the
acceptance tests (one line each at the end of the run)."""

import json
import pathlib
import re

import numpy as np
import pytest

_ACCEPTANCE = {}
_CRIT = re.compile(r"test_c(\d+)_")


@pytest.fixture(scope="session")
def fixtures():
    path = pathlib.Path(__file__).parent / "fixtures.json"
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(2024)))


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    m = _CRIT.search(report.nodeid)
    if not m:
        return
    crit = int(m.group(1))
    # keep the worst outcome over setup/call/teardown
    prev = _ACCEPTANCE.get(crit)
    if report.outcome != "passed" or prev is None:
        if prev != "failed":
            _ACCEPTANCE[crit] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        outcome = _ACCEPTANCE[crit]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {crit:2d}: {verdict}")
