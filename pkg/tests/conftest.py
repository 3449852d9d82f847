"""Collects acceptance-criterion outcomes and prints one line per criterion."""
from collections import defaultdict

import pytest

CRITERIA = {
    1: "normalization and Poisson-limit suite",
    2: "fidelity anchors",
    3: "pairing statistics vs Monte Carlo",
    4: "decoy bracket soundness",
    5: "fig1 sweep shape (D scan)",
    6: "fig2 sweep shape (l scan)",
    7: "regression goldens",
}

_criterion_of = {}
_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _criterion_of[item.nodeid] = mark.args[0]


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[n].append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            continue
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {n} {title}: {status} [{len(results) - len(failed)}/{len(results)} checks]{detail}")
