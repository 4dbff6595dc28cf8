import time

import pytest

from causal_inflation import fixtures as fx
from causal_inflation.distributions import inflation_family
from causal_inflation.graph import nodes
from causal_inflation.inflation import ai_expressible_sets
from causal_inflation.marginal_lp import build_problem

CRITERIA = {
    1: "Cut description matrix is the 12x8 fixture",
    2: "Spiral injectable and maximal ai-expressible sets",
    3: "GHZ/W/PR-box/Pienaar witnessed infeasible",
    4: "soundness sweep over random causal models",
    5: "noisy-GHZ threshold (Cut exact, Web stretch)",
    6: "Spiral marginal polytope has 4884 facets",
    7: "Triangle inequality table: validity, orbits, violations",
    8: "Spiral Hardy pipeline",
    9: "Bell Hardy recovery",
    10: "HLP-16 inequality via expressible sets",
    11: "property suites",
}

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


def pytest_runtest_logreport(report):
    crit = getattr(report, "_criterion", None)
    if crit is None:
        return
    rec = _outcomes.setdefault(crit, {"passed": 0, "failed": [], "seconds": 0.0})
    rec["seconds"] += report.duration
    if report.failed:
        rec["failed"].append(report.nodeid.split("::")[-1])
    elif report.when == "call" and report.passed:
        rec["passed"] += 1


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result()._criterion = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        rec = _outcomes.get(n)
        if rec is None:
            continue
        verdict = "FAIL" if rec["failed"] else "PASS"
        line = f"criterion {n:2d}: {verdict}  {CRITERIA[n]}  ({rec['passed']} checks passed, {rec['seconds']:.1f}s)"
        tr.write_line(line)
        for name in rec["failed"]:
            tr.write_line(f"    failed: {name}")


@pytest.fixture(scope="session")
def triangle():
    return fx.load_graph("triangle")


@pytest.fixture(scope="session")
def cut():
    return fx.load_inflation("triangle", "cut")


@pytest.fixture(scope="session")
def spiral():
    return fx.load_inflation("triangle", "spiral")


@pytest.fixture(scope="session")
def bell_inf():
    return fx.load_inflation("bell", "bell_inflation")


@pytest.fixture(scope="session")
def dolls():
    return fx.load_inflation("hlp16", "russian_dolls")


@pytest.fixture(scope="session")
def ghz():
    return fx.load_distribution("ghz")


@pytest.fixture(scope="session")
def w_dist():
    return fx.load_distribution("w")


@pytest.fixture(scope="session")
def pr_box():
    return fx.load_distribution("pr_box")


@pytest.fixture(scope="session")
def pienaar():
    return fx.load_distribution("pienaar")


@pytest.fixture(scope="session")
def cut_problem(cut, ghz):
    ctx = [nodes("A2 B1"), nodes("A2 C1"), nodes("B1 C1")]
    return build_problem(cut, inflation_family(cut, ghz, ctx))


@pytest.fixture(scope="session")
def spiral_problem(spiral, w_dist):
    return build_problem(spiral, inflation_family(spiral, w_dist, ai_expressible_sets(spiral)))


@pytest.fixture(scope="session")
def spiral_polytope(spiral_problem):
    from causal_inflation.facets import enumerate_facets

    t = time.perf_counter()
    poly = enumerate_facets(spiral_problem)
    poly.seconds = time.perf_counter() - t
    return poly


@pytest.fixture(scope="session")
def symmetry(triangle):
    from causal_inflation.inequalities import symmetry_group

    return symmetry_group(triangle)


@pytest.fixture(scope="session")
def table_rows():
    return fx.load_inequalities("triangle_spiral")
