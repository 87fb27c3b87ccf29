"""Prints one pass/fail line per acceptance criterion at the end of a run."""
import re

CRITERIA = {
    1: "entropy sandwich over 200 random mixtures",
    2: "single-Gaussian upper bound tightness",
    3: "received-signal pdf vs quadrature convolution",
    4: "Gaussian-channel reduction of the capacity",
    5: "transmission density normalization and KS",
    6: "ideal channel has zero leakage",
    7: "symplectic Vieta identities",
    8: "parameter-study trends",
    9: "CLI determinism",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = re.search(r"test_criterion_(\d+)(\w*)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(int(m.group(1)), []).append((m.group(2).lstrip("_"), report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num, label in CRITERIA.items():
        results = _outcomes.get(num)
        if not results:
            tr.write_line(f"criterion {num}: NOT RUN  {label}")
            continue
        ok = all(outcome == "passed" for _, outcome in results)
        detail = ""
        if len(results) > 1:
            detail = "  [" + ", ".join(f"{name}={'pass' if o == 'passed' else 'FAIL'}" for name, o in results) + "]"
        tr.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {label}{detail}")
