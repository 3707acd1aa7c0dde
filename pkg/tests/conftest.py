import re

import pytest

CRITERIA = {
    1: "distance/count closed forms vs brute-force nullspace (exact)",
    2: "block multiplicities and extended-diagonal span (exact)",
    3: "eight hashing-bound thresholds to +-0.1pp",
    4: "cycle decoder: K_20 bound and K_4 tie-free ML agreement",
    5: "MPS chi=64 vs brute-force coset probabilities (rel 1e-10)",
    6: "chi=1 pure-Y verdicts equal exact ML (zero mismatches)",
    7: "pure-Y threshold fit = 0.50 +- 0.02",
    8: "log-failure vs d_Y linearity (R^2 >= 0.98)",
    9: "rotated beats square at pure Y, >= 5 sigma",
    10: "eta=0.5 MPS threshold within 1.5pp of 18.8% (slow)",
    11: "byte-identical CSV reruns of the simulation pipelines",
}

_results: dict[int, str] = {}
_collected_criteria = False
_RANK = {"FAIL": 3, "ERROR": 3, "SKIP": 2, "PASS": 1}


def pytest_collection_modifyitems(items):
    global _collected_criteria
    if any(re.match(r"test_criterion_\d+", item.name) for item in items):
        _collected_criteria = True


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    match = re.match(r"test_criterion_(\d+)", item.name)
    if not match:
        return
    number = int(match.group(1))
    if report.when == "call":
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    elif report.when == "setup" and (report.skipped or report.failed):
        status = "SKIP" if report.skipped else "ERROR"
    else:
        return
    previous = _results.get(number)
    if previous is None or _RANK[status] > _RANK[previous]:
        _results[number] = status


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _collected_criteria and not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        status = _results.get(number, "NOT RUN")
        terminalreporter.write_line(f"criterion {number:2d}: {status:7s} {CRITERIA[number]}")
