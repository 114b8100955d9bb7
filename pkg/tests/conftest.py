import time

import pytest

SUITE_BUDGET_S = 60.0
_lines: list[str] = []
_start = time.perf_counter()


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; returns the verdict."""

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        _lines.append(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title} ({detail})")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _lines:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for line in _lines:
        tr.write_line(line)
    elapsed = time.perf_counter() - _start
    # the suite-wide runtime bound only means something for a full run
    tests_dir = config.rootpath / "tests"
    targets = {(config.invocation_params.dir / a).resolve() for a in config.args}
    full = targets <= {config.rootpath.resolve(), tests_dir.resolve()}
    if full and not config.getoption("keyword") and not config.getoption("markexpr"):
        ok = elapsed < SUITE_BUDGET_S
        tr.write_line(
            f"{'PASS' if ok else 'FAIL'}  criterion 8: full suite runtime "
            f"({elapsed:.1f} s, limit {SUITE_BUDGET_S:.0f} s)"
        )
