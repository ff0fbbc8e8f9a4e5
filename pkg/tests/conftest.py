import numpy as np
import pytest

from alpec.core import Interval


def random_intervals(rng: np.random.Generator, max_count: int, span: int, max_len: int = 80) -> list[Interval]:
    """Sorted, disjoint intervals inside ``[0, span)``."""
    count = int(rng.integers(0, max_count + 1))
    out = []
    pos = int(rng.integers(0, 20))
    for _ in range(count):
        start = pos + int(rng.integers(0, 40))
        end = start + int(rng.integers(1, max_len))
        if end > span:
            break
        out.append(Interval(start, end))
        pos = end
    return out


def random_gt(rng: np.random.Generator, max_count: int, span: int) -> list[Interval]:
    """Sorted ground truth whose buffered copies may overlap each other."""
    return random_intervals(rng, max_count, span, max_len=15)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _ACCEPTANCE.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {label}")
