import pytest

from cayleytri.perms import PermutationSystem
from cayleytri.solver import Constraints, solve

# the four-symbol example on three columns
EXAMPLE = {"AB": "1234", "AC": "4213", "BC": "4321"}
EXAMPLE_POSITIONS = ((1, 0, 2), (1, 1, 1), (0, 2, 1), (0, 3, 0))

U = ((0, 3, 1, 0), (2, 1, 1, 0), (0, 1, 1, 2), (1, 0, 2, 1), (1, 2, 0, 1))
U1 = ((0, 3, 0, 0), (2, 1, 0, 0), (0, 1, 0, 2), (1, 0, 1, 1))
U2 = ((0, 2, 0, 0), (2, 0, 0, 0), (0, 0, 0, 2))

# the non-extendable boundary system at (3, 4) and its five-symbol extension
S31 = {"AB": "231", "AC": "231", "AD": "213", "BC": "123", "BD": "123", "CD": "123"}
S32 = {"AB": "42531", "AC": "52341", "AD": "24153", "BC": "51234", "BD": "15234", "CD": "12435"}


@pytest.fixture(scope="session")
def example_system():
    return PermutationSystem.from_dict(4, 3, EXAMPLE)


@pytest.fixture(scope="session")
def example_triangulation(example_system):
    res = solve((4, 3), Constraints(system=example_system), mode="enumerate")
    assert res.count == 1
    return res.triangulations[0]


@pytest.fixture(scope="session")
def s31_system():
    return PermutationSystem.from_dict(3, 4, S31)


@pytest.fixture(scope="session")
def s32_system():
    return PermutationSystem.from_dict(5, 4, S32)


# --- acceptance verdict lines -------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        _criteria[number] = (title, report.passed, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, secs = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title} ({secs:.1f}s)")
