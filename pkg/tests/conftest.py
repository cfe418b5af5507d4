import pytest

from gfconv.gf import default_field
from gfconv.mapping import build_qam


@pytest.fixture(scope="session")
def gf4():
    return default_field(4)


@pytest.fixture(scope="session")
def gf16():
    return default_field(16)


@pytest.fixture(scope="session")
def gf64():
    return default_field(64)


@pytest.fixture(scope="session")
def qam16():
    return build_qam(16)


@pytest.fixture(scope="session")
def qam64():
    return build_qam(64)


_CRITERIA: list[str] = []


@pytest.fixture
def record_criterion():
    """Record one PASS/FAIL line; the test still has to assert on ``ok``."""

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
