import pytest

from aquafill.sequences import RequestSequence

RUNNING_ROWS = [({2, 4}, 2), ({1, 2, 3}, 5), ({3}, 2), ({2, 4}, 1), ({3, 4}, 2)]
RUNNING_NESTED_ROWS = [({1, 2, 3, 4}, 2), ({1, 2, 3, 4}, 1), ({1, 2, 3, 4}, 5),
                    ({3, 4}, 2), ({3}, 2)]
TWO_NODE_ROWS = [({1, 2}, 1), ({2}, 1)]


def seq(n, rows):
    return RequestSequence.from_lists(n, rows)


@pytest.fixture
def running():
    return seq(4, RUNNING_ROWS)


@pytest.fixture
def running_nested():
    return seq(4, RUNNING_NESTED_ROWS)


@pytest.fixture
def two_node():
    return seq(2, TWO_NODE_ROWS)


# -- acceptance reporting --------------------------------------------------------

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """Store ``(passed, detail)`` for an acceptance criterion."""

    def _record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(passed), detail)
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
