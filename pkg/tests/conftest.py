import pytest

_RESULTS: dict[int, str] = {}


class CriterionRecorder:
    """Records a one-line verdict for an acceptance criterion, then asserts it."""

    def __call__(self, number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        _RESULTS[number] = line
        print(line)
        assert ok, line


@pytest.fixture
def criterion():
    return CriterionRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        terminalreporter.write_line(_RESULTS[number])
