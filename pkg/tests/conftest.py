import pytest

_LINES: list[str] = []


class CriterionLog:
    def __init__(self, name: str):
        self.name = name
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)

    def finish(self, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {self.name}"
        if detail:
            line += f"  ({detail})"
        _LINES.append(line)
        _LINES.extend("      " + n for n in self.notes)
        print(line)


@pytest.fixture
def criterion():
    return lambda name: CriterionLog(name)


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
