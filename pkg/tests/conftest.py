import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line verdict per acceptance criterion, shown in the terminal summary."""

    class Recorder:
        def __call__(self, label: str):
            return _Verdict(label)

    return Recorder()


class _Verdict:
    def __init__(self, label):
        self.label = label
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            status = "PASS"
        elif issubclass(exc_type, pytest.skip.Exception):
            status = "SKIP"
        else:
            status = "FAIL"
        ACCEPTANCE_LINES.append(f"{status}  {self.label}" + (f"  [{self.detail}]" if self.detail else ""))
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
