import numpy as np
import pytest

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, checks: dict) -> None:
    """Store a criterion outcome; ``checks`` maps a description to a bool."""
    failed = [name for name, ok in checks.items() if not ok]
    ACCEPTANCE[number] = (title, not failed, "; ".join(failed))
    assert not failed, f"criterion {number} failed: {failed}"


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, failed = ACCEPTANCE[number]
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if failed:
            line += f"  [failed: {failed}]"
        terminalreporter.write_line(line)
