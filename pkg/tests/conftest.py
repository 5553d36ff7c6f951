import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_sym(rng, n, q):
    a = rng.integers(0, q, (n, n))
    return (np.triu(a) + np.triu(a, 1).T) % q


def random_alt(rng, n, q):
    a = np.triu(rng.integers(0, q, (n, n)), 1)
    return (a - a.T) % q


ACCEPTANCE_LINES: list[str] = []


def report(cid: str, ok: bool, message: str) -> None:
    """Record one acceptance verdict; all of them are echoed in the summary."""
    line = f"{cid} {'PASS' if ok else 'FAIL'}: {message}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
