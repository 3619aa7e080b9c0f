import numpy as np
import pytest

from apmertens.sieve import build_table, register_table


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("MERTENS_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def table6():
    t = build_table(10**6)
    register_table(t)
    return t


@pytest.fixture(scope="session")
def table8():
    t = build_table(10**8)
    register_table(t)
    return t


@pytest.fixture(scope="session")
def simple_primes():
    """Primes up to 10^6 from a plain byte sieve, independent of the packed sieve."""
    n = 10**6
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return np.array([i for i in range(n + 1) if flags[i]], dtype=np.int64)


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
