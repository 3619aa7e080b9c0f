"""Counting integers whose prime factors all exceed y and lie in one progression.

``Phi(x, y; q, a)`` counts ``n <= x`` such that every prime ``p | n`` has
``p > y`` and ``p = a mod q``. The count is exact: products of admissible
primes are generated depth-first in nondecreasing order, so each ``n`` is
reached once. At the last level the primes are counted, not visited.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .ap_constants import APConstants, ap_constants
from .errors import TableRangeError
from .report import Report
from .sieve import APTarget, PrimeTable
from .special_functions import gamma_fn

# n = 1 has no prime factors and so satisfies the condition vacuously.
COUNT_ONE = 1
DEFAULT_ENVELOPE_A = 1.0


@dataclass(frozen=True)
class PliableQuery:
    x: int
    y: float
    target: APTarget

    def __post_init__(self):
        if self.x < 1:
            raise ValueError(f"x must be >= 1, got {self.x}")
        if self.y < 1:
            raise ValueError(f"y must be >= 1, got {self.y}")

    @classmethod
    def of(cls, x: float, y: float, q: int, a: int) -> "PliableQuery":
        return cls(int(x), float(y), APTarget.normalized(q, a))


def admissible_primes(table: PrimeTable, query: PliableQuery) -> np.ndarray:
    if query.x > table.limit:
        raise TableRangeError(f"x={query.x} exceeds table limit {table.limit}")
    if query.x < 2:
        return np.zeros(0, dtype=np.int64)
    ps = table.primes_upto(query.x)
    ps = ps[ps > query.y]
    t = query.target
    if t.q > 1:
        ps = ps[ps % t.q == t.a % t.q]
    return ps


def _count(ps: list[int], limit: int, start: int, arr: np.ndarray) -> int:
    """Products ``<= limit`` of primes from ``ps[start:]``, including the empty one."""
    total = 1
    i = start
    n = len(ps)
    while i < n:
        p = ps[i]
        if p > limit // p:
            # p*p > limit: only single primes remain
            total += max(0, int(np.searchsorted(arr, limit, side="right")) - i)
            break
        total += _count(ps, limit // p, i, arr)
        i += 1
    return total


def phi_count(table: PrimeTable, query: PliableQuery) -> int:
    """Exact ``Phi(x, y; q, a)``."""
    ps = admissible_primes(table, query)
    depth = int(math.log2(max(query.x, 2))) + 50
    if sys.getrecursionlimit() < depth:
        sys.setrecursionlimit(depth)
    return _count(ps.tolist(), query.x, 0, ps) - 1 + COUNT_ONE


def enumerate_pliable(table: PrimeTable, query: PliableQuery) -> np.ndarray:
    """All counted ``n``, sorted. Meant for small ``x``."""
    ps = admissible_primes(table, query).tolist()
    out = [1] if COUNT_ONE else []
    stack = [(1, 0)]
    while stack:
        n, start = stack.pop()
        for i in range(start, len(ps)):
            p = ps[i]
            if n > query.x // p:
                break
            out.append(n * p)
            stack.append((n * p, i))
    return np.array(sorted(out), dtype=np.int64)


def main_term(query: PliableQuery, constants: APConstants | None, table: PrimeTable) -> float:
    """``x (log x)^(1/phi - 1) G(q, a)/Gamma(1/phi) prod_{p <= y, p = a (q)} (1 - 1/p)``."""
    if query.x < 3:
        raise ValueError("main term needs x >= 3")
    t = query.target
    constants = constants or ap_constants(t.q, t.a)
    inv_phi = 1.0 / t.phi
    small = np.zeros(0, dtype=np.int64)
    if query.y >= 2:
        small = table.primes_upto(query.y)
        if t.q > 1:
            small = small[small % t.q == t.a % t.q]
    log_factor = math.fsum(np.log1p(-1.0 / small.astype(np.float64)))
    logx = math.log(query.x)
    return query.x * logx ** (inv_phi - 1) * constants.G / gamma_fn(inv_phi) * math.exp(log_factor)


def error_envelope(x: float, A: float = DEFAULT_ENVELOPE_A) -> float:
    """``(log log x)^(A + 3) / log x``, the relative error scale of the main term."""
    return math.log(math.log(x)) ** (A + 3) / math.log(x)


PLIABLE_COLUMNS = ["quantity", "x", "y", "q", "a", "exact", "main_term", "ratio", "envelope"]


def pliable_report(table: PrimeTable, queries, A: float = DEFAULT_ENVELOPE_A,
                   constants: dict | None = None) -> Report:
    report = Report("pliable-count/1", list(PLIABLE_COLUMNS), metadata={"envelope_A": A})
    constants = constants or {}
    for query in queries:
        t = query.target
        c = constants.get((t.q, t.a)) or ap_constants(t.q, t.a)
        exact = phi_count(table, query)
        main = main_term(query, c, table)
        report.add(quantity="pliable-count", x=query.x, y=query.y, q=t.q, a=t.a, exact=exact,
                   main_term=main, ratio=exact / main, envelope=error_envelope(query.x, A))
    return report
