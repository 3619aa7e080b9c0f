"""Small integer helpers (factorisation by trial division, totient, divisors)."""

from __future__ import annotations

import math
from functools import lru_cache


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Return ``((p, k), ...)`` with ``n = prod p**k``, primes ascending."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    m = n
    for p in (2, 3):
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
    d = 5
    while d * d <= m:
        for p in (d, d + 2):
            if m % p == 0:
                k = 0
                while m % p == 0:
                    m //= p
                    k += 1
                out.append((p, k))
        d += 6
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(p for p, _ in factorize(n))


def totient(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorize(n):
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return sorted(divs)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == ((n, 1),)


def coprime_residues(q: int) -> list[int]:
    """Residues ``1 <= a <= q`` with ``gcd(a, q) = 1`` (so ``[1]`` for q = 1)."""
    return [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
