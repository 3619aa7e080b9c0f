"""The constants L(q,a), g(q,a), G(q,a) and their degenerate limits g*, G*.

``g(q, a) = gamma/phi(q) + log L(q, a) - sum_{p^nu = a (q), nu >= 2} 1/(nu p^nu)``
where ``L(q, a)`` is the positive ``phi(q)``-th root of
``(phi(q)/q) * prod_{chi != chi_0} L(1, chi)^conj(chi(a))``.

Prime-power sums run over ``p <= P`` and carry the tail bound ``1/P``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from ._arith import coprime_residues, is_prime, prime_divisors, totient
from .characters import characters_mod
from .errors import ConsistencyError
from .sieve import APTarget, PrimeTable, register_table, shared_table
from .special_functions import EULER_GAMMA, log_l_one

DEFAULT_CUTOFF = 10**7
NU_MAX = 64
IMAG_TOLERANCE = 1e-8
# terms 1/(nu p^nu) below this are dropped (far under binary64 resolution of g)
_NEGLIGIBLE = 1e-25

Mode = Literal["exponent-sum", "residue-sum"]


@dataclass(frozen=True)
class APConstants:
    target: APTarget
    script_L: float
    g: float
    G: float
    g_star: float
    G_star: float
    correction_cutoff: int
    tail_bound: float


@lru_cache(maxsize=256)
def _correction_table(q: int, P: int, mode: Mode) -> np.ndarray:
    """Sum of 1/(nu p^nu), p <= P, 2 <= nu <= NU_MAX, binned by residue mod q.

    Binned by ``p^nu mod q`` for the exponent-sum, by ``p mod q`` for the
    residue-sum. Arrays are reversed so small terms accumulate first.
    """
    ps = shared_table(P).primes_upto(P)[::-1]
    pf = ps.astype(np.float64)
    logp = np.log(pf)
    base = ps % q
    out = np.zeros(q)
    power_res = base.copy()
    for nu in range(2, NU_MAX + 1):
        power_res = power_res * base % q
        # ps is descending, so the kept primes form a suffix
        keep = nu * logp + math.log(nu) <= -math.log(_NEGLIGIBLE)
        if not keep.any():
            break
        start = int(np.argmax(keep))
        weights = np.exp(-nu * logp[start:]) / nu
        bins = power_res[start:] if mode == "exponent-sum" else base[start:]
        out += np.bincount(bins, weights=weights, minlength=q)
    out.flags.writeable = False
    return out


def _check_cutoff(q: int, P: int) -> None:
    if P < q:
        raise ValueError(f"correction cutoff P={P} must be at least q={q}")


def prime_power_correction(q: int, a: int, P: int = DEFAULT_CUTOFF, mode: Mode = "exponent-sum",
                           table: PrimeTable | None = None) -> tuple[float, float]:
    """Truncated prime-power sum and its tail bound ``1/P``.

    ``exponent-sum``: pairs (p, nu) with ``p**nu = a mod q``.
    ``residue-sum``: pairs with ``p = a mod q``.
    """
    if mode not in ("exponent-sum", "residue-sum"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_cutoff(q, P)
    if table is not None and table.limit >= P:
        register_table(table)
    return float(_correction_table(q, P, mode)[a % q]), 1.0 / P


@lru_cache(maxsize=256)
def log_script_L_table(q: int) -> np.ndarray:
    """``log L(q, a)`` for every residue ``0 <= a < q`` (meaningful where gcd(a, q) = 1)."""
    phi = totient(q)
    bracket = np.full(q, math.log(phi / q), dtype=complex)
    for chi in characters_mod(q):
        if chi.principal:
            continue
        bracket += np.conj(chi.values) * log_l_one(chi).value
    units = np.gcd(np.arange(q), q) == 1
    worst = float(np.max(np.abs(bracket.imag[units])))
    if worst > IMAG_TOLERANCE:
        raise ConsistencyError(
            f"imaginary residue {worst:.3e} in log L({q}, a) exceeds {IMAG_TOLERANCE}; branch fault"
        )
    out = bracket.real / phi
    out.flags.writeable = False
    return out


def script_L(q: int, a: int) -> float:
    target = APTarget.normalized(q, a)
    return math.exp(log_script_L_table(q)[target.a % q])


def g_constant(q: int, a: int, P: int = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> float:
    target = APTarget.normalized(q, a)
    corr, _ = prime_power_correction(q, target.a, P, "exponent-sum", table)
    return EULER_GAMMA / target.phi + float(log_script_L_table(q)[target.a % q]) - corr


def _G_forms(q: int, a: int, P: int, table: PrimeTable | None) -> tuple[float, float, float]:
    target = APTarget.normalized(q, a)
    log_L = float(log_script_L_table(q)[target.a % q])
    exp_sum, tail = prime_power_correction(q, target.a, P, "exponent-sum", table)
    res_sum, _ = prime_power_correction(q, target.a, P, "residue-sum", table)
    g = EULER_GAMMA / target.phi + log_L - exp_sum
    via_g = math.exp(-EULER_GAMMA / target.phi + g + res_sum)
    via_L = math.exp(log_L) * math.exp(res_sum - exp_sum)
    return via_g, via_L, tail


def G_constant(q: int, a: int, P: int = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> float:
    """``G(q, a)`` from the L-based form, after checking it against the g-based form."""
    via_g, via_L, tail = _G_forms(q, a, P, table)
    if abs(via_g - via_L) > 2 * tail + 1e-8:
        raise ConsistencyError(f"G({q},{a}) forms disagree: {via_g} vs {via_L}")
    return via_L


def g_star(q: int, a: int) -> float:
    return 1.0 / a if q >= 2 and is_prime(a) else 0.0


def G_star(q: int, a: int) -> float:
    return a / (a - 1) if q >= 2 and is_prime(a) else 1.0


def ap_constants(q: int, a: int, P: int = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> APConstants:
    target = APTarget.normalized(q, a)
    _, tail = prime_power_correction(q, target.a, P, "exponent-sum", table)
    return APConstants(
        target=target,
        script_L=script_L(q, target.a),
        g=g_constant(q, target.a, P, table),
        G=G_constant(q, target.a, P, table),
        g_star=g_star(q, target.a),
        G_star=G_star(q, target.a),
        correction_cutoff=P,
        tail_bound=tail,
    )


def mertens_constant(P: int = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> float:
    """``g = g(1, 1)``, the constant in the sum of 1/p over all primes."""
    return g_constant(1, 1, P, table)


def sum_identity_residual(q: int, P: int = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> float:
    """``|sum_a g(q, a) - (g - sum_{p | q} 1/p)|`` over the reduced residues a."""
    if q == 1:
        return 0.0
    total = math.fsum(g_constant(q, a, P, table) for a in coprime_residues(q))
    expected = mertens_constant(P, table) - math.fsum(1.0 / p for p in prime_divisors(q))
    return abs(total - expected)


def degenerate_limit_ratio(q: int, a: int, P: int = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> float:
    """``|g(q, a) - g*(q, a)| * phi(q) / log q``: bounded as q grows, for fixed a."""
    if q < 3:
        raise ValueError("ratio needs q >= 3")
    return abs(g_constant(q, a, P, table) - g_star(q, a)) * totient(q) / math.log(q)
