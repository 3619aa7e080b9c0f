"""Frobenius classes and prime reciprocal constants for three Galois extensions of Q.

Settings:

* ``Cyclotomic(q)``: Q(zeta_q), group (Z/qZ)*, Frobenius of p is ``p mod q``.
* ``Quadratic(D)``: Q(sqrt D) for a fundamental discriminant D, classes
  ``split`` and ``inert`` read off the Kronecker symbol ``(D/p)``.
* ``CubicS3``: the splitting field of ``x^3 - x - 1`` (discriminant -23),
  group S3, classes by the number of roots of the cubic mod p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ._arith import coprime_residues, factorize, is_prime, prime_divisors, totient
from .ap_constants import DEFAULT_CUTOFF, NU_MAX, mertens_constant
from .characters import character_from_values
from .errors import TableRangeError
from .report import Report
from .sieve import PrimeTable, li, shared_table
from .special_functions import EULER_GAMMA, l_one

RAMIFIED = "ramified"
SPLIT, INERT = "split", "inert"
IDENTITY, TRANSPOSITION, THREE_CYCLE = "identity", "transposition", "3-cycle"
EXACT, ESTIMATE = "exact", "brute-force-estimate"

# x^3 - x - 1
CUBIC_DISCRIMINANT = -23
_EXHAUSTIVE_ROOT_BOUND = 1000


def kronecker(a: int, n: int) -> int:
    """The Kronecker symbol ``(a/n)``."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n: int) -> bool:
    return all(k == 1 for _, k in factorize(abs(n)))


@dataclass(frozen=True)
class GaloisSetting:
    """A Galois extension L/Q with its conjugacy classes ``(id, size)``."""

    kind: str
    parameter: int
    group_order: int
    classes: tuple[tuple[str, int], ...]
    discriminant: int
    ramified_primes: tuple[int, ...]

    def __str__(self):
        if self.kind == "cyclotomic":
            return f"cyclo:{self.parameter}"
        if self.kind == "quadratic":
            return f"quad:{self.parameter}"
        return "cubic-s3"

    @property
    def class_ids(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.classes)

    def class_size(self, cls: str) -> int:
        for c, size in self.classes:
            if c == cls:
                return size
        raise KeyError(f"{cls!r} is not a class of {self}; classes are {self.class_ids}")

    def density(self, cls: str) -> float:
        return self.class_size(cls) / self.group_order


def Cyclotomic(q: int) -> GaloisSetting:
    if q < 1:
        raise ValueError("q must be positive")
    if q % 4 == 2:
        raise ValueError(f"Q(zeta_{q}) = Q(zeta_{q // 2}); use q = {q // 2}")
    phi = totient(q)
    disc = (-1) ** (phi // 2) * q**phi
    for p in prime_divisors(q):
        disc //= p ** (phi // (p - 1))
    classes = tuple((str(a), 1) for a in coprime_residues(q))
    return GaloisSetting("cyclotomic", q, phi, classes, disc, prime_divisors(q))


def Quadratic(D: int) -> GaloisSetting:
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    return GaloisSetting("quadratic", D, 2, ((SPLIT, 1), (INERT, 1)), D, prime_divisors(abs(D)))


def CubicS3() -> GaloisSetting:
    return GaloisSetting("cubic-s3", 0, 6, ((IDENTITY, 1), (TRANSPOSITION, 3), (THREE_CYCLE, 2)),
                         CUBIC_DISCRIMINANT, (23,))


def parse_setting(text: str) -> GaloisSetting:
    """``cyclo:q``, ``quad:D`` or ``cubic-s3``."""
    text = text.strip().lower()
    if text in ("cubic-s3", "cubic"):
        return CubicS3()
    kind, _, arg = text.partition(":")
    try:
        value = int(arg)
    except ValueError:
        raise ValueError(f"cannot parse setting {text!r}") from None
    if kind == "cyclo":
        return Cyclotomic(value)
    if kind == "quad":
        return Quadratic(value)
    raise ValueError(f"unknown setting {text!r}; use cyclo:q, quad:D or cubic-s3")


@dataclass(frozen=True)
class FrobeniusOutcome:
    p: int
    cls: str

    @property
    def ramified(self) -> bool:
        return self.cls == RAMIFIED


# arithmetic in F_p[x]/(x^3 - x - 1), elements as coefficient triples


def _cubic_mul(a, b, p):
    a0, a1, a2 = a
    b0, b1, b2 = b
    c0 = a0 * b0 % p
    c1 = (a0 * b1 % p + a1 * b0 % p) % p
    c2 = (a0 * b2 % p + a1 * b1 % p + a2 * b0 % p) % p
    c3 = (a1 * b2 % p + a2 * b1 % p) % p
    c4 = a2 * b2 % p
    # x^3 = x + 1, x^4 = x^2 + x
    return (c0 + c3) % p, (c1 + c3 + c4) % p, (c2 + c4) % p


def _x_power_p(p):
    """``x^p`` in ``F_p[x]/(x^3 - x - 1)``; ``p`` may be an int or an int64 array."""
    one = np.ones_like(p) if isinstance(p, np.ndarray) else 1
    zero = 0 * one
    result = (one, zero, zero)
    top = int(np.max(p)).bit_length() if isinstance(p, np.ndarray) else p.bit_length()
    for bit in range(top - 1, -1, -1):
        result = _cubic_mul(result, result, p)
        r0, r1, r2 = result
        # multiply by x: (r0, r1, r2) x = (r2, r0 + r2, r1)
        shifted = (r2, (r0 + r2) % p, r1)
        if isinstance(p, np.ndarray):
            on = ((p >> bit) & 1).astype(bool)
            result = tuple(np.where(on, s, r) for s, r in zip(shifted, result))
        elif (p >> bit) & 1:
            result = shifted
    return result


def _poly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f, g, p):
    f = list(f)
    inv = pow(g[-1], -1, p)
    while len(f) >= len(g):
        c = f[-1] * inv % p
        shift = len(f) - len(g)
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gi) % p
        _poly_trim(f)
    return f


def _poly_gcd(f, g, p):
    f, g = _poly_trim(list(f)), _poly_trim(list(g))
    while g:
        f, g = g, _poly_mod(f, g, p)
    return f


def cubic_root_count(p: int) -> int:
    """Number of distinct roots of ``x^3 - x - 1`` in ``F_p``."""
    if p < _EXHAUSTIVE_ROOT_BOUND:
        return sum(1 for r in range(p) if (r * r * r - r - 1) % p == 0)
    h0, h1, h2 = _x_power_p(p)
    h = [h0, (h1 - 1) % p, h2]  # x^p - x
    return len(_poly_gcd([p - 1, p - 1, 0, 1], h, p)) - 1


def frobenius_class(setting: GaloisSetting, p: int) -> FrobeniusOutcome:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p in setting.ramified_primes:
        return FrobeniusOutcome(p, RAMIFIED)
    if setting.kind == "cyclotomic":
        return FrobeniusOutcome(p, str(p % setting.parameter) if setting.parameter > 1 else "1")
    if setting.kind == "quadratic":
        return FrobeniusOutcome(p, SPLIT if kronecker(setting.parameter, p) == 1 else INERT)
    roots = cubic_root_count(p)
    return FrobeniusOutcome(p, {3: IDENTITY, 1: TRANSPOSITION, 0: THREE_CYCLE}[roots])


def classify_primes(setting: GaloisSetting, ps: np.ndarray) -> np.ndarray:
    """Index into ``setting.classes`` for each prime, or -1 where it ramifies."""
    ps = np.asarray(ps, dtype=np.int64)
    out = np.full(len(ps), -1, dtype=np.int64)
    unram = ~np.isin(ps, np.array(setting.ramified_primes, dtype=np.int64))
    if setting.kind == "cyclotomic":
        q = setting.parameter
        lookup = np.full(q, -1, dtype=np.int64)
        for idx, (c, _) in enumerate(setting.classes):
            lookup[int(c) % q] = idx
        out[unram] = lookup[ps[unram] % q]
        return out
    if setting.kind == "quadratic":
        D = setting.parameter
        symbol = np.array([kronecker(D, r) for r in range(abs(D))], dtype=np.int64)
        s = symbol[ps % abs(D)]
        out[unram & (s == 1)] = 0
        out[unram & (s == -1)] = 1
        return out
    # cubic: discriminant non-square gives the transposition class
    small = unram & (ps < _EXHAUSTIVE_ROOT_BOUND)
    by_index = {3: 0, 1: 1, 0: 2}
    out[small] = [by_index[cubic_root_count(int(p))] for p in ps[small]]
    big = unram & ~small
    legendre = np.array([kronecker(r, 23) for r in range(23)], dtype=np.int64)[ps % 23]
    odd_perm = big & (legendre == -1)
    out[odd_perm] = 1
    even = big & (legendre == 1)
    if even.any():
        pe = ps[even]
        h0, h1, h2 = _x_power_p(pe)
        splits = (h0 == 0) & (h1 == 1) & (h2 == 0)
        out[np.flatnonzero(even)] = np.where(splits, 0, 2)
    return out


@lru_cache(maxsize=16)
def _table_classes(setting: GaloisSetting, table: PrimeTable) -> np.ndarray:
    out = classify_primes(setting, table.primes)
    out.flags.writeable = False
    return out


def _class_index(setting: GaloisSetting, cls: str) -> int:
    setting.class_size(cls)
    return setting.class_ids.index(cls)


def class_primes(table: PrimeTable, t: float, setting: GaloisSetting, cls: str) -> np.ndarray:
    """Unramified primes ``p <= t`` with Frobenius class ``cls``."""
    idx = _class_index(setting, cls)
    n = table.pi(t)
    return table.primes[:n][_table_classes(setting, table)[:n] == idx]


def pi_chebotarev(table: PrimeTable, t: float, setting: GaloisSetting, cls: str) -> int:
    return len(class_primes(table, t, setting, cls))


def chebotarev_error(table: PrimeTable, t: float, setting: GaloisSetting, cls: str) -> float:
    return pi_chebotarev(table, t, setting, cls) - setting.density(cls) * li(t)


def class_sum_residual(table: PrimeTable, setting: GaloisSetting, x: float) -> float:
    """``|sum_C sum_{Frob p in C} 1/p + sum_{p | disc} 1/p - sum_p 1/p|`` over ``p <= x``."""
    parts = [math.fsum(1.0 / class_primes(table, x, setting, c).astype(np.float64))
             for c in setting.class_ids]
    parts += [1.0 / p for p in setting.ramified_primes if p <= x]
    total = math.fsum(1.0 / table.primes_upto(x).astype(np.float64))
    return abs(math.fsum(parts) - total)


@dataclass(frozen=True)
class ChebotarevConstants:
    setting: GaloisSetting
    cls: str
    g: float
    G: float
    exactness: str
    tail_bound: float
    confidence: float | None = None


def _chi_D(D: int) -> np.ndarray:
    return np.array([kronecker(D, a) for a in range(abs(D))], dtype=np.int64)


def quadratic_l_one(D: int) -> float:
    """``L(1, chi_D)`` from the finite closed forms (no digamma)."""
    chi = _chi_D(D)
    m = abs(D)
    a = np.arange(1, m)
    if D < 0:
        return -math.pi / m**1.5 * math.fsum(a * chi[1:])
    return -math.fsum(chi[1:] * np.log(np.sin(np.pi * a / m))) / math.sqrt(D)


def _quadratic_corrections(D: int, cls: str, P: int) -> tuple[float, float]:
    """(power sum over ``Frob^nu = C``, power sum over ``Frob p = C``), both ``nu >= 2``.

    Identity class: split primes at every ``nu``, inert primes at even ``nu``.
    Inert class: inert primes at odd ``nu``.
    """
    ps = shared_table(P).primes_upto(P)
    ps = ps[~np.isin(ps, prime_divisors(abs(D)))][::-1]
    split = _chi_D(D)[ps % abs(D)] == 1
    logp = np.log(ps.astype(np.float64))
    in_class = split if cls == SPLIT else ~split
    power_sum, residue_sum = [], []
    for nu in range(2, NU_MAX + 1):
        keep = nu * logp + math.log(nu) <= 25 * math.log(10)
        if not keep.any():
            break
        start = int(np.argmax(keep))
        term = np.exp(-nu * logp[start:]) / nu
        sp = split[start:]
        if cls == SPLIT:
            hits = term if nu % 2 == 0 else np.where(sp, term, 0.0)
        else:
            hits = np.where(sp, 0.0, term) if nu % 2 else np.zeros_like(term)
        power_sum.append(math.fsum(hits))
        residue_sum.append(math.fsum(np.where(in_class[start:], term, 0.0)))
    return math.fsum(power_sum), math.fsum(residue_sum)


def g_quadratic_exact(D: int, cls: str, P: int = DEFAULT_CUTOFF) -> ChebotarevConstants:
    """Exact ``g`` and ``G`` for the class ``split`` or ``inert`` of ``Q(sqrt D)``.

    ``L^2 = prod_{p | D} (1 - 1/p) * L(1, chi_D)^(+1 or -1)``, then
    ``g = gamma/2 + log L - sum_{Frob^nu = C, nu >= 2} 1/(nu p^nu)``.
    """
    setting = Quadratic(D)
    if cls not in (SPLIT, INERT):
        raise KeyError(f"class must be {SPLIT!r} or {INERT!r}")
    ram = math.fsum(math.log1p(-1.0 / p) for p in prime_divisors(abs(D)))
    sign = 1 if cls == SPLIT else -1
    log_L = 0.5 * (ram + sign * math.log(quadratic_l_one(D)))
    power_sum, residue_sum = _quadratic_corrections(D, cls, P)
    g = EULER_GAMMA / 2 + log_L - power_sum
    G = math.exp(log_L + residue_sum - power_sum)
    return ChebotarevConstants(setting, cls, g, G, EXACT, 1.0 / P)


def _estimate(table, setting, cls, x):
    s = math.fsum(1.0 / class_primes(table, x, setting, cls).astype(np.float64))
    return s - setting.density(cls) * math.log(math.log(x))


def g_bruteforce_estimate(table: PrimeTable, setting: GaloisSetting, cls: str, x: float) -> ChebotarevConstants:
    """``sum_{p <= x, Frob p = C} 1/p - (|C|/|G|) log log x``.

    ``confidence`` is the drift over the last decade, ``|est(x) - est(x/10)|``.
    ``G`` is ``exp(-(|C|/|G|) gamma + g_est + sum_{Frob p = C, p <= x, nu >= 2} 1/(nu p^nu))``.
    """
    if x < 30:
        raise TableRangeError("estimate needs x >= 30")
    g = _estimate(table, setting, cls, x)
    drift = abs(g - _estimate(table, setting, cls, x / 10))
    ps = class_primes(table, x, setting, cls).astype(np.float64)
    # sum_{nu >= 2} p^-nu / nu = -log(1 - 1/p) - 1/p
    residue = math.fsum(-np.log1p(-1.0 / ps) - 1.0 / ps)
    G = math.exp(-setting.density(cls) * EULER_GAMMA + g + residue)
    return ChebotarevConstants(setting, cls, g, G, ESTIMATE, 1.0 / x, drift)


def mertens_slope(table: PrimeTable, setting: GaloisSetting, cls: str, xs) -> float:
    """Least-squares slope of ``sum_{p <= x, Frob p = C} 1/p`` against ``log log x``."""
    xs = [float(x) for x in xs]
    ys = [math.fsum(1.0 / class_primes(table, x, setting, cls).astype(np.float64)) for x in xs]
    return float(np.polyfit(np.log(np.log(xs)), ys, 1)[0])


def class_density(table: PrimeTable, setting: GaloisSetting, cls: str, x: float) -> float:
    return pi_chebotarev(table, x, setting, cls) / table.pi(x)


# class number cross-check


@dataclass(frozen=True)
class QuadraticFieldData:
    D: int
    h: int
    w: int
    t: int
    u: int

    @property
    def residue(self) -> float:
        """Value predicted for ``L(1, chi_D)`` by the class number formula."""
        if self.D < 0:
            return 2 * math.pi * self.h / (self.w * math.sqrt(-self.D))
        eps = (self.t + self.u * math.sqrt(self.D)) / 2
        return 2 * self.h * math.log(eps) / math.sqrt(self.D)


@lru_cache(maxsize=1)
def quadratic_field_table() -> dict[int, QuadraticFieldData]:
    """Checked-in data: ``D h w t u`` per line, fundamental unit ``(t + u sqrt D)/2``."""
    text = resources.files("apmertens").joinpath("data/quadratic_fields.tsv").read_text()
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        D, h, w, t, u = (int(v) for v in line.split())
        out[D] = QuadraticFieldData(D, h, w, t, u)
    return out


def class_number_crosscheck(D: int) -> Report:
    table = quadratic_field_table()
    if D not in table:
        raise KeyError(f"D={D} not in the quadratic field table")
    row = table[D]
    chi = character_from_values(abs(D), _chi_D(D))
    value = l_one(chi).real
    report = Report("class-number-check/1",
                    ["quantity", "D", "h", "w", "l_one", "formula", "relative_residual"],
                    metadata={"source": "digamma evaluation vs class number formula"})
    report.add(quantity="class-number-formula", D=D, h=row.h, w=row.w, l_one=value,
               formula=row.residue, relative_residual=abs(value - row.residue) / row.residue)
    return report


def class_sum_identity(table: PrimeTable | None, D: int, P: int = DEFAULT_CUTOFF) -> float:
    """``|g(split) + g(inert) + sum_{p | D} 1/p - g|`` from the exact constants."""
    gs = g_quadratic_exact(D, SPLIT, P).g + g_quadratic_exact(D, INERT, P).g
    return abs(gs + math.fsum(1.0 / p for p in prime_divisors(abs(D))) - mertens_constant(P, table))
