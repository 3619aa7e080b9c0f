"""Dirichlet characters via the cyclic decomposition of (Z/qZ)*.

A character is stored as an exponent vector on the generators. Its values
are kept as exact angles: ``chi(n) = exp(2 pi i * k(n) / E)`` where ``E`` is
the exponent of the unit group and ``k(n)`` an integer, with ``k(n) = -1``
marking ``gcd(n, q) > 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from ._arith import divisors, factorize, totient


def _mult_order(g: int, m: int) -> int:
    k, x = 1, g % m
    while x != 1:
        x = x * g % m
        k += 1
    return k


def _smallest_primitive_root(pk: int, phi: int) -> int:
    for g in range(2, pk):
        if math.gcd(g, pk) == 1 and _mult_order(g, pk) == phi:
            return g
    raise ValueError(f"no primitive root modulo {pk}")


def _crt_lift(residue: int, modulus: int, q: int) -> int:
    """The n mod q with n = residue mod ``modulus`` and n = 1 mod q/modulus."""
    other = q // modulus
    if other == 1:
        return residue % q
    # n = 1 + other * t, need 1 + other*t = residue (mod modulus)
    t = (residue - 1) * pow(other, -1, modulus) % modulus
    return (1 + other * t) % q


@dataclass(frozen=True)
class UnitGroupDecomposition:
    """(Z/qZ)* as a product of cyclic groups.

    ``dlog[n]`` is the exponent vector of ``n`` on ``generators`` (one row per
    residue ``0 <= n < q``), or a row of ``-1`` when ``gcd(n, q) > 1``.
    """

    modulus: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    dlog: np.ndarray = field(repr=False, compare=False)

    @property
    def phi(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1


@lru_cache(maxsize=256)
def decompose_units(q: int) -> UnitGroupDecomposition:
    """Cyclic decomposition of (Z/qZ)*, one or two factors per prime power.

    Odd prime powers use their smallest primitive root; ``2**k`` with
    ``k >= 3`` uses the pair ``(-1, 5)``; ``4`` uses ``3``.
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    gens: list[int] = []
    orders: list[int] = []
    columns: list[np.ndarray] = []
    residues = np.arange(q, dtype=np.int64)
    for p, k in factorize(q):
        pk = p**k
        local = residues % pk
        if p == 2:
            if k == 1:
                continue
            if k == 2:
                factors = [(3, 2)]
            else:
                factors = [(pk - 1, 2), (5, 2 ** (k - 2))]
            # log table on (Z/2^k)*: n = (-1)^e0 * 5^e1 (or 3^e0 when k = 2)
            tables = [np.full(pk, -1, dtype=np.int64) for _ in factors]
            if k == 2:
                tables[0][1], tables[0][3] = 0, 1
            else:
                x = 1
                for e1 in range(2 ** (k - 2)):
                    tables[0][x], tables[1][x] = 0, e1
                    tables[0][pk - x], tables[1][pk - x] = 1, e1
                    x = x * 5 % pk
            for (g, order), tab in zip(factors, tables):
                gens.append(_crt_lift(g, pk, q))
                orders.append(order)
                columns.append(tab[local])
        else:
            phi = pk - pk // p
            g = _smallest_primitive_root(pk, phi)
            tab = np.full(pk, -1, dtype=np.int64)
            x = 1
            for e in range(phi):
                tab[x] = e
                x = x * g % pk
            gens.append(_crt_lift(g, pk, q))
            orders.append(phi)
            columns.append(tab[local])
    dlog = np.stack(columns, axis=1) if columns else np.zeros((q, 0), dtype=np.int64)
    # a factor 2 (to the first power) has no column, so mask non-units via gcd
    dlog[np.gcd(residues, q) != 1] = -1
    dlog.flags.writeable = False
    return UnitGroupDecomposition(q, tuple(gens), tuple(orders), dlog)


def _root_of_unity(k: int, m: int) -> complex:
    """exp(2 pi i k / m), exact for quarter turns."""
    k %= m
    if (4 * k) % m == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // m]
    return cmath.exp(2j * math.pi * k / m)


class DirichletCharacter:
    """A Dirichlet character modulo ``q`` given by exponents on the generators.

    ``chi(g_i) = exp(2 pi i e_i / order_i)``.
    """

    def __init__(self, q: int, exponents: tuple[int, ...]):
        self.group = decompose_units(q)
        if len(exponents) != len(self.group.orders):
            raise ValueError(f"need {len(self.group.orders)} exponents for q={q}, got {len(exponents)}")
        self.q = q
        self.exponents = tuple(int(e) % o for e, o in zip(exponents, self.group.orders))

    def __repr__(self):
        return f"DirichletCharacter(q={self.q}, exponents={self.exponents})"

    def __eq__(self, other):
        return (isinstance(other, DirichletCharacter) and self.q == other.q
                and self.exponents == other.exponents)

    def __hash__(self):
        return hash((self.q, self.exponents))

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.q != self.q:
            raise ValueError("characters to different moduli")
        return DirichletCharacter(self.q, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    @property
    def principal(self) -> bool:
        return not any(self.exponents)

    @property
    def order(self) -> int:
        return math.lcm(*(o // math.gcd(e, o) for e, o in zip(self.exponents, self.group.orders))) \
            if self.exponents else 1

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.q, tuple(-e for e in self.exponents))

    @cached_property
    def angles(self) -> np.ndarray:
        """``k(n)`` for ``0 <= n < q`` with ``chi(n) = exp(2 pi i k(n) / E)``; -1 off the units."""
        E = self.group.exponent
        weights = np.array([e * (E // o) for e, o in zip(self.exponents, self.group.orders)],
                           dtype=np.int64)
        dl = self.group.dlog
        if dl.shape[1] == 0:
            k = np.zeros(self.q, dtype=np.int64)
            if self.q > 1:
                k[np.gcd(np.arange(self.q), self.q) != 1] = -1
            k.flags.writeable = False
            return k
        k = (dl @ weights) % E
        k[dl[:, 0] < 0] = -1
        k.flags.writeable = False
        return k

    def angle(self, n: int) -> Fraction | None:
        """Exact value of ``chi(n)`` as a fraction of a full turn, or None if it is 0."""
        k = int(self.angles[n % self.q])
        return None if k < 0 else Fraction(k, self.group.exponent)

    @cached_property
    def values(self) -> np.ndarray:
        """Complex values ``chi(n)`` for ``0 <= n < q``."""
        E = self.group.exponent
        table = np.array([_root_of_unity(j, E) for j in range(E)], dtype=complex)
        out = np.where(self.angles >= 0, table[np.maximum(self.angles, 0)], 0)
        out.flags.writeable = False
        return out

    def __call__(self, n: int) -> complex:
        return eval_character(self, n)


def eval_character(chi: DirichletCharacter, n: int) -> complex:
    if n < 0:
        raise ValueError("n must be non-negative")
    k = int(chi.angles[n % chi.q])
    if k < 0:
        return 0j
    return _root_of_unity(k, chi.group.exponent)


@lru_cache(maxsize=256)
def characters_mod(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters modulo ``q``, principal first."""
    orders = decompose_units(q).orders
    return tuple(DirichletCharacter(q, e) for e in product(*(range(o) for o in orders)))


def conductor_and_primitive(chi: DirichletCharacter) -> tuple[int, DirichletCharacter]:
    """Conductor ``f`` of ``chi`` and the primitive character mod ``f`` inducing it."""
    q = chi.q
    ns = np.arange(q)
    units = chi.angles >= 0
    for f in divisors(q):
        # chi is trivial on units that are 1 mod f
        kernel = units & (ns % f == 1 % f)
        if np.all(chi.angles[kernel] == 0):
            break
    if f == q:
        return q, chi
    group_f = decompose_units(f)
    E = chi.group.exponent
    exps = []
    for g, o in zip(group_f.generators, group_f.orders):
        n = g
        while math.gcd(n, q) != 1:
            n += f
        k = int(chi.angles[n % q])
        # chi*(g) = exp(2 pi i k/E) has order dividing o: k/E = e/o
        e = Fraction(k, E) * o
        if e.denominator != 1:
            raise ArithmeticError("induced character value is not an o-th root of unity")
        exps.append(int(e))
    return f, DirichletCharacter(f, tuple(exps))


def conductor(chi: DirichletCharacter) -> int:
    return conductor_and_primitive(chi)[0]


def character_from_values(q: int, values) -> DirichletCharacter:
    """Find the character mod ``q`` whose values on ``0..q-1`` match ``values``."""
    target = np.asarray(values, dtype=complex)
    for chi in characters_mod(q):
        if np.allclose(chi.values, target, atol=1e-9):
            return chi
    raise ValueError(f"values do not define a Dirichlet character mod {q}")


def orthogonality_residual(q: int) -> tuple[float, float]:
    """Largest deviations of the two orthogonality relations for modulus ``q``.

    First: sum over chi of conj(chi(m)) chi(n) against phi(q) [gcd(m,q)=1,
    m = n mod q]. Second: sum over m of conj(chi(m)) against phi(q) [chi principal].
    """
    chars = characters_mod(q)
    V = np.array([chi.values for chi in chars])  # (phi, q)
    phi = totient(q)
    gram = V.conj().T @ V  # [m, n] = sum_chi conj(chi(m)) chi(n)
    ns = np.arange(q)
    expected = np.where((np.gcd(ns, q) == 1)[:, None] & (ns[:, None] == ns[None, :]), phi, 0)
    first = float(np.max(np.abs(gram - expected)))
    sums = V.conj().sum(axis=1)
    expected2 = np.array([phi if chi.principal else 0 for chi in chars])
    second = float(np.max(np.abs(sums - expected2)))
    return first, second
