"""Euler's constant, digamma, Gamma and the values L(1, chi), log L(1, chi).

``L(1, chi)`` comes from the finite digamma formula for the primitive
character, corrected by the Euler factors at primes dividing the modulus
but not the conductor.

The logarithm is the branch that is real-analytic on ``sigma > 1`` and
tends to 0 as ``sigma -> oo``. It is continued along the real segment
``sigma: 2 -> 1`` by evaluating ``L(sigma, chi)`` (partial sums plus an
Euler-Maclaurin tail per residue class) and unwrapping the argument.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._arith import prime_divisors
from ._quadrature import integrate
from .characters import DirichletCharacter, conductor_and_primitive
from .errors import BranchTrackingError

EULER_GAMMA = 0.57721566490153286060651209008240243

# B_2, B_4, ..., B_16
_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
              Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510)]
_PSI_SHIFT = 10.0

SIGMA_STEP = 1 / 64
MIN_SIGMA_STEP = 2.0**-20
PARTIAL_SUM_TERMS = 10**4


def euler_gamma() -> float:
    return EULER_GAMMA


def harmonic_gamma_estimate(n: int) -> float:
    """``H_n - log n``, which exceeds gamma by about ``1/(2n)``."""
    k = np.arange(1, n + 1, dtype=np.float64)
    return math.fsum(1.0 / k) - math.log(n)


def _psi_asymptotic(x):
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for j, b in enumerate(_BERNOULLI, start=1):
        series = series + float(b) / (2 * j) * power
        power = power * inv2
    return np.log(x) - 0.5 / x - series


def digamma(x: float | Fraction) -> float:
    """psi(x) for x > 0 via upward recurrence to x >= 10 and the asymptotic series."""
    x = float(x)
    if x <= 0:
        raise ValueError(f"digamma implemented for x > 0 only, got {x}")
    shifts = []
    while x < _PSI_SHIFT:
        shifts.append(1.0 / x)
        x += 1.0
    return float(_psi_asymptotic(x)) - math.fsum(shifts)


def digamma_array(xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if np.any(xs <= 0):
        raise ValueError("digamma implemented for x > 0 only")
    nshift = np.maximum(0, np.ceil(_PSI_SHIFT - xs)).astype(np.int64)
    kmax = int(nshift.max()) if nshift.size else 0
    k = np.arange(kmax)
    terms = np.where(k[None, :] < nshift[:, None], 1.0 / (xs[:, None] + k[None, :]), 0.0)
    return _psi_asymptotic(xs + nshift) - terms.sum(axis=1)


def gamma_fn(s: float) -> float:
    """Gamma(s) for 0 < s <= 1."""
    if not 0 < s <= 1:
        raise ValueError(f"gamma_fn defined here for 0 < s <= 1, got {s}")
    return math.gamma(s)


@lru_cache(maxsize=512)
def _psi_fractions(f: int) -> np.ndarray:
    """psi(a/f) for a = 0..f-1 (entry 0 unused)."""
    out = np.zeros(f)
    if f > 1:
        out[1:] = digamma_array(np.arange(1, f) / f)
    out.flags.writeable = False
    return out


def _fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real), math.fsum(z.imag))


def l_one_from_values(values: np.ndarray) -> complex:
    """``L(1, chi)`` for a primitive character given by its values on ``0..f-1``.

    Uses ``L(1, chi) = -(1/f) sum_a chi(a) psi(a/f)``, which needs
    ``sum_a chi(a) = 0``.
    """
    values = np.asarray(values, dtype=complex)
    f = len(values)
    return -_fsum_complex(values[1:] * _psi_fractions(f)[1:]) / f


def l_one(chi: DirichletCharacter) -> complex:
    """``L(1, chi)`` for a non-principal character."""
    if chi.principal:
        raise ValueError("L(s, chi_0) has a pole at s = 1; use the zeta handling path")
    f, prim = conductor_and_primitive(chi)
    value = l_one_from_values(prim.values)
    for p in prime_divisors(chi.q):
        if f % p:
            value *= 1 - prim(p % f) / p
    return value


@lru_cache(maxsize=64)
def _sigma_matrix(q: int, sigmas: tuple[float, ...]) -> np.ndarray:
    """Rows ``M[j]`` with ``L(sigma_j, chi) = M[j] @ chi.values`` for non-principal chi.

    ``M[j, r]`` is the sum of ``n**-sigma_j`` over ``n = r mod q``, with the
    pole part ``q**-sigma / (sigma - 1)`` of each class dropped (it cancels
    because the character sums to zero over a period).
    """
    n_terms = max(PARTIAL_SUM_TERMS, 16 * q)
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    logn = np.log(n)
    r_of_n = np.arange(1, n_terms + 1) % q
    r = np.arange(q)
    first_after = n_terms + (r - n_terms - 1) % q + 1
    w = first_after / q
    logw = np.log(w)
    out = np.empty((len(sigmas), q))
    for j, s in enumerate(sigmas):
        head = np.bincount(r_of_n, weights=np.exp(-s * logn), minlength=q)
        z = (1.0 - s) * logw
        with np.errstate(invalid="ignore", divide="ignore"):
            pole_free = np.where(z == 0, -logw, np.expm1(z) * (-logw) / np.where(z == 0, 1, z))
        tail = pole_free + 0.5 * w**-s
        rising = s
        wpow = w ** (-s - 1)
        for k, b in enumerate(_BERNOULLI, start=1):
            tail = tail + float(b) / math.factorial(2 * k) * rising * wpow
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            wpow = wpow / (w * w)
        out[j] = head + q**-s * tail
    out.flags.writeable = False
    return out


def l_sigma(chi: DirichletCharacter, sigmas) -> np.ndarray:
    """``L(sigma, chi)`` for real ``sigma >= 1`` (non-principal chi)."""
    if chi.principal:
        raise ValueError("principal character not supported")
    sig = tuple(float(s) for s in np.atleast_1d(sigmas))
    return _sigma_matrix(chi.q, sig) @ chi.values


def _euler_log_at_two(chi: DirichletCharacter, bound: int = 10**4) -> complex:
    from .sieve import _base_primes

    ps = _base_primes(bound)
    vals = chi.values[ps % chi.q]
    return _fsum_complex(-np.log1p(-vals / ps.astype(np.float64) ** 2))


@dataclass(frozen=True)
class BranchedLogValue:
    """A logarithm of ``L(1, chi)`` on the branch continued from ``sigma > 1``."""

    value: complex
    path_steps: int
    winding: int


def _track(chi, s_hi, l_hi, s_lo, l_lo, counter) -> float:
    d = cmath.phase(l_lo / l_hi)
    if abs(d) <= math.pi / 2:
        return d
    if s_hi - s_lo <= MIN_SIGMA_STEP:
        raise BranchTrackingError(
            f"argument of L(sigma, {chi}) jumps by {d:.3f} on [{s_lo}, {s_hi}] at the minimum step"
        )
    s_mid = 0.5 * (s_hi + s_lo)
    l_mid = complex(l_sigma(chi, [s_mid])[0])
    counter[0] += 1
    return (_track(chi, s_hi, l_hi, s_mid, l_mid, counter)
            + _track(chi, s_mid, l_mid, s_lo, l_lo, counter))


def log_l_one(chi: DirichletCharacter) -> BranchedLogValue:
    """The continued logarithm of ``L(1, chi)``.

    Real characters skip the path: their ``L(sigma, chi)`` is positive on
    ``[1, 2]``, so the real logarithm is the right branch.
    """
    if chi.principal:
        raise ValueError("L(s, chi_0) has a pole at s = 1")
    target = l_one(chi)
    if chi.is_real:
        if target.real <= 0:
            raise BranchTrackingError(f"L(1, {chi}) = {target} is not positive")
        return BranchedLogValue(complex(math.log(target.real), 0.0), 0, 0)

    steps = round(1 / SIGMA_STEP)
    sigmas = tuple(2.0 - k * SIGMA_STEP for k in range(steps + 1))
    path = l_sigma(chi, sigmas)

    start = cmath.log(path[0])
    series = _euler_log_at_two(chi)
    if abs(start - series) > 1e-3:
        raise BranchTrackingError(f"log L(2, {chi}) = {start} disagrees with Euler series {series}")

    counter = [len(sigmas)]
    arg = start.imag
    for k in range(steps):
        arg += _track(chi, sigmas[k], path[k], sigmas[k + 1], path[k + 1], counter)

    if abs(path[-1] - target) > 1e-6 * abs(target):
        raise BranchTrackingError(f"path value L(1, {chi}) = {path[-1]} disagrees with {target}")
    principal_arg = cmath.phase(target)
    winding = round((arg - principal_arg) / (2 * math.pi))
    value = complex(math.log(abs(target)), principal_arg + 2 * math.pi * winding)
    return BranchedLogValue(value, counter[0], winding)


def exp_integral_residual(eta: float, delta: float) -> float:
    """``|int_eta^oo e^(-delta u) du/u - (log(1/delta) - log(eta) - gamma)|``.

    The integral is truncated at ``u = 50/delta``.
    """
    if eta <= 0 or delta <= 0:
        raise ValueError("eta and delta must be positive")
    lo, hi = math.log(eta), math.log(50.0 / delta)
    value, _ = integrate(lambda v: np.exp(-delta * np.exp(v)), lo, hi, abs_tol=1e-14, rel_tol=1e-13)
    return abs(value - (math.log(1.0 / delta) - math.log(eta) - EULER_GAMMA))
