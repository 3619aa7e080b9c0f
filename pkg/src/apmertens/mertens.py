"""Prime reciprocal sums and products in a progression, checked against their limits.

Integrals of ``t**-2`` against the step function ``pi(t; q, a)`` are done in
closed form: ``int_2^X t**-2 pi(t) dt = sum_{p <= X} (1/p - 1/X)``. The
``li`` part uses the antiderivative ``-li(t)/t + log log t``. Nothing here
calls a quadrature routine on a step function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ap_constants import APConstants, ap_constants, g_star, G_star
from .sieve import APTarget, PrimeTable, li, pi_ap
from .special_functions import EULER_GAMMA

LOGLOG2 = math.log(math.log(2.0))


@dataclass(frozen=True)
class MertensRow:
    """Observed sums at ``x`` against their predicted values.

    ``residual_* = observed - predicted``. ``tail_bound`` bounds the
    prime-power terms dropped from the product side. ``closure`` is set by
    :func:`tail_identity_report` only.
    """

    x: float
    target: APTarget
    sum_recip: float
    product_log: float
    predicted_sum: float
    predicted_product_log: float
    residual_sum: float
    residual_product: float
    tail_bound: float
    closure: float | None = None


def _as_target(ap) -> APTarget:
    return ap if isinstance(ap, APTarget) else APTarget(*ap)


def progression_primes(table: PrimeTable, x: float, ap) -> np.ndarray:
    """Primes ``p <= x`` with ``p = a mod q``, ascending."""
    ap = _as_target(ap)
    ps = table.primes_upto(x)
    if ap.q == 1:
        return ps
    return ps[ps % ap.q == ap.a % ap.q]


def partial_sum_recip(table: PrimeTable, x: float, ap) -> float:
    ps = progression_primes(table, x, ap)
    return math.fsum(1.0 / ps.astype(np.float64))


def partial_product_log(table: PrimeTable, x: float, ap) -> float:
    """``sum_{p <= x, p = a (q)} log (1 - 1/p)**-1``."""
    ps = progression_primes(table, x, ap).astype(np.float64)
    return math.fsum(-np.log1p(-1.0 / ps))


def abel_identity_residual(table: PrimeTable, x: float, ap) -> float:
    """``|sum 1/p - (pi(x; q, a)/x + int_2^x t**-2 pi(t; q, a) dt)|``."""
    ps = progression_primes(table, x, ap).astype(np.float64)
    lhs = math.fsum(1.0 / ps)
    integral = math.fsum(1.0 / ps - 1.0 / x)
    return abs(lhs - (len(ps) / x + integral))


def error_integral(table: PrimeTable, X: float, ap) -> float:
    """``int_2^X t**-2 E(t; q, a) dt`` with ``E = pi(t; q, a) - li(t)/phi(q)``."""
    ap = _as_target(ap)
    table._check(X)
    if X == 2:
        return 0.0
    ps = progression_primes(table, X, ap).astype(np.float64)
    step_part = math.fsum(1.0 / ps - 1.0 / X)
    li_part = -li(X) / X + math.log(math.log(X)) - LOGLOG2
    return step_part - li_part / ap.phi


def error_integral_limit(ap, constants: APConstants | None = None) -> float:
    """The value ``g(q, a) + log log 2 / phi(q)`` the error integral tends to."""
    ap = _as_target(ap)
    constants = constants or ap_constants(ap.q, ap.a)
    return constants.g + LOGLOG2 / ap.phi


def _product_tail_bound(x: float) -> float:
    return 2.0 / (x * math.log(x))


def mertens_row(table: PrimeTable, x: float, ap, constants: APConstants | None = None) -> MertensRow:
    """Both limit laws at ``x``.

    Sum side: ``sum 1/p`` against ``log log x / phi(q) + g(q, a)``.
    Product side: ``sum log(1 - 1/p)**-1`` against
    ``(gamma + log log x)/phi(q) + log G(q, a)``.
    """
    ap = _as_target(ap)
    if x < 3:
        raise ValueError("limit laws need x >= 3")
    constants = constants or ap_constants(ap.q, ap.a)
    s = partial_sum_recip(table, x, ap)
    prod = partial_product_log(table, x, ap)
    loglog = math.log(math.log(x))
    pred_s = loglog / ap.phi + constants.g
    pred_p = (EULER_GAMMA + loglog) / ap.phi + math.log(constants.G)
    return MertensRow(x, ap, s, prod, pred_s, pred_p, s - pred_s, prod - pred_p, _product_tail_bound(x))


def product_report(table: PrimeTable, x: float, ap, constants: APConstants | None = None) -> MertensRow:
    return mertens_row(table, x, ap, constants)


def tail_identity_report(table: PrimeTable, x: float, X_tail: float, ap,
                         constants: APConstants | None = None) -> MertensRow:
    """The exact decomposition of ``sum 1/p`` with the infinite tail cut at ``X_tail``.

    ``sum_{p <= x} 1/p = log log x/phi + g + E(x)/x - int_x^oo t**-2 E(t) dt``.
    ``predicted_sum`` uses the true ``g`` and the integral over ``(x, X_tail]``
    only, so ``residual_sum`` is minus the unseen integral beyond ``X_tail``.
    ``closure`` is the same identity with ``g`` replaced by its finite
    surrogate ``I(X_tail) - log log 2/phi``; it vanishes up to rounding.
    """
    ap = _as_target(ap)
    if not 3 <= x <= X_tail:
        raise ValueError(f"need 3 <= x <= X_tail, got x={x}, X_tail={X_tail}")
    table._check(X_tail)
    constants = constants or ap_constants(ap.q, ap.a)
    row = mertens_row(table, x, ap, constants)
    loglog = math.log(math.log(x))
    e_x = pi_ap(table, x, ap) - li(x) / ap.phi
    I_x = error_integral(table, x, ap)
    I_tail = error_integral(table, X_tail, ap)
    between = I_tail - I_x
    pred_s = loglog / ap.phi + constants.g + e_x / x - between
    g_finite = I_tail - LOGLOG2 / ap.phi
    closed = loglog / ap.phi + g_finite + e_x / x - between
    return MertensRow(
        x, ap, row.sum_recip, row.product_log, pred_s, row.predicted_product_log,
        row.sum_recip - pred_s, row.residual_product, row.tail_bound,
        closure=abs(row.sum_recip - closed),
    )


@dataclass(frozen=True)
class DegenerateBoundProbe:
    """Size of the sum and product against their large-modulus limits g*, G*.

    ``upper_constant`` is the least ``c >= 0`` with
    ``prod <= G* exp(c log log(3x/q) / phi(q))``; ``sum_constant`` is
    ``|sum 1/p - g*| phi(q) / log log(3x/q)``. Both are ``None`` when
    ``q >= x``, where the sum equals g* and the product equals G* exactly;
    ``exact_when_large_q`` then records whether that held.
    """

    target: APTarget
    x: float
    holds_lower: bool
    upper_constant: float | None
    sum_constant: float | None
    exact_when_large_q: bool | None


def degenerate_bound_probe(table: PrimeTable, x: float, ap) -> DegenerateBoundProbe:
    ap = _as_target(ap)
    s = partial_sum_recip(table, x, ap)
    log_prod = partial_product_log(table, x, ap)
    gs, Gs = g_star(ap.q, ap.a), G_star(ap.q, ap.a)
    log_Gs = math.log(Gs)
    holds_lower = log_prod >= log_Gs - 1e-15
    if ap.q >= x:
        exact = abs(s - gs) <= 1e-15 and abs(log_prod - log_Gs) <= 1e-15
        return DegenerateBoundProbe(ap, x, holds_lower, None, None, exact)
    scale = math.log(math.log(3 * x / ap.q)) / ap.phi
    upper = max(0.0, (log_prod - log_Gs) / scale)
    return DegenerateBoundProbe(ap, x, holds_lower, upper, abs(s - gs) / scale, None)
