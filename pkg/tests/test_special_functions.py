import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import digamma as scipy_digamma

from apmertens.characters import characters_mod, conductor
from apmertens.errors import BranchTrackingError
from apmertens.special_functions import (EULER_GAMMA, digamma, digamma_array, euler_gamma,
                                         exp_integral_residual, gamma_fn, harmonic_gamma_estimate,
                                         l_one, l_sigma, log_l_one)


def test_euler_gamma_constant():
    assert euler_gamma() == pytest.approx(0.5772156649015329, abs=1e-15)
    assert str(euler_gamma()).startswith("0.57721")


def test_harmonic_estimate():
    n = 10**7
    assert abs(harmonic_gamma_estimate(n) - euler_gamma() - 1 / (2 * n)) < 1e-12


@pytest.mark.parametrize("x,expected", [
    (1.0, -EULER_GAMMA),
    (0.5, -EULER_GAMMA - 2 * math.log(2)),
    (0.25, -EULER_GAMMA - 3 * math.log(2) - math.pi / 2),
])
def test_digamma_closed_forms(x, expected):
    assert digamma(x) == pytest.approx(expected, abs=1e-12)


@given(st.floats(1e-3, 1.0))
@settings(max_examples=80, deadline=None)
def test_digamma_against_scipy(x):
    assert digamma(x) == pytest.approx(float(scipy_digamma(x)), abs=1e-12)
    assert digamma_array(np.array([x]))[0] == pytest.approx(digamma(x), abs=1e-12)


@pytest.mark.parametrize("q", range(2, 13))
def test_gauss_digamma_sum(q):
    total = math.fsum(digamma(a / q) for a in range(1, q))
    assert total == pytest.approx(-(q - 1) * EULER_GAMMA - q * math.log(q), abs=1e-10)


def test_digamma_domain():
    with pytest.raises(ValueError):
        digamma(0)


@pytest.mark.parametrize("s", [1.0, 0.5, 0.25, 0.1])
def test_gamma_fn(s):
    oracle = quad(lambda t: math.exp(-t) * t ** (s - 1), 0, 1)[0] + quad(lambda t: math.exp(-t) * t ** (s - 1), 1, math.inf)[0]
    assert gamma_fn(s) == pytest.approx(oracle, rel=1e-8)


def test_gamma_reference_values():
    assert gamma_fn(1) == 1
    assert gamma_fn(0.5) == pytest.approx(1.7724538509055159, rel=1e-12)
    assert gamma_fn(0.25) == pytest.approx(3.6256099082219083, rel=1e-12)
    assert gamma_fn(0.5) ** 2 == pytest.approx(math.pi, abs=1e-10)
    with pytest.raises(ValueError):
        gamma_fn(1.5)


def _alternating_l(chi, terms=200000):
    # averaged partial sums of the conditionally convergent series
    n = np.arange(1, terms + 1)
    partial = np.cumsum(chi.values[n % chi.q] / n)
    return partial[-chi.q:].mean()


def test_l_one_quadratic_values():
    chi4 = characters_mod(4)[1]
    assert l_one(chi4) == pytest.approx(math.pi / 4, abs=1e-12)
    chi3 = characters_mod(3)[1]
    assert l_one(chi3) == pytest.approx(math.pi / (3 * math.sqrt(3)), abs=1e-12)
    induced = [c for c in characters_mod(8) if conductor(c) == 4][0]
    assert l_one(induced) == pytest.approx(math.pi / 4, abs=1e-12)


@pytest.mark.parametrize("q", [5, 7, 8, 12, 15])
def test_l_one_against_series(q):
    for chi in characters_mod(q)[1:]:
        assert abs(l_one(chi) - _alternating_l(chi)) < 1e-5


def test_l_one_principal_rejected():
    with pytest.raises(ValueError):
        l_one(characters_mod(5)[0])


def test_l_sigma_at_two_matches_series():
    chi = characters_mod(7)[1]
    n = np.arange(1, 200001)
    direct = np.sum(chi.values[n % 7] / n.astype(float) ** 2)
    assert abs(l_sigma(chi, [2.0])[0] - direct) < 1e-9


@pytest.mark.parametrize("q", range(3, 61))
def test_log_l_one_consistency(q):
    for chi in characters_mod(q)[1:]:
        L = l_one(chi)
        lg = log_l_one(chi)
        assert abs(cmath.exp(lg.value) - L) <= 1e-9 * abs(L)
        assert abs(l_one(chi.conjugate()) - L.conjugate()) < 1e-10
        assert abs(log_l_one(chi.conjugate()).value - lg.value.conjugate()) < 1e-9
        if chi.is_real:
            assert abs(lg.value.imag) < 1e-10
        assert lg.path_steps >= 0


def test_log_l_one_mod_4():
    assert log_l_one(characters_mod(4)[1]).value.real == pytest.approx(math.log(math.pi / 4), abs=1e-12)


def test_branch_error_type_is_consistency_error():
    from apmertens.errors import ConsistencyError
    assert issubclass(BranchTrackingError, ConsistencyError)


def test_exp_integral_residual_values():
    r3 = exp_integral_residual(math.log(2), 1e-3)
    r6 = exp_integral_residual(math.log(2), 1e-6)
    assert r3 <= 1e-2 and r6 <= 1e-5 and r6 < r3


@given(st.floats(0.1, 2.0), st.sampled_from([1e-3, 1e-4, 1e-5, 1e-6]))
@settings(max_examples=30, deadline=None)
def test_exp_integral_residual_bound(eta, delta):
    assert exp_integral_residual(eta, delta) <= 2 * delta * max(eta, 1) + 1e-8
