import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apmertens.errors import CacheCorruptError, TableRangeError
from apmertens.sieve import (APTarget, build_table, cache_path, error_term, li, load_table,
                             omega_q, pi_ap, save_table, sieve, snapshot)
from conftest import trial_division_is_prime


def test_small_table():
    t = build_table(10)
    assert t.primes.tolist() == [2, 3, 5, 7]


def test_limit_below_minimum():
    with pytest.raises(TableRangeError):
        build_table(1)
    with pytest.raises(TableRangeError):
        build_table(2**40 + 1)


def test_membership_matches_trial_division():
    t = sieve(10**5, segment_size=1000)
    flags = [t.is_prime(n) for n in range(10**5 + 1)]
    assert flags == [trial_division_is_prime(n) for n in range(10**5 + 1)]


def test_prime_count_1e6(table6, simple_primes):
    assert table6.pi(10**6) == 78498
    assert np.array_equal(table6.primes, simple_primes)


@pytest.mark.parametrize("seg", [1, 7, 4096, 1 << 18])
def test_segment_size_does_not_change_primes(seg, simple_primes):
    t = sieve(2 * 10**5 + 3, segment_size=seg)
    assert np.array_equal(t.primes, simple_primes[simple_primes <= 2 * 10**5 + 3])


@pytest.mark.parametrize("t,q,a,expected", [(10, 4, 1, 1), (10, 1, 1, 4), (2, 3, 1, 0), (100, 4, 1, 11)])
def test_pi_ap_small(table6, t, q, a, expected):
    assert pi_ap(table6, t, (q, a)) == expected


def test_range_errors(table6):
    with pytest.raises(TableRangeError):
        pi_ap(table6, 2 * 10**6, (1, 1))
    with pytest.raises(TableRangeError):
        table6.pi(1.5)


def test_real_t_is_floored(table6):
    assert table6.pi(10.9) == 4
    assert pi_ap(table6, 13.99, (4, 1)) == 2


def test_aptarget_validation():
    with pytest.raises(ValueError):
        APTarget(4, 2)
    with pytest.raises(ValueError):
        APTarget(4, 5)
    assert APTarget.normalized(4, 9) == APTarget(4, 1)
    assert APTarget.normalized(1, 0) == APTarget(1, 1)


@pytest.mark.parametrize("q", range(1, 31))
def test_partition_over_residues(table6, q):
    from apmertens._arith import coprime_residues
    for t in (2, 10, 997, 10**4 + 7, 10**6):
        total = sum(pi_ap(table6, t, (q, a)) for a in coprime_residues(q)) + omega_q(table6, t, q)
        assert total == table6.pi(t)


@given(st.integers(1, 40), st.integers(2, 10**6 - 1), st.integers(1, 10**5))
@settings(max_examples=60, deadline=None)
def test_pi_ap_monotone(table6, q, t, step):
    a = 1
    assert pi_ap(table6, t, (q, a)) <= pi_ap(table6, min(t + step, 10**6), (q, a))


# li against the exponential integral: li(t) = Ei(log t) - Ei(log 2)
@pytest.mark.parametrize("t,expected", [
    (10, 5.1204357246698065),
    (1e3, 176.5644942100347),
    (1e6, 78626.50399568204),
])
def test_li_values(t, expected):
    assert li(t) == pytest.approx(expected, rel=1e-12)


def test_li_simpson_refinement():
    # composite Simpson in v = log u, refined until stable
    for t in (10, 1e3, 1e6):
        lo, hi = math.log(2), math.log(t)
        n = 20000
        v = np.linspace(lo, hi, n + 1)
        f = np.exp(v) / v
        simpson = (hi - lo) / (3 * n) * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
        assert li(t) == pytest.approx(simpson, rel=1e-10)


def test_li_domain():
    assert li(2) == 0.0
    with pytest.raises(ValueError):
        li(1.9)


def test_error_term(table6):
    assert error_term(table6, 10, (4, 1)) == pytest.approx(1 - 5.1204357246698065 / 2, abs=1e-12)
    assert error_term(table6, 2, (1, 1)) == 1.0
    assert error_term(table6, 1e6, (1, 1)) == pytest.approx(-128.5039956820401, abs=1e-7)


def test_snapshot_invariants(table6):
    s = snapshot(table6, 1e5, (3, 2))
    assert s.error == s.pi_ap - s.li / 2
    assert s.pi_ap <= s.pi


@pytest.mark.parametrize("t,q,expected", [(10, 12, 2), (2, 15, 0), (100, 30, 3)])
def test_omega_q(table6, t, q, expected):
    assert omega_q(table6, t, q) == expected


def test_cache_round_trip(tmp_path):
    t = sieve(10**6, segment_size=4096)
    path = cache_path(tmp_path, t.limit, t.segment_size)
    save_table(t, path)
    back = load_table(path)
    assert back.checksums() == t.checksums()
    assert back.limit == t.limit and np.array_equal(back.primes, t.primes)


def test_build_table_uses_cache(tmp_path):
    t = build_table(10**5, segment_size=1024, cache_dir=tmp_path)
    path = cache_path(tmp_path, 10**5, 1024)
    assert path.exists()
    again = build_table(10**5, segment_size=1024, cache_dir=tmp_path)
    assert again.checksums() == t.checksums()


@pytest.mark.parametrize("damage", ["magic", "payload", "truncate", "count"])
def test_corrupt_cache_detected(tmp_path, damage):
    t = sieve(10**5, segment_size=1024)
    path = cache_path(tmp_path, t.limit, t.segment_size)
    save_table(t, path)
    data = bytearray(path.read_bytes())
    if damage == "magic":
        data[0:5] = b"XXXXX"
    elif damage == "payload":
        data[-10] ^= 0xFF
    elif damage == "truncate":
        data = data[:-3]
    else:
        struct.pack_into("<Q", data, 21, 99)
    path.write_bytes(bytes(data))
    with pytest.raises(CacheCorruptError, match="rebuild required"):
        build_table(10**5, segment_size=1024, cache_dir=tmp_path)


def test_cache_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("MERTENS_CACHE_DIR", str(tmp_path / "env"))
    build_table(10**4, use_cache=True)
    assert any((tmp_path / "env").iterdir())
