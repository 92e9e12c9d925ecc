#!/usr/bin/env python3
"""
Checks for the spf sieve, the exact friable sums and the moments.

Every sum is compared with a trial-division oracle written out here.

Run with pytest, or directly: python test_friable_oracle.py
"""
import math
import os
import runpy
import tempfile
from functools import lru_cache

import numpy as np
import pytest

from dde_kernel import solve_h
from friable_errors import ConfigError, DomainError, RangeError, SieveLimitError
from friable_oracle import (
    CompensatedSum, FriableSieve, a_approx, a_star_approx, build_sieve, bundled_specs,
    check_majorant, full_line_moment, get_spec, m_sum, m_trunc, m_weighted, mertens, partition_range,
    psi_count, register_specs, spec_from_mapping, u_of, w_moment, w_moment_star, w_moments,
    w_moments_star,
)
from transforms import euler_product

X = 10 ** 4
HERE = os.path.dirname(os.path.abspath(__file__))


@lru_cache(maxsize=None)
def sieve(limit=X):
    return FriableSieve(limit)


@lru_cache(maxsize=None)
def trial_division(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def naive_value(f, n, y=None):
    value = 1.0
    for p, a in trial_division(n):
        if y is None or p <= y:
            value *= float(f.values(np.array([p]), np.array([a]))[0])
    return value


def largest_prime(n):
    fac = trial_division(n)
    return fac[-1][0] if fac else 1


@lru_cache(maxsize=None)
def naive_table(name):
    f = get_spec(name)
    n = np.arange(1, X + 1)
    return n, np.array([naive_value(f, k) for k in n]), np.array([largest_prime(k) for k in n])


# ----------------------------------------------------------------- sieve

def test_spf_table():
    s = sieve()
    assert s.spf[10] == 2
    assert s.spf[9] == 3
    assert s.spf[97] == 97
    assert s.spf[1] == 1
    assert s.factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert s.factorize(1) == []


def test_prime_count():
    assert len(sieve(10 ** 6).primes) == 78498


def test_factor_matches_trial_division():
    s = sieve()
    n = np.arange(1, 2001)
    blk = s.factor(n)
    assert blk.largest.tolist() == [largest_prime(k) for k in range(1, 2001)]


def test_sieve_limits():
    with pytest.raises(SieveLimitError):
        FriableSieve(3 * 10 ** 8)
    with pytest.raises(RangeError):
        sieve().factorize(X + 1)
    with pytest.raises(RangeError):
        m_sum(X + 1, 10, get_spec('mu'), sieve())


def test_cache_round_trip():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'spf.bin')
        first = build_sieve(5000, path)
        assert os.path.exists(path)
        again = FriableSieve.load(path, 5000)
        assert np.array_equal(again.spf, first.spf)
        assert FriableSieve.load(path, 6000) is None
        with open(path, 'r+b') as fh:
            fh.write(b'XXXX')
        assert FriableSieve.load(path, 5000) is None
        # a stale file is rebuilt and rewritten
        rebuilt = build_sieve(5000, path)
        assert np.array_equal(rebuilt.spf, first.spf)
        assert FriableSieve.load(path, 5000) is not None


def test_friable_counts_script():
    out = runpy.run_path(os.path.join(HERE, 'misc-tools', 'friable_counts.py'))
    assert len(out['nums']) == psi_count(out['x'], out['y'], sieve()).value
    assert out['nums'][-1] == 120


# ------------------------------------------------------------------ sums

def test_psi_small_values():
    s = sieve()
    assert psi_count(100, 3, s).value == 20
    assert psi_count(100, 100, s).value == 100
    assert psi_count(1, 2, s).value == 1
    assert psi_count(30, 1, s).value == 1


def test_hand_examples():
    s = sieve()
    mu = get_spec('mu')
    # 5-friable squarefree n <= 30: 1 2 3 5 6 10 15 30
    assert m_sum(30, 5, mu, s).value == 0.0
    assert m_sum(30, 5, mu, s).count == 18
    assert mertens(X, mu, s).value == -23
    assert mertens(10 ** 6, mu, sieve(10 ** 6)).value == 212


def test_sums_match_naive_oracle():
    s = sieve()
    for name, f in bundled_specs().items():
        n, fn, P = naive_table(name)
        for x in (997, 5000, X):
            for y in (2, 7, 30, 101, X):
                keep = (n <= x) & (P <= y)
                assert m_sum(x, y, f, s).value == pytest.approx(fn[keep].sum(), rel=1e-12, abs=1e-9), name
                terms = fn[keep] / n[keep]
                slack = 1e-12 + 1e-14 * np.abs(terms).sum()
                assert m_weighted(x, y, f, s).value == pytest.approx(math.fsum(terms), abs=slack), name
                assert psi_count(x, y, s).value == np.count_nonzero(keep)


def test_truncated_sum_matches_naive_oracle():
    s = sieve()
    for name, f in bundled_specs().items():
        for x, y in ((2000, 5), (X, 31)):
            expected = math.fsum(naive_value(f, k, y) for k in range(1, x + 1))
            assert m_trunc(x, y, f, s).value == pytest.approx(expected, rel=1e-12, abs=1e-9), name


def test_partitions_and_threads_agree():
    s = sieve()
    f = get_spec('neg_omega_2')
    whole = m_weighted(X, 50, f, s).value
    for parts, threads in ((7, 1), (7, 3), ([100, 2500, 2501], 2)):
        assert abs(m_weighted(X, 50, f, s, parts, threads).value - whole) < 1e-12
    assert m_sum(X, 50, f, s, 5, 4).value == m_sum(X, 50, f, s).value


def test_partition_range():
    assert partition_range(10, 3) == [(0, 3), (3, 7), (7, 10)]
    assert partition_range(10, [5]) == [(0, 5), (5, 10)]
    assert partition_range(10.7) == [(0, 10)]
    with pytest.raises(DomainError):
        partition_range(10, 0)


def test_compensated_sum():
    acc = CompensatedSum()
    for v in (1e16, 1.0, -1e16):
        acc.add(v)
    assert acc.value == 1.0


def test_u_of():
    assert u_of(1e6, 1e3) == pytest.approx(2.0)
    assert u_of(1.0, 10.0) == 0.0
    assert u_of(10.0, 1.0) == math.inf


def test_majorants():
    s = sieve()
    assert check_majorant(get_spec('neg_omega_2'), s)
    assert check_majorant(get_spec('mu'), s)


# ----------------------------------------------------------------- specs

def test_user_spec_from_mapping():
    f = spec_from_mapping('mu_like', {'prime_power': 'Piecewise((-1, Eq(a, 1)), (0, True))', 'kappa': 1})
    assert f.values(np.array([2, 3]), np.array([1, 2])).tolist() == [-1.0, 0.0]
    # generic local factor: (1 - p**-s) * (1 - p**-s)**-1 = 1
    assert abs(euler_product(f, 1.0, prime_limit=10 ** 4).value - 1.0) < 1e-12
    const = spec_from_mapping('half', {'prime_power': '-1/2', 'kappa': 0.5})
    assert const.values(np.array([5, 7]), np.array([1, 3])).tolist() == [-0.5, -0.5]


def test_user_spec_errors():
    with pytest.raises(ConfigError):
        spec_from_mapping('bad', {'kappa': 1})
    with pytest.raises(ConfigError):
        spec_from_mapping('bad', {'prime_power': 'q', 'kappa': 1})
    with pytest.raises(ConfigError):
        spec_from_mapping('bad', {'prime_power': '-1', 'kappa': 1, 'colour': 'red'})
    with pytest.raises(ConfigError):
        spec_from_mapping('bad', {'prime_power': '-1', 'kappa': 1, 'class': 'middle'})
    with pytest.raises(ConfigError):
        register_specs({'mu': {'prime_power': '-1', 'kappa': 1}})
    with pytest.raises(ConfigError):
        get_spec('no_such_function')


# ----------------------------------------------------------- approximants

def test_a_approx_is_exact_without_friability():
    # for y >= x, h = 1 on [0, 1] and A(x, y; f) collapses to M(x; f)
    s = sieve()
    h = solve_h(1.0, 4, 0)
    for name in ('mu', 'neg_omega_2'):
        f = get_spec(name)
        assert abs(a_approx(X, X, f, h, s) - mertens(X, f, s).value) < 1e-6
        assert abs(a_star_approx(X, X, f, h, s) - m_weighted(X, X, f, s).value) < 1e-12


# ---------------------------------------------------------------- moments

def test_full_line_moments_of_mu():
    # int t^j d(M(y^t)/y^t) has transform z**2 * (1 + O(z)), z = s/log y
    s = sieve(10 ** 6)
    mu = get_spec('mu')
    y = 50.0
    L = math.log(y)
    w0 = full_line_moment(0, y, mu, sieve=s)
    assert w0.value == 0.0
    w1 = full_line_moment(1, y, mu, sieve=s)
    assert w_moment(1, 0.5, y, mu, sieve=s).value == w_moments(1, 0.5, y, mu, sieve=s)[1].value
    assert abs(w1.value) <= w1.tail_estimate + 1e-6
    w2 = full_line_moment(2, y, mu, sieve=s)
    assert abs(w2.value - 2.0 / L ** 2) <= w2.tail_estimate + 1e-6


def test_star_moments_match_naive_oracle():
    s = sieve()
    f = get_spec('mu')
    n, fn, _ = naive_table('mu')
    y, v = 20.0, 1.3
    t = np.log(n) / math.log(y) - v
    late = n > y ** v
    moments = w_moments_star(3, v, y, f, X, s)
    for j, m in enumerate(moments):
        assert m.value == pytest.approx(np.sum(fn[late] / n[late] * t[late] ** j), abs=1e-12)
        assert m.j == j
    assert w_moment_star(2, v, y, f, X, s).value == moments[2].value


def test_moment_preconditions():
    s = sieve()
    half = spec_from_mapping('half', {'prime_power': '-1/2', 'kappa': 0.5})
    with pytest.raises(DomainError):
        w_moments(1, 1.0, 20.0, half, X, s)
    with pytest.raises(RangeError):
        w_moments(1, 1.0, 20.0, get_spec('mu'), X + 1, s)
    with pytest.raises(DomainError):
        w_moments(1, 5.0, 20.0, get_spec('mu'), X, s)
    with pytest.raises(DomainError):
        w_moments(1, 1.0, 20.0, get_spec('mu'), X, s, include_origin=True)


if __name__ == "__main__":
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith('test_')]
    print(f"Running {len(tests)} oracle checks...")
    for test in tests:
        test()
        print(f"  OK: {test.__name__}")
    print("\nAll oracle checks passed!")
