#!/usr/bin/env python3
"""
Exact friable sums from a smallest-prime-factor table.

Every quantity the expansions in asymptotics.py estimate is computed here
exactly for x up to 2e8: Psi(x, y), M(x, y; f), m(x, y; f), M(x; f_y),
the convolution approximant A(x, y; f) and the moments W_j of the measure
d(M(y^v; f)/y^v) for integer kappa.

Numbers are factored a block at a time by repeated lookups in the spf
table, so a single table serves all the sums.

Usage:
    from friable_oracle import build_sieve, get_spec, m_sum
    sieve = build_sieve(10**6)
    m_sum(10**6, 100, get_spec('mu'), sieve).value
"""

import logging
import math
import os
import struct
from dataclasses import dataclass
from functools import cached_property, lru_cache
from multiprocessing.pool import ThreadPool
from typing import Callable, Optional

import numpy as np
import sympy as sp

from friable_errors import ConfigError, DepthError, DomainError, RangeError, SieveLimitError

logger = logging.getLogger(__name__)

MAX_SIEVE_LIMIT = 200_000_000
BLOCK = 1 << 18
MAX_PRIME_POWER = 400

CACHE_MAGIC = b'FSPF'
CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct('<4sIQ')


# ------------------------------------------------------ function specs

@dataclass(frozen=True)
class MultiplicativeFunctionSpec:
    """
    A multiplicative f given by its values at prime powers.

    sign = -1 means F(s) = zeta(s)**-kappa * B(s), sign = +1 the plus class
    F = zeta**kappa * B. local_B, when given, is the closed-form Euler factor
    of B; otherwise it is summed from the prime-power values.
    """
    name: str
    prime_power: Callable
    kappa: float
    kappa0: float
    sign: int = -1
    local_B: Optional[Callable] = None
    zeta2_exponent: int = 0
    majorant: Optional[str] = None
    description: str = ''

    @property
    def nu(self):
        return int(math.floor(self.kappa))

    @property
    def theta(self):
        return self.kappa - self.nu

    @property
    def integer_kappa(self):
        return float(self.kappa).is_integer()

    def values(self, p, a):
        """f(p**a) for arrays of primes and exponents >= 1."""
        p = np.asarray(p)
        out = np.asarray(self.prime_power(p, np.asarray(a)), dtype=float)
        return np.broadcast_to(out, p.shape)

    def local_factor_F(self, p, s):
        """1 + sum_{a>=1} f(p**a) p**(-a*s), summed until p**(-a*Re s) < e**-46."""
        p, s = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(s, dtype=complex))
        if np.any(s.real <= 0):
            raise DomainError("local factors are summed for Re s > 0 only")
        flat_p, flat_s = p.ravel(), s.ravel()
        logp = np.log(flat_p)
        out = np.ones(flat_p.shape, dtype=complex)
        live = np.arange(flat_p.size)
        a = 1
        while live.size and a <= MAX_PRIME_POWER:
            live = live[a * flat_s[live].real * logp[live] < 46.0]
            if not live.size:
                break
            fa = self.values(np.rint(flat_p[live]).astype(np.int64), np.full(live.size, a))
            out[live] += fa * np.exp(-a * flat_s[live] * logp[live])
            a += 1
        return out.reshape(p.shape)

    def local_factor_B(self, p, s):
        p = np.asarray(p, dtype=float)
        s = np.asarray(s, dtype=complex)
        if self.local_B is not None:
            shape = np.broadcast_shapes(p.shape, s.shape)
            return np.broadcast_to(np.asarray(self.local_B(p, s), dtype=complex), shape)
        x = p ** (-s)
        return self.local_factor_F(p, s) * (1.0 - x) ** (self.sign * self.kappa)


def _mu_values(p, a):
    return np.where(a == 1, -1.0, 0.0)


def _liouville_values(p, a):
    return np.where(a % 2 == 0, 1.0, -1.0)


def _unit_B(p, s):
    return np.ones(np.broadcast_shapes(np.shape(p), np.shape(s)), dtype=complex)


def _liouville_B(p, s):
    return 1.0 / (1.0 - p ** (-2.0 * s))


def _constant_values(c):
    def values(p, a):
        return np.full(np.shape(a), float(c))
    return values


def _neg_omega_B(k):
    def local(p, s):
        x = p ** (-s)
        return (1.0 - k * x / (1.0 - x)) * (1.0 - x) ** (-k)
    return local


def _binomial_values(k):
    # tau_k(p**a) = C(a+k-1, k-1)
    def values(p, a):
        a = np.asarray(a, dtype=float)
        out = np.ones_like(a)
        for i in range(1, k):
            out = out * (a + i) / i
        return out
    return values


@lru_cache(maxsize=1)
def bundled_specs():
    specs = [
        MultiplicativeFunctionSpec('mu', _mu_values, 1.0, 1.0, -1, _unit_B,
                                   majorant='one', description='Moebius function'),
        MultiplicativeFunctionSpec('liouville', _liouville_values, 1.0, 1.0, -1, _liouville_B,
                                   zeta2_exponent=1, majorant='one', description='Liouville lambda'),
        MultiplicativeFunctionSpec('one', _constant_values(1.0), 1.0, 1.0, +1, _unit_B,
                                   description='constant 1, counts friable integers'),
    ]
    for k in range(1, 9):
        specs.append(MultiplicativeFunctionSpec(
            f'neg_omega_{k}', _constant_values(-k), float(k), float(k), -1, _neg_omega_B(k),
            zeta2_exponent=-k * (k + 1) // 2, majorant=f'tau_{k}',
            description=f'(-{k})**omega(n)'))
        specs.append(MultiplicativeFunctionSpec(
            f'tau_{k}', _binomial_values(k), float(k), float(k), +1, _unit_B,
            description=f'{k}-fold divisor function'))
    return {spec.name: spec for spec in specs}


_user_specs = {}

SPEC_KEYS = {'prime_power', 'kappa', 'kappa0', 'class', 'local_B', 'zeta2_exponent',
             'majorant', 'description'}


def spec_from_mapping(name, entry):
    """
    Build a spec from a configuration entry.

    prime_power is a sympy expression in p and a, local_B (optional) one in
    p and s, class is 'minus' (default) or 'plus'.
    """
    if not isinstance(entry, dict):
        raise ConfigError(f"function {name!r} must be a mapping")
    unknown = set(entry) - SPEC_KEYS
    if unknown:
        raise ConfigError(f"function {name!r}: unknown keys {sorted(unknown)}")
    for key in ('prime_power', 'kappa'):
        if key not in entry:
            raise ConfigError(f"function {name!r}: missing '{key}'")

    p, a, s = sp.symbols('p a s')
    try:
        expr = sp.sympify(str(entry['prime_power']))
        local = sp.sympify(str(entry['local_B'])) if entry.get('local_B') is not None else None
        kappa = float(entry['kappa'])
        kappa0 = float(entry.get('kappa0', kappa))
        e2 = int(entry.get('zeta2_exponent', 0))
    except (sp.SympifyError, TypeError, ValueError) as err:
        raise ConfigError(f"function {name!r}: {err}") from err
    if not expr.free_symbols <= {p, a}:
        raise ConfigError(f"function {name!r}: prime_power may only use p and a")
    if local is not None and not local.free_symbols <= {p, s}:
        raise ConfigError(f"function {name!r}: local_B may only use p and s")
    if kappa <= 0 or kappa0 <= 0:
        raise ConfigError(f"function {name!r}: kappa and kappa0 must be positive")
    cls = entry.get('class', 'minus')
    if cls not in ('minus', 'plus'):
        raise ConfigError(f"function {name!r}: class must be 'minus' or 'plus'")

    f_rule = sp.lambdify((p, a), expr, modules='numpy')
    b_rule = sp.lambdify((p, s), local, modules='numpy') if local is not None else None
    return MultiplicativeFunctionSpec(
        name, f_rule, kappa, kappa0, -1 if cls == 'minus' else 1, b_rule, e2,
        entry.get('majorant'), str(entry.get('description', expr)))


def register_specs(functions):
    """Add user specs from the 'functions' mapping of a config file."""
    for name, entry in (functions or {}).items():
        if name in bundled_specs():
            raise ConfigError(f"function {name!r} shadows a bundled spec")
        _user_specs[name] = spec_from_mapping(name, entry)
        logger.debug("registered user function %s", name)


def get_spec(name):
    if name in _user_specs:
        return _user_specs[name]
    try:
        return bundled_specs()[name]
    except KeyError:
        known = sorted(set(bundled_specs()) | set(_user_specs))
        raise ConfigError(f"unknown function {name!r}; known: {', '.join(known)}") from None


# --------------------------------------------------------------- sieve

def _build_spf(limit):
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            view = spf[p * p::p]
            view[view == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset] = unset.astype(np.uint32)
    return spf


@dataclass(frozen=True)
class FactorBlock:
    n: np.ndarray
    f: Optional[np.ndarray]
    f_y: Optional[np.ndarray]
    largest: np.ndarray


class FriableSieve:
    """Smallest-prime-factor table for 1..limit; read-only once built."""

    def __init__(self, limit, spf=None):
        limit = int(limit)
        if limit > MAX_SIEVE_LIMIT:
            raise SieveLimitError(f"sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}")
        if limit < 2:
            raise DomainError(f"sieve limit must be >= 2, got {limit}")
        if spf is None:
            spf = _build_spf(limit)
            logger.debug("built spf table to %d (%.1f MB)", limit, spf.nbytes / 2 ** 20)
        elif len(spf) != limit + 1:
            raise DomainError(f"spf table has {len(spf)} entries, expected {limit + 1}")
        spf.setflags(write=False)
        self.limit = limit
        self.spf = spf

    @cached_property
    def primes(self):
        n = np.arange(2, self.limit + 1, dtype=np.uint32)
        return n[self.spf[2:] == n].astype(np.int64)

    def factorize(self, n):
        """[(p, a), ...] in increasing p."""
        n = int(n)
        if n < 1 or n > self.limit:
            raise RangeError(f"{n} outside 1..{self.limit}")
        out = []
        while n > 1:
            p, a = int(self.spf[n]), 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        return out

    def factor(self, n, f=None, y=None):
        """
        f(n), f_y(n) and the largest prime factor for an array of n.

        Args:
            n: int64 array with entries in 1..limit.
            f: spec, or None to skip function values.
            y: truncation point for f_y; None means no truncation.
        """
        n = np.asarray(n, dtype=np.int64)
        rem = n.copy()
        largest = np.ones(n.shape, dtype=np.int64)
        fval = np.ones(n.shape) if f is not None else None
        fy = np.ones(n.shape) if f is not None else None
        idx = np.flatnonzero(rem > 1)
        while idx.size:
            r = rem[idx]
            p = self.spf[r].astype(np.int64)
            a = np.zeros(idx.size, dtype=np.int64)
            live = np.arange(idx.size)
            while live.size:
                r[live] //= p[live]
                a[live] += 1
                live = live[r[live] % p[live] == 0]
            rem[idx] = r
            largest[idx] = p
            if f is not None:
                val = f.values(p, a)
                fval[idx] *= val
                keep = idx if y is None else idx[p <= y]
                fy[keep] *= val if y is None else val[p <= y]
            idx = idx[r > 1]
        return FactorBlock(n, fval, fy, largest)

    def factor_block(self, lo, hi, f=None, y=None):
        """Factor lo < n <= hi."""
        return self.factor(np.arange(lo + 1, hi + 1, dtype=np.int64), f, y)

    def save(self, path):
        with open(path, 'wb') as fh:
            fh.write(_CACHE_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, self.limit))
            fh.write(self.spf.astype('<u4').tobytes())
        logger.info("saved sieve cache %s (limit %d)", path, self.limit)

    @classmethod
    def load(cls, path, limit=None):
        """Read a cache file; None if it is stale or malformed."""
        with open(path, 'rb') as fh:
            head = fh.read(_CACHE_HEADER.size)
            if len(head) < _CACHE_HEADER.size:
                logger.warning("sieve cache %s is truncated", path)
                return None
            magic, version, stored = _CACHE_HEADER.unpack(head)
            if magic != CACHE_MAGIC or version != CACHE_VERSION:
                logger.warning("sieve cache %s has format %r v%d, ignoring", path, magic, version)
                return None
            if limit is not None and stored != limit:
                logger.info("sieve cache %s holds limit %d, need %d", path, stored, limit)
                return None
            spf = np.frombuffer(fh.read(), dtype='<u4')
        if len(spf) != stored + 1:
            logger.warning("sieve cache %s is truncated", path)
            return None
        return cls(stored, spf.astype(np.uint32))


def build_sieve(limit, cache=None):
    """FriableSieve up to limit, read from / written to `cache` when given."""
    if cache and os.path.exists(cache):
        sieve = FriableSieve.load(cache, int(limit))
        if sieve is not None:
            return sieve
    sieve = FriableSieve(limit)
    if cache:
        sieve.save(cache)
    return sieve


# ----------------------------------------------------------------- sums

class CompensatedSum:
    """Running sum with Neumaier's compensation, readable between add() calls."""

    def __init__(self):
        self.sum = 0.0
        self.carry = 0.0

    def add(self, value):
        total = self.sum + value
        if abs(self.sum) >= abs(value):
            self.carry += (self.sum - total) + value
        else:
            self.carry += (value - total) + self.sum
        self.sum = total

    @property
    def value(self):
        return self.sum + self.carry


@dataclass(frozen=True)
class SumResult:
    value: float
    x: float
    y: float
    u: float
    count: int


def u_of(x, y):
    if x <= 1:
        return 0.0
    if y <= 1:
        return math.inf
    return math.log(x) / math.log(y)


def _check_range(x, y, sieve):
    if x < 1 or x > sieve.limit:
        raise RangeError(f"x = {x:g} outside [1, {sieve.limit}]")
    if y < 1:
        raise RangeError(f"y = {y:g} must be >= 1")


def partition_range(x, partitions=None):
    """
    Split (0, floor(x)] into contiguous integer ranges (lo, hi].

    partitions is None (one range), a count, or a list of interior cut points.
    """
    N = int(math.floor(x))
    if partitions is None:
        cuts = [0, N]
    elif isinstance(partitions, int):
        if partitions < 1:
            raise DomainError("need at least one partition")
        cuts = [int(round(c)) for c in np.linspace(0, N, partitions + 1)]
    else:
        cuts = [0] + sorted(int(c) for c in partitions if 0 < c < N) + [N]
    return [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]


def partial_sum(kind, lo, hi, y, f, sieve):
    """
    One summand range lo < n <= hi; returns (value, count).

    kind is 'psi', 'sum' (f on friable n), 'weighted' (f(n)/n on friable n),
    'trunc' (f_y on all n) or 'mertens' (f on all n).
    """
    partials = []
    count = 0
    for start in range(lo, hi, BLOCK):
        stop = min(start + BLOCK, hi)
        blk = sieve.factor_block(start, stop, None if kind == 'psi' else f, y)
        if kind == 'psi':
            terms = np.ones(int(np.count_nonzero(blk.largest <= y)))
        elif kind == 'sum':
            terms = blk.f[blk.largest <= y]
        elif kind == 'weighted':
            friable = blk.largest <= y
            terms = blk.f[friable] / blk.n[friable]
        elif kind == 'trunc':
            terms = blk.f_y
        elif kind == 'mertens':
            terms = blk.f
        else:
            raise ValueError(f"unknown sum kind {kind!r}")
        partials.append(math.fsum(terms))
        count += terms.size
    return math.fsum(partials), count


def _run(kind, x, y, f, sieve, partitions, threads):
    _check_range(x, y, sieve)
    ranges = partition_range(x, partitions)

    def job(r):
        return partial_sum(kind, r[0], r[1], y, f, sieve)

    if threads > 1 and len(ranges) > 1:
        with ThreadPool(min(threads, len(ranges))) as pool:
            parts = pool.map(job, ranges)
    else:
        parts = [job(r) for r in ranges]
    value = math.fsum(v for v, _ in parts)
    count = sum(c for _, c in parts)
    return SumResult(value, float(x), float(y), u_of(x, y), count)


def psi_count(x, y, sieve, partitions=None, threads=1):
    """Psi(x, y), the number of y-friable n <= x (1 included)."""
    res = _run('psi', x, y, None, sieve, partitions, threads)
    return SumResult(float(int(res.value)), res.x, res.y, res.u, res.count)


def m_sum(x, y, f, sieve, partitions=None, threads=1):
    """M(x, y; f) = sum of f(n) over y-friable n <= x."""
    return _run('sum', x, y, f, sieve, partitions, threads)


def m_weighted(x, y, f, sieve, partitions=None, threads=1):
    """m(x, y; f) = sum of f(n)/n over y-friable n <= x."""
    return _run('weighted', x, y, f, sieve, partitions, threads)


def m_trunc(x, y, f, sieve, partitions=None, threads=1):
    """M(x; f_y): f evaluated on the largest y-friable divisor of each n <= x."""
    return _run('trunc', x, y, f, sieve, partitions, threads)


def mertens(x, f, sieve, partitions=None, threads=1):
    """M(x; f) = M(x, x; f)."""
    return _run('mertens', x, max(float(x), 1.0), f, sieve, partitions, threads)


def check_majorant(f, sieve, n_max=10 ** 4):
    """True when |f(n)| <= f_dagger(n) for all n <= n_max."""
    if f.majorant is None:
        return True
    n = np.arange(1, min(n_max, sieve.limit) + 1)
    bound = sieve.factor(n, get_spec(f.majorant)).f
    return bool(np.all(np.abs(sieve.factor(n, f).f) <= bound))


# -------------------------------------------------- approximants, moments

def _require_domain(sol, u):
    if sol.domain_max < u:
        raise DepthError(f"{sol.label} is solved to v={sol.domain_max:g}, need u={u:g}")


def a_approx(x, y, f, h_sol, sieve):
    """
    A(x, y; f) = x * int h(u - v) d(M(y^v; f) y^-v).

    The measure is the atoms f(n)/n at v = log n/log y minus the drift
    log y * M(y^v; f) y^-v dv. Since M is a step function the drift part is
    sum_n f(n) * log y * int_0^{w_n} h(t) y^(t-u) dt, w_n = u - log n/log y,
    which the solution's antiderivative gives exactly.
    """
    _check_range(x, y, sieve)
    if y < 2:
        raise RangeError("a_approx needs y >= 2")
    L = math.log(y)
    u = u_of(x, y)
    _require_domain(h_sol, u)
    G = h_sol.antiderivative(lambda t: np.exp(np.minimum(L * (t - u), 700.0)))
    partials = []
    N = int(math.floor(x))
    for start in range(0, N, BLOCK):
        blk = sieve.factor_block(start, min(start + BLOCK, N), f)
        nz = blk.f != 0
        n, fn = blk.n[nz], blk.f[nz]
        w = np.maximum(u - np.log(n) / L, 0.0)
        partials.append(math.fsum(fn * (h_sol(w) / n - L * G(w).real)))
    return x * math.fsum(partials)


def a_star_approx(x, y, f, h_sol, sieve):
    """A*(x, y; f) = int h(u - v) dm(y^v; f) = sum_{n<=x} f(n)/n * h(u - log n/log y)."""
    _check_range(x, y, sieve)
    L = math.log(y)
    u = u_of(x, y)
    _require_domain(h_sol, u)
    partials = []
    N = int(math.floor(x))
    for start in range(0, N, BLOCK):
        blk = sieve.factor_block(start, min(start + BLOCK, N), f)
        nz = blk.f != 0
        n, fn = blk.n[nz], blk.f[nz]
        w = np.maximum(u - np.log(n) / L, 0.0)
        partials.append(math.fsum(fn / n * h_sol(w)))
    return math.fsum(partials)


@dataclass(frozen=True)
class MomentResult:
    value: float
    tail_estimate: float
    j: int
    v: float
    t_max: float


def _moment_scan(j, v, y, f, x_max, sieve, include_origin, weighted_tail):
    """
    One pass over 1..x_max.

    Returns the atom sums S_i = sum (t_n - v)**i f(n)/n over the atoms in
    (v, T] for i <= j, M(y^v), M(x_max), and the largest of |M(X)|/X (or
    |m(X)| when weighted_tail) over X in [x_max/10, x_max].
    """
    L = math.log(y)
    threshold = y ** v
    atoms = [[] for _ in range(j + 1)]
    running = CompensatedSum()
    weighted = CompensatedSum()
    M_v = 0.0
    worst = 0.0
    lo_tail = x_max / 10.0
    for start in range(0, x_max, BLOCK):
        blk = sieve.factor_block(start, min(start + BLOCK, x_max), f)
        n, fn = blk.n, blk.f
        base = running.value
        cum = base + np.cumsum(fn)
        wcum = weighted.value + np.cumsum(fn / n)
        below = n <= threshold
        if np.any(below):
            M_v = float(cum[below][-1])
        pick = (n > threshold) | ((n == 1) & include_origin)
        if np.any(pick):
            t = np.log(n[pick]) / L - v
            w = fn[pick] / n[pick]
            for i in range(j + 1):
                atoms[i].append(math.fsum(w * t ** i))
        late = n >= lo_tail
        if np.any(late):
            ratio = np.abs(wcum[late]) if weighted_tail else np.abs(cum[late]) / n[late]
            worst = max(worst, float(ratio.max()))
        running.add(math.fsum(fn))
        weighted.add(math.fsum(fn / n))
    return [math.fsum(a) for a in atoms], M_v, running.value, worst


def _moment_args(v, y, f, x_max, sieve):
    if not f.integer_kappa:
        raise DomainError(f"moments of d(M(y^v)/y^v) need integer kappa, {f.name} has {f.kappa:g}")
    if y < 2:
        raise RangeError("moments need y >= 2")
    x_max = sieve.limit if x_max is None else int(x_max)
    if x_max > sieve.limit:
        raise RangeError(f"x_max = {x_max} exceeds the sieve limit {sieve.limit}")
    if v < 0 or y ** v >= x_max:
        raise DomainError(f"v = {v:g} must satisfy 0 <= v < log(x_max)/log(y)")
    return x_max, math.log(x_max) / math.log(y)


def _integrate_moments(j_max, v, L, S, M_v, M_T, x_max, T, include_origin):
    """Moments 0..j_max; I_i = int_(v,T] (t-v)^i dmu using mu dt = (atoms - dmu)/L."""
    mu_T = M_T / x_max
    mu_v = 0.0 if include_origin else M_v / math.exp(L * v)
    Tp = T - v
    I = mu_T - mu_v
    out = [I - mu_T]
    for i in range(1, j_max + 1):
        I = Tp ** i * mu_T - (i / L) * (S[i - 1] - I)
        out.append(I - Tp ** i * mu_T)
    return out


def _finish_moment(value, tail, j, v, T, what):
    if value != 0 and tail > 0.1 * abs(value):
        logger.warning("%s: truncation tail %.3g exceeds 10%% of the value %.3g", what, tail, value)
    return MomentResult(value, tail, j, v, T)


def w_moments(j_max, v, y, f, x_max=None, sieve=None, include_origin=False):
    """
    W_j(v, y; f) = int_v^inf (t - v)^j d(M(y^t; f)/y^t) for j = 0..j_max,
    truncated at T = log x_max/log y.

    Integrating by parts against the exact step function leaves only atom
    sums; the boundary term (T - v)^j M(y^T)/y^T is dropped since it belongs
    to the omitted tail. With include_origin the unit atom of n = 1 at t = 0
    is counted (v must be 0).
    """
    x_max, T = _moment_args(v, y, f, x_max, sieve)
    if include_origin and v != 0:
        raise DomainError("the atom at the origin only lies in the range when v = 0")
    L = math.log(y)
    S, M_v, M_T, worst = _moment_scan(j_max, v, y, f, x_max, sieve, include_origin, False)
    values = _integrate_moments(j_max, v, L, S, M_v, M_T, x_max, T, include_origin)
    return [_finish_moment(value, (1 + j) * (T - v) ** j * worst if j else 0.0, j, v, T,
                           f"W_{j}({v:g})")
            for j, value in enumerate(values)]


def w_moment(j, v, y, f, x_max=None, sieve=None):
    return w_moments(j, v, y, f, x_max, sieve)[j]


def full_line_moment(j, y, f, x_max=None, sieve=None):
    """int_{[0, inf)} t^j d(M(y^t; f)/y^t), the unit atom of n = 1 at t = 0 included."""
    return w_moments(j, 0.0, y, f, x_max, sieve, include_origin=True)[j]


def w_moments_star(j_max, v, y, f, x_max=None, sieve=None):
    """W*_j(v; f) = sum_{n > y^v} f(n)/n (log n/log y - v)^j for j = 0..j_max, truncated at x_max."""
    x_max, T = _moment_args(v, y, f, x_max, sieve)
    S, _, _, worst = _moment_scan(j_max, v, y, f, x_max, sieve, False, True)
    return [_finish_moment(S[j], (1 + j) * (T - v) ** j * worst, j, v, T, f"W*_{j}({v:g})")
            for j in range(j_max + 1)]


def w_moment_star(j, v, y, f, x_max=None, sieve=None):
    return w_moments_star(j, v, y, f, x_max, sieve)[j]
