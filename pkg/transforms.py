#!/usr/bin/env python3
"""
Entire functions, truncated power series and Euler products.

Provides I(s) and rho_hat(s), Laplace transforms of piecewise solutions,
the Taylor coefficients of s*zeta(1+s), and the coefficient sequences c_j,
a_j(f) and a_j*(f) that feed every expansion in asymptotics.py.

Usage:
    from transforms import zeta_series, c_coeffs
    zeta_series(6)[1]       # Euler's constant
    c_coeffs(2.0, 3)        # Taylor coefficients of rho_hat(s)**-2
"""

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from friable_errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

EULER_GAMMA = float(sp.EulerGamma.evalf(30))
MAX_SERIES_ORDER = 12
I_RADIUS = 200.0

EM_CUTOFF = 50
EM_TERMS = 20


# ------------------------------------------------------------- I and rho_hat

def int_I(s):
    """
    I(s) = int_0^s (e^t - 1) dt/t = sum_{n>=1} s^n/(n*n!).

    The series terms peak near e**|s| while the sum is of size e**Re(s), so
    about (|s| - Re s)/ln 10 digits cancel. Once |s| > 12 and that loss would
    pass e**8, the identity I(s) = -gamma - log(-s) - E1(-s) is used instead;
    it holds off the positive real axis, where the series has no cancellation.
    The series branch is then good to about 1e-12 relative.
    """
    s = complex(s)
    if abs(s) > I_RADIUS:
        raise DomainError(f"|s| = {abs(s):.4g} exceeds the series guard {I_RADIUS:g}")
    if abs(s) > 12 and abs(s) - s.real > 8:
        e1 = complex(sp.expint(1, sp.sympify(-s)).evalf(20))
        return -EULER_GAMMA - cmath.log(-s) - e1
    term = 1.0 + 0j
    running = 0j
    re, im = [], []
    n = 0
    while True:
        n += 1
        term *= s / n
        piece = term / n
        re.append(piece.real)
        im.append(piece.imag)
        running += piece
        if n > abs(s) and abs(piece) < 1e-18 * max(1.0, abs(running)):
            break
    return complex(math.fsum(re), math.fsum(im))


def rho_hat(s):
    """Laplace transform of the Dickman function, e**(gamma + I(-s))."""
    return cmath.exp(EULER_GAMMA + int_I(-complex(s)))


@dataclass(frozen=True)
class LaplaceValue:
    value: complex
    v_max: float
    tail_bound: float


def laplace_numeric(sol, s, v_max=None):
    """
    int_0^v_max e**(-v*s) * sol(v) dv from the per-interval representation.

    The tail bound assumes |sol| grows at most like v**max(kappa, 0) beyond
    v_max; it is infinite when Re s <= 0 and the solution does not decay.
    """
    s = complex(s)
    v_max = sol.domain_max if v_max is None else float(v_max)
    value = complex(sol.integrate(lambda t: np.exp(-s * t), 0.0, v_max))
    edge = abs(sol(v_max))
    sigma = s.real
    growth = max(sol.kappa, 0.0)
    if sigma <= 0:
        if edge > 0:
            logger.warning("Laplace abscissa Re s = %g does not converge for %s", sigma, sol.label)
        tail = math.inf if edge > 0 else 0.0
    else:
        tail = edge * math.exp(-sigma * v_max) / sigma * (1.0 + 2.0 * growth / (sigma * v_max))
    return LaplaceValue(value, v_max, tail)


# -------------------------------------------------------------- power series

class SeriesCoefficients:
    """
    Truncated Taylor series c[0] + c[1]*s + ... + c[order]*s**order.

    Arithmetic keeps the smaller order of the two operands. Functions of a
    series (exp, log, real powers) are exact modulo truncation.
    """

    def __init__(self, coeffs=None, order=None):
        if isinstance(coeffs, SeriesCoefficients):
            coeffs = coeffs.coeffs
        if coeffs is None:
            coeffs = [0.0]
        coeffs = np.asarray(coeffs)
        if coeffs.ndim != 1 or len(coeffs) == 0:
            raise ValueError(f"need a non-empty 1-d coefficient list, got {coeffs!r}")
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError(f"order cannot be less than zero: order = {order}")
        dtype = np.result_type(coeffs.dtype, float)
        c = np.zeros(order + 1, dtype)
        n = min(order + 1, len(coeffs))
        c[:n] = coeffs[:n]
        c.setflags(write=False)
        self.coeffs = c

    @property
    def order(self):
        return len(self.coeffs) - 1

    truncation_order = order

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"SeriesCoefficients({self.coeffs.tolist()})"

    def __add__(self, x):
        if isinstance(x, SeriesCoefficients):
            order = min(self.order, x.order)
            return SeriesCoefficients(self.coeffs[:order + 1] + x.coeffs[:order + 1])
        c = np.array(self.coeffs, dtype=np.result_type(self.coeffs.dtype, type(x)))
        c[0] += x
        return SeriesCoefficients(c)

    __radd__ = __add__

    def __neg__(self):
        return SeriesCoefficients(-self.coeffs)

    def __sub__(self, x):
        return self + (-x)

    def __rsub__(self, x):
        return (-self) + x

    def __mul__(self, x):
        if isinstance(x, SeriesCoefficients):
            order = min(self.order, x.order)
            return SeriesCoefficients(np.convolve(self.coeffs, x.coeffs)[:order + 1])
        return SeriesCoefficients(x * self.coeffs)

    __rmul__ = __mul__

    def reciprocal(self):
        c = self.coeffs
        if c[0] == 0:
            raise ZeroDivisionError("leading coefficient is zero")
        out = np.zeros_like(c)
        out[0] = 1.0 / c[0]
        for n in range(1, len(c)):
            out[n] = -np.dot(c[1:n + 1], out[n - 1::-1]) / c[0]
        return SeriesCoefficients(out)

    def __truediv__(self, x):
        if isinstance(x, SeriesCoefficients):
            return self * x.reciprocal()
        return SeriesCoefficients(self.coeffs / x)

    def __rtruediv__(self, x):
        return x * self.reciprocal()

    def exp(self):
        head = np.exp(self.coeffs[0])
        x = self - self.coeffs[0]
        ans = SeriesCoefficients([1.0], self.order)
        for n in range(self.order, 0, -1):
            ans = 1.0 + x * ans / float(n)
        return head * ans

    def log(self):
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("log of a series with zero constant term")
        ans = SeriesCoefficients([np.log(c0)], self.order)
        x = -(self - c0) / c0
        xn = SeriesCoefficients([1.0], self.order)
        for n in range(1, self.order + 1):
            xn = xn * x
            ans = ans - xn / float(n)
        return ans

    def __pow__(self, alpha):
        if float(alpha).is_integer() and alpha >= 0:
            ans = SeriesCoefficients([1.0], self.order)
            for _ in range(int(alpha)):
                ans = ans * self
            return ans
        return (alpha * self.log()).exp()

    def __call__(self, s):
        ans = 0.0
        for c in self.coeffs[::-1]:
            ans = ans * s + c
        return ans

    def shift_sum(self):
        """Coefficients b_j = c_j + c_{j-1}, i.e. the series times (1 + s)."""
        return self * SeriesCoefficients([1.0, 1.0], self.order)

    def real(self):
        return SeriesCoefficients(np.real(self.coeffs))


def I_series(order):
    """Taylor coefficients of I(s): 1/(n*n!) at s**n."""
    return SeriesCoefficients([0.0] + [1.0 / (n * math.factorial(n)) for n in range(1, order + 1)])


def rho_hat_series(alpha, order):
    """Taylor coefficients of rho_hat(s)**alpha = exp(alpha*(gamma + I(-s)))."""
    neg = SeriesCoefficients([c * (-1) ** n for n, c in enumerate(I_series(order))])
    return (alpha * (EULER_GAMMA + neg)).exp()


def c_coeffs(kappa, J):
    """
    Taylor coefficients of exp(-gamma*kappa - kappa*I(-s)) = rho_hat(s)**-kappa.

    c_0 = e**(-gamma*kappa); these are the c_j in the large-v expansion of h_kappa.
    """
    if J > MAX_SERIES_ORDER:
        raise DomainError(f"J must be <= {MAX_SERIES_ORDER}, got {J}")
    return rho_hat_series(-kappa, J)


# ------------------------------------------------------------------- zeta

@lru_cache(maxsize=1)
def _em_bernoulli():
    return tuple(float(sp.bernoulli(2 * k)) / math.factorial(2 * k) for k in range(1, EM_TERMS + 1))


def _em_tail(s, N):
    """Euler-Maclaurin corrections sum_k B_2k/(2k)! * (s)_(2k-1) * N**(-s-2k+1)."""
    total = np.zeros_like(s)
    rising = s.copy()
    power = N ** (-s - 1.0)
    for k, bk in enumerate(_em_bernoulli(), start=1):
        total = total + bk * rising * power
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        power = power / (N * N)
    return total


def zeta(s):
    """Riemann zeta by Euler-Maclaurin, Re s > 0, s != 1, |Im s| <= 10."""
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s.real <= 0) or np.any(np.abs(s.imag) > 10):
        raise DomainError("zeta is evaluated for Re s > 0 and |Im s| <= 10 only")
    if np.any(s == 1):
        raise DomainError("zeta has a pole at s = 1")
    N = EM_CUTOFF
    n = np.arange(1, N, dtype=float)
    head = np.exp(-np.outer(s, np.log(n))).sum(axis=1)
    out = head + N ** (1.0 - s) / (s - 1.0) + 0.5 * N ** (-s) + _em_tail(s, N)
    return out[0] if scalar else out


def s_zeta_1p(s):
    """s*zeta(1+s), entire; computed without dividing by s."""
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    N = EM_CUTOFF
    n = np.arange(1, N, dtype=float)
    t = 1.0 + s
    head = np.exp(-np.outer(t, np.log(n))).sum(axis=1)
    out = s * (head + 0.5 * N ** (-t) + _em_tail(t, N)) + N ** (-s)
    return out[0] if scalar else out


def _cauchy_coefficients(values, radius, order):
    """Taylor coefficients from samples on |s| = radius (trapezoid rule via FFT)."""
    samples = len(values)
    coef = np.fft.fft(values) / samples
    return coef[:order + 1] / radius ** np.arange(order + 1)


@lru_cache(maxsize=None)
def zeta_series(order, samples=64, radius=0.5):
    """
    Taylor coefficients gamma_h of s*zeta(1+s) at 0.

    gamma_0 = 1, gamma_1 = Euler's constant, then (-1)^(h-1) gamma_{h-1}/(h-1)!
    with gamma_k the Stieltjes constants.
    """
    if order > MAX_SERIES_ORDER:
        raise DomainError(f"order must be <= {MAX_SERIES_ORDER}, got {order}")
    s = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    coef = _cauchy_coefficients(s_zeta_1p(s), radius, order)
    return SeriesCoefficients(coef.real)


# ----------------------------------------------------------- Euler products

def primes_upto(n):
    """All primes <= n as an int64 array."""
    if n < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@dataclass(frozen=True)
class EulerProductValue:
    value: complex
    prime_limit: int
    tail_estimate: float


def _log_local_factors(f, primes, s):
    """log of B_p(s) * (1 - p**-2s)**e2 for each prime (rows) and s (columns)."""
    p = primes.astype(float)[:, None]
    s = np.atleast_1d(np.asarray(s, dtype=complex))[None, :]
    with np.errstate(divide='ignore'):
        local = f.local_factor_B(p, s)
        if f.zeta2_exponent:
            local = local * (1.0 - p ** (-2.0 * s)) ** f.zeta2_exponent
        return np.log(local.astype(complex))


def _decay_check(f, primes, logs):
    """Raise when |log B_p| fails to shrink like p**-2 toward the top of the range."""
    P = primes[-1]
    top = primes > P // 2
    mid = (primes > P // 100) & (primes <= P // 10)
    if not np.any(mid):
        return
    mag = np.abs(logs)
    scaled = mag * primes.astype(float) ** 2
    if mag[top].max() > 1e-12 and scaled[top].max() > 4.0 * max(scaled[mid].max(), 1e-300):
        raise ConvergenceError(
            f"local factors of {f.name} do not decay like 1 + O(p^-2); check kappa and the class sign")


def euler_product(f, s, prime_limit=10 ** 6, chunk=1 << 14):
    """
    B(s) for the spec f, as zeta(2s)**e2 times a truncated product over p <= prime_limit.

    The tail estimate extrapolates C * p**-theta from the top half of the range,
    theta = 3 once a zeta(2s) power has been extracted and 2 otherwise, and adds
    a rounding floor.
    """
    scalar = np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    primes = primes_upto(prime_limit)
    total = np.zeros(len(s_arr), dtype=complex)
    top_logs = []
    for start in range(0, len(primes), chunk):
        block = primes[start:start + chunk]
        logs = _log_local_factors(f, block, s_arr)
        total += logs.sum(axis=0)
        if block[-1] > prime_limit // 100:
            top_logs.append((block, logs))
    value = np.exp(total)
    if f.zeta2_exponent:
        value = value * zeta(2.0 * s_arr) ** f.zeta2_exponent

    theta = 3.0 if f.zeta2_exponent else 2.0
    P = float(primes[-1])
    tails = np.zeros(len(s_arr))
    if top_logs:
        blocks = np.concatenate([b for b, _ in top_logs])
        logs = np.concatenate([l for _, l in top_logs], axis=0)
        finite = np.all(np.isfinite(logs), axis=1)
        upper = (blocks > P / 2) & finite
        for col in range(len(s_arr)):
            _decay_check(f, blocks[finite], logs[finite, col])
            C = float(np.max(np.abs(logs[upper, col]) * blocks[upper] ** theta)) if np.any(upper) else 0.0
            tails[col] = C * P ** (1.0 - theta) / ((theta - 1.0) * math.log(P))
    floor = 10.0 * np.finfo(float).eps * math.sqrt(len(primes))
    estimate = np.abs(value) * (tails + floor)
    logger.debug("Euler product for %s over %d primes, tail %s", f.name, len(primes), estimate)
    if scalar:
        return EulerProductValue(complex(value[0]), int(prime_limit), float(estimate[0]))
    return [EulerProductValue(complex(v), int(prime_limit), float(t)) for v, t in zip(value, estimate)]


@lru_cache(maxsize=None)
def b_series(f, order, samples=64, radius=0.25, prime_limit=10 ** 6):
    """
    Taylor coefficients of B(1+s) by sampling the Euler product on |s| = radius.

    The constant term is replaced by the direct product at s = 1 so that
    exact zeros of B(1) survive.

    Returns:
        (SeriesCoefficients, EulerProductValue at s = 1)
    """
    s = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    values = euler_product(f, 1.0 + s, prime_limit)
    coef = _cauchy_coefficients(np.array([v.value for v in values]), radius, order)
    at_one = euler_product(f, 1.0, prime_limit)
    coef = coef.real
    coef[0] = at_one.value.real
    return SeriesCoefficients(coef), at_one


def a_coeffs(f, J, samples=64, prime_limit=10 ** 6):
    """
    a_j(f): Taylor coefficients of B(1+s) * (s*zeta(1+s))**-kappa / (1+s).

    a_0(f) = B(1).
    """
    if f.sign > 0:
        raise DomainError(f"{f.name} is in the plus class; a_j(f) is defined for F = zeta**-kappa * B")
    if J > MAX_SERIES_ORDER:
        raise DomainError(f"J must be <= {MAX_SERIES_ORDER}, got {J}")
    b, _ = b_series(f, J, samples, 0.25, prime_limit)
    zpow = zeta_series(J) ** (-f.kappa)
    geometric = SeriesCoefficients([(-1.0) ** j for j in range(J + 1)])
    return b * zpow * geometric


def a_star_coeffs(f, J, samples=64, prime_limit=10 ** 6):
    """a_j*(f) = a_j(f) + a_{j-1}(f), with a_{-1} = 0."""
    return a_coeffs(f, J, samples, prime_limit).shift_sum()
