#!/usr/bin/env python3
"""
Main terms, error scales and domain tests for friable averages.

Each expansion_* function returns an ExpansionReport holding the individual
terms a_j * psi^(.)(u) / (log y)^(.), their total, the size of the remainder
the asymptotic statement allows, and (when a sieve is supplied) the exact
value from friable_oracle with the residual ratio.

Usage:
    from asymptotics import expansion_M
    from dde_kernel import solve_phi
    from friable_oracle import build_sieve, get_spec
    rep = expansion_M(1e6, 10**(6/2.5), get_spec('mu'), 1, solve_phi(1, 8, 4),
                      sieve=build_sieve(10**6))
    print(rep.table())
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
import sympy as sp

from dde_kernel import jumps, psi_deriv, r_kappa, solve_buchstab, zeta0
from friable_errors import DepthError, DomainError, RangeError
from friable_oracle import (a_approx, get_spec, m_sum, m_trunc, m_weighted, u_of, w_moments,
                            w_moments_star)
from transforms import EULER_GAMMA, a_coeffs, a_star_coeffs, euler_product, primes_upto

logger = logging.getLogger(__name__)

DEFAULT_BETA = 0.25
DEFAULT_DELTA = 0.1
CSV_VERSION = 1


def L_r(y, r):
    """L_r(y) = exp((log y)**r)."""
    return math.exp(math.log(y) ** r)


# --------------------------------------------------------------- domains

def in_range_G(x, y, beta=DEFAULT_BETA):
    """exp((log x)**(1-beta)) <= y <= x."""
    lower = math.exp(math.log(x) ** (1.0 - beta))
    return lower <= y * (1.0 + 1e-12) and y <= x


def eps_J(J, y, beta=DEFAULT_BETA):
    """((2J+2) log log y)**(1/beta) / log y."""
    if y < 3:
        raise DomainError(f"eps_J needs y >= 3, got {y}")
    return ((2 * J + 2) * math.log(math.log(y))) ** (1.0 / beta) / math.log(y)


def in_domain_D(u, J, y, beta=DEFAULT_BETA):
    """min over integers 1 <= j <= min(u, J+1) of (u - j) is at least eps_J(J, y)."""
    if u < 1:
        return False
    top = min(int(math.floor(u)), J + 1)
    return u - top >= eps_J(J, y, beta) - 1e-12 * u


def b_exponent(beta=DEFAULT_BETA):
    return (1.0 - 2.0 * beta) / (1.0 - beta)


def in_domain_Db(u, J, y, b):
    """(u - j) > 1/(log y)**b for every integer 1 <= j < min(u, J+1)."""
    if u < 1:
        return False
    gap = 1.0 / math.log(y) ** b
    return all(u - j > gap for j in range(1, J + 1) if j < u)


def ell_of(u):
    """The integer with ell < u <= ell + 1."""
    return max(int(math.ceil(u)) - 1, 0)


# ---------------------------------------------------------- saddle, zeta_y

def alpha_saddle(kappa, x, y):
    """1 - Re zeta0(u/kappa)/log y."""
    if not x >= y >= 2:
        raise DomainError(f"alpha_saddle needs x >= y >= 2, got x={x:g}, y={y:g}")
    return 1.0 - zeta0(u_of(x, y) / kappa).real / math.log(y)


def zeta_y(s, y, sieve=None):
    """zeta(s, y), the Euler product over primes p <= y."""
    s = complex(s)
    if s.real <= 0:
        raise DomainError(f"zeta_y is taken for Re s > 0, got {s}")
    if sieve is not None:
        if y > sieve.limit:
            raise RangeError(f"y = {y:g} exceeds the sieve limit {sieve.limit}")
        primes = sieve.primes[sieve.primes <= y]
    else:
        primes = primes_upto(int(math.floor(y)))
    x = primes.astype(float) ** (-s)
    if np.any(x == 1):
        raise DomainError(f"zeta_y has a pole at s={s}")
    return complex(np.exp(-np.sum(np.log1p(-x))))


# ---------------------------------------------------------------- reports

class Term(NamedTuple):
    label: str
    j: int
    coeff: float
    deriv: float
    value: float


@dataclass(frozen=True)
class ExpansionReport:
    """
    One expansion evaluated at (x, y).

    main_total is the sum of all term values, corrections included; ratio
    is |exact - main_total| / error_scale and is only set with exact.
    """
    kind: str
    function: str
    x: float
    y: float
    u: float
    J: int
    terms: tuple
    main_total: float
    error_scale: float
    exact: Optional[float] = None
    residual: Optional[float] = None
    ratio: Optional[float] = None
    flags: tuple = ()
    omitted_bound: Optional[float] = None

    def with_exact(self, exact):
        residual = exact - self.main_total
        return replace(self, exact=float(exact), residual=residual,
                       ratio=abs(residual) / self.error_scale)

    @property
    def correction(self):
        return math.fsum(t.value for t in self.terms if t.label == 'U')

    def ordering_violations(self):
        """Indices j with |term_{j+1}| > |term_j| among the expansion terms."""
        main = [t for t in self.terms if t.label == 'a']
        return [a.j for a, b in zip(main, main[1:]) if abs(b.value) > abs(a.value)]

    def flag_string(self):
        return ';'.join(f"{k}={v}" for k, v in self.flags)

    def csv_row(self, J=None):
        J = self.J if J is None else J
        main = {t.j: t for t in self.terms if t.label == 'a'}
        row = [self.kind, self.function, _fmt(self.x), _fmt(self.y), _fmt(self.u), str(self.J)]
        for j in range(J + 1):
            t = main.get(j)
            row += [_fmt(t.coeff if t else None), _fmt(t.value if t else None)]
        row += [_fmt(self.correction), _fmt(self.main_total), _fmt(self.error_scale),
                _fmt(self.exact), _fmt(self.residual), _fmt(self.ratio), self.flag_string()]
        return row

    def table(self):
        lines = [f"{self.kind} expansion for {self.function}: x={self.x:.6g} y={self.y:.6g} "
                 f"u={self.u:.6f} J={self.J}",
                 f"  {'term':>6} {'j':>3} {'coeff':>22} {'derivative':>22} {'value':>22}"]
        for t in self.terms:
            lines.append(f"  {t.label:>6} {t.j:>3} {t.coeff:>22.15g} {t.deriv:>22.15g} {t.value:>22.15g}")
        lines.append(f"  main total  {self.main_total:.15g}")
        lines.append(f"  error scale {self.error_scale:.6g}")
        if self.exact is not None:
            lines.append(f"  exact       {self.exact:.15g}")
            lines.append(f"  residual    {self.residual:.6g}  (ratio {self.ratio:.4g})")
        if self.omitted_bound is not None:
            lines.append(f"  omitted term bounded by {self.omitted_bound:.6g}")
        if self.flags:
            lines.append(f"  flags: {self.flag_string()}")
        return '\n'.join(lines)


def csv_header(J):
    cols = ['kind', 'function', 'x', 'y', 'u', 'J']
    for j in range(J + 1):
        cols += [f'coeff_{j}', f'term_{j}']
    return cols + ['correction', 'main_total', 'error_scale', 'exact', 'residual', 'ratio', 'flags']


def _fmt(value):
    if value is None:
        return ''
    return f"{value:.17g}"


def _domain_flags(x, y, u, J, nu, beta):
    flags = []
    if x >= 3:
        flags.append(('G', int(in_range_G(x, y, beta))))
    if y >= 3:
        flags.append(('D', int(in_domain_D(u, J + nu, y, beta))))
        flags.append(('Db', int(in_domain_Db(u, J + nu + 1, y, b_exponent(beta)))))
    return flags


def _need_depth(sol, order, what):
    if sol.depth < order:
        raise DepthError(f"{what} needs derivatives up to {order}, {sol.label} carries {sol.depth}")


def _restricted_range(J, ell, nu):
    """Indices 0..min(J, ell - nu - 2); possibly empty."""
    return range(0, max(min(J, ell - nu - 2), -1) + 1)


def _corrections(f, u, ell, top, y, sieve, x_max, jump_table, starred):
    """
    Terms (-1)**(j+1) delta_{kappa, ell, j}/j! * W_j(u - ell) for ell <= j <= top.

    Returns (terms, summed truncation tail).
    """
    if ell < 1 or ell > top:
        return [], 0.0
    table = jump_table if jump_table is not None and jump_table.depth >= top else jumps(f.kappa, top)
    v = u - ell
    moments = (w_moments_star if starred else w_moments)(top, v, y, f, x_max, sieve)
    terms, tail = [], 0.0
    for j in range(ell, top + 1):
        coeff = (-1) ** (j + 1) * table.get(ell, j) / math.factorial(j)
        terms.append((j, coeff, moments[j].value))
        tail += abs(coeff) * moments[j].tail_estimate
    return terms, tail


def _irregular(report_flags, f, u, y, ell, J, in_D, sieve, x_max, jump_table, starred, top):
    """
    Decide how a point outside D is handled.

    Returns (indices, correction terms, correction tail, omitted order or None).
    """
    indices = range(J + 1)
    if in_D:
        return indices, [], 0.0, None
    if f.integer_kappa:
        if sieve is None:
            report_flags.append(('correction', 'needs-sieve'))
            return indices, [], 0.0, None
        terms, tail = _corrections(f, u, ell, top, y, sieve, x_max, jump_table, starred)
        report_flags.append(('correction', 'added' if terms else 'empty'))
        return indices, terms, tail, None
    if ell <= J + f.nu + 1:
        report_flags.append(('X_ell', 'unevaluated'))
        return _restricted_range(J, ell, f.nu), [], 0.0, ell
    return indices, [], 0.0, None


def _envelope(kappa, u, power, L, extra):
    """R_kappa(u) log(2u)**power / L**extra, taken at u = 1 below the range of R_kappa."""
    u = max(u, 1.0)
    return r_kappa(kappa, u) * math.log(2 * u) ** power / L ** extra


def _build(kind, f, x, y, u, J, terms, error_scale, flags, omitted, tail):
    if tail:
        flags.append(('correction_tail', f"{tail:.3g}"))
    total = math.fsum(t.value for t in terms)
    rep = ExpansionReport(kind, f.name, float(x), float(y), u, J, tuple(terms), total,
                          error_scale, flags=tuple(flags), omitted_bound=omitted)
    bad = rep.ordering_violations()
    if bad:
        logger.info("%s expansion at u=%.4f: terms grow after j=%s", kind, u, bad)
    return rep


def _short_range(flags, u, f):
    """True, with a flag added, when the psi terms do not apply: x <= 1, or u <= 1 for fractional kappa."""
    if u <= 0:
        flags.append(('main', 'empty'))
        return True
    if u <= 1 and not f.integer_kappa:
        flags.append(('main', 'selberg_delange'))
        return True
    return False


def expansion_M(x, y, f, J, phi_sol, sieve=None, beta=DEFAULT_BETA, x_max=None,
                jump_table=None, prime_limit=10 ** 6):
    """
    x * sum_{j<=J} a_j(f) psi_kappa^(j+1)(u) / (log y)^(kappa+j+1) for M(x, y; f).

    Outside D_{J+nu}(y): for integer kappa the correction x*U_J built from
    the moments W_j and the jumps of phi_kappa^(j) at ell is added; for
    other kappa the sum is cut at j <= ell - nu - 2 and the missing term is
    reported through omitted_bound = x/(log y)^ell. At 0 < u <= 1 with
    fractional kappa every n <= x is friable and the main term is the
    Selberg-Delange leading term of M(x; f).
    """
    u = u_of(x, y)
    L = math.log(y)
    kappa, nu = f.kappa, f.nu
    _need_depth(phi_sol, nu + J + 1, 'expansion_M')
    a = a_coeffs(f, J, prime_limit=prime_limit)
    ell = ell_of(u)
    flags = _domain_flags(x, y, u, J, nu, beta)
    terms = []
    if _short_range(flags, u, f):
        indices, corr, tail, omitted = range(0), [], 0.0, None
        if u > 0:
            factor = _selberg_delange_factor(kappa, x)
            terms.append(Term('SD', 0, float(a[0]), factor, x * a[0] * factor))
    else:
        in_D = y >= 3 and in_domain_D(u, J + nu, y, beta)
        indices, corr, tail, omitted = _irregular(flags, f, u, y, ell, J, in_D, sieve, x_max,
                                                  jump_table, False, J + nu + 1)
    for j in indices:
        d = psi_deriv(phi_sol, j + 1, u)
        terms.append(Term('a', j, float(a[j]), d, x * a[j] * d / L ** (kappa + j + 1)))
    terms += [Term('U', j, c, w, x * c * w) for j, c, w in corr]
    error = x * _envelope(kappa, u, J + 1, L, kappa + J + 2)
    rep = _build('M', f, x, y, u, J, terms, error, flags,
                 None if omitted is None else x / L ** omitted, x * tail)
    if sieve is not None:
        rep = rep.with_exact(m_sum(x, y, f, sieve).value)
    return rep


def expansion_m(x, y, f, J, phi_sol, sieve=None, beta=DEFAULT_BETA, x_max=None,
                jump_table=None, prime_limit=10 ** 6):
    """sum_{j<=J} a*_j(f) psi_kappa^(j)(u) / (log y)^(kappa+j) for m(x, y; f)."""
    u = u_of(x, y)
    L = math.log(y)
    kappa, nu = f.kappa, f.nu
    _need_depth(phi_sol, nu + J, 'expansion_m')
    a = a_star_coeffs(f, J, prime_limit=prime_limit)
    ell = ell_of(u)
    flags = _domain_flags(x, y, u, J, nu, beta)
    if u <= 0:
        flags.append(('main', 'empty'))
        indices, corr, tail, omitted = range(0), [], 0.0, None
    else:
        in_D = y >= 3 and in_domain_D(u, J + nu, y, beta)
        indices, corr, tail, omitted = _irregular(flags, f, u, y, ell, J, in_D, sieve, x_max,
                                                  jump_table, True, J + nu)
    terms = []
    for j in indices:
        d = psi_deriv(phi_sol, j, u)
        terms.append(Term('a', j, float(a[j]), d, a[j] * d / L ** (kappa + j)))
    terms += [Term('U', j, c, w, c * w) for j, c, w in corr]
    error = _envelope(kappa, u, J, L, J + kappa + 1)
    rep = _build('m', f, x, y, u, J, terms, error, flags,
                 None if omitted is None else 1.0 / L ** omitted, tail)
    if sieve is not None:
        rep = rep.with_exact(m_weighted(x, y, f, sieve).value)
    return rep


def expansion_trunc(x, y, f, J, phi_sol_next, sieve=None, beta=DEFAULT_BETA,
                    prime_limit=10 ** 6, a0_threshold=1e-5):
    """
    x * sum_{j<=J} a_j(f) psi_{kappa+1}^(j)(u) / (log y)^(kappa+j+1) for M(x; f_y).

    phi_sol_next is phi_{kappa+1}. The coefficients are those of f itself.
    """
    u = u_of(x, y)
    L = math.log(y)
    kappa, nu = f.kappa, f.nu
    if abs(phi_sol_next.kappa - (kappa + 1)) > 1e-12:
        raise DomainError(f"expansion_trunc needs phi for kappa+1 = {kappa + 1:g}, "
                          f"got {phi_sol_next.kappa:g}")
    _need_depth(phi_sol_next, nu + 1 + J, 'expansion_trunc')
    a = a_coeffs(f, J, prime_limit=prime_limit)
    flags = _domain_flags(x, y, u, J, nu, beta)
    flags.append(('a0_near_zero', int(abs(a[0]) < a0_threshold)))
    if u <= 0:
        flags.append(('main', 'empty'))
    terms = []
    for j in (range(J + 1) if u > 0 else ()):
        d = psi_deriv(phi_sol_next, j, u)
        terms.append(Term('a', j, float(a[j]), d, x * a[j] * d / L ** (kappa + j + 1)))
    error = x * _envelope(kappa, u, J + 1, L, J + kappa + 2)
    rep = _build('trunc', f, x, y, u, J, terms, error, flags, None, 0.0)
    if sieve is not None:
        rep = rep.with_exact(m_trunc(x, y, f, sieve).value)
    return rep


def rho_main(x, y, fplus, rho_sol, sieve=None, beta=DEFAULT_BETA, prime_limit=10 ** 6):
    """x * rho_kappa(u) * (log y)**(kappa-1) * B(1) for a plus-class f."""
    if fplus.sign < 0:
        raise DomainError(f"{fplus.name} is not in the plus class")
    if abs(rho_sol.kappa - fplus.kappa) > 1e-12:
        raise DomainError(f"rho solution has kappa={rho_sol.kappa:g}, {fplus.name} has {fplus.kappa:g}")
    u = u_of(x, y)
    L = math.log(y)
    kappa = fplus.kappa
    B1 = euler_product(fplus, 1.0, prime_limit).value.real
    rho = rho_sol(u)
    scale = x * rho * L ** (kappa - 1)
    terms = [Term('a', 0, B1, rho, scale * B1)]
    error = abs(scale) * (math.log(2 * max(u, 1.0)) / L + L ** -kappa)
    flags = [('G', int(in_range_G(x, y, beta)))] if x >= 3 else []
    rep = _build('rho', fplus, x, y, u, 0, terms, error, flags, None, 0.0)
    if sieve is not None:
        rep = rep.with_exact(m_sum(x, y, fplus, sieve).value)
    return rep


# ------------------------------------------------------------ side checks

def _selberg_delange_factor(kappa, x):
    return -math.gamma(kappa + 1) * math.sin(math.pi * kappa) / (math.pi * (1 + math.log(x)) ** (kappa + 1))


def selberg_delange_u1(x, f, prime_limit=10 ** 6):
    """Leading term -Gamma(kappa+1) sin(pi kappa) x B(1) / (pi (1 + log x)**(kappa+1)) of M(x; f)."""
    B1 = euler_product(f, 1.0, prime_limit).value.real
    return x * B1 * _selberg_delange_factor(f.kappa, x)


def large_u_trunc_main(x, y, f, prime_limit=10 ** 6):
    """a_0(f) e**(-gamma(kappa+1)) x / (log y)**(kappa+1), the limit of the j=0 truncated term."""
    a0 = euler_product(f, 1.0, prime_limit).value.real
    return a0 * math.exp(-EULER_GAMMA * (f.kappa + 1)) * x / math.log(y) ** (f.kappa + 1)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    difference: float
    scale: float


def mobius_weighted_identity(x, y, sieve, omega_sol=None):
    """
    Both sides of sum_{n in S(x,y)} mu(n)/n ~ (omega(u)/log y) int_1^{x/y} m(t)/t dt.

    The integral equals sum_{n <= x/y} mu(n)/n log(x/(y n)). scale is 1/(log y)**2,
    the size of the allowed difference.
    """
    mu = get_spec('mu')
    u = u_of(x, y)
    L = math.log(y)
    if omega_sol is None:
        omega_sol = solve_buchstab(max(2.0, math.ceil(u)), 0)
    lhs = m_weighted(x, y, mu, sieve).value
    z = x / y
    N = int(math.floor(z))
    total = 0.0
    if N >= 1:
        n = np.arange(1, N + 1, dtype=np.int64)
        vals = sieve.factor(n, mu).f
        total = math.fsum(vals / n * np.log(z / n))
    rhs = omega_sol(u) / L * total
    return IdentityCheck(lhs, rhs, lhs - rhs, 1.0 / L ** 2)


@dataclass(frozen=True)
class DichotomyRow:
    k: int
    a0: float
    tail_estimate: float
    a0_doubled: float
    near_zero: bool
    stable: bool
    factor_rule: bool
    quoted_rule: bool


def dichotomy_scan(k_max=8, prime_limit=10 ** 6, threshold=1e-5):
    """
    a_0 of (-k)**omega(n) for k = 1..k_max at prime_limit and twice that.

    factor_rule marks k with k+1 prime (where the local factor at p = k+1
    vanishes at s=1); quoted_rule marks k = p + 1 for a prime p.
    """
    rows = []
    for k in range(1, k_max + 1):
        f = get_spec(f'neg_omega_{k}')
        one = euler_product(f, 1.0, prime_limit)
        two = euler_product(f, 1.0, 2 * prime_limit)
        near = abs(one.value) < threshold
        rows.append(DichotomyRow(k, one.value.real, one.tail_estimate, two.value.real, near,
                                 near == (abs(two.value) < threshold),
                                 bool(sp.isprime(k + 1)), bool(sp.isprime(k - 1))))
        logger.debug("k=%d a0=%.6g tail=%.3g", k, one.value.real, one.tail_estimate)
    return rows


@dataclass(frozen=True)
class ConvolutionCheck:
    exact: float
    approximant: float
    residual: float
    scale: float

    @property
    def ratio(self):
        return abs(self.residual) / self.scale


def convolution_residual(x, y, f, h_sol, sieve, eps=DEFAULT_DELTA):
    """|M(x, y; f) - A(x, y; f)| against x R_kappa(u) / L_eps(y)."""
    u = u_of(x, y)
    exact = m_sum(x, y, f, sieve).value
    approx = a_approx(x, y, f, h_sol, sieve)
    scale = x * r_kappa(f.kappa, max(u, 1.0)) / L_r(y, eps)
    return ConvolutionCheck(exact, approx, exact - approx, scale)


def convolution_report(x, y, f, h_sol, sieve, eps=DEFAULT_DELTA, beta=DEFAULT_BETA):
    """The convolution check packaged as a report, the approximant being the single term."""
    chk = convolution_residual(x, y, f, h_sol, sieve, eps)
    u = u_of(x, y)
    flags = [('G', int(in_range_G(x, y, beta)))] if x >= 3 else []
    rep = _build('A', f, x, y, u, 0, [Term("a", 0, 1.0, chk.approximant, chk.approximant)],
                 chk.scale, flags, None, 0.0)
    return rep.with_exact(chk.exact)
