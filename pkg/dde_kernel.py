#!/usr/bin/env python3
"""
Delay-differential solutions and saddle roots for friable averages.

Every solution handled here satisfies

    v*y'(v) + a*y(v) = b*y(v-1)        (v > 1)

with y(v) = C*v**(-a) on (0, 1] and y = 0 on the negative axis. The
solution is built one unit interval at a time from the integrating-factor
identity

    y(v) = v**(-a) * (m**a * y(m) + b * int_m^v t**(a-1) * y(t-1) dt)

on [m, m+1], using composite Gauss-Legendre panels laid out identically on
every interval so that t-1 always falls on a node of the previous interval.
Derivatives are carried through the differentiated equation

    v*y^(j+1)(v) + (a+j)*y^(j)(v) = b*y^(j)(v-1)

so no numerical differentiation is ever done. The first two intervals are
represented in closed form.

Usage:
    from dde_kernel import solve_phi, psi_deriv
    phi = solve_phi(1.0, 12, 4)
    psi_deriv(phi, 0, 2.5)      # Buchstab omega(2.5)
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import legendre as leg

from friable_errors import ConvergenceError, DepthError, DomainError
from transforms import EULER_GAMMA, int_I, rho_hat

logger = logging.getLogger(__name__)

QUAD_ORDER = 12
PANELS_PER_UNIT = 64
GRADED_LEVELS = 40          # first panel split down to 2**-40 of its width
SERIES_TERMS = 64           # closed form on [1,2] converges like 2**-k
MAX_DEPTH = 16

ZETA0_ANCHOR = 5.0
ZETA0_STEP = 0.05
ZETA0_FLOOR = 0.05


def _rgamma(x):
    """1/Gamma(x), zero at the poles."""
    if x <= 0 and float(x).is_integer():
        return 0.0
    return 1.0 / math.gamma(x)


def _falling(p, j):
    out = 1.0
    for i in range(j):
        out *= (p - i)
    return out


@lru_cache(maxsize=None)
def _panel_layout(order, panels, graded_levels):
    """
    Panel edges on [0, 1], Gauss nodes and the spectral integration matrix.

    The first uniform panel is replaced by a geometric sequence of panels
    shrinking toward 0, where solutions and their derivatives may be singular.

    Returns:
        (edges, nodes, weights, integ) where edges has n_panels+1 entries,
        nodes/weights have shape (n_panels, order) in absolute position on
        [0, 1], and integ maps node values to integrals from the panel's left
        edge to each node, on the reference interval [-1, 1].
    """
    h = 1.0 / panels
    graded = [0.0] + [h * 0.5 ** k for k in range(graded_levels, 0, -1)]
    edges = np.array(graded + [h * k for k in range(1, panels + 1)])

    x, w = leg.leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = lo[:, None] + half[:, None] * (x[None, :] + 1.0)
    weights = half[:, None] * w[None, :]

    vinv = np.linalg.inv(leg.legvander(x, order - 1))
    integ = np.empty((order, order))
    for col in range(order):
        anti = leg.legint(vinv[:, col], lbnd=-1)
        integ[:, col] = leg.legval(x, anti)
    for arr in (edges, nodes, weights, integ, vinv):
        arr.setflags(write=False)
    return edges, nodes, weights, integ, vinv


class PiecewiseSolution:
    """
    Solution of v*y' + a*y = b*y(v-1) and its first `depth` derivatives.

    Immutable once built. Evaluate with `sol(v, j)`; at an integer the
    right limit is returned, beyond `domain_max` a DomainError is raised.
    """

    def __init__(self, kappa, a, b, coeff, v_max, depth, label='y', start=None,
                 order=QUAD_ORDER, panels=PANELS_PER_UNIT):
        if depth < 0 or depth > MAX_DEPTH:
            raise DomainError(f"depth must lie in [0, {MAX_DEPTH}], got {depth}")
        if v_max < 1:
            raise DomainError(f"v_max must be >= 1, got {v_max}")
        if coeff != 0 and a >= 1:
            raise DomainError("initial segment v**(-a) must be integrable (a < 1)")
        self.kappa = float(kappa)
        self.a = float(a)
        self.b = float(b)
        self.coeff = float(coeff)
        self.power = -self.a
        self.depth = int(depth)
        self.label = label
        self.start = self.coeff if start is None else float(start)
        self.n_intervals = max(2, int(math.ceil(v_max)))
        self.domain_max = float(self.n_intervals)
        self.order = order

        self._edges, nodes, self._weights, self._integ, self._vinv = \
            _panel_layout(order, panels, GRADED_LEVELS)
        self._rel = nodes
        self._values = np.empty((self.n_intervals, self.depth + 1) + nodes.shape)
        self._at_integers = np.empty(self.n_intervals + 1)
        self._build()

        # per-panel Legendre coefficients, shape (interval, j, panel, order)
        self._coef = self._values @ self._vinv.T
        self._values.setflags(write=False)
        self._coef.setflags(write=False)
        logger.debug("%s: %d intervals, %d panels/interval, depth %d",
                     label, self.n_intervals, nodes.shape[0], self.depth)

    # ------------------------------------------------------------------ build

    def _initial(self, v, j):
        """j-th derivative of coeff*v**power on (0, 1]; right limit at 0."""
        v = np.asarray(v, dtype=float)
        fall = self.coeff * _falling(self.power, j)
        if fall == 0.0:
            return np.zeros_like(v)
        with np.errstate(divide='ignore', over='ignore'):
            return fall * np.power(v, self.power - j)

    def _second(self, v, depth):
        """Closed form on [1, 2]: list of derivatives 0..depth at v."""
        v = np.asarray(v, dtype=float)
        if self.coeff == 0.0:
            base = self.start * np.ones_like(v)
        else:
            z = (v - 1.0) / v
            k = np.arange(SERIES_TERMS)
            terms = np.power.outer(z, k) / (k + self.power + 1.0)
            with np.errstate(divide='ignore', invalid='ignore'):
                series = np.power(z, self.power + 1.0) * terms.sum(axis=-1)
            base = self.start + self.b * self.coeff * series
        out = [np.power(v, self.power) * base]
        with np.errstate(over='ignore', invalid='ignore'):
            for j in range(depth):
                out.append((self.b * self._initial(v - 1.0, j) - (self.a + j) * out[j]) / v)
        return out

    def _build(self):
        rel = self._rel
        half = 0.5 * (self._edges[1:] - self._edges[:-1])
        wq = self._weights / half[:, None]  # reference Gauss weights per panel

        for j in range(self.depth + 1):
            self._values[0, j] = self._initial(rel, j)
        second = self._second(1.0 + rel, self.depth)
        for j in range(self.depth + 1):
            self._values[1, j] = second[j]

        self._at_integers[0] = self.coeff if self.power == 0 else np.nan
        self._at_integers[1] = self.start
        y_m = float(self._second(np.array(2.0), 0)[0])
        self._at_integers[2] = y_m

        with np.errstate(over='ignore', invalid='ignore'):
            for m in range(2, self.n_intervals):
                t = m + rel
                g = np.power(t, self.a - 1.0) * self._values[m - 1, 0]
                partial = half[:, None] * (g @ self._integ.T)
                totals = half * (g * wq).sum(axis=1)
                before = np.concatenate(([0.0], np.cumsum(totals)[:-1]))
                anchor = m ** self.a * y_m
                self._values[m, 0] = np.power(t, -self.a) * (anchor + self.b * (before[:, None] + partial))
                for j in range(self.depth):
                    self._values[m, j + 1] = (self.b * self._values[m - 1, j]
                                              - (self.a + j) * self._values[m, j]) / t
                y_m = (m + 1.0) ** (-self.a) * (anchor + self.b * math.fsum(totals))
                self._at_integers[m + 1] = y_m

    # ------------------------------------------------------------ evaluation

    @property
    def intervals(self):
        return [(float(m), float(m + 1)) for m in range(self.n_intervals)]

    @property
    def nu(self):
        return int(math.floor(self.kappa))

    def _locate(self, v):
        """Interval index, panel index and local coordinate for v in [0, domain_max]."""
        m = np.floor(v).astype(int)
        top = m >= self.n_intervals
        m[top] = self.n_intervals - 1
        r = v - m
        k = np.searchsorted(self._edges, r, side='right') - 1
        k = np.clip(k, 0, len(self._edges) - 2)
        lo, hi = self._edges[k], self._edges[k + 1]
        x = 2.0 * (r - lo) / (hi - lo) - 1.0
        return m, k, x

    def __call__(self, v, j=0):
        return self.evaluate(v, j)

    def evaluate(self, v, j=0):
        """
        Derivative j of the solution at v (scalar or array).

        Args:
            v: Point(s); negative values give 0.
            j: Derivative order, 0 <= j <= depth.

        Returns:
            float for scalar input, ndarray otherwise.
        """
        if j < 0 or j > self.depth:
            raise DepthError(f"derivative {j} requested, {self.label} carries {self.depth}")
        scalar = np.ndim(v) == 0
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if np.any(v > self.domain_max * (1 + 1e-15)):
            raise DomainError(f"{self.label} is solved up to v={self.domain_max}, got {v.max()}")
        if np.any(np.isnan(v)):
            raise DomainError("cannot evaluate at NaN")
        out = np.zeros_like(v)

        first = (v >= 0) & (v < 1)
        if np.any(first):
            vals = self._initial(v[first], j)
            if np.any(~np.isfinite(vals)):
                raise DomainError(f"{self.label}^({j}) is singular at v=0")
            out[first] = vals
        second = (v >= 1) & (v < 2) & (self.n_intervals >= 2)
        if np.any(second):
            out[second] = self._second(v[second], j)[j]
        rest = v >= 2
        if np.any(rest):
            m, k, x = self._locate(v[rest])
            coef = self._coef[m, j, k]
            out[rest] = (leg.legvander(x, self.order - 1) * coef).sum(axis=1)
        return float(out[0]) if scalar else out

    def left_limit(self, m, j=0):
        """Derivative j at integer m approached from the left."""
        if m < 1 or m > self.n_intervals:
            raise DomainError(f"left limit needs 1 <= m <= {self.n_intervals}")
        if m == 1:
            return float(self._initial(np.array(1.0), j))
        if m == 2:
            return float(self._second(np.array(2.0), j)[j])
        coef = self._coef[m - 1, j, -1]
        return float(leg.legval(1.0, coef))

    # ------------------------------------------------------------ integrals

    def antiderivative(self, weight):
        """
        Return G(w) = int_0^w weight(t)*y(t) dt as a vectorised callable.

        `weight` must accept numpy arrays (real or complex). The innermost
        panel at the origin is integrated analytically against the power
        initial condition.
        """
        return _Antiderivative(self, weight)

    def integrate(self, weight=None, lo=0.0, hi=None):
        hi = self.domain_max if hi is None else hi
        if weight is None:
            weight = np.ones_like
        anti = self.antiderivative(weight)
        return anti(hi) - anti(lo)

    def residual(self, j=0, margin=0.0):
        """
        Largest relative DDE residual at interior nodes of intervals >= 1.

        The derivative is taken from the Legendre interpolant of y^(j) on each
        panel, so this measures quadrature accuracy rather than the exact
        recursion used to carry derivatives. Panels closer than `margin` to the
        left integer of their interval are skipped.
        """
        if j > self.depth:
            raise DepthError(f"residual of derivative {j} needs depth >= {j}")
        keep = self._edges[:-1] >= margin
        width = (self._edges[1:] - self._edges[:-1])[keep]
        worst = 0.0
        for m in range(1, self.n_intervals):
            t = m + self._rel[keep]
            coef = self._coef[m, j, keep]
            dcoef = leg.legder(coef, axis=1)
            x = np.polynomial.legendre.leggauss(self.order)[0]
            dy = (dcoef @ leg.legvander(x, self.order - 2).T) * (2.0 / width)[:, None]
            y = self._values[m, j, keep]
            delayed = self._values[m - 1, j, keep]
            res = t * dy + (self.a + j) * y - self.b * delayed
            scale = np.abs(t * dy) + np.abs((self.a + j) * y) + np.abs(self.b * delayed)
            ok = np.isfinite(res) & np.isfinite(scale) & (scale > 0)
            if np.any(ok):
                worst = max(worst, float(np.max(np.abs(res[ok]) / scale[ok])))
        return worst


class _Antiderivative:

    def __init__(self, sol, weight):
        self.sol = sol
        self.weight = weight
        edges = sol._edges
        self.half = 0.5 * (edges[1:] - edges[:-1])
        t = np.arange(sol.n_intervals)[:, None, None] + sol._rel[None]
        g = np.asarray(weight(t)) * sol._values[:, 0]
        coef = g @ sol._vinv.T
        self.icoef = leg.legint(coef, lbnd=-1, axis=2)
        totals = self.icoef.sum(axis=2) * self.half[None, :]
        self.eps = edges[1]
        totals[0, 0] = self._origin(np.array(self.eps))
        flat = totals.ravel()
        self.cum = np.concatenate(([0.0], np.cumsum(flat)[:-1])).reshape(totals.shape)

    def _origin(self, w):
        # int_0^w C t**p weight(t) dt with weight frozen at the midpoint
        sol = self.sol
        if sol.coeff == 0.0:
            return np.zeros_like(w) * self.weight(w)
        p1 = sol.power + 1.0
        return sol.coeff * np.power(w, p1) / p1 * np.asarray(self.weight(0.5 * w))

    def __call__(self, w):
        scalar = np.ndim(w) == 0
        w = np.atleast_1d(np.asarray(w, dtype=float))
        if np.any(w > self.sol.domain_max * (1 + 1e-15)):
            raise DomainError(f"integral beyond v={self.sol.domain_max}")
        out = np.zeros(w.shape, dtype=self.icoef.dtype)
        pos = w > 0
        if np.any(pos):
            m, k, x = self.sol._locate(w[pos])
            part = (leg.legvander(x, self.sol.order) * self.icoef[m, k]).sum(axis=1)
            val = self.cum[m, k] + self.half[k] * part
            origin = (m == 0) & (k == 0)
            if np.any(origin):
                val[origin] = self._origin(w[pos][origin])
            out[pos] = val
        return out[0] if scalar else out


# ---------------------------------------------------------------- solvers

def solve_h(kappa, v_max, depth, **layout):
    """h_kappa: v*h' = kappa*h(v-1), h = 1 on [0, 1]."""
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return PiecewiseSolution(kappa, 0.0, kappa, 1.0, v_max, depth, label=f"h_{kappa:g}", **layout)


def solve_phi(kappa, v_max, depth, **layout):
    """
    phi_kappa: v*phi' + theta*phi = kappa*phi(v-1), phi = v**-theta/Gamma(1-theta) on (0, 1].

    theta is the fractional part of kappa, so for integer kappa this is h_kappa.
    """
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    theta = kappa - math.floor(kappa)
    return PiecewiseSolution(kappa, theta, kappa, _rgamma(1.0 - theta), v_max, depth,
                             label=f"phi_{kappa:g}", **layout)


def solve_rho_kappa(kappa, v_max, depth=1, **layout):
    """Convolution power rho_kappa; kappa = 1 gives the Dickman function."""
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return PiecewiseSolution(kappa, 1.0 - kappa, -kappa, _rgamma(kappa), v_max, depth,
                             label=f"rho_{kappa:g}", **layout)


def solve_dickman(v_max, depth=1, **layout):
    return solve_rho_kappa(1.0, v_max, depth, **layout)


def solve_buchstab(v_max, depth=1, **layout):
    """Buchstab omega: (v*omega)' = omega(v-1), omega = 1/v on [1, 2], 0 below 1."""
    return PiecewiseSolution(1.0, 1.0, 1.0, 0.0, v_max, depth, label="omega",
                             start=1.0, **layout)


def psi_deriv(sol, j, v):
    """psi_kappa^(j)(v) = phi_kappa^(nu+j)(v), nu = floor(kappa)."""
    order = sol.nu + j
    if j < 0 or order > sol.depth:
        raise DepthError(f"psi^({j}) needs depth {order}, solution carries {sol.depth}")
    return sol.evaluate(v, order)


class PsiOffset:
    """
    psi_kappa(v) - e**(-gamma*kappa) for integer kappa, in multiple precision.

    The difference decays like R_kappa(v) and is lost to cancellation in
    double precision long before v = 40. Here h_kappa is carried as a Taylor
    series about the midpoint c = m + 1/2 of every unit interval; with p the
    series of the previous interval (same local variable t = v - c),

        a_{k+1} = (kappa*p_k - k*a_k) / (c*(k+1)),

    and a_0 matches h_kappa(m) from the left. Each series converges with
    ratio at most 1/3 on its interval, since the pieces are singular only at
    the integers below m.
    """

    def __init__(self, kappa, v_max, dps=110, terms=280):
        if kappa <= 0 or not float(kappa).is_integer():
            raise DomainError(f"PsiOffset needs a positive integer kappa, got {kappa}")
        self.kappa = int(kappa)
        self.n_intervals = max(1, int(math.ceil(v_max)))
        self.domain_max = float(self.n_intervals)
        self.dps = dps
        k = self.kappa
        with mpmath.workdps(dps):
            half = mpmath.mpf(1) / 2
            pieces = [[mpmath.mpf(1)] + [mpmath.mpf(0)] * (terms - 1)]
            for m in range(1, self.n_intervals):
                c = m + half
                p = pieces[-1]
                a = [mpmath.mpf(0)] * terms
                for i in range(terms - 1):
                    a[i + 1] = (k * p[i] - i * a[i]) / (c * (i + 1))
                a[0] = mpmath.polyval(p[::-1], half) - mpmath.polyval(a[::-1], -half)
                pieces.append(a)
            # coefficients of the kappa-th derivative, highest power first for polyval
            self._deriv = [[a[i] * mpmath.ff(i, k) for i in range(k, terms)][::-1] for a in pieces]
            self._limit = mpmath.exp(-mpmath.euler * k)
        logger.debug("psi offset for kappa=%d: %d intervals at %d digits", k, self.n_intervals, dps)

    def __call__(self, v):
        """The offset at v as a float; the right limit at an integer."""
        if not 0 <= v <= self.domain_max:
            raise DomainError(f"psi offset is built on [0, {self.domain_max:g}], got {v}")
        m = min(int(math.floor(v)), self.n_intervals - 1)
        with mpmath.workdps(self.dps):
            t = mpmath.mpf(v) - m - mpmath.mpf(1) / 2
            return float(mpmath.polyval(self._deriv[m], t) - self._limit)


# ------------------------------------------------------------------ jumps

@dataclass(frozen=True)
class JumpTable:
    kappa: int
    depth: int
    entries: dict = field(default_factory=dict)

    def get(self, m, j):
        if m > j:
            return 0.0
        return self.entries[(m, j)]


def jumps(kappa, depth, sol=None):
    """
    delta_{kappa,m,j} = phi^(j)(m) - phi^(j)(m-0) for 1 <= m <= j <= depth.

    One-sided limits follow exactly from the differentiated equation,
    phi^(j)(m+-) = (kappa*phi^(j-1)((m-1)+-) - (j-1)*phi^(j-1)(m+-))/m,
    with phi continuous at every m >= 1.
    """
    if kappa <= 0 or not float(kappa).is_integer():
        raise DomainError(f"jumps are defined for positive integer kappa, got {kappa}")
    if depth < 1:
        raise DomainError("depth must be >= 1")
    kappa = int(kappa)
    if sol is None:
        sol = solve_h(kappa, depth + 1, 0)
    right = np.zeros((depth + 1, depth + 1))
    left = np.zeros((depth + 1, depth + 1))
    right[0, 0] = 1.0
    for m in range(1, depth + 1):
        right[m, 0] = left[m, 0] = sol._at_integers[m]
        for j in range(1, depth + 1):
            right[m, j] = (kappa * right[m - 1, j - 1] - (j - 1) * right[m, j - 1]) / m
            left[m, j] = (kappa * left[m - 1, j - 1] - (j - 1) * left[m, j - 1]) / m
    entries = {}
    for j in range(1, depth + 1):
        for m in range(1, depth + 1):
            entries[(m, j)] = float(right[m, j] - left[m, j]) if m <= j else 0.0
    return JumpTable(kappa, depth, entries)


# ----------------------------------------------------------- saddle roots

def xi(v):
    """Positive root of e**xi = 1 + v*xi (xi(1) = 0)."""
    if v < 1:
        raise DomainError(f"xi is defined for v >= 1, got {v}")
    if v == 1:
        return 0.0
    lo, hi = math.log(v), 2.0 * math.log(v) + 2.0
    x = math.log(v * math.log(v)) if v > math.e else 0.5 * (lo + hi)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for _ in range(200):
        f = math.expm1(x) - v * x
        if f > 0:
            hi = x
        else:
            lo = x
        slope = math.exp(x) - v
        nxt = x - f / slope if slope != 0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 4e-16 * nxt:
            x = nxt
            break
        x = nxt
    res = abs(math.expm1(x) - v * x)
    if res >= 1e-12 * (1.0 + v * x):
        raise ConvergenceError(f"xi({v}) residual {res:.3e}")
    return x


def _zeta0_seed(v):
    x = xi(v)
    return complex(x + math.pi ** 2 / (2 * x * x), -math.pi * x / (x - 1.0))


def _zeta0_newton(v, seed, max_iter=100):
    z = complex(seed)
    for it in range(max_iter):
        ez = cmath.exp(z)
        step = (ez - 1.0 + v * z) / (ez + v)
        lam = 1.0
        while True:
            cand = z - lam * step
            if -2 * math.pi < cand.imag < 0:
                break
            lam *= 0.5
            if lam < 1e-12:
                raise ConvergenceError(f"Newton for zeta0({v}) left the strip -2pi < Im < 0")
        z = cand
        if abs(lam * step) <= 1e-15 * (1.0 + abs(z)):
            break
    else:
        raise ConvergenceError(f"Newton for zeta0({v}) did not converge")
    res = abs(cmath.exp(z) - 1.0 + v * z)
    if res >= 1e-10 * (1.0 + v * abs(z)):
        raise ConvergenceError(f"zeta0({v}) residual {res:.3e}")
    logger.debug("zeta0(%g) = %s after %d iterations", v, z, it + 1)
    return z


@lru_cache(maxsize=1)
def _continuation_roots():
    count = int(round((ZETA0_ANCHOR - ZETA0_FLOOR) / ZETA0_STEP))
    roots = [_zeta0_newton(ZETA0_ANCHOR, _zeta0_seed(ZETA0_ANCHOR))]
    for k in range(1, count + 1):
        roots.append(_zeta0_newton(ZETA0_ANCHOR - k * ZETA0_STEP, roots[-1]))
    return tuple(roots)


@lru_cache(maxsize=4096)
def zeta0(v):
    """
    Root of e**z = 1 - v*z with -2pi < Im z < 0 (the one nearest the real axis).

    Seeded by the large-v asymptotic formula from v = 5 upward; below 5 the
    root is continued down a fixed grid of step 0.05, which also extends it
    to 0.05 <= v < 1.
    """
    v = float(v)
    if v < ZETA0_FLOOR:
        raise DomainError(f"zeta0 is continued down to v={ZETA0_FLOOR}, got {v}")
    if v >= ZETA0_ANCHOR:
        return _zeta0_newton(v, _zeta0_seed(v))
    roots = _continuation_roots()
    k = int(math.floor((ZETA0_ANCHOR - v) / ZETA0_STEP + 1e-9))
    return _zeta0_newton(v, roots[min(k, len(roots) - 1)])


def zeta_minus1(v):
    return zeta0(v).conjugate()


# ------------------------------------------------------ envelopes, phases

def big_phi(kappa, v, s, form='exp'):
    """
    Phi_kappa(v, s) = exp(-v*s - kappa*I(s)) / sqrt(2*pi*v*(1 - 1/s)).

    form='rho_hat' evaluates the equivalent e**(gamma*kappa - v*s)/rho_hat(-s)**kappa
    variant; it uses a principal complex power, so it matches the default
    only when the branches agree (integer kappa or real s).
    """
    s = complex(s)
    if s == 0 or s == 1:
        raise DomainError(f"Phi_kappa is singular at s={s}")
    den = cmath.sqrt(2.0 * math.pi * v * (1.0 - 1.0 / s))
    if form == 'exp':
        return cmath.exp(-v * s - kappa * int_I(s)) / den
    if form == 'rho_hat':
        return cmath.exp(EULER_GAMMA * kappa - v * s) / (rho_hat(-s) ** kappa * den)
    raise ValueError(f"unknown form {form!r}")


def r_kappa(kappa, v):
    """Decay envelope R_kappa(v) = |Phi_kappa(v, zeta0(v/kappa))|."""
    if v < 1:
        raise DomainError(f"R_kappa is defined for v >= 1, got {v}")
    return abs(big_phi(kappa, v, zeta0(v / kappa)))


def phase(kappa, v):
    return cmath.phase(big_phi(kappa, v, zeta0(v / kappa)))


def r_kappa_integral_form(kappa, v, tol=1e-12):
    """(1/sqrt v) * exp(-Re int_kappa^v zeta0(t/kappa) dt), by panel doubling."""
    x, w = leg.leggauss(16)

    def quad(panels):
        edges = np.linspace(kappa, v, panels + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
            total += rad * sum(wi * zeta0((mid + rad * xi_) / kappa).real
                               for xi_, wi in zip(x, w))
        return total

    panels = max(1, int(math.ceil(abs(v - kappa))))
    prev = quad(panels)
    for _ in range(6):
        panels *= 2
        cur = quad(panels)
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            break
        prev = cur
    return math.exp(-cur) / math.sqrt(v)


def rho_saddle(kappa, v):
    """
    Saddle-point approximation to rho_kappa(v) at s = xi(v/kappa):

        exp(gamma*kappa - v*xi + kappa*I(xi)) / sqrt(2*pi*(v*(1 - 1/xi) + kappa/xi))

    Relative error O(1/v).
    """
    s = xi(v / kappa)
    if s <= 0.0:
        raise DomainError(f"rho_saddle needs v > kappa, got v={v}, kappa={kappa}")
    curvature = v * (1.0 - 1.0 / s) + kappa / s
    return math.exp(EULER_GAMMA * kappa - v * s + kappa * int_I(s).real) / math.sqrt(2.0 * math.pi * curvature)


def envelope_h(v):
    """H(v) = exp(v/log(2v)**2), the scale of rho_kappa/R_kappa."""
    return math.exp(v / math.log(2.0 * v) ** 2)
