#!/usr/bin/env python3
"""
Checks for the delay-differential solutions and the saddle roots.

Run with pytest, or directly: python test_dde_kernel.py
"""
import math
from functools import lru_cache

import numpy as np
import pytest
import sympy as sp

from dde_kernel import (
    PsiOffset, big_phi, envelope_h, jumps, phase, psi_deriv, r_kappa, r_kappa_integral_form,
    rho_saddle, solve_buchstab, solve_dickman, solve_h, solve_phi, solve_rho_kappa,
    xi, zeta0, zeta_minus1,
)
from friable_errors import DepthError, DomainError
from transforms import EULER_GAMMA, int_I


@lru_cache(maxsize=None)
def phi(kappa, v_max=12, depth=3):
    return solve_phi(kappa, v_max, depth)


@lru_cache(maxsize=None)
def dickman(v_max=30):
    return solve_dickman(v_max)


def lambert_zeta0(v):
    """zeta0(v) = 1/v - W_1(e**(1/v)/v), evaluated by sympy."""
    w = sp.LambertW(sp.Float(math.exp(1.0 / v) / v, 30), 1).evalf(30)
    return 1.0 / v - complex(w)


# ------------------------------------------------------- closed forms

def test_dickman_on_first_intervals():
    rho = dickman()
    for v in (0.3, 1.0, 1.25, 1.7, 2.0):
        expected = 1.0 if v <= 1 else 1.0 - math.log(v)
        assert abs(rho(v) - expected) < 1e-12, v
    assert abs(rho(2.0) - (1.0 - math.log(2.0))) < 1e-12


def test_dickman_known_values():
    rho = dickman()
    assert abs(rho(3.0) - 0.04860838829) < 1e-10
    assert abs(rho(10.0) / 2.77017183772596e-11 - 1.0) < 1e-6


def test_rho_2_at_two():
    rho2 = solve_rho_kappa(2.0, 4)
    assert abs(rho2(0.5) - 0.5) < 1e-14
    assert abs(rho2(2.0) - (4.0 - 4.0 * math.log(2.0))) < 1e-12
    assert abs(rho2(2.0) - 1.227) < 1e-3


def test_h_on_one_two():
    for kappa in (0.5, 1.0, 2.5):
        h = solve_h(kappa, 4, 1)
        for v in (1.1, 1.5, 1.9):
            assert abs(h(v) - (1.0 + kappa * math.log(v))) < 1e-12
            assert abs(h(v, 1) - kappa / v) < 1e-12


def test_phi_is_h_for_integer_kappa():
    for kappa in (1, 2, 3):
        h = solve_h(kappa, 12, 3)
        p = phi(float(kappa))
        v = np.linspace(0.0, 12.0, 241)
        for j in range(4):
            assert np.max(np.abs(h(v, j) - p(v, j))) == 0.0


def test_psi1_is_buchstab():
    omega = solve_buchstab(12)
    p = phi(1.0)
    v = np.linspace(1.0, 10.0, 181)
    assert np.max(np.abs(psi_deriv(p, 0, v) - omega(v))) < 1e-9
    assert abs(omega(1.5) - 1.0 / 1.5) < 1e-14
    # omega(3) = (1 + log 2)/3
    assert abs(omega(3.0) - (1.0 + math.log(2.0)) / 3.0) < 1e-12


def test_buchstab_tends_to_exp_minus_gamma():
    omega = solve_buchstab(20)
    assert abs(omega(20.0) - math.exp(-EULER_GAMMA)) < 1e-12


# ----------------------------------------------------------- residuals

def test_residual_integer_kappa():
    for kappa in (1.0, 2.0, 3.0):
        assert phi(kappa).residual(0) < 1e-10
    assert solve_h(2.0, 12, 2).residual(2) < 1e-10
    assert dickman().residual(0) < 1e-10
    assert solve_buchstab(12).residual(0) < 1e-10


def test_residual_integer_kappa_to_forty():
    # carried orders above nu decay into rounding noise, so stop at nu
    for kappa in (1, 2, 3):
        p = phi(float(kappa), 40, kappa)
        for j in range(kappa + 1):
            assert p.residual(j) < 1e-8, (kappa, j)
    assert dickman(40).residual(0) < 1e-8
    assert solve_buchstab(40).residual(0) < 1e-8


def test_residual_fractional_kappa():
    for kappa in (0.5, 1.5, 2.5):
        assert phi(kappa).residual(0, margin=0.125) < 1e-10
        assert solve_rho_kappa(kappa, 12).residual(0, margin=0.125) < 1e-10


def test_residual_fractional_kappa_to_forty():
    for kappa in (0.5, 1.5, 2.5):
        nu = int(kappa)
        p = phi(kappa, 40, nu)
        for j in range(nu + 1):
            assert p.residual(j, margin=0.125) < 1e-8, (kappa, j)
    for kappa in (0.5, 1.5, 2.0, 2.5, 3.0):
        assert solve_rho_kappa(kappa, 40).residual(0, margin=0.125) < 1e-8, kappa


def test_halving_the_panels_agrees():
    v = np.linspace(0.05, 20.0, 400)
    for kappa in (0.5, 1.0, 1.5, 2.0):
        coarse = solve_phi(kappa, 20, 1)(v)
        fine = solve_phi(kappa, 20, 1, panels=128)(v)
        assert np.all(np.abs(coarse - fine) < 1e-10 * np.maximum(1.0, np.abs(fine))), kappa


def test_depth_and_domain_errors():
    p = solve_phi(1.0, 5, 1)
    with pytest.raises(DepthError):
        p(2.5, 2)
    with pytest.raises(DepthError):
        psi_deriv(solve_phi(2.5, 5, 2), 1, 3.0)
    with pytest.raises(DomainError):
        p(5.5)
    with pytest.raises(DomainError):
        solve_h(-1.0, 5, 1)
    with pytest.raises(DomainError):
        solve_phi(1.0, 5, 17)


def test_negative_axis_is_zero():
    assert phi(1.5)(-0.5) == 0.0
    assert dickman()(-2.0) == 0.0


def test_left_limit_and_continuity():
    p = phi(2.0)
    for m in (1, 2, 3, 5):
        assert abs(p.left_limit(m) - p(float(m))) < 1e-11 * max(1.0, abs(p(float(m))))
    # h_2' jumps by 2 at v = 1
    assert abs(p(1.0, 1) - p.left_limit(1, 1) - 2.0) < 1e-12


# --------------------------------------------------------------- jumps

def test_jump_values_kappa_one():
    table = jumps(1, 3)
    assert table.get(1, 1) == pytest.approx(1.0, abs=1e-14)
    assert table.get(1, 2) == pytest.approx(-1.0, abs=1e-14)
    assert table.get(2, 2) == pytest.approx(0.5, abs=1e-14)
    assert table.get(3, 2) == 0.0


def test_jumps_match_solution():
    kappa = 2
    p = phi(float(kappa), 8, 4)
    table = jumps(kappa, 4, p)
    for j in range(1, 5):
        for m in range(1, j + 1):
            measured = p(float(m), j) - p.left_limit(m, j)
            scale = max(1.0, abs(p(float(m), j)))
            assert abs(measured - table.get(m, j)) < 1e-8 * scale, (m, j)


def test_jumps_need_integer_kappa():
    with pytest.raises(DomainError):
        jumps(1.5, 2)


# -------------------------------------------------------- saddle roots

def test_xi_root():
    assert xi(1.0) == 0.0
    for v in (1.5, 10.0, 1e3, 1e6):
        x = xi(v)
        assert x > 0
        assert abs(math.expm1(x) - v * x) < 1e-10 * (1.0 + v * x)
    with pytest.raises(DomainError):
        xi(0.5)


def test_zeta0_root_and_strip():
    for v in (0.05, 0.3, 1.0, 2.0, 4.97, 5.0, 20.0, 1e3):
        z = zeta0(v)
        assert -2 * math.pi < z.imag < -math.pi
        assert abs(np.exp(z) - 1.0 + v * z) < 1e-10 * (1.0 + v * abs(z))
    with pytest.raises(DomainError):
        zeta0(0.01)
    assert zeta_minus1(2.0) == zeta0(2.0).conjugate()


def test_zeta0_matches_lambert_w():
    for v in (0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 20.0, 100.0, 1000.0):
        assert abs(zeta0(v) - lambert_zeta0(v)) < 1e-9 * (1.0 + abs(zeta0(v))), v


def test_zeta0_asymptotic_formula():
    for v in (5.0, 20.0, 100.0, 1000.0):
        x = xi(v)
        approx = complex(x + math.pi ** 2 / (2 * x * x), -math.pi * x / (x - 1.0))
        assert abs(zeta0(v) - approx) <= 50.0 / x ** 3


def test_big_phi_forms_agree():
    for s in (1.7 - 0.4j, 2.5 + 1.0j):
        a = big_phi(2.0, 6.0, s)
        b = big_phi(2.0, 6.0, s, form='rho_hat')
        assert abs(a - b) < 1e-12 * abs(a)
    a = big_phi(1.5, 6.0, 2.3)
    b = big_phi(1.5, 6.0, 2.3, form='rho_hat')
    assert abs(a - b) < 1e-12 * abs(a)
    with pytest.raises(DomainError):
        big_phi(1.0, 2.0, 1.0)


def test_r_kappa_integral_form_differs_by_constant():
    # both forms share the exponent up to its value at v = kappa
    for kappa in (1.0, 2.0):
        ratios = []
        for v in (3.0, 8.0, 15.0):
            z = zeta0(v / kappa)
            curvature = abs(np.sqrt(2.0 * math.pi * (1.0 - 1.0 / z)))
            ratios.append(r_kappa(kappa, v) * curvature / r_kappa_integral_form(kappa, v))
        z1 = zeta0(1.0)
        expected = math.exp(-kappa * (z1 + int_I(z1)).real)
        for r in ratios:
            assert abs(r / expected - 1.0) < 1e-8


def test_psi_oscillates_within_envelope():
    for kappa in (1, 2):
        offset = PsiOffset(kappa, 40)
        v = np.linspace(10.0, 40.0, 601)
        diff = np.array([offset(t) for t in v])
        env = np.array([r_kappa(kappa, t) for t in v])
        assert np.all(np.isfinite(diff))
        assert np.max(np.abs(diff) / env) <= 100.0
        sign = np.sign(diff)
        for lo in np.arange(10.0, 37.0001, 0.5):
            window = sign[(v >= lo) & (v <= lo + 3.0)]
            assert np.any(window[1:] != window[:-1]), (kappa, lo)


def test_psi_offset_matches_double_precision():
    omega = solve_buchstab(12)
    one = PsiOffset(1, 12)
    two = PsiOffset(2, 12)
    p = phi(2.0)
    for v in np.linspace(1.5, 10.0, 35):
        assert abs(one(v) + math.exp(-EULER_GAMMA) - omega(v)) < 1e-11, v
        assert abs(two(v) + math.exp(-2 * EULER_GAMMA) - psi_deriv(p, 0, v)) < 1e-9, v


def test_psi_offset_needs_integer_kappa():
    with pytest.raises(DomainError):
        PsiOffset(1.5, 10)
    with pytest.raises(DomainError):
        PsiOffset(1, 10)(10.5)


def test_phase_is_finite():
    for v in (2.0, 5.0, 9.0):
        assert -math.pi <= phase(1.0, v) <= math.pi


def test_rho_saddle_accuracy():
    rho = dickman()
    for v in (10.0, 20.0):
        assert abs(rho_saddle(1.0, v) / rho(v) - 1.0) < 0.05
    rho2 = solve_rho_kappa(2.0, 20)
    assert abs(rho_saddle(2.0, 20.0) / rho2(20.0) - 1.0) < 0.1
    with pytest.raises(DomainError):
        rho_saddle(1.0, 1.0)


def test_envelope_h():
    assert envelope_h(5.0) == pytest.approx(math.exp(5.0 / math.log(10.0) ** 2))


if __name__ == "__main__":
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith('test_')]
    print(f"Running {len(tests)} kernel checks...")
    for test in tests:
        test()
        print(f"  OK: {test.__name__}")
    print("\nAll kernel checks passed!")
