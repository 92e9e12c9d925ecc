import sympy as sp

"""
Closed forms of the first expansion coefficients.

For the Moebius function a(s) = 1/((1+s) * s*zeta(1+s)); writing zeta(1+s)
through the Stieltjes constants gives a_j in terms of gamma_n.
c_j(kappa) are the Taylor coefficients of rho_hat(s)**-kappa with
rho_hat(s) = exp(gamma + I(-s)) and I(s) = sum s**n/(n * n!).
"""
s, kappa = sp.symbols('s kappa')
order = 4

s_zeta = 1 + sum((-1)**n * sp.stieltjes(n) * s**(n + 1) / sp.factorial(n) for n in range(order))
a_mu = sp.series(1 / ((1 + s) * s_zeta), s, 0, order).removeO()
a_coeffs = [sp.expand(a_mu.coeff(s, j)) for j in range(order)]

I_minus = sum((-s)**n / (n * sp.factorial(n)) for n in range(1, order + 1))
c_series = sp.series(sp.exp(-kappa * (sp.EulerGamma + I_minus)), s, 0, order).removeO()
c_coeffs = [sp.factor(c_series.coeff(s, j)) for j in range(order)]

print("a_j for the Moebius function:")
for j, a in enumerate(a_coeffs):
	print("  a_" + str(j) + " =", a, "  ~", sp.N(a, 15))

print("\nc_j(kappa):")
for j, c in enumerate(c_coeffs):
	print("  c_" + str(j) + " =", c)
print("\nc_j at kappa = 1:", [sp.N(c.subs(kappa, 1), 15) for c in c_coeffs])
