import sympy as sp

"""
Where the Euler product for (-k)**omega(n) vanishes at s = 1.

The local factor of B at p is (1 - k/(p-1)) * (1 - 1/p)**-k, so a_0 = B(1)
is zero exactly when k + 1 is a prime. Prints the k up to k_max for which
that happens next to the k with k - 1 prime.
"""
k, p = sp.symbols('k p', positive=True)
k_max = 12

local = (1 - k / (p - 1)) * (1 - 1 / p)**(-k)
# (1 - 1/p)**-k never vanishes
roots = sp.solve(sp.Eq(1 - k / (p - 1), 0), p)
print("local factor:", sp.simplify(local))
print("vanishes at p =", roots)

zeros = [n for n in range(1, k_max + 1) if any(sp.isprime(r.subs(k, n)) for r in roots)]
shifted = [n for n in range(1, k_max + 1) if sp.isprime(n - 1)]
print("k with a_0 = 0:   ", zeros)
print("k with k-1 prime: ", shifted)
