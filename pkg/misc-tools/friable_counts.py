import numpy as np
"""
Lists the y-friable integers up to x (no prime factor above y) and their
count Psi(x, y).

With y = 5 these are the numbers 2**i * 3**j * 5**k.
"""
x = 120
y = 5

primes = [p for p in range(2, y + 1) if all(p % q for q in range(2, p))]
nums = [1]
for p in primes:
	top = int(np.floor(np.log(x) / np.log(p)))
	nums = [n * p**e for n in nums for e in range(0, top + 1) if n * p**e <= x]
nums = np.array(sorted(nums))
u = np.log(x) / np.log(y)

print(nums)
print("Psi(" + str(x) + ", " + str(y) + ") =", len(nums), " u =", round(u, 4))
print("share of integers up to x:", len(nums) / x)
