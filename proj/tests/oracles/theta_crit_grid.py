"""Regenerates theta_crit_grid.inc: theta_crit at 100 (M, N, m, n) points,
evaluated with mpmath at 50 digits."""
import random

import mpmath

mpmath.mp.dps = 50
rng = random.Random(7)
print("// generated by theta_crit_grid.py; {M, N, m, n, theta_crit}")
for _ in range(100):
    M = rng.randint(2, 5000)
    N = rng.randint(2, 5000)
    m = rng.randint(1, M - 1)
    n = rng.randint(1, N)
    v = mpmath.sqrt(2 * (m * mpmath.log(mpmath.mpf(M) / m) + n * mpmath.log(mpmath.mpf(N) / n)) / (m * n))
    print("{%d, %d, %d, %d, %s}," % (M, N, m, n, mpmath.nstr(v, 20)))
