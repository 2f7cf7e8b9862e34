"""Mixed representations p1 + p2 + p3 = N0 with p1 missing a digit, p2 Piatetski-Shapiro, p3 = x^2 + y^2 + 1."""

from goldbachlab.families import FamilyConfig, construct_window
from goldbachlab.goldbach import mixed_representation
from goldbachlab.primes import sieve_primes

table = sieve_primes(2, 10**6)
for N0 in range(200_001, 200_041, 2):
    cfg = FamilyConfig(a0=7, c0=1.05, k=5, N0=N0)
    rep = mixed_representation(N0, cfg, table)
    print(f"N0={N0}  window={construct_window(cfg).B_lo}..  raw={rep.raw_count:3d}  weighted={rep.weighted_count:.1f}")
