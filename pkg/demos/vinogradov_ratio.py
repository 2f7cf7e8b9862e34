"""R(N0) against (1/2) S(N0) N0^2 for a few odd N0 near 10^6."""

from goldbachlab.goldbach import classical_R_many
from goldbachlab.primes import sieve_primes

N0s = [10**6 + 1, 10**6 + 3, 10**6 + 101, 10**6 + 999]
table = sieve_primes(2, max(N0s) + 1)
for rep in classical_R_many(N0s, table):
    print(f"N0={rep.N0}  R={rep.weighted_count:.6e}  main={rep.main_term:.6e}  ratio={rep.ratio:.5f}")
