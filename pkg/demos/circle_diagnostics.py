"""Orthogonality residual, bound health ratios and negligibility at X = 10^3, 10^4, 10^5."""

from goldbachlab.circle import CircleSetup, bound_diagnostics, orthogonality_check
from goldbachlab.expsum import build_S_A
from goldbachlab.families import FamilyConfig
from goldbachlab.primes import sieve_primes

table = sieve_primes(2, 2 * 10**6)
for k in (3, 4, 5):
    X = 10**k
    cfg = FamilyConfig(a0=7, c0=1.05, k=k, N0=4 * X + 1)
    st = CircleSetup(cfg, table)
    res = orthogonality_check(build_S_A(cfg), st.c0, st.split.parts(), cfg.N0, X, size=len(build_S_A(cfg)))
    print(f"X=1e{k}  residual={res.residual:.2e}  M={res.M:.6e}")
    for name, v in sorted(bound_diagnostics(st).items()):
        print(f"    {name:12s} {v:.4e}")
