"""
2-core peeling and the rank-deficiency witness
==============================================

Repeatedly removing columns with at most one nonzero entry (along with
their rows) leaves the 2-core.  Below the critical density the core is
empty; above the full-rank threshold it has more rows than columns,
which certifies rank deficiency without any elimination.
"""
from xorlab.ensemble import EnsembleParams, gen_base
from xorlab.peel import two_core
from xorlab.sparsemat import rank
from xorlab.theory import threshold_dk, threshold_dk_star

N, K = 20_000, 3
print(f"single instances at n = {N}, k = {K}")
print(f"{'d':>6} {'core rows':>10} {'core cols':>10} {'excess':>8}")
for d in [2.0, 2.3, 2.5, 2.7, 2.9, 3.3]:
    p = EnsembleParams(n=N, k=K, q=2, d=d, seed=1)
    res = two_core(gen_base(p, p.make_rng()))
    print(f"{d:>6.2f} {res.core_rows:>10} {res.core_cols:>10} {res.excess:>8}")

print()
print(f"theory: core appears at d_k* = {threshold_dk_star(K):.4f},")
print(f"        excess turns positive at d_k = {threshold_dk(K):.4f}")

print()
print("positive excess certifies rank < rows (checked exactly at n = 400):")
p = EnsembleParams(n=400, k=3, q=2, d=3.3, seed=2)
A = gen_base(p, p.make_rng())
res = two_core(A)
print(f"  excess = {res.excess}, rank = {rank(A)} vs rows = {A.n_rows}")
