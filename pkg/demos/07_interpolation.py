"""
The interpolation family and its endpoint nullities
===================================================

A one-parameter family trades the weight-k rows (Poisson-thinned as
theta grows) for unary rows at rate d * theta * alpha_f^(k-1).  At
theta = 0 it matches the pinned ensemble up to Poissonization of the
row count; at theta = 1 the nullity is just the number of untouched
columns, concentrating at n * exp(-d alpha_f^(k-1)).  Above d_k the
pinned ensemble's nullity also stays above Phi(alpha_f) * n.
"""
import math

from xorlab.harness import ExperimentConfig, exp_interpolation
from xorlab.theory import Phi, fixed_points, threshold_dk

N, D, TRIALS = 8000, 3.0, 3

alpha_f = fixed_points(D, 3)[2]
print(f"d = {D}, k = 3: alpha_f = {alpha_f:.5f}, "
      f"exp(-d alpha_f^2) = {math.exp(-D * alpha_f**2):.5f}")

cfg = ExperimentConfig(
    experiment="interpolate",
    n=N,
    k=3,
    q=2,
    d=D,
    theta_grid=[0.0, 0.5, 1.0],
    trials=TRIALS,
    seed=17,
    workers=2,
)
rows = exp_interpolation(cfg).summary.rows
print(f"\n{'theta':>6} {'nullity/n':>10}")
for row in rows:
    print(f"{row['theta']:>6.1f} {row['mean_nullity_over_n']:>10.5f}")
print(f"{'pinned':>6} {rows[0]['pinned_nullity_over_n']:>10.5f}")

print()
d_above = 3.3
cfg2 = ExperimentConfig(
    experiment="interpolate", n=N, k=3, q=2, d=d_above,
    theta_grid=[0.0], trials=TRIALS, seed=18, workers=2,
)
row = exp_interpolation(cfg2).summary.rows[0]
a_f = row["alpha_f"]
print(f"above the threshold (d = {d_above} > d_k = {threshold_dk(3):.4f}):")
print(f"  pinned nullity/n = {row['pinned_nullity_over_n']:.5f}")
print(f"  lower bound Phi(alpha_f) = {Phi(d_above, 3, a_f):.5f}")
