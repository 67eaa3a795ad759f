"""
The scalar fixed-point map and the rank thresholds
==================================================

The map phi(a) = 1 - exp(-d a^(k-1)) and its potential Phi drive the
whole analysis: the full-rank threshold d_k is where the global maximum
of Phi leaves a = 0, and d_k^* is where a positive fixed point first
appears (the 2-core threshold).
"""

from xorlab.theory import Phi, fixed_points, threshold_dk, threshold_dk_star, threshold_report

print("thresholds per row weight k")
print(f"{'k':>3} {'d_k*':>10} {'d_k':>10} {'d_k / k':>10}")
for k in range(3, 7):
    dk, dks = threshold_dk(k), threshold_dk_star(k)
    print(f"{k:>3} {dks:>10.6f} {dk:>10.6f} {dk / k:>10.6f}")

print()
print("fixed points of phi across densities at k = 3")
print(f"{'d':>6} {'alpha_s':>9} {'alpha_f':>9} {'Phi(0)':>9} {'Phi(a_f)':>9} regime")
for d in [2.0, 2.46, 2.6, 2.7538, 2.9, 3.3]:
    rep = threshold_report(d, 3)
    print(
        f"{d:>6.3f} {rep.alpha_s:>9.5f} {rep.alpha_f:>9.5f}"
        f" {rep.phi_at_alpha_u:>9.5f} {rep.phi_at_alpha_f:>9.5f} {rep.regime}"
    )

print()
print("the maximizer of Phi switches exactly at d_k:")
dk = threshold_dk(3)
for d in [dk - 0.01, dk + 0.01]:
    a_f = fixed_points(d, 3)[2]
    side = "alpha=0" if Phi(d, 3, 0.0) >= Phi(d, 3, a_f) else "alpha_f"
    print(f"  d = {d:.4f}: global max at {side}")
