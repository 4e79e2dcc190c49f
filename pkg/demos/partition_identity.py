"""The feedback measure on boxes small enough to enumerate.

For each box the normalization is computed twice: directly as a sum of
Boltzmann weights at the configuration's own temperature m^2 / n^(2a),
and through the rewrite as a sum over magnetization levels of fixed-
temperature partition functions.  The two must agree to rounding.  The
same enumeration gives the law of the feedback temperature and the
deviation bounds on how much mass sits away from the critical point.
"""

import numpy as np

from soc_ising import (
    T_CRITICAL,
    build_box,
    deviation_bound_check,
    exact_mu_n,
    exact_mu_prime,
)

A_VALUES = (1.8, 1.99)

print("== partition identity ==")
for n in (1, 2, 3, 4):
    g = build_box(n)
    for a in A_VALUES:
        mu = exact_mu_n(g, a)
        diff = abs(mu.z_direct - mu.z_rewrite)
        print(f"  n = {n}  a = {a:5.2f}   Z = {mu.z_direct:.12g}   "
              f"|direct - rewrite| = {diff:.3e}")

print()
print("== law of the feedback temperature, n = 4 ==")
g = build_box(4)
for a in A_VALUES:
    mu = exact_mu_n(g, a)
    t_max = float(mu.temps.max())
    below = float(mu.probs[mu.temps <= T_CRITICAL].sum())
    print(f"  a = {a:5.2f}   max reachable T = {t_max:.4f}   "
          f"P(T <= T_c) = {below:.6f}")

print()
print("== conditioned variant: weight of the aligned configuration ==")
for a in A_VALUES:
    mu = exact_mu_n(g, a)
    mup = exact_mu_prime(g, a)
    top = int(np.argmax(mu.mags))
    print(f"  a = {a:5.2f}   mu(all plus) = {mu.probs[top]:.10f}   "
          f"mu'(all plus) = {mup.probs[int(np.argmax(mup.mags))]:.10f}")

print()
print("== deviation bounds (upper bounds on off-critical mass) ==")
for a in A_VALUES:
    for eps in (0.1, 0.5):
        rep = deviation_bound_check(g, a, eps)
        print(f"  a = {a:5.2f}  eps = {eps:4.2f}   "
              f"above: {rep.lhs_above:.3e} <= {rep.rhs_above:.3e}   "
              f"below: {rep.lhs_below:.3e} <= {rep.rhs_below:.3e}")
