"""Exactness tour on tiny boxes.

Everything here is computed by full enumeration, so the reported errors
are pure floating-point residue: the spin marginal of the coupled bond
law against the plus-boundary Ising measure, and the dual pushforward of
the wired random-cluster law against the free law on the dual box.
"""

import numpy as np

from soc_ising import (
    T_CRITICAL,
    dual_parameter,
    duality_check,
    es_pushforward_check,
    p_critical,
    t_to_p,
)

N = 3

print(f"== coupling marginals on the side-{N} box ==")
for t in (0.5, 1.0, T_CRITICAL, 3.0, 6.0):
    spin_err, bond_err = es_pushforward_check(N, t)
    print(f"  T = {t:8.5f}  p = {t_to_p(t):.5f}   "
          f"spin err {spin_err:.3e}   bond err {bond_err:.3e}")

print()
print(f"== dual pushforward, wired side-{N} -> free side-{N - 1} ==")
for q in (1.0, 2.0):
    pc = p_critical(q)
    print(f"  q = {q}:  self-dual point p_c = {pc:.12f}")
    for p in (0.3, pc, 0.8):
        err = duality_check(N, p, q)
        p_star = dual_parameter(p, q)
        back = dual_parameter(p_star, q)
        print(f"    p = {p:.6f}  p* = {p_star:.6f}  "
              f"law err {err:.3e}   |p** - p| = {abs(back - p):.3e}")

print()
print("q = 1 sanity: the dual of independent density p is density 1 - p")
ps = np.linspace(0.05, 0.95, 7)
worst = max(abs(dual_parameter(p, 1.0) - (1.0 - p)) for p in ps)
print(f"  max |p* - (1 - p)| over {ps.size} densities: {worst:.3e}")
