"""Two-timescale feedback dynamics across box sizes.

The spins relax for tau sweeps at a frozen temperature, then the
temperature is refreshed to m^2 / n^(2a).  The run prints the post-
burn-in mean and spread of the temperature per size; the spread should
shrink with n.  A second block contrasts the single-flip chain that
accounts for the temperature change in its acceptance ratio with the
naive variant that ignores it: the two settle at visibly different
temperatures.
"""

import numpy as np

from soc_ising import naive_mu_prime_dynamics, two_timescale_dynamics

A = 1.99
TAU = 16
TOTAL = 20_000
SEED = 7

print(f"== two-timescale dynamics, a = {A}, tau = {TAU}, "
      f"{TOTAL} sweeps ==")
print(f"{'n':>4s} {'records':>8s} {'mean T':>10s} {'std T':>10s} "
      f"{'mean |m|/n^2':>13s} {'floor':>6s}")
for i, n in enumerate((8, 16, 32)):
    rng = np.random.Generator(np.random.Philox(key=[SEED, i]))
    traj = two_timescale_dynamics(n, A, TAU, TOTAL, rng)
    kept_m = np.abs(traj.mags[traj.burn_in:]) / (n * n)
    print(f"{n:4d} {len(traj.steps):8d} {traj.mean_temperature():10.5f} "
          f"{traj.temperature_std():10.5f} {float(kept_m.mean()):13.5f} "
          f"{float(traj.floor_used.mean()):6.3f}")
print(f"(temperature cap at these sizes: n^(4-2a) = "
      f"{', '.join(f'{float(n) ** (4 - 2 * A):.4f}' for n in (8, 16, 32))})")

print()
print("== single-flip chain, n = 5: exact weight vs naive acceptance ==")
for i, account in enumerate((True, False)):
    rng = np.random.Generator(np.random.Philox(key=[SEED + 1, i]))
    traj = naive_mu_prime_dynamics(5, A, 4000, rng,
                                   account_for_T_change=account)
    print(f"  {traj.variant:>15s}   mean T = {traj.mean_temperature():.4f}"
          f"   std T = {traj.temperature_std():.4f}")
print("The naive variant hugs the aligned state and its temperature cap;")
print("the exact chain spends most of its time at far lower temperatures.")
