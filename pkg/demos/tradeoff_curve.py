"""The exact (epsilon, delta) trade-off of a mechanism.

For each epsilon the smallest delta is computed by a full scan over
neighbouring databases. The weakening rule lets any point certify all
smaller epsilons, and the curve never does better than that rule allows.
"""

import numpy as np

from midp import audit, bounds, make_noisy_count

m = make_noisy_count(3, 0.5)
grid = np.linspace(0, 1.0, 11)
curve = audit.tradeoff_curve(m, grid)
eps_star = audit.epsilon_exact(m)
print(f"noisy count (3 records, ratio 0.5): epsilon_exact = {eps_star:.6f}")
print("epsilon   delta     delta from (eps*, 0)")
for e, d in curve.points:
    # weakening only moves down from eps*; above it delta is already zero
    implied = bounds.ed_weaken(eps_star, 0.0, e) if e <= eps_star else 0.0
    print(f"{e:7.3f}  {d:.6f}  {implied:.6f}")
print(f"smallest weakening slack over the grid: {curve.weaken_slack:.3e}")
