"""Group privacy: differential privacy scales with group size, MI privacy need not.

The two-entry mechanism below shows only whether its entries agree, plus the
common value when they do. No pair of neighbours is epsilon-close for any
finite epsilon, and the pair (x, x) vs (y, y) is perfectly distinguishable.
Per-entry MI is nonetheless small.
"""

import math

from midp import audit, bounds, capacity, make_group_example, make_randomized_response

m = make_group_example(0.4, 4)
print("group example, eps_p=0.4, alphabet 4")
print(f"  epsilon_exact        = {audit.epsilon_exact(m)}")
print(f"  mi_dp                = {capacity.mi_dp(m).value:.6f}  (0.4 ln 2 = {0.4 * math.log(2):.6f})")
print(f"  I over both entries  = {capacity.group_mi(m, [0, 1]):.6f}  (0.4 ln 5 = {0.4 * math.log(5):.6f})")
g = audit.group_closeness(m, 2)
print(f"  group log-ratio (k=2) = {g.max_log_ratio}, group TV = {g.max_tv:.3f}")

print()
rr = make_randomized_response(3, 0.2)
eps, delta = audit.epsilon_exact(rr), audit.delta_exact(rr)
mi = capacity.mi_dp(rr).value
print(f"randomized response on 3 bits: eps={eps:.4f} delta={delta:.3f} mi_dp={mi:.4f}")
for k in (1, 2, 3):
    g = audit.group_closeness(rr, k)
    e_b, d_b, _ = bounds.group_bounds(eps, delta, k)
    print(
        f"  k={k}: log-ratio {g.max_log_ratio:.4f} <= {e_b:.4f}, TV {g.max_tv:.4f} <= {d_b:.4f}, "
        f"group MI {capacity.group_mi(rr, range(k)):.4f} <= {bounds.group_mi_bound(mi, k, rr.output_size, 2):.4f}"
    )
