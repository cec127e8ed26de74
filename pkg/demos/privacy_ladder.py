"""Where MI privacy sits between pure and approximate differential privacy.

Randomized response is audited at several flip probabilities. For each one
the exact epsilon, KL and MI levels are printed next to the bounds that link
them, so the ordering eps -> KL -> MI -> delta can be read off row by row.
"""

from midp import audit, bounds, capacity, make_randomized_response

print(f"{'flip_p':>7} {'eps':>8} {'kl_dp':>8} {'tight':>8} {'mi_dp':>8} {'delta':>7} {'mi->delta':>9} {'delta->mi':>9}")
for flip_p in (0.45, 0.35, 0.25, 0.1, 0.02):
    m = make_randomized_response(2, flip_p)
    eps = audit.epsilon_exact(m)
    kl = audit.kl_dp(m)
    mi = capacity.mi_dp(m).value
    delta = audit.delta_exact(m)
    print(
        f"{flip_p:7.2f} {eps:8.4f} {kl:8.4f} {bounds.kl_bound_tight(eps):8.4f} {mi:8.4f} {delta:7.3f} "
        f"{bounds.mi_to_delta_tight(mi):9.4f} {bounds.delta_to_mi(delta, m.output_size, 2):9.4f}"
    )

print()
print("Reading a row: kl_dp never exceeds 'tight' (the best KL possible at that eps),")
print("mi_dp never exceeds kl_dp, delta never exceeds the delta implied by mi_dp,")
print("and mi_dp never exceeds what delta alone guarantees.")
print()
print("For small eps the KL level behaves like eps^2 / 2:")
for eps in (1.0, 0.1, 0.01):
    print(f"  eps={eps:<5} tight KL / eps^2 = {bounds.kl_bound_tight(eps) / eps**2:.6f}")
