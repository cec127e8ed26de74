"""Closed-form conversions between privacy metrics.

Scalar functions only. delta-valued results are clamped to [0, 1] and
information-valued results to be non-negative, so formulas that leave their
meaningful range return the vacuous-but-valid bound instead of garbage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .prob_core import LN2, DomainError, binary_entropy

SERIES_THRESHOLD = 1e-10


def _check_nonneg(name: str, value: float) -> None:
    if not value >= 0:
        raise DomainError(f"{name} must be >= 0, got {value}")


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def kl_bound_tight(epsilon: float) -> float:
    """Largest KL divergence possible between two (epsilon, 0)-close distributions.

    ``eps (e^eps - 1)(1 - e^-eps) / ((e^eps - 1) + (1 - e^-eps))``, which
    simplifies to ``eps tanh(eps / 2)``; it behaves like ``eps^2 / 2`` near zero.
    """
    _check_nonneg("epsilon", epsilon)
    if epsilon == 0:
        return 0.0
    if math.isinf(epsilon):
        return math.inf
    up = math.expm1(epsilon)
    down = -math.expm1(-epsilon)
    return epsilon * up * down / (up + down)


def kl_bound_simple(epsilon: float) -> float:
    _check_nonneg("epsilon", epsilon)
    return min(epsilon, epsilon * epsilon)


def pinsker_delta(kl: float) -> float:
    """Total-variation bound implied by a KL bound."""
    _check_nonneg("kl", kl)
    return min(1.0, math.sqrt(kl / 2.0))


def ed_weaken(epsilon: float, delta: float, eps_prime: float) -> float:
    """delta' such that (epsilon, delta)-closeness implies (eps_prime, delta')-closeness."""
    _check_nonneg("eps_prime", eps_prime)
    _check_prob("delta", delta)
    if eps_prime > epsilon:
        raise DomainError(f"eps_prime ({eps_prime}) must not exceed epsilon ({epsilon})")
    if eps_prime == epsilon:
        return delta
    if math.isinf(epsilon):
        return 1.0
    ratio = (math.exp(eps_prime) + 1.0) / (math.exp(epsilon) + 1.0)
    return _clamp01(1.0 - ratio * (1.0 - delta))


def mi_to_delta_tight(mi: float) -> float:
    """Best (0, delta)-DP level implied by mi-MI-DP: ``1 - 2 h^-1(ln 2 - mi)``.

    Solved as the inverse of :func:`bsc_capacity` by bisection on delta, which
    avoids the cancellation in ``ln 2 - mi`` when mi is tiny.
    """
    _check_nonneg("mi", mi)
    if mi >= LN2:
        return 1.0
    if mi == 0:
        return 0.0
    # d^2 / 2 <= bsc(d) <= d^2 ln 2 brackets the root
    lo, hi = math.sqrt(mi / LN2), min(1.0, math.sqrt(2.0 * mi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _bsc(mid) < mi:
            lo = mid
        else:
            hi = mid
    return hi


def mi_to_delta_loose(mi: float) -> float:
    _check_nonneg("mi", mi)
    return min(1.0, math.sqrt(2.0 * mi))


def _bsc(delta: float) -> float:
    # ln 2 - h((1 - d)/2) = d atanh(d) + ln(1 - d^2)/2; the two terms are ~d^2 and
    # ~-d^2/2, so at most one bit cancels
    if delta >= 1.0:
        return LN2
    return delta * math.atanh(delta) + 0.5 * math.log1p(-delta * delta)


def bsc_capacity(delta: float) -> float:
    """Capacity of the binary symmetric channel whose rows are delta apart in TV."""
    _check_prob("delta", delta)
    return max(0.0, _bsc(delta))


def delta_to_mi(delta: float, out_size: int, max_entry: int) -> float:
    """MI-DP level implied by (delta)-DP.

    ``2 h(delta) + 2 delta ln(min(|Y|, max_i |X_i| + 1))``. The expression
    stops increasing once delta passes ``M / (M + 1)``, but it is a valid
    bound everywhere and is returned as written.
    """
    _check_prob("delta", delta)
    if out_size < 1 or max_entry < 1:
        raise DomainError(f"alphabet sizes must be >= 1, got |Y|={out_size}, max|X_i|={max_entry}")
    m = min(out_size, max_entry + 1)
    return max(0.0, 2.0 * binary_entropy(delta) + 2.0 * delta * math.log(m))


def delta_to_mi_tight_y(delta: float, out_size: int) -> float:
    """Output-alphabet form: ``h(delta) + delta ln(|Y| - 1)``, capped at ``ln |Y|``."""
    _check_prob("delta", delta)
    if out_size < 2:
        raise DomainError(f"out_size must be >= 2, got {out_size}")
    if delta > (out_size - 1) / out_size:
        return math.log(out_size)
    return binary_entropy(delta) + delta * math.log(out_size - 1)


def cond_entropy_continuity_bound(delta: float, u_size: int) -> float:
    """Bound on ``|H_P(U|V) - H_Q(U|V)|`` when ``||P - Q||_TV <= delta``."""
    _check_prob("delta", delta)
    if u_size < 1:
        raise DomainError(f"u_size must be >= 1, got {u_size}")
    t = delta / (delta + 1.0)
    return 2.0 * binary_entropy(t) + 2.0 * t * math.log(u_size)


def delta_to_mi_tight_x(delta: float, in_size: int) -> float:
    """Input-alphabet form: ``2 h(d/(d+1)) + 2 d/(d+1) ln |X|``."""
    if in_size < 1:
        raise DomainError(f"in_size must be >= 1, got {in_size}")
    return cond_entropy_continuity_bound(delta, in_size)


def group_factor(epsilon: float, k: int) -> float:
    """``(e^{k eps} - 1) / (e^eps - 1)``, equal to ``k`` in the eps -> 0 limit."""
    if epsilon < SERIES_THRESHOLD:
        # 1 + x + ... + x^{k-1} with x = e^eps ~ 1 + eps
        return k + epsilon * k * (k - 1) / 2.0
    if math.isinf(epsilon):
        return math.inf
    return math.expm1(k * epsilon) / math.expm1(epsilon)


def group_bounds(epsilon: float, delta: float, k: int) -> tuple[float, float, tuple[float, float]]:
    """Closeness for databases at Hamming distance <= k.

    Returns ``(k eps, k delta, (k eps, factor * delta))`` for the pure-epsilon,
    pure-delta and combined statements; delta values are clamped to 1.
    """
    _check_nonneg("epsilon", epsilon)
    _check_prob("delta", delta)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    ke = k * epsilon
    general = _clamp01(group_factor(epsilon, k) * delta) if delta > 0 else 0.0
    return ke, _clamp01(k * delta), (ke, general)


def group_mi_bound(mi: float, k: int, out_size: int, max_entry: int) -> float:
    """Bound on ``sup I(X_I; Y | X_{I^c})`` for ``|I| = k`` under mi-MI-DP.

    With ``s = min(1, k sqrt(2 mi))`` and ``M = min(|Y|, max|X_i|^k + 1)`` this
    is ``2 h(s) + 2 s ln M``. The raw expression needs ``k sqrt(2 mi) <= 1`` to
    make sense; beyond that it saturates at ``2 ln M``.
    """
    _check_nonneg("mi", mi)
    if k < 1 or out_size < 1 or max_entry < 1:
        raise DomainError("k and alphabet sizes must be >= 1")
    s = min(1.0, k * math.sqrt(2.0 * mi))
    m = min(out_size, max_entry**k + 1)
    return 2.0 * binary_entropy(s) + 2.0 * s * math.log(m)


@dataclass(frozen=True)
class BoundReport:
    """One bound checked against one measured quantity."""

    name: str
    params: str
    bound: float
    measured: float
    tol: float = 1e-9

    @property
    def slack(self) -> float:
        if math.isinf(self.bound) and self.bound > 0:
            return math.inf
        return self.bound - self.measured

    def ok(self) -> bool:
        return self.slack >= -self.tol

    def line(self) -> str:
        return (
            f"{self.name} {self.params} bound={_fmt(self.bound)} "
            f"measured={_fmt(self.measured)} slack={_fmt(self.slack)} "
            + ("ok" if self.ok() else "VIOLATION")
        )


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) and x > 0 else format(x, ".12g")
