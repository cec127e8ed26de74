"""Finite-alphabet probability kernels.

Divergences, entropies and closeness predicates between probability vectors.
Every information quantity is in nats. Divergences return ``math.inf`` when
the first argument puts mass where the second has none.

Functions accept either :class:`Dist` instances or plain array-likes; plain
arrays are validated and normalized the same way ``Dist`` does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

SUM_TOL = 1e-9
LN2 = math.log(2.0)


class DimensionError(ValueError):
    """Raised when two distributions or matrices have incompatible shapes."""


class DomainError(ValueError):
    """Raised when a scalar argument is outside its mathematical domain."""


def _validated(mass: ArrayLike, ndim: int, what: str) -> np.ndarray:
    arr = np.array(mass, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionError(f"{what} must be non-empty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"{what} has negative or non-finite entries")
    total = arr.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise ValueError(f"{what} sums to {total!r}, not 1")
    arr /= total
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability vector over ``{0, ..., alphabet_size - 1}``.

    Inputs whose sum is within 1e-9 of one are renormalized; anything else
    is rejected.
    """

    mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", _validated(self.mass, 1, "Dist"))

    @property
    def alphabet_size(self) -> int:
        return self.mass.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.mass if dtype is None else self.mass.astype(dtype)

    def __len__(self):
        return self.alphabet_size

    def __eq__(self, other):
        if not isinstance(other, Dist):
            return NotImplemented
        return np.array_equal(self.mass, other.mass)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class JointDist:
    """Joint probability matrix over ``U x V`` (rows index U, columns V)."""

    mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", _validated(self.mass, 2, "JointDist"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.mass.shape

    def __array__(self, dtype=None, copy=None):
        return self.mass if dtype is None else self.mass.astype(dtype)


@dataclass(frozen=True)
class ClosenessParams:
    """An (epsilon, delta) pair; epsilon in nats."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta}")


DistLike = Union[Dist, ArrayLike]


def as_mass(p: DistLike) -> np.ndarray:
    """Return the probability vector behind ``p`` as a read-only array."""
    if isinstance(p, Dist):
        return p.mass
    return _validated(p, 1, "distribution")


def as_channel(channel: ArrayLike) -> np.ndarray:
    """Validate a row-stochastic matrix and return it as a float array."""
    w = np.array(channel, dtype=float)
    if w.ndim != 2 or w.size == 0:
        raise DimensionError(f"channel must be a non-empty matrix, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("channel has negative or non-finite entries")
    sums = w.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > SUM_TOL)
    if bad.size:
        raise ValueError(f"channel row {bad[0]} sums to {sums[bad[0]]!r}, not 1")
    return w / sums[:, None]


def _pair(p: DistLike, q: DistLike) -> tuple[np.ndarray, np.ndarray]:
    p, q = as_mass(p), as_mass(q)
    if p.shape != q.shape:
        raise DimensionError(f"alphabet mismatch: {p.shape[0]} vs {q.shape[0]}")
    return p, q


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # x * ln(y) with 0 * ln(anything) = 0
    out = np.zeros(np.broadcast(x, y).shape)
    x, y = np.broadcast_arrays(x, y)
    pos = x > 0
    out[pos] = x[pos] * np.log(y[pos])
    return out


def entropy(p: DistLike) -> float:
    """Shannon entropy in nats."""
    p = as_mass(p)
    return float(-_xlogy(p, p).sum())


def kl_divergence(p: DistLike, q: DistLike) -> float:
    """Kullback-Leibler divergence D(p || q) in nats, ``inf`` on support violation."""
    p, q = _pair(p, q)
    pos = p > 0
    if np.any(q[pos] == 0):
        return math.inf
    return max(0.0, float(np.sum(p[pos] * (np.log(p[pos]) - np.log(q[pos])))))


def _tv(p: np.ndarray, q: np.ndarray) -> float:
    return float(0.5 * np.abs(p - q).sum())


def total_variation(p: DistLike, q: DistLike) -> float:
    return _tv(*_pair(p, q))


def hockey_stick(p: DistLike, q: DistLike, epsilon: float) -> float:
    """One-sided E_gamma divergence with gamma = e^epsilon.

    This is the smallest delta for which ``P(A) <= e^eps Q(A) + delta`` holds
    for every event A; the worst event is ``{y : p(y) > e^eps q(y)}``.
    """
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    p, q = _pair(p, q)
    if epsilon == 0:
        return _tv(p, q)
    if math.isinf(epsilon):
        return 0.0
    return float(np.maximum(0.0, p - math.exp(epsilon) * q).sum())


def closeness_delta(p: DistLike, q: DistLike, epsilon: float) -> float:
    """Smallest delta for which p and q are (epsilon, delta)-close."""
    return max(hockey_stick(p, q, epsilon), hockey_stick(q, p, epsilon))


def is_close(p: DistLike, q: DistLike, params: ClosenessParams) -> bool:
    return closeness_delta(p, q, params.epsilon) <= params.delta


def binary_entropy(x: float) -> float:
    """h(x) = -x ln x - (1-x) ln(1-x), in nats."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary_entropy needs x in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


def binary_entropy_inv(y: float, max_iter: int = 200) -> float:
    """Inverse of h on [0, 1/2], by bisection.

    Bisects until the bracket stops shrinking in floating point, which is well
    inside the ``|h(x) - y| <= 1e-12`` requirement.
    """
    if not -1e-15 <= y <= LN2 + 1e-15:
        raise DomainError(f"binary_entropy_inv needs y in [0, ln 2], got {y}")
    if y <= 0.0:
        return 0.0
    if y >= LN2:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    # pick the closer endpoint
    if abs(binary_entropy(lo) - y) <= abs(binary_entropy(hi) - y):
        return lo
    return hi


def renyi_divergence(p: DistLike, q: DistLike, alpha: float) -> float:
    """Renyi divergence of order ``alpha`` (alpha >= 0, alpha != 1), in nats.

    Zero-mass conventions: ``0^alpha = 0`` for alpha > 0, and ``p^0`` is the
    support indicator of p. Returns ``inf`` for alpha > 1 when p is not
    absolutely continuous with respect to q.
    """
    if not alpha >= 0 or alpha == 1:
        raise DomainError(f"alpha must be >= 0 and != 1, got {alpha}")
    p, q = _pair(p, q)
    pos = p > 0
    if alpha > 1 and np.any(q[pos] == 0):
        return math.inf
    mask = pos & (q > 0)
    if alpha == 0:
        s = float(q[pos].sum())
    else:
        s = float(np.sum(p[mask] ** alpha * q[mask] ** (1.0 - alpha)))
    if s <= 0.0:
        # disjoint supports with alpha < 1
        return math.inf
    return max(0.0, math.log(s) / (alpha - 1.0))


def _input_and_channel(px: DistLike, channel: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    px = as_mass(px)
    w = as_channel(channel)
    if w.shape[0] != px.shape[0]:
        raise DimensionError(f"input distribution has {px.shape[0]} symbols, channel has {w.shape[0]} rows")
    return px, w


def mutual_information(px: DistLike, channel: ArrayLike) -> float:
    """I(X;Y) in nats for input distribution ``px`` and row-stochastic ``channel``."""
    px, w = _input_and_channel(px, channel)
    return _mi(px, w)


def _mi(px: np.ndarray, w: np.ndarray) -> float:
    q = px @ w
    joint = px[:, None] * w
    pos = joint > 0
    qb = np.broadcast_to(q, w.shape)
    return max(0.0, float(np.sum(joint[pos] * (np.log(w[pos]) - np.log(qb[pos])))))


def sibson_mi(px: DistLike, channel: ArrayLike, alpha: float) -> float:
    """Sibson's alpha-mutual information in nats.

    Uses the closed form of the minimum over output distributions,
    ``alpha/(alpha-1) * ln sum_y (sum_x px(x) W(y|x)^alpha)^(1/alpha)``;
    ``alpha == 1`` is Shannon mutual information.
    """
    if not 0 < alpha < math.inf:
        raise DomainError(f"alpha must be finite and > 0, got {alpha}")
    px, w = _input_and_channel(px, channel)
    if alpha == 1:
        return _mi(px, w)
    keep = px > 0
    px, w = px[keep], w[keep]
    # log-sum-exp keeps large alpha finite
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    inner = np.log(px)[:, None] + alpha * logw
    m = inner.max(axis=0)
    finite = np.isfinite(m)
    lse = m[finite] + np.log(np.exp(inner[:, finite] - m[finite]).sum(axis=0))
    t = lse / alpha
    tm = t.max()
    total = tm + math.log(np.exp(t - tm).sum())
    return max(0.0, alpha / (alpha - 1.0) * total)


def conditional_entropy(j: Union[JointDist, ArrayLike]) -> float:
    """H(U|V) for a joint matrix with rows indexed by U and columns by V."""
    mass = j.mass if isinstance(j, JointDist) else JointDist(j).mass
    pv = mass.sum(axis=0)
    h_uv = -_xlogy(mass, mass).sum()
    h_v = -_xlogy(pv, pv).sum()
    return max(0.0, float(h_uv - h_v))
