"""Channel capacity and mutual-information privacy levels.

The supremum of ``I(X_i; Y | X^{-i})`` over database distributions equals the
largest capacity among the sub-channels obtained by fixing ``X^{-i}``: the
conditional information is an average of per-slice informations, and a point
mass on the best slice attains the maximum. :func:`mi_dp` computes it that way;
:func:`brute_force_sup_cmi` searches the same supremum directly and exists as
an independent check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike

from .mechanism import Mechanism, slices
from .prob_core import Dist, DomainError, as_channel, as_mass, sibson_mi

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class CapacityResult:
    """Capacity estimate with a certified bracket ``lower <= C <= upper``.

    ``value`` equals ``lower``: it is the mutual information actually achieved
    by ``achieving_input``.
    """

    value: float
    lower: float
    upper: float
    iterations: int
    achieving_input: Dist
    converged: bool

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def _divergences(w: np.ndarray, logw: np.ndarray, q: np.ndarray) -> np.ndarray:
    # D(W_x || q) for every row x; q > 0 wherever W > 0
    with np.errstate(divide="ignore"):
        logq = np.log(q)
    terms = np.where(w > 0, w * (logw - logq), 0.0)
    return terms.sum(axis=1)


def _mutual_info(p: np.ndarray, d: np.ndarray) -> float:
    return max(0.0, float(p @ d))


def _newton_polish(w: np.ndarray, logw: np.ndarray, p: np.ndarray, steps: int = 60) -> np.ndarray:
    """Active-set Newton ascent on ``I(p)`` over the simplex, started at ``p``.

    Each step solves the equality-constrained Newton system on the current
    support. A step that would drive a coordinate negative is cut at the
    boundary and that coordinate leaves the support. When the support is
    stationary, the input with the largest KKT violation
    (``D(W_x || q) > I``) re-enters with a little mass.
    """
    x = p.copy()
    active = x > 0
    cur = _mutual_info(x, _divergences(w, logw, x @ w))
    for _ in range(steps):
        q = x @ w
        pos = q > 0
        d = _divergences(w, logw, q)
        idx = np.flatnonzero(active)
        k = idx.size
        if k > 1:
            ws = w[idx][:, pos]
            hess = -(ws / q[pos]) @ ws.T
            # I(p) is linear along null directions of W^T; the shift turns those
            # into long steps that hit the boundary and shrink the support
            hess -= 1e-9 * np.eye(k)
            kkt = np.zeros((k + 1, k + 1))
            kkt[:k, :k] = hess
            kkt[:k, k] = kkt[k, :k] = 1.0
            rhs = np.concatenate([-(d[idx] - 1.0), [0.0]])
            step = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
        else:
            step = np.zeros(k)
        if np.all(np.isfinite(step)) and np.abs(step).max() > 1e-15:
            neg = step < 0
            t_max = float(np.min(-x[idx][neg] / step[neg])) if neg.any() else np.inf
            t = min(1.0, t_max)
            for _ in range(30):
                trial = x.copy()
                trial[idx] = np.maximum(x[idx] + t * step, 0.0)
                trial /= trial.sum()
                val = _mutual_info(trial, _divergences(w, logw, trial @ w))
                if val >= cur:
                    break
                t *= 0.5
            else:
                break
            if t == t_max:
                trial[idx[np.argmin(x[idx] + t * step)]] = 0.0
                trial /= trial.sum()
                val = _mutual_info(trial, _divergences(w, logw, trial @ w))
            x, cur = trial, val
            active = x > 0
            if np.abs(t * step).max() > 1e-13:
                continue
        # stationary on this support: re-admit the worst KKT violator, if any
        d = _divergences(w, logw, x @ w)
        viol = np.where(active, -np.inf, d - cur)
        j = int(np.argmax(viol))
        if viol[j] <= 1e-14:
            break
        x = 0.99 * x
        x[j] = 0.01
        active = x > 0
        cur = _mutual_info(x, _divergences(w, logw, x @ w))
    return x


def blahut_arimoto(
    channel: ArrayLike,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    polish_every: int = 10,
) -> CapacityResult:
    """Capacity of a discrete memoryless channel in nats.

    Starts from the uniform input and applies the multiplicative update
    ``p(x) <- p(x) exp(D(W_x || q)) / Z``. At every iterate ``I(p) <= C <=
    max_x D(W_x || q)``, so the loop stops once that bracket is narrower than
    ``tol``. Hitting ``max_iter`` returns the best bracket seen with
    ``converged=False``.

    Every ``polish_every`` iterations a Newton step on the current support is
    tried; it is kept only when it narrows the bracket, so the certificate is
    unaffected. ``polish_every=0`` gives the plain iteration.
    """
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    w = as_channel(channel)
    # all-zero output columns carry no information
    w = w[:, w.sum(axis=0) > 0]
    k = w.shape[0]
    p = np.full(k, 1.0 / k)
    if k == 1 or np.all(w == w[0]):
        return CapacityResult(0.0, 0.0, 0.0, 0, Dist(p), True)
    with np.errstate(divide="ignore"):
        logw = np.where(w > 0, np.log(w), 0.0)

    def bracket(x):
        d = _divergences(w, logw, x @ w)
        return _mutual_info(x, d), float(d.max()), d

    best = None
    it = 0
    for it in range(1, max_iter + 1):
        lower, upper, d = bracket(p)
        if best is None or upper - lower < best[1] - best[0]:
            best = (lower, max(upper, lower), p)
        if upper - lower <= tol:
            break
        if polish_every and it % polish_every == 0 and it > 0:
            cand = _newton_polish(w, logw, p)
            lo2, up2, _ = bracket(cand)
            if up2 - lo2 < best[1] - best[0]:
                best = (lo2, max(up2, lo2), cand)
                if up2 - lo2 <= tol:
                    break
        p = p * np.exp(d - upper)
        p /= p.sum()
    lower, upper, p = best
    return CapacityResult(lower, lower, upper, it, Dist(p), upper - lower <= tol)


@dataclass(frozen=True)
class MIDPResult:
    """Worst-case conditional mutual information with its witness slice."""

    value: float
    entry: int
    x_rest: tuple[int, ...]
    capacity: CapacityResult
    per_entry: np.ndarray


def _unique_slices(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    flat = stack.reshape(stack.shape[0], -1)
    _, first, inverse = np.unique(flat, axis=0, return_index=True, return_inverse=True)
    return first, inverse.ravel()


def _entry_capacities(m: Mechanism, i: int, tol: float, max_iter: int):
    rest, stack = slices(m, i)
    first, inverse = _unique_slices(stack)
    results = [blahut_arimoto(stack[r], tol, max_iter) for r in first]
    per_slice = [results[j] for j in inverse]
    return rest, per_slice


def mi_dp(m: Mechanism, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> MIDPResult:
    """Smallest epsilon for which the mechanism is epsilon-MI-DP, with witness."""
    best = None
    per_entry = np.zeros(m.n)
    for i in range(m.n):
        rest, caps = _entry_capacities(m, i, tol, max_iter)
        r = int(np.argmax([c.value for c in caps]))
        per_entry[i] = caps[r].value
        if best is None or caps[r].value > best[0]:
            best = (caps[r].value, i, tuple(int(v) for v in rest[r]), caps[r])
    value, i, x_rest, cap = best
    per_entry.setflags(write=False)
    return MIDPResult(value, i, x_rest, cap, per_entry)


def personalized_mi(m: Mechanism, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> np.ndarray:
    """Per-entry worst-case conditional mutual information ``sup I(X_i; Y | X^{-i})``."""
    return np.array(mi_dp(m, tol, max_iter).per_entry)


def free_lunch_mi(m: Mechanism, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> CapacityResult:
    """``sup I(X^n; Y)``: capacity of the whole mechanism matrix."""
    return blahut_arimoto(m.matrix, tol, max_iter)


def group_mi(m: Mechanism, group: Sequence[int], tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """``sup I(X_I; Y | X_{I^c})`` for the index set ``group``.

    Same reduction as :func:`mi_dp` with the group's joint value as the
    channel input.
    """
    group = sorted(set(group))
    if not group or any(not 0 <= g < m.n for g in group):
        raise IndexError(f"invalid group {group} for n={m.n}")
    others = [j for j in range(m.n) if j not in group]
    t = np.transpose(m.tensor(), others + group + [m.n])
    gsize = math.prod(m.schema.entry_sizes[g] for g in group)
    stack = t.reshape(-1, gsize, m.output_size)
    first, _ = _unique_slices(stack)
    return max(blahut_arimoto(stack[r], tol, max_iter).value for r in first)


# -- direct conditional information -------------------------------------------

def _marginal_entropy(joint: np.ndarray, keep: Sequence[int]) -> float:
    drop = tuple(ax for ax in range(joint.ndim) if ax not in keep)
    marg = joint.sum(axis=drop) if drop else joint
    marg = marg[marg > 0]
    return float(-(marg * np.log(marg)).sum())


def conditional_mi(m: Mechanism, prior: ArrayLike, target: Sequence[int], given: Sequence[int]) -> float:
    """``I(X_T; Y | X_G)`` under database distribution ``prior`` (flat schema order)."""
    prior = as_mass(prior if not isinstance(prior, Dist) else prior.mass)
    if prior.shape[0] != m.schema.size:
        raise ValueError(f"prior has {prior.shape[0]} states, schema has {m.schema.size}")
    target, given = list(target), list(given)
    if set(target) & set(given):
        raise ValueError(f"target {target} and conditioning set {given} overlap")
    if any(not 0 <= j < m.n for j in target + given):
        raise IndexError(f"entry index out of range for n={m.n}")
    joint = (prior[:, None] * m.matrix).reshape(*m.schema.entry_sizes, m.output_size)
    y = m.n
    h = _marginal_entropy
    val = h(joint, target + given) + h(joint, given + [y]) - h(joint, target + given + [y]) - h(joint, given)
    return max(0.0, val)


def bayesian_mi(m: Mechanism, prior: ArrayLike, i: int, conditioning: Sequence[int]) -> float:
    """``I(X_i; Y | X_I)`` for a fixed prior; no supremum is taken."""
    if i in conditioning:
        raise ValueError(f"entry {i} cannot be in its own conditioning set")
    return conditional_mi(m, prior, [i], list(conditioning))


def _simplex_grid(k: int, resolution: int) -> np.ndarray:
    # stars and bars: all vectors of multiples of 1/resolution summing to one
    pts = []
    for bars in itertools.combinations(range(resolution + k - 1), k - 1):
        edges = (-1,) + bars + (resolution + k - 1,)
        pts.append([edges[j + 1] - edges[j] - 1 for j in range(k)])
    return np.array(pts, dtype=float) / resolution


def _mi_many(inputs: np.ndarray, w: np.ndarray) -> np.ndarray:
    # I(p; W) for each row p of ``inputs``, as H(Y) - H(Y|X)
    q = inputs @ w
    with np.errstate(divide="ignore", invalid="ignore"):
        hy = -np.where(q > 0, q * np.log(q), 0.0).sum(axis=1)
        hrow = -np.where(w > 0, w * np.log(w), 0.0).sum(axis=1)
    return hy - inputs @ hrow


def brute_force_sup_cmi(
    m: Mechanism,
    i: int,
    samples: int = 2000,
    grid: int = 64,
    rng: np.random.Generator | None = None,
) -> float:
    """Search ``sup I(X_i; Y | X^{-i})`` directly; slow, for cross-checking only.

    Two searches, maximum reported: every point mass on ``x^{-i}`` combined
    with every point of a ``1/grid`` lattice on the simplex of ``P(X_i)``, and
    ``samples`` random full-support priors on the whole database.
    """
    if m.schema.size > 256:
        raise ValueError(f"database space {m.schema.size} too large for brute force (max 256)")
    rng = np.random.default_rng(0) if rng is None else rng
    _, stack = slices(m, i)
    k = m.schema.entry_sizes[i]
    lattice = _simplex_grid(k, grid)
    best = 0.0
    for w in stack:
        best = max(best, float(_mi_many(lattice, w).max()))
    others = [j for j in range(m.n) if j != i]
    for _ in range(samples):
        prior = rng.dirichlet(np.full(m.schema.size, 0.5))
        prior = np.maximum(prior, 1e-300)
        prior /= prior.sum()
        best = max(best, conditional_mi(m, prior, [i], others))
    return best


@dataclass(frozen=True)
class SibsonCheck:
    """Largest sampled Sibson alpha-MI per order, over all slices."""

    alphas: tuple[float, ...]
    maxima: tuple[float, ...]
    # per-sample curves, shape (num_samples, len(alphas)); used for monotonicity checks
    curves: np.ndarray

    def max(self) -> float:
        return max(self.maxima)


def sibson_mi_check(
    m: Mechanism,
    alphas: Sequence[float] = (0.5, 1.0, 2.0, 4.0, 64.0),
    samples: int = 200,
    rng: np.random.Generator | None = None,
) -> SibsonCheck:
    """Sample input distributions on every slice and evaluate Sibson alpha-MI.

    Each slice is tried with the uniform input plus ``samples`` Dirichlet
    draws. Under epsilon-DP every value is at most epsilon.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    alphas = tuple(float(a) for a in alphas)
    rows = []
    for i in range(m.n):
        _, stack = slices(m, i)
        first, _ = _unique_slices(stack)
        k = m.schema.entry_sizes[i]
        for r in first:
            w = stack[r]
            priors = [np.full(k, 1.0 / k)] + [rng.dirichlet(np.ones(k)) for _ in range(samples)]
            for px in priors:
                rows.append([sibson_mi(px, w, a) for a in alphas])
    curves = np.array(rows)
    return SibsonCheck(alphas, tuple(float(v) for v in curves.max(axis=0)), curves)
