"""Exact differential-privacy parameters of a finite mechanism.

Everything here is an exhaustive scan over neighboring database pairs, so
results are exact up to floating point rather than estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bounds
from .capacity import DEFAULT_TOL, free_lunch_mi, mi_dp
from .mechanism import Mechanism, NeighborPair, neighbor_arrays


def _log_ratios(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    # |ln(pa/pb)| per cell; 0 where both vanish, inf where exactly one does
    out = np.zeros(pa.shape)
    both = (pa > 0) & (pb > 0)
    out[both] = np.abs(np.log(pa[both]) - np.log(pb[both]))
    out[(pa > 0) != (pb > 0)] = np.inf
    return out


@dataclass(frozen=True)
class EpsilonWitness:
    epsilon: float
    pair: NeighborPair | None
    output: int | None


def epsilon_witness(m: Mechanism) -> EpsilonWitness:
    """Exact epsilon-DP level together with the neighbor pair and output attaining it."""
    a, b, e = neighbor_arrays(m.schema)
    if a.size == 0:
        return EpsilonWitness(0.0, None, None)
    r = _log_ratios(m.matrix[a], m.matrix[b])
    flat = int(np.argmax(r))
    row, out = divmod(flat, m.output_size)
    eps = float(r.flat[flat])
    if eps == 0.0:
        return EpsilonWitness(0.0, None, None)
    return EpsilonWitness(eps, NeighborPair(int(a[row]), int(b[row]), int(e[row])), out)


def epsilon_exact(m: Mechanism) -> float:
    """Smallest epsilon with the mechanism epsilon-DP; ``inf`` if none exists."""
    return epsilon_witness(m).epsilon


def _pair_deltas(pa: np.ndarray, pb: np.ndarray, epsilon: float) -> np.ndarray:
    if epsilon == 0:
        return 0.5 * np.abs(pa - pb).sum(axis=1)
    if math.isinf(epsilon):
        return np.zeros(pa.shape[0])
    g = math.exp(epsilon)
    fwd = np.maximum(0.0, pa - g * pb).sum(axis=1)
    bwd = np.maximum(0.0, pb - g * pa).sum(axis=1)
    return np.maximum(fwd, bwd)


def delta_at(m: Mechanism, epsilon: float) -> float:
    """Smallest delta for which the mechanism is (epsilon, delta)-DP."""
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    a, b, _ = neighbor_arrays(m.schema)
    if a.size == 0:
        return 0.0
    return float(_pair_deltas(m.matrix[a], m.matrix[b], epsilon).max())


def delta_exact(m: Mechanism) -> float:
    """Smallest delta for (delta)-DP, i.e. the largest neighbor total variation."""
    return delta_at(m, 0.0)


def default_eps_grid(m: Mechanism, points: int = 64) -> np.ndarray:
    """Zero followed by ``points - 1`` log-spaced values up to ``max(eps*, 5)``."""
    eps = epsilon_exact(m)
    top = max(eps, 5.0) if math.isfinite(eps) else 5.0
    return np.concatenate([[0.0], np.geomspace(1e-3, top, points - 1)])


@dataclass(frozen=True)
class TradeoffCurve:
    """Exact (epsilon, delta) pairs, epsilon ascending.

    ``weaken_slack`` is the smallest margin by which the curve satisfies the
    (eps, delta) -> (eps', delta') weakening rule over all grid pairs
    ``eps' < eps``; it is never meaningfully negative.
    """

    points: tuple[tuple[float, float], ...]
    weaken_slack: float = math.inf

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def deltas(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def tradeoff_curve(m: Mechanism, eps_grid: Sequence[float] | None = None) -> TradeoffCurve:
    grid = default_eps_grid(m) if eps_grid is None else np.asarray(eps_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("epsilon grid must be a non-empty 1-D sequence")
    if np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise ValueError("epsilon grid must be non-negative and ascending")
    a, b, _ = neighbor_arrays(m.schema)
    pa, pb = m.matrix[a], m.matrix[b]
    deltas = [float(_pair_deltas(pa, pb, e).max()) if a.size else 0.0 for e in grid]
    slack = math.inf
    for j, (e_hi, d_hi) in enumerate(zip(grid, deltas)):
        for e_lo, d_lo in zip(grid[:j], deltas[:j]):
            if e_lo < e_hi:
                slack = min(slack, bounds.ed_weaken(e_hi, d_hi, e_lo) - d_lo)
    return TradeoffCurve(tuple((float(e), d) for e, d in zip(grid, deltas)), slack)


def kl_dp(m: Mechanism) -> float:
    """Largest KL divergence between neighboring output distributions, both orders."""
    a, b, _ = neighbor_arrays(m.schema)
    if a.size == 0:
        return 0.0
    pa, pb = m.matrix[a], m.matrix[b]

    def directed(p, q):
        if np.any((p > 0) & (q == 0)):
            return math.inf
        pos = p > 0
        terms = np.zeros(p.shape)
        terms[pos] = p[pos] * (np.log(p[pos]) - np.log(q[pos]))
        return float(terms.sum(axis=1).max())

    return max(0.0, directed(pa, pb), directed(pb, pa))


# -- group privacy ------------------------------------------------------------

def _pairs_within(m: Mechanism, k: int) -> tuple[np.ndarray, np.ndarray]:
    digits = m.schema.digits()
    a_parts, b_parts = [], []
    for a in range(m.schema.size - 1):
        dist = (digits[a + 1:] != digits[a]).sum(axis=1)
        hits = np.flatnonzero((dist >= 1) & (dist <= k)) + a + 1
        a_parts.append(np.full(hits.size, a))
        b_parts.append(hits)
    if not a_parts:
        empty = np.zeros(0, dtype=int)
        return empty, empty
    return np.concatenate(a_parts), np.concatenate(b_parts)


@dataclass(frozen=True)
class GroupCloseness:
    """Exact closeness between databases differing in at most ``k`` entries.

    The ``*_bound`` fields are the group-privacy bounds computed from the
    single-entry parameters; ``worst_point`` is the curve point
    ``(eps, measured delta at k*eps, bound)`` with the least slack.
    """

    k: int
    max_log_ratio: float
    max_tv: float
    worst_point: tuple[float, float, float]
    epsilon_bound: float
    delta_bound: float
    slacks: dict = field(default_factory=dict)

    def holds(self, tol: float = 1e-12) -> bool:
        return all(s >= -tol for s in self.slacks.values())


def _slack(bound: float, measured: float) -> float:
    if math.isinf(bound):
        return math.inf
    return bound - measured


def group_closeness(m: Mechanism, k: int, eps_grid: Sequence[float] | None = None) -> GroupCloseness:
    """Closeness over pairs at Hamming distance 1..k, checked against the group bounds."""
    if not 1 <= k <= m.n:
        raise ValueError(f"k must lie in [1, {m.n}], got {k}")
    a, b = _pairs_within(m, k)
    pa, pb = m.matrix[a], m.matrix[b]
    if a.size:
        max_ratio = float(_log_ratios(pa, pb).max())
        max_tv = float(_pair_deltas(pa, pb, 0.0).max())
    else:
        max_ratio = max_tv = 0.0
    eps1, delta1 = epsilon_exact(m), delta_exact(m)
    eps_bound, delta_bound, _ = bounds.group_bounds(eps1, delta1, k)
    grid = default_eps_grid(m, 16) if eps_grid is None else np.asarray(eps_grid, dtype=float)
    worst = (0.0, 0.0, math.inf)
    worst_slack = math.inf
    for e in grid:
        d1 = delta_at(m, float(e))
        _, _, (ke, bound) = bounds.group_bounds(float(e), d1, k)
        measured = float(_pair_deltas(pa, pb, ke).max()) if a.size else 0.0
        s = bound - measured
        if s < worst_slack:
            worst_slack, worst = s, (float(e), measured, bound)
    slacks = {
        "epsilon": _slack(eps_bound, max_ratio),
        "delta": _slack(delta_bound, max_tv),
        "general": worst_slack,
    }
    return GroupCloseness(k, max_ratio, max_tv, worst, eps_bound, delta_bound, slacks)


# -- full report --------------------------------------------------------------

@dataclass(frozen=True)
class PrivacyReport:
    """Every privacy level of one mechanism, with witnesses and solver diagnostics."""

    epsilon_exact: float
    delta_exact: float
    kl_dp: float
    mi_dp: float
    per_entry_mi: tuple[float, ...]
    free_lunch_mi: float
    epsilon_witness: EpsilonWitness | None = None
    mi_witness_entry: int | None = None
    mi_witness_rest: tuple[int, ...] | None = None
    mi_witness_input: tuple[float, ...] | None = None
    solver_gap: float = 0.0
    solver_converged: bool = True


def privacy_report(m: Mechanism, tol: float = DEFAULT_TOL) -> PrivacyReport:
    ew = epsilon_witness(m)
    mi = mi_dp(m, tol)
    fl = free_lunch_mi(m, tol)
    return PrivacyReport(
        epsilon_exact=ew.epsilon,
        delta_exact=delta_exact(m),
        kl_dp=kl_dp(m),
        mi_dp=mi.value,
        per_entry_mi=tuple(float(v) for v in mi.per_entry),
        free_lunch_mi=fl.value,
        epsilon_witness=ew,
        mi_witness_entry=mi.entry,
        mi_witness_rest=mi.x_rest,
        mi_witness_input=tuple(float(v) for v in mi.capacity.achieving_input.mass),
        solver_gap=max(mi.capacity.gap, fl.gap),
        solver_converged=mi.capacity.converged and fl.converged,
    )
