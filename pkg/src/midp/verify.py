"""Seeded invariant suites over random mechanisms.

Each suite returns a list of :class:`~midp.bounds.BoundReport`; a report with
negative slack beyond its tolerance is a violation. Suites are deterministic
given the seed.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np

from . import audit, bounds, capacity
from .mechanism import (
    DatabaseSchema,
    Mechanism,
    compose_disjoint,
    compose_parallel,
    compose_sequential,
    make_group_example,
)
from .prob_core import conditional_entropy, kl_divergence, total_variation

DEFAULT_SEED = 20161024
SUITE_TOL = 1e-12  # solver tolerance used inside the suites


def random_mechanism(
    rng: np.random.Generator,
    max_sizes: tuple[int, ...] = (3, 3),
    max_outputs: int = 4,
    max_space: int | None = None,
) -> Mechanism:
    """Random mechanism with strictly positive entries (so epsilon-DP is finite).

    Rows come from one of three families: flat Dirichlet rows, small
    perturbations of a shared row (the small-epsilon regime), or spiky rows
    mixed with a little uniform mass.
    """
    while True:
        n = int(rng.integers(1, len(max_sizes) + 1))
        sizes = tuple(int(rng.integers(2, max_sizes[j] + 1)) for j in range(n))
        if max_space is None or math.prod(sizes) <= max_space:
            break
    schema = DatabaseSchema(sizes)
    y = int(rng.integers(2, max_outputs + 1))
    family = int(rng.integers(3))
    if family == 0:
        w = rng.dirichlet(np.ones(y), size=schema.size)
    elif family == 1:
        base = rng.dirichlet(np.ones(y))
        lam = rng.uniform(0.0, 0.3)
        w = (1 - lam) * base + lam * rng.dirichlet(np.ones(y), size=schema.size)
    else:
        w = 0.97 * rng.dirichlet(np.full(y, 0.3), size=schema.size) + 0.03 / y
    w = np.maximum(w, 1e-12)
    w /= w.sum(axis=1, keepdims=True)
    return Mechanism(schema, w)


def random_mechanisms(seed: int, count: int, **kwargs) -> list[Mechanism]:
    rng = np.random.default_rng(seed)
    return [random_mechanism(rng, **kwargs) for _ in range(count)]


def _R(name, params, bound, measured, tol=1e-9):
    return bounds.BoundReport(name, params, float(bound), float(measured), tol)


def sandwich_reports(m: Mechanism, tag: str = "") -> list[bounds.BoundReport]:
    """epsilon-DP -> KL-DP -> MI-DP -> (delta)-DP chain and its reverse, for one mechanism."""
    eps = audit.epsilon_exact(m)
    delta = audit.delta_exact(m)
    kl = audit.kl_dp(m)
    mi = capacity.mi_dp(m, tol=SUITE_TOL)
    y, xmax = m.output_size, max(m.schema.entry_sizes)
    tight = bounds.mi_to_delta_tight(mi.value)
    out = [
        _R("kl<=kl_tight(eps)", f"{tag} eps={eps:.6g}", bounds.kl_bound_tight(eps), kl),
        _R("kl<=min(eps,eps^2)", tag, bounds.kl_bound_simple(eps), kl),
        _R("mi_dp<=kl_dp", tag, kl, mi.value, 1e-6),
        _R("delta<=mi_to_delta_tight", tag, tight, delta),
        _R("tight<=loose", tag, bounds.mi_to_delta_loose(mi.value), tight),
        _R("mi_dp<=delta_to_mi", tag, bounds.delta_to_mi(delta, y, xmax), mi.value, 1e-6),
    ]
    for i, v in enumerate(mi.per_entry):
        k = m.schema.entry_sizes[i]
        b = min(bounds.delta_to_mi_tight_y(delta, y), bounds.delta_to_mi_tight_x(delta, k))
        out.append(_R("mi_i<=delta_to_mi_tight", f"{tag} i={i}", b, v, 1e-6))
    curve = audit.tradeoff_curve(m)
    out.append(_R("curve_weakening", tag, 0.0, -curve.weaken_slack, 1e-12))
    return out


def sandwich_suite(seed: int = DEFAULT_SEED, count: int = 500) -> list[bounds.BoundReport]:
    reports = []
    for j, m in enumerate(random_mechanisms(seed, count)):
        reports += sandwich_reports(m, f"#{j}")
    return reports


def _continuity_reports(rng: np.random.Generator, count: int) -> list[bounds.BoundReport]:
    worst = None
    for _ in range(count):
        u, v = (int(s) for s in rng.integers(1, 5, size=2))
        p = rng.dirichlet(np.ones(u * v)).reshape(u, v)
        mix = rng.uniform()
        q = (1 - mix) * p + mix * rng.dirichlet(np.ones(u * v)).reshape(u, v)
        d = total_variation(p.ravel(), q.ravel())
        diff = abs(conditional_entropy(p) - conditional_entropy(q))
        r = _R("cond_entropy_continuity", f"|U|={u} |V|={v} tv={d:.4g}", bounds.cond_entropy_continuity_bound(d, u), diff)
        # rank by how much of the bound is used; raw slack favours trivial |U| = 1 pairs
        used = diff / r.bound if r.bound > 0 else 0.0
        if worst is None or used > worst[0]:
            worst = (used, r)
        if not r.ok():
            return [r]
    return [worst[1]] if worst else []


def _monotone_report(name: str, f: Callable[[float], float], lo: float, hi: float) -> bounds.BoundReport:
    xs = np.linspace(lo, hi, 2001)
    vals = np.array([f(float(x)) for x in xs])
    drop = float(np.max(vals[:-1] - vals[1:])) if vals.size > 1 else 0.0
    return _R(f"monotone:{name}", f"[{lo:.4g},{hi:.4g}]", 0.0, drop, 1e-12)


def bounds_suite(seed: int = DEFAULT_SEED, count: int = 100) -> list[bounds.BoundReport]:
    rng = np.random.default_rng(seed)
    out = []
    for d in np.linspace(0.1, 0.9, 9):
        c = bounds.bsc_capacity(float(d))
        measured = capacity.blahut_arimoto([[0.5 + d / 2, 0.5 - d / 2], [0.5 - d / 2, 0.5 + d / 2]], SUITE_TOL).value
        out.append(_R("bsc_capacity", f"delta={d:.1f}", c + 1e-8, measured, 0.0))
        out.append(_R("bsc_capacity", f"delta={d:.1f}", measured + 1e-8, c, 0.0))
        back = bounds.mi_to_delta_tight(c)
        out.append(_R("bsc_roundtrip", f"delta={d:.1f}", 1e-8, abs(back - d), 0.0))
    for _ in range(count):
        y = int(rng.integers(2, 6))
        p, q = rng.dirichlet(np.ones(y)), rng.dirichlet(np.ones(y))
        out.append(_R("pinsker", f"|Y|={y}", bounds.pinsker_delta(kl_divergence(p, q)), total_variation(p, q)))
        eps = float(rng.uniform(0, 4))
        out.append(_R("kl_tight<=kl_simple", f"eps={eps:.4g}", bounds.kl_bound_simple(eps), bounds.kl_bound_tight(eps)))
    out += _continuity_reports(rng, 100 * count)
    out += [
        _monotone_report("kl_bound_tight", bounds.kl_bound_tight, 0, 10),
        _monotone_report("kl_bound_simple", bounds.kl_bound_simple, 0, 10),
        _monotone_report("pinsker_delta", bounds.pinsker_delta, 0, 3),
        _monotone_report("mi_to_delta_tight", bounds.mi_to_delta_tight, 0, 1),
        _monotone_report("mi_to_delta_loose", bounds.mi_to_delta_loose, 0, 1),
        _monotone_report("ed_weaken", lambda e: bounds.ed_weaken(e, 0.1, 0.0), 0, 5),
        _monotone_report("delta_to_mi_tight_y", lambda d: bounds.delta_to_mi_tight_y(d, 4), 0, 1),
        _monotone_report("delta_to_mi_tight_x", lambda d: bounds.delta_to_mi_tight_x(d, 4), 0, 1),
        _monotone_report("cond_entropy_continuity", lambda d: bounds.cond_entropy_continuity_bound(d, 3), 0, 1),
        # the two 2h(.) + 2(.)ln M forms turn over at M / (M + 1)
        _monotone_report("delta_to_mi", lambda d: bounds.delta_to_mi(d, 5, 4), 0, 5 / 6),
        _monotone_report("group_mi_bound", lambda v: bounds.group_mi_bound(v, 2, 5, 2), 0, (5 / 6) ** 2 / 8),
        _monotone_report("group_bounds", lambda e: bounds.group_bounds(e, 0.05, 3)[2][1], 0, 3),
    ]
    return out


def composition_suite(seed: int = DEFAULT_SEED, count: int = 100) -> list[bounds.BoundReport]:
    rng = np.random.default_rng(seed)
    out = []
    for j in range(count):
        m1 = random_mechanism(rng, max_sizes=(3, 2), max_outputs=3)
        w2 = rng.dirichlet(np.ones(int(rng.integers(2, 4))), size=m1.schema.size)
        m2 = Mechanism(m1.schema, w2)
        mi1 = capacity.mi_dp(m1, SUITE_TOL).value
        mi2 = capacity.mi_dp(m2, SUITE_TOL).value
        par = compose_parallel(m1, m2)
        out.append(_R("parallel_mi_additive", f"#{j}", mi1 + mi2, capacity.mi_dp(par, SUITE_TOL).value, 1e-6))
        out.append(_R("parallel_eps_additive", f"#{j}", audit.epsilon_exact(m1) + audit.epsilon_exact(m2),
                      audit.epsilon_exact(par), 1e-9))

        follow = [Mechanism(m1.schema, rng.dirichlet(np.ones(2), size=m1.schema.size)) for _ in range(m1.output_size)]
        seq = compose_sequential(m1, follow)
        worst_follow = max(capacity.mi_dp(f, SUITE_TOL).value for f in follow)
        out.append(_R("sequential_mi_additive", f"#{j}", mi1 + worst_follow, capacity.mi_dp(seq, SUITE_TOL).value, 1e-6))

        a = random_mechanism(rng, max_sizes=(3,), max_outputs=3)
        b = random_mechanism(rng, max_sizes=(3, 2), max_outputs=3)
        sizes = a.schema.entry_sizes + b.schema.entry_sizes
        order = rng.permutation(len(sizes))
        # place a's entries and b's entries at shuffled positions of the joint schema
        pos_a = [int(np.flatnonzero(order == t)[0]) for t in range(a.n)]
        pos_b = [int(np.flatnonzero(order == a.n + t)[0]) for t in range(b.n)]
        joint_sizes = [0] * len(sizes)
        for t, p in enumerate(pos_a):
            joint_sizes[p] = a.schema.entry_sizes[t]
        for t, p in enumerate(pos_b):
            joint_sizes[p] = b.schema.entry_sizes[t]
        disj = compose_disjoint(a, pos_a, b, pos_b, DatabaseSchema(tuple(joint_sizes)))
        mia = capacity.mi_dp(a, SUITE_TOL).value
        mib = capacity.mi_dp(b, SUITE_TOL).value
        mid = capacity.mi_dp(disj, SUITE_TOL).value
        out.append(_R("disjoint_mi_max", f"#{j}", max(mia, mib), mid, 1e-6))
        out.append(_R("disjoint_mi_attained", f"#{j}", mid, max(mia, mib), 1e-6))
    return out


def group_suite(seed: int = DEFAULT_SEED, count: int = 500) -> list[bounds.BoundReport]:
    out = []
    for j, m in enumerate(random_mechanisms(seed, count)):
        out += group_reports(m, f"#{j}")
    out += group_reports(make_group_example(0.4, 4), "example")
    return out


def group_reports(m: Mechanism, tag: str = "") -> list[bounds.BoundReport]:
    out = []
    mi = capacity.mi_dp(m, SUITE_TOL).value
    for k in range(1, m.n + 1):
        g = audit.group_closeness(m, k)
        out.append(_R("group_epsilon", f"{tag} k={k}", g.epsilon_bound, g.max_log_ratio, 1e-12))
        out.append(_R("group_delta", f"{tag} k={k}", g.delta_bound, g.max_tv, 1e-12))
        out.append(_R("group_general", f"{tag} k={k} eps={g.worst_point[0]:.4g}", g.worst_point[2], g.worst_point[1], 1e-12))
        bound = bounds.group_mi_bound(mi, k, m.output_size, max(m.schema.entry_sizes))
        for group in itertools.combinations(range(m.n), k):
            measured = capacity.group_mi(m, group, SUITE_TOL)
            out.append(_R("group_mi", f"{tag} I={list(group)}", bound, measured, 1e-6))
    return out


SUITES: dict[str, Callable[..., list[bounds.BoundReport]]] = {
    "sandwich": sandwich_suite,
    "bounds": bounds_suite,
    "composition": composition_suite,
    "group": group_suite,
}


def violations(reports: list[bounds.BoundReport]) -> list[bounds.BoundReport]:
    return [r for r in reports if not r.ok()]
