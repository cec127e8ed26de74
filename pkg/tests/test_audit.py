import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midp import audit, bounds
from midp.mechanism import (
    DatabaseSchema,
    Mechanism,
    constant_mechanism,
    make_erasure,
    make_group_example,
    make_noisy_count,
    make_randomized_response,
)
from midp.prob_core import closeness_delta, kl_divergence
from midp.verify import random_mechanism, random_mechanisms

LN3 = math.log(3)


def brute_epsilon(m):
    worst = 0.0
    s = m.schema
    for a in range(s.size):
        for b in range(s.size):
            if sum(u != v for u, v in zip(s.decode(a), s.decode(b))) != 1:
                continue
            for pa, pb in zip(m.matrix[a], m.matrix[b]):
                if pa > 0 and pb == 0:
                    return math.inf
                if pa > 0:
                    worst = max(worst, abs(math.log(pa / pb)))
    return worst


def brute_delta(m, eps):
    s = m.schema
    return max(
        (closeness_delta(m.matrix[a], m.matrix[b], eps)
         for a in range(s.size) for b in range(s.size)
         if sum(u != v for u, v in zip(s.decode(a), s.decode(b))) == 1),
        default=0.0,
    )


mechs = st.integers(0, 2**32 - 1).map(lambda seed: random_mechanism(np.random.default_rng(seed)))


def test_constant_mechanism_is_perfectly_private():
    m = constant_mechanism(DatabaseSchema((3, 2)), [0.1, 0.2, 0.7])
    assert audit.epsilon_exact(m) == 0 and audit.delta_exact(m) == 0 and audit.kl_dp(m) == 0
    curve = audit.tradeoff_curve(m)
    assert all(d == 0 for _, d in curve.points)
    assert audit.epsilon_witness(m).pair is None


def test_randomized_response_levels():
    m = make_randomized_response(1, 0.25)
    assert audit.epsilon_exact(m) == pytest.approx(LN3, abs=1e-15)
    assert audit.kl_dp(m) == pytest.approx(0.5 * LN3, abs=1e-14)
    assert audit.kl_dp(m) == pytest.approx(0.54931, abs=1e-5)
    assert audit.delta_exact(m) == pytest.approx(0.5)


def test_group_example_epsilon_infinite():
    m = make_group_example(0.4, 4)
    w = audit.epsilon_witness(m)
    assert math.isinf(w.epsilon)
    a, b = m.matrix[w.pair.a], m.matrix[w.pair.b]
    assert (a[w.output] == 0) != (b[w.output] == 0)


def test_witness_attains_epsilon():
    m = random_mechanism(np.random.default_rng(11))
    w = audit.epsilon_witness(m)
    pa, pb = m.matrix[w.pair.a, w.output], m.matrix[w.pair.b, w.output]
    assert abs(math.log(pa / pb)) == pytest.approx(w.epsilon, abs=1e-15)
    da, db = m.schema.decode(w.pair.a), m.schema.decode(w.pair.b)
    assert [i for i in range(m.n) if da[i] != db[i]] == [w.pair.entry]


def test_zero_zero_cells_impose_nothing():
    m = Mechanism(DatabaseSchema((2,)), [[0.5, 0.5, 0.0], [0.25, 0.75, 0.0]])
    assert audit.epsilon_exact(m) == pytest.approx(math.log(2), abs=1e-15)


def test_delta_at_examples():
    m = make_erasure(4, 0.3)
    assert audit.delta_at(m, 0.0) == pytest.approx(0.3, abs=1e-15)
    rr = make_randomized_response(2, 0.25)
    assert audit.delta_at(rr, LN3) == 0.0
    assert audit.delta_at(rr, 5.0) == 0.0
    with pytest.raises(ValueError):
        audit.delta_at(rr, -1.0)


def test_tradeoff_curve_randomized_response():
    m = make_randomized_response(1, 0.25)
    curve = audit.tradeoff_curve(m, [0.0, LN3 / 2, LN3])
    (e0, d0), (e1, d1), (e2, d2) = curve.points
    assert (e0, d0) == (0.0, 0.5)
    assert 0 < d1 < 0.5 and d1 == pytest.approx(0.75 - math.sqrt(3) * 0.25, abs=1e-15)
    assert e2 == LN3 and d2 == pytest.approx(0.0, abs=1e-15)
    assert curve.weaken_slack >= -1e-12


def test_tradeoff_curve_grid_validation():
    m = make_erasure(2, 0.3)
    with pytest.raises(ValueError):
        audit.tradeoff_curve(m, [1.0, 0.5])
    with pytest.raises(ValueError):
        audit.tradeoff_curve(m, [-0.1, 0.5])


def test_default_grid_shape():
    m = make_randomized_response(1, 0.1)
    g = audit.default_eps_grid(m)
    assert g.size == 64 and g[0] == 0 and g[-1] == pytest.approx(max(math.log(81), 5.0))
    assert np.all(np.diff(g) > 0)


@settings(max_examples=40, deadline=None)
@given(mechs)
def test_epsilon_and_delta_match_brute_force(m):
    assert audit.epsilon_exact(m) == pytest.approx(brute_epsilon(m), rel=1e-12, abs=1e-15)
    for eps in (0.0, 0.2, 1.0):
        assert audit.delta_at(m, eps) == pytest.approx(brute_delta(m, eps), abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(mechs)
def test_delta_curve_monotone_and_convex(m):
    g = np.linspace(1.0, 8.0, 29)
    d = np.array([audit.delta_at(m, math.log(x)) for x in g])
    assert np.all(np.diff(d) <= 1e-12)
    assert np.all(d[:-2] - 2 * d[1:-1] + d[2:] >= -1e-12)


@settings(max_examples=40, deadline=None)
@given(mechs)
def test_kl_dp_matches_pairs_and_sits_below_bounds(m):
    s = m.schema
    brute = max(
        (kl_divergence(m.matrix[a], m.matrix[b]) for a in range(s.size) for b in range(s.size)
         if sum(u != v for u, v in zip(s.decode(a), s.decode(b))) == 1),
        default=0.0,
    )
    kl = audit.kl_dp(m)
    assert kl == pytest.approx(brute, abs=1e-14)
    eps = audit.epsilon_exact(m)
    assert kl <= bounds.kl_bound_tight(eps) + 1e-12
    assert kl <= bounds.kl_bound_simple(eps) + 1e-12


def test_kl_dp_infinite_on_support_mismatch():
    assert audit.kl_dp(make_erasure(3, 0.5)) == math.inf


# -- group closeness ----------------------------------------------------------

def test_group_k1_reproduces_single_entry():
    m = random_mechanism(np.random.default_rng(12), max_sizes=(3, 3))
    g = audit.group_closeness(m, 1)
    assert g.max_log_ratio == audit.epsilon_exact(m)
    assert g.max_tv == audit.delta_exact(m)


def test_group_randomized_response_k2():
    g = audit.group_closeness(make_randomized_response(2, 0.25), 2)
    assert g.max_log_ratio == pytest.approx(2 * LN3, abs=1e-14)
    assert g.holds()


def test_group_example_infinite():
    g = audit.group_closeness(make_group_example(0.4, 4), 2)
    assert math.isinf(g.max_log_ratio) and g.holds()


def test_group_k_range():
    with pytest.raises(ValueError):
        audit.group_closeness(make_erasure(2, 0.3), 2)
    with pytest.raises(ValueError):
        audit.group_closeness(make_erasure(2, 0.3), 0)


def test_group_maxima_monotone_in_k():
    for m in random_mechanisms(21, 30, max_sizes=(3, 2, 2)):
        prev = None
        for k in range(1, m.n + 1):
            g = audit.group_closeness(m, k)
            if prev:
                assert g.max_log_ratio >= prev.max_log_ratio and g.max_tv >= prev.max_tv
            prev = g


def test_group_bounds_hold_on_random_mechanisms():
    for m in random_mechanisms(22, 100):
        for k in range(1, m.n + 1):
            assert audit.group_closeness(m, k).holds(1e-12)


# -- full report --------------------------------------------------------------

def test_privacy_report_noisy_count():
    m = make_noisy_count(3, math.exp(-1))
    r = audit.privacy_report(m)
    assert r.epsilon_exact == pytest.approx(1.0, abs=1e-12)
    assert r.kl_dp <= bounds.kl_bound_tight(r.epsilon_exact) + 1e-12
    assert r.mi_dp <= r.kl_dp + 1e-9
    # any two rows are n neighbor steps apart, so their log-ratio is at most n * eps
    assert r.free_lunch_mi <= bounds.kl_bound_tight(m.n * r.epsilon_exact) + 1e-9
    assert r.solver_converged and r.solver_gap <= 1e-9
    assert len(r.per_entry_mi) == 3 and max(r.per_entry_mi) == r.mi_dp
