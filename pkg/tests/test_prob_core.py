import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midp.prob_core import (
    LN2,
    ClosenessParams,
    DimensionError,
    Dist,
    DomainError,
    JointDist,
    as_channel,
    binary_entropy,
    binary_entropy_inv,
    closeness_delta,
    conditional_entropy,
    entropy,
    hockey_stick,
    is_close,
    kl_divergence,
    mutual_information,
    renyi_divergence,
    sibson_mi,
    total_variation,
)


@st.composite
def dists(draw, size=None, positive=False):
    k = size if size is not None else draw(st.integers(2, 6))
    lo = 1e-3 if positive else 0.0
    w = np.array(draw(st.lists(st.floats(lo, 1.0), min_size=k, max_size=k)))
    if w.sum() == 0:
        w[0] = 1.0
    return w / w.sum()


@st.composite
def dist_pairs(draw, positive=False):
    k = draw(st.integers(2, 6))
    return draw(dists(k, positive)), draw(dists(k, positive))


@st.composite
def channels(draw):
    rows, cols = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    return np.array([draw(dists(cols)) for _ in range(rows)])


def sym_pair(eps):
    a = math.exp(eps) / (1 + math.exp(eps))
    return [a, 1 - a], [1 - a, a]


# -- construction --------------------------------------------------------------

def test_dist_renormalizes_within_tolerance():
    d = Dist([0.5, 0.5 + 5e-10])
    assert d.mass.sum() == pytest.approx(1.0, abs=1e-15)
    assert d.alphabet_size == 2


@pytest.mark.parametrize("bad", [[0.5, 0.4], [1.2, -0.2], [np.nan, 1.0]])
def test_dist_rejects_bad_mass(bad):
    with pytest.raises(ValueError):
        Dist(bad)


def test_dist_is_immutable():
    d = Dist([0.25, 0.75])
    with pytest.raises(ValueError):
        d.mass[0] = 1.0


def test_dist_equality():
    assert Dist([0.3, 0.7]) == Dist([0.3, 0.7])
    assert Dist([0.3, 0.7]) != Dist([0.7, 0.3])


def test_closeness_params_domain():
    with pytest.raises(DomainError):
        ClosenessParams(-1.0, 0.0)
    with pytest.raises(DomainError):
        ClosenessParams(1.0, 1.5)


def test_channel_row_error_names_row():
    with pytest.raises(ValueError, match="row 1"):
        as_channel([[0.5, 0.5], [0.4, 0.5]])


# -- kl / tv / hockey stick ----------------------------------------------------

def test_kl_identity():
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0


def test_kl_point_mass():
    assert kl_divergence([1, 0], [0.5, 0.5]) == pytest.approx(LN2, abs=1e-15)


def test_kl_symmetric_pair_closed_form():
    p, q = sym_pair(1.0)
    assert kl_divergence(p, q) == pytest.approx((math.e - 1) / (math.e + 1), abs=1e-12)
    assert kl_divergence(p, q) == pytest.approx(0.46212, abs=1e-5)


def test_kl_support_violation_is_inf():
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf


def test_kl_dimension_mismatch():
    with pytest.raises(DimensionError):
        kl_divergence([0.5, 0.5], [0.2, 0.3, 0.5])


def test_tv_examples():
    assert total_variation([0.2, 0.8], [0.2, 0.8]) == 0.0
    assert total_variation([1, 0], [0, 1]) == 1.0
    assert total_variation([0.9, 0.1], [0.1, 0.9]) == pytest.approx(0.8)


def test_hockey_stick_examples():
    p, q = [0.9, 0.1], [0.5, 0.5]
    assert hockey_stick(p, p, 1.3) == 0.0
    assert hockey_stick(p, q, 0.0) == total_variation(p, q)
    assert hockey_stick(p, q, math.log(1.5)) == pytest.approx(0.15, abs=1e-15)


def test_closeness_delta_examples():
    p, q = [0.9, 0.1], [0.1, 0.9]
    assert closeness_delta(p, p, 2.0) == 0.0
    assert closeness_delta(p, q, 0.0) == pytest.approx(0.8)
    assert closeness_delta(p, q, math.log(9)) == pytest.approx(0.0, abs=1e-15)
    assert is_close(p, q, ClosenessParams(0.0, 0.8 + 1e-12))
    assert not is_close(p, q, ClosenessParams(0.0, 0.7))


@settings(max_examples=300, deadline=None)
@given(dist_pairs())
def test_hockey_stick_at_zero_is_tv(pq):
    p, q = pq
    assert hockey_stick(p, q, 0.0) == total_variation(p, q)


@settings(max_examples=300, deadline=None)
@given(dist_pairs())
def test_pinsker(pq):
    p, q = pq
    assert total_variation(p, q) <= math.sqrt(kl_divergence(p, q) / 2) + 1e-12


def test_pinsker_ten_thousand_pairs():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        k = int(rng.integers(2, 7))
        p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
        assert total_variation(p, q) <= math.sqrt(kl_divergence(p, q) / 2) + 1e-12


@settings(max_examples=300, deadline=None)
@given(dist_pairs(positive=True))
def test_kl_bounded_by_log_ratio(pq):
    p, q = pq
    eps = float(np.max(np.abs(np.log(p) - np.log(q))))
    kl = kl_divergence(p, q)
    if eps == 0:
        assert kl == 0
        return
    up, down = math.expm1(eps), -math.expm1(-eps)
    assert kl <= eps * up * down / (up + down) + 1e-12
    assert kl <= min(eps, eps * eps) + 1e-12


@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0, 2.0, 4.0])
def test_symmetric_pair_attains_tight_bound(eps):
    p, q = sym_pair(eps)
    expected = eps * math.tanh(eps / 2)
    assert kl_divergence(p, q) == pytest.approx(expected, abs=1e-10)
    assert kl_divergence(p, q) == pytest.approx(kl_divergence(q, p), abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(dist_pairs())
def test_closeness_delta_monotone_and_convex_in_exp_eps(pq):
    p, q = pq
    g = np.linspace(1.0, 6.0, 41)
    d = np.array([closeness_delta(p, q, math.log(x)) for x in g])
    assert np.all(np.diff(d) <= 1e-12)
    # equal spacing in e^eps: second differences non-negative
    assert np.all(d[:-2] - 2 * d[1:-1] + d[2:] >= -1e-12)


# -- binary entropy -------------------------------------------------------------

def test_binary_entropy_examples():
    assert binary_entropy(0.5) == pytest.approx(LN2, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    # 0.4999159 bits
    assert binary_entropy(0.11) == pytest.approx(0.4999159 * LN2, abs=1e-7)
    assert binary_entropy(0.11) == pytest.approx(0.34651, abs=1e-5)


def test_binary_entropy_domain():
    with pytest.raises(DomainError):
        binary_entropy(1.5)
    with pytest.raises(DomainError):
        binary_entropy_inv(1.0)


def test_binary_entropy_inverse_examples():
    assert binary_entropy_inv(0.0) == 0.0
    assert binary_entropy_inv(LN2) == 0.5
    assert binary_entropy_inv(binary_entropy(0.11)) == pytest.approx(0.11, abs=1e-9)


@settings(max_examples=500, deadline=None)
@given(st.floats(0.0, 0.5 - 1e-7))
def test_binary_entropy_roundtrip(x):
    assert abs(binary_entropy_inv(binary_entropy(x)) - x) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5 - 1e-7, 0.5))
def test_binary_entropy_roundtrip_flat_zone(x):
    # h(1/2 - d) = ln 2 - 2d^2 + O(d^4): for d below ~1e-8 every such x rounds to
    # the same double, so recovery is limited to sqrt(ulp(ln 2)) ~ 1.1e-8
    assert abs(binary_entropy_inv(binary_entropy(x)) - x) <= 2e-8


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, LN2))
def test_binary_entropy_inverse_residual(y):
    assert abs(binary_entropy(binary_entropy_inv(y)) - y) <= 1e-12


# -- renyi / sibson / mutual information ---------------------------------------

def test_renyi_examples():
    assert renyi_divergence([0.3, 0.7], [0.3, 0.7], 2.0) == pytest.approx(0.0, abs=1e-15)
    assert renyi_divergence([1, 0], [0.5, 0.5], 2.0) == pytest.approx(LN2, abs=1e-15)


def test_renyi_approaches_kl():
    rng = np.random.default_rng(3)
    p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    kl = kl_divergence(p, q)
    for a in (1 - 1e-4, 1 + 1e-4):
        assert renyi_divergence(p, q, a) == pytest.approx(kl, abs=1e-4 * 10)
        assert abs(renyi_divergence(p, q, a) - kl) <= 1e-3 * kl + 1e-6


def test_renyi_domain():
    with pytest.raises(DomainError):
        renyi_divergence([0.5, 0.5], [0.5, 0.5], 1.0)
    with pytest.raises(DomainError):
        renyi_divergence([0.5, 0.5], [0.5, 0.5], -0.5)


@settings(max_examples=200, deadline=None)
@given(dist_pairs(positive=True))
def test_renyi_nondecreasing_in_order(pq):
    p, q = pq
    vals = [renyi_divergence(p, q, a) for a in (0.25, 0.5, 0.9, 1.5, 2, 4, 16)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_mutual_information_examples():
    assert mutual_information([0.5, 0.5], [[0.3, 0.7], [0.3, 0.7]]) == 0.0
    assert mutual_information([0.5, 0.5], np.eye(2)) == pytest.approx(LN2, abs=1e-15)
    bsc = [[0.89, 0.11], [0.11, 0.89]]
    assert mutual_information([0.5, 0.5], bsc) == pytest.approx(LN2 - binary_entropy(0.11), abs=1e-14)


def test_mutual_information_shape_mismatch():
    with pytest.raises(DimensionError):
        mutual_information([1.0], np.eye(2))


def test_sibson_examples():
    w = [[0.7, 0.3], [0.2, 0.8]]
    for a in (0.5, 1.0, 2.0, 64.0):
        assert sibson_mi([1.0, 0.0], w, a) == pytest.approx(0.0, abs=1e-15)
    assert sibson_mi([0.5, 0.5], np.eye(2), 2.0) == pytest.approx(LN2, abs=1e-14)
    assert sibson_mi([0.4, 0.6], w, 1.0) == pytest.approx(mutual_information([0.4, 0.6], w), abs=1e-9)


def test_sibson_domain():
    with pytest.raises(DomainError):
        sibson_mi([0.5, 0.5], np.eye(2), math.inf)
    with pytest.raises(DomainError):
        sibson_mi([0.5, 0.5], np.eye(2), 0.0)


def test_sibson_near_one_matches_shannon():
    rng = np.random.default_rng(5)
    px, w = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4), size=3)
    mi = mutual_information(px, w)
    assert sibson_mi(px, w, 1 + 1e-6) == pytest.approx(mi, abs=1e-5)


@settings(max_examples=200, deadline=None)
@given(channels(), st.data())
def test_sibson_nondecreasing_in_alpha(w, data):
    px = data.draw(dists(w.shape[0]))
    vals = [sibson_mi(px, w, a) for a in (0.5, 1, 2, 4, 64)]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


@settings(max_examples=200, deadline=None)
@given(channels(), st.data())
def test_mutual_information_bounds(w, data):
    px = data.draw(dists(w.shape[0]))
    mi = mutual_information(px, w)
    assert 0 <= mi <= min(entropy(px), math.log(w.shape[1])) + 1e-12


# -- entropy -------------------------------------------------------------------

def test_entropy_uniform():
    assert entropy([0.25] * 4) == pytest.approx(math.log(4))


def test_conditional_entropy_examples():
    prod = np.outer([0.5, 0.5], [0.2, 0.3, 0.5])
    assert conditional_entropy(prod) == pytest.approx(LN2, abs=1e-14)
    assert conditional_entropy(np.diag([0.4, 0.6])) == pytest.approx(0.0, abs=1e-15)
    assert conditional_entropy(JointDist(np.full((2, 2), 0.25))) == pytest.approx(LN2, abs=1e-15)


def test_joint_dist_requires_matrix():
    with pytest.raises(DimensionError):
        JointDist([0.5, 0.5])
