from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from private_blotto.constructive import (
    RegionVariant, ab_arrangement, auto_unlabeled_cost, construct_many_agents, construct_median_stable,
    construct_tie_based, empty_threshold, in_median_critical_region, many_agents_hypothesis,
    singleton_arrangement, stabilizing_weights, stable_exists_median, threshold_for, two_class_instance,
)
from private_blotto.errors import PreconditionViolated
from private_blotto.model import AgentClass, Arrangement, Instance
from private_blotto.stability import find_stable, is_stable

import oracle


def cells(m, n_lo, n_hi):
    return [(a, b) for a in range(0, n_hi + 1) for b in range(0, a + 1) if n_lo <= a + b <= n_hi]


# ---------------------------------------------------------------- thresholds

def test_threshold_examples():
    assert empty_threshold(two_class_instance(1, 1, 2)) == 1
    assert empty_threshold(Instance(3, (AgentClass(1, 2),))) == 0
    assert empty_threshold(two_class_instance(1, 1, 2, weights=(2, 1))) == 2
    assert auto_unlabeled_cost((1, -1)) == F(11, 10)
    assert threshold_for((5, -3)) == 4


# ---------------------------------------------------------------- region

def test_region_examples():
    for variant in RegionVariant:
        assert in_median_critical_region(5, 1, 3, variant)
    assert in_median_critical_region(4, 1, 3, "inclusive")
    assert not in_median_critical_region(4, 1, 3, "strict")


def test_strict_region_empty_for_two_items():
    assert not any(in_median_critical_region(a, b, 2, "strict") for a, b in cells(2, 2, 12))


def test_region_symmetric():
    assert in_median_critical_region(1, 5, 3) and in_median_critical_region(1, 4, 3)


def test_stable_exists_examples():
    assert not stable_exists_median(5, 1, 3)
    assert stable_exists_median(7, 0, 3)
    assert stable_exists_median(4, 4, 3)
    with pytest.raises(PreconditionViolated):
        stable_exists_median(1, 1, 3)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_predicate_matches_search(m):
    for a, b in cells(m, m, 2 * m + 4):
        found = bool(find_stable(two_class_instance(a, b, m), "first", symmetric=True))
        assert found == stable_exists_median(a, b, m), (a, b, m)


def test_carved_boundary_point():
    # (6, 2) sits on the inclusive boundary for m=4, yet N == 2m with even counts
    assert in_median_critical_region(6, 2, 4)
    assert stable_exists_median(6, 2, 4)
    assert find_stable(two_class_instance(6, 2, 4), "first")


# ---------------------------------------------------------------- constructors

def test_many_agents_examples():
    arr = construct_many_agents(4, 4, 2)
    inst = two_class_instance(4, 4, 2)
    assert arr == ab_arrangement(inst, [0, 4], [4, 0])
    arr = construct_many_agents(5, 3, 3)
    inst = two_class_instance(5, 3, 3)
    assert arr == ab_arrangement(inst, [0, 2, 3], [3, 0, 0])
    assert construct_many_agents(6, 0, 3).counts == ((2,), (2,), (2,))


def test_tie_based_examples():
    inst = two_class_instance(3, 3, 4)
    assert construct_tie_based(3, 3, 4) == ab_arrangement(inst, [1, 1, 1, 0], [1, 1, 0, 1])
    inst = two_class_instance(2, 2, 4)
    assert all(sum(row) == 1 for row in construct_tie_based(2, 2, 4).counts)
    inst = two_class_instance(4, 3, 4)
    assert construct_tie_based(4, 3, 4) == ab_arrangement(inst, [2, 1, 1, 0], [2, 0, 0, 1])


def test_constructor_preconditions():
    with pytest.raises(PreconditionViolated):
        construct_many_agents(3, 2, 3)
    with pytest.raises(PreconditionViolated):
        construct_tie_based(5, 1, 3)
    with pytest.raises(PreconditionViolated):
        construct_tie_based(1, 1, 3)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_many_agents_structure(m):
    for a, b in cells(m, 2 * m, 12):
        if not many_agents_hypothesis(a, b, m):
            continue
        arr = construct_many_agents(a, b, m)
        inst = two_class_instance(a, b, m)
        assert is_stable(inst, arr)
        for row in arr.counts:
            kinds = [k for k in row if k]
            if min(a, b) <= 1 or m == 1:
                continue
            # homogeneous items with at least two agents: one move never shifts a median
            assert len(kinds) == 1 and kinds[0] >= 2


@pytest.mark.parametrize("m", [2, 3, 4])
def test_dispatch_covers_existence_region(m):
    for a, b in cells(m, m, 12):
        if stable_exists_median(a, b, m):
            arr = construct_median_stable(a, b, m)
            assert is_stable(two_class_instance(a, b, m), arr)
            assert a + b == sum(map(sum, arr.counts))
        else:
            with pytest.raises(PreconditionViolated):
                construct_median_stable(a, b, m)


weights_for_ties = st.lists(st.fractions(1, 2, max_denominator=8), min_size=2, max_size=4).map(
    lambda ws: sorted(ws, reverse=True)).map(lambda ws: [ws[0], *ws[:1], *ws[2:]][:len(ws)])


@settings(max_examples=60, deadline=None)
@given(ws=weights_for_ties, data=st.data())
def test_tie_construction_weighted(ws, data):
    m = len(ws)
    a = data.draw(st.integers(1, 2 * m))
    b = data.draw(st.integers(1, a))
    assume(m <= a + b <= 2 * m and not in_median_critical_region(a, b, m))
    arr = construct_tie_based(a, b, m, weights=ws)
    assert is_stable(two_class_instance(a, b, m, weights=ws), arr)


def test_tie_weights_rejected():
    with pytest.raises(PreconditionViolated):
        construct_tie_based(2, 2, 3, weights=(1, 2, 1))


# ---------------------------------------------------------------- singletons and weighted mean

def test_singleton_examples():
    base = (AgentClass(1, 1), AgentClass(F(-1, 2), 2))
    arr, ok = singleton_arrangement(Instance(4, base, 1))
    assert ok and all(sum(r) <= 1 for r in arr.counts)
    _, ok = singleton_arrangement(Instance(4, base, F(3, 10)))
    assert not ok
    _, ok = singleton_arrangement(Instance(3, (AgentClass(2, 1),), 0))
    assert ok


@settings(max_examples=40, deadline=None)
@given(m=st.integers(2, 5), data=st.data())
def test_singleton_condition_sufficient(m, data):
    n = data.draw(st.integers(1, m))
    biases = data.draw(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=n, max_size=n, unique=True))
    ws = data.draw(st.lists(st.fractions(F(1, 2), 2, max_denominator=4), min_size=m, max_size=m))
    cu = data.draw(st.fractions(0, 6, max_denominator=4))
    inst = Instance(m, [AgentClass(b, 1) for b in biases], cu, data.draw(st.sampled_from(["median", "mean"])), ws)
    arr, ok = singleton_arrangement(inst)
    if ok:
        assert oracle.stable(inst.outcome.value, list(inst.biases), list(inst.weights), cu, arr.counts)


@pytest.mark.parametrize("n_a,n_b,w1,w2", [(3, 1, F(3, 4), F(1, 4)), (5, 3, F(21, 23), F(2, 23))])
def test_stabilizing_weights_examples(n_a, n_b, w1, w2):
    got1, got2, arr = stabilizing_weights(n_a, n_b)
    assert (got1, got2) == (w1, w2)
    inst = two_class_instance(n_a, n_b, 2, "mean", weights=(w1, w2))
    assert arr == ab_arrangement(inst, [n_a - 1, 1], [n_b, 0])


def test_stabilizing_weights_single_class():
    _, _, arr = stabilizing_weights(2, 0)
    assert arr.counts == ((1,), (1,))


# ---------------------------------------------------------------- threshold regime

@settings(max_examples=30, deadline=None)
@given(m=st.integers(2, 3), data=st.data())
def test_no_empty_items_above_threshold(m, data):
    a = data.draw(st.integers(1, 6))
    b = data.draw(st.integers(0, min(a, 7 - a)))
    assume(a + b >= m)
    lo, hi = sorted(data.draw(st.lists(st.fractions(-4, 4, max_denominator=3), min_size=2, max_size=2, unique=True)))
    cu = threshold_for((lo, hi)) + data.draw(st.fractions(F(1, 100), 2, max_denominator=100))
    inst = two_class_instance(a, b, m, data.draw(st.sampled_from(["median", "mean"])),
                              unlabeled_cost=cu, bias_a=hi, bias_b=lo)
    for arr in find_stable(inst):
        assert not arr.empty_items()


@pytest.mark.parametrize("kind", ["median", "mean"])
@pytest.mark.parametrize("m", [2, 3])
def test_bias_independence(kind, m):
    for a, b in cells(m, m, 8):
        one = two_class_instance(a, b, m, kind, unlabeled_cost=F(11, 10))
        two = two_class_instance(a, b, m, kind, unlabeled_cost=F(41, 10), bias_a=5, bias_b=-3)
        assert {x.counts for x in find_stable(one)} == {x.counts for x in find_stable(two)}


@settings(max_examples=40, deadline=None)
@given(m=st.integers(2, 6), data=st.data())
def test_two_agents_always_stable(m, data):
    biases = data.draw(st.lists(st.floats(-5, 5), min_size=2, max_size=2, unique=True))
    ws = data.draw(st.lists(st.floats(0.1, 3), min_size=m, max_size=m))
    cu = data.draw(st.floats(0, 3))
    inst = Instance(m, [AgentClass(b, 1) for b in biases], cu, data.draw(st.sampled_from(["median", "mean"])), ws)
    assert find_stable(inst, "first")


@settings(max_examples=30, deadline=None)
@given(m=st.integers(4, 5), three=st.booleans(), data=st.data())
def test_three_agents_mean_stable(m, three, data):
    k = 3 if three else 2
    biases = data.draw(st.lists(st.fractions(-5, 5, max_denominator=6), min_size=k, max_size=k, unique=True))
    counts = [1, 1, 1] if three else [2, 1]
    cu = data.draw(st.fractions(0, 5, max_denominator=12))
    inst = Instance(m, [AgentClass(b, n) for b, n in zip(biases, counts)], cu, "mean")
    assert find_stable(inst, "first")
