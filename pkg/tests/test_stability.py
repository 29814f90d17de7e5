from fractions import Fraction as F
import math

import pytest
from hypothesis import given, settings, strategies as st

from private_blotto.constructive import two_class_instance
from private_blotto.errors import InvalidArrangement, SearchTooLarge
from private_blotto.model import AgentClass, Arrangement, Instance
from private_blotto.stability import (
    Policy, SearchMode, Terminal, best_response_dynamics, compositions, count_arrangements,
    deviations, enumerate_arrangements, enumerate_canonical, find_stable, find_stable_canonical,
    is_stable,
)

import oracle


def cycling_instance(m=4):
    return Instance(m, (AgentClass(1, 1), AgentClass(F(-1, 2), 2)), F(3, 10), "median")


@st.composite
def small_instances(draw, max_items=3, max_agents=5, weighted=True):
    m = draw(st.integers(1, max_items))
    k = draw(st.integers(1, 3))
    biases = draw(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=k, max_size=k, unique=True))
    counts = draw(st.lists(st.integers(1, 3), min_size=k, max_size=k).filter(lambda c: sum(c) <= max_agents))
    cu = draw(st.fractions(0, 3, max_denominator=10))
    kind = draw(st.sampled_from(["median", "mean"]))
    weights = None
    if weighted and draw(st.booleans()):
        weights = tuple(draw(st.lists(st.fractions(F(1, 2), 2, max_denominator=4), min_size=m, max_size=m)))
    return Instance(m, [AgentClass(b, n) for b, n in zip(biases, counts)], cu, kind, weights)


# ---------------------------------------------------------------- single-arrangement checks

def test_witness_moves_onto_bias_one_item():
    inst = cycling_instance(m=3)
    arr = Arrangement.from_text("1x1;1x0;1x0", 2)
    devs = deviations(inst, arr)
    half = inst.class_index(F(-1, 2))
    w = next(d for d in devs if d.class_index == half and d.to_item == 0)
    assert (w.cost_before, w.cost_after) == (F(3, 2), F(3, 4) + F(3, 10))
    assert w.to_dict()["delta_cost"] == "-9/20"


def test_single_class_has_no_deviations():
    inst = Instance(2, (AgentClass(1, 4),))
    assert deviations(inst, Arrangement(((2,), (2,)))) == []


def test_mean_odd_pair_has_deviation():
    inst = two_class_instance(3, 1, 2, "mean", unlabeled_cost=1)
    assert deviations(inst, Arrangement.from_biases(inst, {1: [2, 1], -1: [0, 1]}))


def test_median_tie_arrangement_stable():
    inst = two_class_instance(2, 1, 2, "median", unlabeled_cost=2)
    assert is_stable(inst, Arrangement.from_biases(inst, {1: [1, 1], -1: [1, 0]}))


def test_two_singletons_stable():
    inst = two_class_instance(1, 1, 4, unlabeled_cost=F(11, 10))
    assert is_stable(inst, Arrangement.from_biases(inst, {1: [1, 0, 0, 0], -1: [0, 1, 0, 0]}))


def test_every_arrangement_unstable_in_critical_cell():
    inst = two_class_instance(5, 1, 3)
    assert not any(is_stable(inst, a) for a in enumerate_arrangements(inst))


def test_weak_improvement_is_not_a_deviation():
    # moving the lone agent between two empty-cost-free items leaves its cost unchanged
    inst = Instance(2, (AgentClass(0, 1),), 0)
    assert is_stable(inst, Arrangement(((1,), (0,))))


def test_validate_rejects_mismatch():
    inst = two_class_instance(2, 1, 2)
    with pytest.raises(InvalidArrangement):
        is_stable(inst, Arrangement(((1, 1), (0, 1))))


@settings(max_examples=60, deadline=None)
@given(small_instances(), st.data())
def test_is_stable_matches_oracle(inst, data):
    arrs = list(enumerate_arrangements(inst))
    arr = data.draw(st.sampled_from(arrs))
    expected = oracle.stable(inst.outcome.value, list(inst.biases), list(inst.weights),
                             inst.unlabeled_cost, arr.counts)
    report = is_stable(inst, arr)
    assert report.stable == expected
    assert report.stable == (deviations(inst, arr) == [])
    if report.witness:
        assert report.witness.delta < 0


# ---------------------------------------------------------------- enumeration

def test_composition_examples():
    assert list(compositions(2, 2)) == [(2, 0), (1, 1), (0, 2)]


@pytest.mark.parametrize("m,counts,expected", [(2, (2,), 3), (3, (4, 1), 45), (2, (5, 3), 24)])
def test_arrangement_counts(m, counts, expected):
    inst = Instance(m, [AgentClass(i, n) for i, n in enumerate(counts)])
    assert count_arrangements(inst) == expected
    assert len(set(enumerate_arrangements(inst))) == expected


@given(st.integers(0, 7), st.integers(1, 4))
def test_compositions_stars_and_bars(n, parts):
    comps = list(compositions(n, parts))
    assert len(comps) == math.comb(n + parts - 1, parts - 1)
    assert comps == sorted(set(comps), reverse=True)


def test_budget_guard():
    inst = two_class_instance(10, 10, 6)
    with pytest.raises(SearchTooLarge):
        find_stable(inst, budget=1000)


def test_shards_partition_space():
    inst = two_class_instance(4, 3, 3)
    full = list(enumerate_arrangements(inst))
    parts = [a for k in range(3) for a in enumerate_arrangements(inst, shard=(k, 3))]
    assert sorted(full, key=str) == sorted(parts, key=str)


@settings(max_examples=30, deadline=None)
@given(small_instances(max_items=4, max_agents=6, weighted=False))
def test_canonical_orbits_cover_space(inst):
    total = sum(mult for _, mult in enumerate_canonical(inst))
    assert total == count_arrangements(inst)
    stable_full = find_stable(inst)
    stable_canon = find_stable_canonical(inst)
    assert sum(mult for _, mult in stable_canon) == len(stable_full)
    assert bool(find_stable(inst, symmetric=True)) == bool(stable_full)


def test_canonical_requires_equal_weights():
    with pytest.raises(ValueError):
        find_stable_canonical(two_class_instance(2, 1, 2, weights=(2, 1)))


# ---------------------------------------------------------------- search

@pytest.mark.parametrize("n_a,n_b", [(4, 1), (5, 1)])
def test_median_m3_critical_cells_empty(n_a, n_b):
    assert find_stable(two_class_instance(n_a, n_b, 3)) == []


def test_mean_odd_pair_empty():
    assert find_stable(two_class_instance(3, 1, 2, "mean")) == []


@pytest.mark.parametrize("n_a,n_b", [(2, 0), (2, 1), (2, 2), (4, 2), (4, 4), (6, 3)])
def test_median_m2_mostly_stable(n_a, n_b):
    assert find_stable(two_class_instance(n_a, n_b, 2))


@settings(max_examples=40, deadline=None)
@given(small_instances())
def test_find_stable_matches_oracle(inst):
    assert {a.counts for a in find_stable(inst)} == oracle.stable_set(inst)


def test_first_mode_returns_first_of_all():
    inst = two_class_instance(4, 3, 3, "mean")
    every = find_stable(inst)
    assert find_stable(inst, SearchMode.FIRST) == every[:1]


def test_parallel_search_matches_serial():
    inst = two_class_instance(5, 4, 3)
    assert find_stable(inst, workers=3) == find_stable(inst)
    assert find_stable(inst, "first", workers=3) == find_stable(inst, "first")


@settings(max_examples=25, deadline=None)
@given(small_instances(max_items=3, max_agents=5, weighted=False), st.data())
def test_item_permutation_preserves_stability(inst, data):
    arr = data.draw(st.sampled_from(list(enumerate_arrangements(inst))))
    perm = data.draw(st.permutations(range(inst.num_items)))
    permuted = Arrangement(tuple(arr.counts[p] for p in perm))
    assert is_stable(inst, arr).stable == is_stable(inst, permuted).stable


# ---------------------------------------------------------------- dynamics

@pytest.mark.parametrize("m", [3, 4])
def test_few_agents_dynamics_cycles(m):
    start = Arrangement.from_text("1x1;1x0;1x0" + ";0" * (m - 3), 2)
    traj = best_response_dynamics(cycling_instance(m), start, Policy.FIRST_IMPROVING)
    assert traj.terminal is Terminal.CYCLE_DETECTED
    assert traj.states[traj.cycle_start] == traj.final


def test_dynamics_from_stable_start():
    inst = two_class_instance(3, 3, 4)
    start = Arrangement.from_biases(inst, {1: [1, 1, 1, 0], -1: [1, 1, 0, 1]})
    traj = best_response_dynamics(inst, start)
    assert traj.terminal is Terminal.REACHED_STABLE
    assert traj.states == (start,)


def test_dynamics_mean_reaches_proportional():
    inst = two_class_instance(4, 2, 2, "mean")
    traj = best_response_dynamics(inst, Arrangement.from_biases(inst, {1: [4, 0], -1: [0, 2]}))
    assert traj.terminal is Terminal.REACHED_STABLE
    assert is_stable(inst, traj.final)
    for t, n in enumerate(inst.counts):
        assert all(abs(k - F(n, 2)) <= 1 for k in traj.final.column(t))


def test_dynamics_step_budget():
    traj = best_response_dynamics(cycling_instance(), Arrangement.from_text("1x1;1x0;1x0;0", 2), max_steps=2)
    assert traj.terminal is Terminal.STEP_BUDGET_EXHAUSTED
    assert len(traj.moves) == 2


@settings(max_examples=40, deadline=None)
@given(small_instances(max_items=4, max_agents=6), st.sampled_from(list(Policy)), st.data())
def test_dynamics_consistency(inst, policy, data):
    start = data.draw(st.sampled_from(list(enumerate_arrangements(inst))))
    traj = best_response_dynamics(inst, start, policy, max_steps=200)
    for before, move, after in zip(traj.states, traj.moves, traj.states[1:]):
        assert move in deviations(inst, before)
        assert after == before.moved(move.class_index, move.from_item, move.to_item)
        if policy is Policy.BEST_IMPROVING:
            assert move.delta == min(d.delta for d in deviations(inst, before))
    if traj.terminal is Terminal.REACHED_STABLE:
        assert is_stable(inst, traj.final)
    elif traj.terminal is Terminal.CYCLE_DETECTED:
        assert traj.states[traj.cycle_start] == traj.final
        assert traj.cycle_start < len(traj.states) - 1
