"""Pure-Nash stability: improving moves, exhaustive search and best-response dynamics."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .errors import SearchTooLarge
from .model import Arrangement, Instance, Number, improves, number_to_json

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class DeviationWitness:
    class_index: int
    from_item: int
    to_item: int
    cost_before: Number
    cost_after: Number

    @property
    def delta(self) -> Number:
        return self.cost_after - self.cost_before

    def to_dict(self) -> dict:
        return {
            "class": self.class_index,
            "from": self.from_item,
            "to": self.to_item,
            "delta_cost": number_to_json(self.delta),
        }

    def __str__(self) -> str:
        return (f"class {self.class_index}: item {self.from_item} -> item {self.to_item} "
                f"(cost {self.cost_before} -> {self.cost_after})")


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    witness: DeviationWitness | None = None

    def __bool__(self) -> bool:
        return self.stable


class _CostTable:
    """Memoized per-item costs; an improving-move scan only touches two items."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self._cache: dict = {}

    def __call__(self, t: int, row: tuple[int, ...], i: int) -> Number:
        key = (t, row, i)
        v = self._cache.get(key)
        if v is None:
            v = self._cache[key] = self.instance.item_cost(t, row, i)
        return v


def _bump(row: tuple[int, ...], t: int, d: int) -> tuple[int, ...]:
    return row[:t] + (row[t] + d,) + row[t + 1:]


def _iter_deviations(instance: Instance, arrangement: Arrangement,
                     table: _CostTable) -> Iterator[DeviationWitness]:
    rows = arrangement.counts
    m, exact = instance.num_items, instance.exact
    for t in range(instance.num_classes):
        per_item = [table(t, rows[i], i) for i in range(m)]
        before = sum(per_item)
        for i in range(m):
            if rows[i][t] == 0:
                continue
            src_after = table(t, _bump(rows[i], t, -1), i)
            for j in range(m):
                if j == i:
                    continue
                dst_after = table(t, _bump(rows[j], t, 1), j)
                after = before + (src_after + dst_after) - (per_item[i] + per_item[j])
                if improves(before, after, exact):
                    yield DeviationWitness(t, i, j, before, after)


def deviations(instance: Instance, arrangement: Arrangement) -> list[DeviationWitness]:
    """Every strictly improving single-agent move, ordered by (class, from, to)."""
    arrangement.validate(instance)
    return list(_iter_deviations(instance, arrangement, _CostTable(instance)))


def is_stable(instance: Instance, arrangement: Arrangement, *, _table: _CostTable | None = None) -> StabilityReport:
    if _table is None:
        arrangement.validate(instance)
        _table = _CostTable(instance)
    witness = next(_iter_deviations(instance, arrangement, _table), None)
    return StabilityReport(witness is None, witness)


# ---------------------------------------------------------------- enumeration

def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Compositions of ``n`` into ``parts`` non-negative parts, lexicographically descending."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, parts - 1):
            yield (first, *rest)


def count_arrangements(instance: Instance) -> int:
    m = instance.num_items
    return math.prod(math.comb(n + m - 1, m - 1) for n in instance.counts)


def _check_budget(size: int, budget: int) -> None:
    if size > budget:
        raise SearchTooLarge(f"{size} arrangements exceed the search budget of {budget}")


def enumerate_arrangements(instance: Instance, *, budget: int = DEFAULT_BUDGET,
                           shard: tuple[int, int] | None = None) -> Iterator[Arrangement]:
    """All arrangements, product over classes of compositions, class 0 outermost.

    ``shard=(index, count)`` restricts to class-0 compositions whose position is
    ``index`` mod ``count``; shards partition the space.
    """
    _check_budget(count_arrangements(instance), budget)
    m = instance.num_items
    per_class = [list(compositions(n, m)) for n in instance.counts]
    if shard is not None:
        index, count = shard
        per_class[0] = per_class[0][index::count]
    for cols in itertools.product(*per_class):
        yield Arrangement(tuple(zip(*cols)))


def _rows_desc(remaining: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    return itertools.product(*(range(r, -1, -1) for r in remaining))


def _canonical(remaining: tuple[int, ...], slots: int, upper) -> Iterator[tuple[tuple[int, ...], ...]]:
    if slots == 1:
        if upper is None or remaining <= upper:
            yield (remaining,)
        return
    for row in _rows_desc(remaining):
        if upper is not None and row > upper:
            continue
        rest = tuple(a - b for a, b in zip(remaining, row))
        # later rows are lexicographically <= row, so their first entry is <= row[0]
        if rest[0] > row[0] * (slots - 1):
            break
        for tail in _canonical(rest, slots - 1, row):
            yield (row, *tail)


def _multiplicity(rows) -> int:
    out = math.factorial(len(rows))
    for k in Counter(rows).values():
        out //= math.factorial(k)
    return out


def enumerate_canonical(instance: Instance, *, budget: int = DEFAULT_BUDGET) -> Iterator[tuple[Arrangement, int]]:
    """One representative per item-permutation class (rows sorted descending), with its
    orbit size. Only meaningful when all item weights are equal."""
    # canonical space is at least |all| / m!; that is what the budget guards
    _check_budget(-(-count_arrangements(instance) // math.factorial(instance.num_items)), budget)
    for rows in _canonical(instance.counts, instance.num_items, None):
        yield Arrangement(rows), _multiplicity(rows)


class SearchMode(str, Enum):
    FIRST = "first"
    ALL = "all"


def _order_key(arr: Arrangement) -> tuple[int, ...]:
    return tuple(-v for t in range(arr.num_classes) for v in arr.column(t))


def _search_shard(instance: Instance, mode: SearchMode, budget: int,
                  shard: tuple[int, int] | None) -> list[Arrangement]:
    table = _CostTable(instance)
    found = []
    for arr in enumerate_arrangements(instance, budget=budget, shard=shard):
        if is_stable(instance, arr, _table=table):
            found.append(arr)
            if mode is SearchMode.FIRST:
                break
    return found


def find_stable(instance: Instance, mode: SearchMode | str = SearchMode.ALL, *,
                budget: int = DEFAULT_BUDGET, symmetric: bool = False,
                workers: int = 1) -> list[Arrangement]:
    """Stable arrangements in enumeration order. An empty result certifies non-existence.

    ``symmetric=True`` (equal weights only) searches canonical representatives;
    existence answers are unchanged but ALL mode then lists one arrangement per orbit.
    """
    mode = SearchMode(mode)
    if symmetric and instance.equal_weights:
        found = []
        table = _CostTable(instance)
        for arr, _ in enumerate_canonical(instance, budget=budget):
            if is_stable(instance, arr, _table=table):
                found.append(arr)
                if mode is SearchMode.FIRST:
                    break
        return found
    if workers <= 1:
        return _search_shard(instance, mode, budget, None)
    _check_budget(count_arrangements(instance), budget)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_search_shard, *zip(*[(instance, mode, budget, (w, workers)) for w in range(workers)]))
        merged = sorted((a for part in parts for a in part), key=_order_key)
    return merged[:1] if mode is SearchMode.FIRST else merged


def find_stable_canonical(instance: Instance, *, budget: int = DEFAULT_BUDGET) -> list[tuple[Arrangement, int]]:
    """Stable canonical representatives with orbit sizes (equal weights only)."""
    if not instance.equal_weights:
        raise ValueError("canonical search requires equal item weights")
    table = _CostTable(instance)
    return [(arr, mult) for arr, mult in enumerate_canonical(instance, budget=budget)
            if is_stable(instance, arr, _table=table)]


# ---------------------------------------------------------------- dynamics

class Policy(str, Enum):
    FIRST_IMPROVING = "first"
    BEST_IMPROVING = "best"


class Terminal(str, Enum):
    REACHED_STABLE = "reached_stable"
    CYCLE_DETECTED = "cycle_detected"
    STEP_BUDGET_EXHAUSTED = "step_budget_exhausted"


@dataclass(frozen=True)
class Trajectory:
    states: tuple[Arrangement, ...]
    moves: tuple[DeviationWitness, ...]
    terminal: Terminal
    cycle_start: int | None = None

    @property
    def final(self) -> Arrangement:
        return self.states[-1]


def best_response_dynamics(instance: Instance, start: Arrangement,
                           policy: Policy | str = Policy.FIRST_IMPROVING,
                           max_steps: int = 1000) -> Trajectory:
    """Apply improving moves until stable, a state repeats, or ``max_steps`` moves are made."""
    policy = Policy(policy)
    start.validate(instance)
    table = _CostTable(instance)
    states, moves = [start], []
    seen = {start: 0}
    current = start
    for _ in range(max_steps):
        devs = _iter_deviations(instance, current, table)
        if policy is Policy.FIRST_IMPROVING:
            move = next(devs, None)
        else:
            move = None
            for d in devs:
                if move is None or d.delta < move.delta:
                    move = d
        if move is None:
            return Trajectory(tuple(states), tuple(moves), Terminal.REACHED_STABLE)
        current = current.moved(move.class_index, move.from_item, move.to_item)
        states.append(current)
        moves.append(move)
        if current in seen:
            return Trajectory(tuple(states), tuple(moves), Terminal.CYCLE_DETECTED, seen[current])
        seen[current] = len(states) - 1
    if is_stable(instance, current, _table=table):
        return Trajectory(tuple(states), tuple(moves), Terminal.REACHED_STABLE)
    return Trajectory(tuple(states), tuple(moves), Terminal.STEP_BUDGET_EXHAUSTED)
