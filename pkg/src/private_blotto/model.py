"""Domain types, outcome functions and the per-class cost of an arrangement.

Numbers are kept exact (``fractions.Fraction``) whenever every bias, weight and
the unlabeled cost are rational; a single float anywhere switches the whole
instance to floating point, and comparisons then use a relative tolerance.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .errors import EmptyItem, InvalidArrangement, InvalidClass, InvalidInstance

Number = Union[int, float, Fraction]

# relative slack for the float path: a move improves iff the cost drops by more than this
FLOAT_RTOL = 1e-12


class Outcome(str, Enum):
    MEDIAN = "median"
    MEAN = "mean"


def as_number(x) -> Number:
    """Coerce user input to ``Fraction`` (ints, ``"p/q"`` and decimal strings) or ``float``."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"not a number: {x!r}") from exc
    raise TypeError(f"unsupported numeric type {type(x).__name__}")


def number_to_json(x: Number):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def improves(before: Number, after: Number, exact: bool) -> bool:
    """Strict-improvement predicate shared by every stability decision."""
    if exact:
        return after < before
    return before - after > FLOAT_RTOL * (1 + abs(before))


# ---------------------------------------------------------------- outcomes

def median_outcome(biases: Iterable[Number]) -> Number:
    xs = sorted(biases)
    if not xs:
        raise EmptyItem("median of an empty item")
    n = len(xs)
    mid = n // 2
    if n % 2:
        return xs[mid]
    return (xs[mid - 1] + xs[mid]) / 2


def mean_outcome(biases: Iterable[Number]) -> Number:
    xs = list(biases)
    if not xs:
        raise EmptyItem("mean of an empty item")
    return sum(xs) / len(xs)


OUTCOME_FUNCTIONS = {Outcome.MEDIAN: median_outcome, Outcome.MEAN: mean_outcome}


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class AgentClass:
    bias: Number
    count: int


@dataclass(frozen=True)
class Instance:
    """Game parameters. Classes are normalized: zero counts dropped, then sorted
    by descending count and ascending bias, so class 0 is the majority type."""

    num_items: int
    classes: tuple[AgentClass, ...]
    unlabeled_cost: Number = 0
    outcome: Outcome = Outcome.MEDIAN
    weights: tuple[Number, ...] | None = None
    exact: bool = field(init=False, compare=False)
    _bias_order: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = self.num_items
        if not isinstance(m, int) or m < 1:
            raise InvalidInstance("num_items must be a positive integer")
        weights = self.weights if self.weights is not None else (1,) * m
        weights = tuple(as_number(w) for w in weights)
        if len(weights) != m:
            raise InvalidInstance(f"expected {m} weights, got {len(weights)}")
        if any(w <= 0 for w in weights):
            raise InvalidInstance("weights must be positive")
        cu = as_number(self.unlabeled_cost)
        if cu < 0:
            raise InvalidInstance("unlabeled_cost must be non-negative")

        classes = []
        for c in self.classes:
            if not isinstance(c, AgentClass):
                c = AgentClass(*c)
            if not isinstance(c.count, int) or c.count < 0:
                raise InvalidInstance("class counts must be non-negative integers")
            if c.count:
                classes.append(AgentClass(as_number(c.bias), c.count))
        if not classes:
            raise InvalidInstance("instance needs at least one agent")
        biases = [c.bias for c in classes]
        if len(set(biases)) != len(biases):
            raise InvalidInstance("class biases must be pairwise distinct")

        exact = not any(isinstance(v, float) for v in (*biases, *weights, cu))
        if not exact:
            classes = [AgentClass(float(c.bias), c.count) for c in classes]
            weights = tuple(float(w) for w in weights)
            cu = float(cu)
        classes.sort(key=lambda c: (-c.count, c.bias))

        set_ = object.__setattr__
        set_(self, "classes", tuple(classes))
        set_(self, "weights", weights)
        set_(self, "unlabeled_cost", cu)
        set_(self, "outcome", Outcome(self.outcome))
        set_(self, "exact", exact)
        set_(self, "_bias_order", tuple(sorted(range(len(classes)), key=lambda t: classes[t].bias)))

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def biases(self) -> tuple[Number, ...]:
        return tuple(c.bias for c in self.classes)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(c.count for c in self.classes)

    @property
    def total_agents(self) -> int:
        return sum(self.counts)

    @property
    def equal_weights(self) -> bool:
        return len(set(self.weights)) == 1

    def normalized_weights(self) -> tuple[Number, ...]:
        total = sum(self.weights)
        return tuple(w / total for w in self.weights)

    def class_index(self, bias: Number) -> int:
        for t, c in enumerate(self.classes):
            if c.bias == bias:
                return t
        raise InvalidClass(f"no class with bias {bias}")

    def item_outcome(self, row: Sequence[int]) -> Number | None:
        """Outcome on one item given its per-class counts; ``None`` when empty."""
        n = sum(row)
        if n == 0:
            return None
        biases = self.biases
        if self.outcome is Outcome.MEAN:
            return sum(k * b for k, b in zip(row, biases)) / n
        # median over a multiset given as counts, walking classes in bias order
        lo_pos, hi_pos = (n - 1) // 2, n // 2
        lo = hi = None
        seen = 0
        for t in self._bias_order:
            seen += row[t]
            if lo is None and seen > lo_pos:
                lo = biases[t]
            if seen > hi_pos:
                hi = biases[t]
                break
        return lo if lo_pos == hi_pos else (lo + hi) / 2

    def item_cost(self, t: int, row: Sequence[int], i: int) -> Number:
        """Class ``t``'s cost from item ``i`` holding ``row``."""
        f = self.item_outcome(row)
        if f is None:
            return self.weights[i] * self.unlabeled_cost
        return self.weights[i] * abs(f - self.classes[t].bias)


@dataclass(frozen=True)
class Arrangement:
    """Per-item class counts; ``counts[i][t]`` agents of class ``t`` on item ``i``."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.counts)
        if not rows:
            raise InvalidArrangement("arrangement needs at least one item")
        k = len(rows[0])
        if any(len(r) != k for r in rows):
            raise InvalidArrangement("ragged arrangement")
        if any(v < 0 for r in rows for v in r):
            raise InvalidArrangement("negative count")
        object.__setattr__(self, "counts", rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "Arrangement":
        return cls(tuple(zip(*columns)))

    @classmethod
    def from_biases(cls, instance: Instance, columns: Mapping[Number, Sequence[int]]) -> "Arrangement":
        """Build from ``{bias: per-item counts}``; classes absent from the instance must be all zero."""
        cols = [[0] * instance.num_items for _ in instance.classes]
        for bias, col in columns.items():
            if not any(col):
                continue
            cols[instance.class_index(as_number(bias))] = list(col)
        arr = cls.from_columns(cols)
        arr.validate(instance)
        return arr

    @property
    def num_items(self) -> int:
        return len(self.counts)

    @property
    def num_classes(self) -> int:
        return len(self.counts[0])

    def column(self, t: int) -> tuple[int, ...]:
        return tuple(row[t] for row in self.counts)

    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.counts))

    def empty_items(self) -> list[int]:
        return [i for i, row in enumerate(self.counts) if not any(row)]

    def moved(self, t: int, src: int, dst: int) -> "Arrangement":
        rows = [list(r) for r in self.counts]
        if rows[src][t] < 1:
            raise InvalidArrangement(f"no class-{t} agent on item {src}")
        rows[src][t] -= 1
        rows[dst][t] += 1
        return Arrangement(tuple(map(tuple, rows)))

    def validate(self, instance: Instance) -> None:
        if self.num_items != instance.num_items:
            raise InvalidArrangement(f"expected {instance.num_items} items, got {self.num_items}")
        if self.num_classes != instance.num_classes:
            raise InvalidArrangement(f"expected {instance.num_classes} classes, got {self.num_classes}")
        if self.column_sums() != instance.counts:
            raise InvalidArrangement(
                f"class totals {self.column_sums()} do not match instance counts {instance.counts}")

    def to_text(self) -> str:
        items = []
        for row in self.counts:
            terms = [f"{k}x{t}" for t, k in enumerate(row) if k]
            items.append(",".join(terms) if terms else "0")
        return ";".join(items)

    @classmethod
    def from_text(cls, text: str, num_classes: int | None = None) -> "Arrangement":
        """Parse ``"2x0,1x1;1x0;0"`` (``×`` accepted for ``x``)."""
        parsed = []
        for chunk in text.strip().split(";"):
            chunk = chunk.strip()
            row: dict[int, int] = {}
            if chunk not in ("", "0"):
                for term in chunk.split(","):
                    m = re.fullmatch(r"\s*(\d+)\s*[x×]\s*(\d+)\s*", term)
                    if not m:
                        raise InvalidArrangement(f"bad arrangement term {term!r}")
                    k, t = int(m.group(1)), int(m.group(2))
                    row[t] = row.get(t, 0) + k
            parsed.append(row)
        k = num_classes
        if k is None:
            k = 1 + max((t for row in parsed for t in row), default=0)
        if any(t >= k for row in parsed for t in row):
            raise InvalidArrangement("class index out of range")
        return cls(tuple(tuple(row.get(t, 0) for t in range(k)) for row in parsed))

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class FractionalAllocation:
    values: tuple[tuple[float, ...], ...]

    def check(self, instance: Instance, atol: float = 1e-9) -> None:
        sums = [sum(col) for col in zip(*self.values)]
        for s, n in zip(sums, instance.counts):
            if abs(s - n) > atol or any(v < 0 for row in self.values for v in row):
                raise InvalidArrangement("fractional allocation does not match class counts")


# ---------------------------------------------------------------- cost

def class_cost(instance: Instance, arrangement: Arrangement, class_index: int) -> Number:
    """Weighted sum of distances to item outcomes plus ``w_i * c_u`` per empty item."""
    if not 0 <= class_index < instance.num_classes:
        raise InvalidClass(f"class index {class_index} out of range")
    arrangement.validate(instance)
    return sum(instance.item_cost(class_index, row, i) for i, row in enumerate(arrangement.counts))


# ---------------------------------------------------------------- instance files

def instance_to_dict(instance: Instance) -> dict:
    return {
        "num_items": instance.num_items,
        "weights": [number_to_json(w) for w in instance.weights],
        "classes": [{"bias": number_to_json(c.bias), "count": c.count} for c in instance.classes],
        "unlabeled_cost": number_to_json(instance.unlabeled_cost),
        "outcome": instance.outcome.value,
    }


def instance_from_dict(data: Mapping) -> Instance:
    try:
        return Instance(
            num_items=int(data["num_items"]),
            classes=tuple(AgentClass(as_number(c["bias"]), int(c["count"])) for c in data["classes"]),
            unlabeled_cost=as_number(data.get("unlabeled_cost", 0)),
            outcome=Outcome(data.get("outcome", "median")),
            weights=tuple(data["weights"]) if data.get("weights") is not None else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed instance document: {exc}") from exc


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def load_instance(path: str | Path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))
