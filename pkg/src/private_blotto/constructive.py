"""Closed-form thresholds, the median-critical region, and explicit stable constructions.

Every constructor checks its output with :func:`is_stable` and raises
``ConstructionUnstable`` instead of returning an unverified arrangement.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import ConstructionUnstable, PreconditionViolated
from .model import AgentClass, Arrangement, Instance, Number, Outcome, as_number
from .stability import is_stable

AUTO_FACTOR = Fraction(11, 10)
BIAS_A, BIAS_B = 1, -1


def _max_gap(biases: Sequence[Number]) -> Number:
    return max((abs(x - y) for x, y in combinations(biases, 2)), default=0)


def empty_threshold(instance: Instance) -> Number:
    """Unlabeled cost at or above which no item is left empty when N >= m."""
    ws = instance.weights
    return Fraction(1, 2) * (max(ws) / min(ws)) * _max_gap(instance.biases)


def threshold_for(biases: Sequence[Number], weights: Sequence[Number] | None = None) -> Number:
    ws = [as_number(w) for w in weights] if weights else [Fraction(1)]
    return Fraction(1, 2) * (max(ws) / min(ws)) * _max_gap([as_number(b) for b in biases])


def auto_unlabeled_cost(biases: Sequence[Number], weights: Sequence[Number] | None = None) -> Number:
    """``1.1 x`` the empty-item threshold, keeping the inequality strict."""
    return AUTO_FACTOR * threshold_for(biases, weights)


def two_class_instance(n_a: int, n_b: int, m: int, outcome: Outcome | str = Outcome.MEDIAN, *,
                       unlabeled_cost: Number | None = None, weights: Sequence[Number] | None = None,
                       bias_a: Number = BIAS_A, bias_b: Number = BIAS_B) -> Instance:
    """Two-type instance; ``unlabeled_cost=None`` means the auto (above-threshold) value."""
    if unlabeled_cost is None:
        unlabeled_cost = auto_unlabeled_cost([bias_a, bias_b], weights)
    return Instance(m, (AgentClass(bias_a, n_a), AgentClass(bias_b, n_b)),
                    unlabeled_cost, Outcome(outcome), tuple(weights) if weights else None)


def ab_arrangement(instance: Instance, a: Sequence[int], b: Sequence[int],
                   bias_a: Number = BIAS_A, bias_b: Number = BIAS_B) -> Arrangement:
    return Arrangement.from_biases(instance, {bias_a: a, bias_b: b})


def _certify(instance: Instance, arrangement: Arrangement) -> Arrangement:
    report = is_stable(instance, arrangement)
    if not report.stable:
        raise ConstructionUnstable(f"{arrangement.to_text()} is unstable: {report.witness}")
    return arrangement


# ---------------------------------------------------------------- median-critical region

class RegionVariant(str, Enum):
    STRICT_AS_WRITTEN = "strict"
    INCLUSIVE = "inclusive"


def in_median_critical_region(n_a: int, n_b: int, m: int,
                              variant: RegionVariant | str = RegionVariant.INCLUSIVE) -> bool:
    variant = RegionVariant(variant)

    def one_way(big: int, small: int) -> bool:
        gap_ok = small < big - m if variant is RegionVariant.STRICT_AS_WRITTEN else small <= big - m
        return big + small <= 2 * m and m < big and 1 <= small and gap_ok

    return one_way(n_a, n_b) or one_way(n_b, n_a)


def stable_exists_median(n_a: int, n_b: int, m: int) -> bool:
    """Existence of a stable median arrangement for N >= m and cost above threshold.

    The inclusive region's boundary ``n_b == n_a - m`` can meet ``N == 2m`` with both
    counts even (e.g. (6, 2) for m=4); the homogeneous construction is stable there,
    so those points are carved out.
    """
    if n_a + n_b < m:
        raise PreconditionViolated("characterization assumes at least as many agents as items")
    if many_agents_hypothesis(n_a, n_b, m):
        return True
    return not in_median_critical_region(n_a, n_b, m, RegionVariant.INCLUSIVE)


# ---------------------------------------------------------------- constructors

def _ordered(n_a: int, n_b: int) -> tuple[int, int, bool]:
    return (n_a, n_b, False) if n_a >= n_b else (n_b, n_a, True)


def _finish(n_a: int, n_b: int, m: int, a: list[int], b: list[int], swapped: bool,
            weights: Sequence[Number] | None = None) -> Arrangement:
    if swapped:
        a, b = b, a
        n_a, n_b = n_b, n_a
    inst = two_class_instance(n_a, n_b, m, Outcome.MEDIAN, weights=weights)
    return _certify(inst, ab_arrangement(inst, a, b))


def many_agents_hypothesis(n_a: int, n_b: int, m: int) -> bool:
    n = n_a + n_b
    return n >= 2 * m + 1 or (n == 2 * m and n_a % 2 == 0 and n_b % 2 == 0)


def _fill(total: int, items: range) -> dict[int, int]:
    """Two per item while at least 4 remain, then everything; the last item takes the remainder."""
    out: dict[int, int] = {}
    left = total
    last = items[-1]
    for j in items:
        if left == 0:
            break
        take = left if (j == last or left < 4) else 2
        out[j] = take
        left -= take
    return out


def construct_many_agents(n_a: int, n_b: int, m: int) -> Arrangement:
    """Homogeneous items holding at least two agents each (the N > 2m regime).

    The minority type fills items ``0..m-2`` two at a time, the majority type
    fills the rest; a lone minority agent is instead added to a majority item.
    """
    if not many_agents_hypothesis(n_a, n_b, m):
        raise PreconditionViolated("needs N >= 2m+1, or N == 2m with both counts even")
    big, small, swapped = _ordered(n_a, n_b)
    a, b = [0] * m, [0] * m
    if m == 1:
        a[0], b[0] = big, small
        return _finish(big, small, m, a, b, swapped)
    if small <= 1:
        for j, k in _fill(big, range(m)).items():
            a[j] = k
        b[m - 1] = small
        return _finish(big, small, m, a, b, swapped)
    b_items = _fill(small, range(m - 1))
    for j, k in b_items.items():
        b[j] = k
    start = max(b_items) + 1
    for j, k in _fill(big, range(start, m)).items():
        a[j] = k
    return _finish(big, small, m, a, b, swapped)


def tie_weights_ok(weights: Sequence[Number]) -> bool:
    """Descending weights, the two heaviest equal, all within a factor of two."""
    ws = [as_number(w) for w in weights]
    descending = all(x >= y for x, y in zip(ws, ws[1:]))
    top_equal = len(ws) < 2 or ws[0] == ws[1]
    return descending and top_equal and max(ws) <= 2 * min(ws)


def construct_tie_based(n_a: int, n_b: int, m: int, weights: Sequence[Number] | None = None) -> Arrangement:
    """Exact A/B ties on one or two items, single agents everywhere else (m <= N <= 2m).

    With ``weights`` the ties sit on the two heaviest items; the weights must pass
    :func:`tie_weights_ok`.
    """
    n = n_a + n_b
    if not m <= n <= 2 * m:
        raise PreconditionViolated("needs m <= N <= 2m")
    if weights is not None and (len(weights) != m or not tie_weights_ok(weights)):
        raise PreconditionViolated("weights must be descending, w_1 == w_2, and within a factor of 2")
    if in_median_critical_region(n_a, n_b, m, RegionVariant.INCLUSIVE):
        raise PreconditionViolated(f"({n_a}, {n_b}) is in the median-critical region for m={m}")
    big, small, swapped = _ordered(n_a, n_b)
    a, b = [0] * m, [0] * m
    if small == 0:
        a = [1] * m
        a[0] += big - m
        return _finish(big, small, m, a, b, swapped, weights)
    if n == m:
        singles_a, singles_b, pos = big, small, 0
    elif (n - m) % 2:
        x = (n + 1 - m) // 2
        a[0] = b[0] = x
        singles_a, singles_b, pos = big - x, small - x, 1
    else:
        x = (n - m) // 2
        a[0] = b[0] = x
        a[1] = b[1] = 1
        singles_a, singles_b, pos = big - x - 1, small - x - 1, 2
    if singles_a < 0 or singles_b < 0:
        raise PreconditionViolated("tie construction needs more minority agents")
    for _ in range(singles_a):
        a[pos] += 1
        pos += 1
    for _ in range(singles_b):
        b[pos] += 1
        pos += 1
    return _finish(big, small, m, a, b, swapped, weights)


def construct_median_stable(n_a: int, n_b: int, m: int) -> Arrangement:
    """Dispatch to whichever construction covers ``(n_a, n_b, m)``."""
    if many_agents_hypothesis(n_a, n_b, m):
        return construct_many_agents(n_a, n_b, m)
    return construct_tie_based(n_a, n_b, m)


def singleton_arrangement(instance: Instance) -> tuple[Arrangement, bool]:
    """One agent per item on the heaviest items, largest |bias| first.

    The flag reports the closed-form sufficient condition
    ``0.5 * max_gap <= (w_N / w_1) * c_u``; when it holds the arrangement is certified stable.
    """
    n, m = instance.total_agents, instance.num_items
    if n > m:
        raise PreconditionViolated("singleton arrangement needs N <= m")
    items = sorted(range(m), key=lambda i: (-instance.weights[i], i))[:n]
    agents = sorted((t for t, c in enumerate(instance.classes) for _ in range(c.count)),
                    key=lambda t: (-abs(instance.classes[t].bias), t))
    rows = [[0] * instance.num_classes for _ in range(m)]
    for i, t in zip(items, agents):
        rows[i][t] = 1
    arrangement = Arrangement(tuple(map(tuple, rows)))
    labeled = [instance.weights[i] for i in items]
    holds = Fraction(1, 2) * _max_gap(instance.biases) * max(labeled) <= min(labeled) * instance.unlabeled_cost
    if holds:
        _certify(instance, arrangement)
    return arrangement, holds


def stabilizing_weights(n_a: int, n_b: int) -> tuple[Fraction, Fraction, Arrangement]:
    """Two-item weights ``w_1 + w_2 = 1`` making ``((n_a-1, n_b), (1, 0))`` stable under mean.

    ``w_2 / w_1`` is half the largest admissible ratio ``2(n_a-1) / ((N-2)(N-1))``.
    """
    if n_a < 1 or n_b < 0 or n_a + n_b < 2 or n_b > n_a:
        raise PreconditionViolated("needs n_a >= n_b >= 0, n_a >= 1 and N >= 2")
    n = n_a + n_b
    if n == 2:
        ratio = Fraction(1)
    else:
        ratio = Fraction(2 * (n_a - 1), (n - 2) * (n - 1)) / 2
    w1 = 1 / (1 + ratio)
    w2 = ratio / (1 + ratio)
    inst = two_class_instance(n_a, n_b, 2, Outcome.MEAN, weights=(w1, w2))
    arrangement = _certify(inst, ab_arrangement(inst, (n_a - 1, 1), (n_b, 0)))
    return w1, w2, arrangement
