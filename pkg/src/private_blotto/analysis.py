"""Misallocated effort, proportionality, the fractional relaxation, and counterexample scenarios."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .constructive import _certify, ab_arrangement, two_class_instance
from .errors import DegenerateItem, InvalidClass, OutcomeMismatch, PreconditionViolated
from .model import AgentClass, Arrangement, FractionalAllocation, Instance, Number, Outcome

FD_STEP = 1e-6


@dataclass(frozen=True)
class EffortReport:
    misallocated_effort: Number
    per_item_deviation: tuple[tuple[Number, ...], ...]


def proportional_targets(instance: Instance) -> tuple[tuple[Number, ...], ...]:
    """``w_i * n_t`` with weights normalized to sum 1 (``n_t / m`` for equal weights)."""
    return tuple(tuple(w * n for n in instance.counts) for w in instance.normalized_weights())


def misallocated_effort(instance: Instance, arrangement: Arrangement) -> EffortReport:
    arrangement.validate(instance)
    dev = tuple(
        tuple(abs(target - k) for target, k in zip(targets, row))
        for targets, row in zip(proportional_targets(instance), arrangement.counts)
    )
    return EffortReport(sum(sum(r) for r in dev), dev)


def check_close_to_proportional(instance: Instance, arrangement: Arrangement) -> bool:
    """Every per-item class count within 1 of its proportional target."""
    slack = 0 if instance.exact else 1e-9
    return all(d <= 1 + slack for row in misallocated_effort(instance, arrangement).per_item_deviation
               for d in row)


# ---------------------------------------------------------------- fractional relaxation

def fractional_equilibrium(instance: Instance) -> FractionalAllocation:
    if instance.outcome is not Outcome.MEAN:
        raise OutcomeMismatch("the fractional equilibrium is stated for mean outcome")
    return FractionalAllocation(tuple(tuple(float(v) for v in row) for row in proportional_targets(instance)))


def _two_class_setup(instance: Instance, allocation: FractionalAllocation):
    if instance.num_classes != 2:
        raise InvalidClass("first-order conditions are defined for two classes")
    if instance.outcome is not Outcome.MEAN:
        raise OutcomeMismatch("first-order conditions are defined for mean outcome")
    if any(sum(row) <= 0 for row in allocation.values):
        raise DegenerateItem("every item needs positive mass")
    ws = [float(w) for w in instance.normalized_weights()]
    gap = abs(float(instance.biases[0]) - float(instance.biases[1]))
    return ws, gap


def _relaxed_cost(ws, gap, values, t):
    # class t pays w_i * gap * (opposing mass share) on each item
    return sum(w * gap * row[1 - t] / (row[0] + row[1]) for w, row in zip(ws, values))


@dataclass(frozen=True)
class FocDiagnostics:
    residual: float
    fd_disagreement: float


def foc_diagnostics(instance: Instance, allocation: FractionalAllocation) -> FocDiagnostics:
    """Spread of the analytic marginal costs across items, and their gap to central differences."""
    ws, gap = _two_class_setup(instance, allocation)
    values = [list(map(float, row)) for row in allocation.values]
    residual = disagreement = 0.0
    for t in (0, 1):
        grads = []
        for i, (w, row) in enumerate(zip(ws, values)):
            analytic = -w * gap * row[1 - t] / (row[0] + row[1]) ** 2
            plus = [r[:] for r in values]
            minus = [r[:] for r in values]
            plus[i][t] += FD_STEP
            minus[i][t] -= FD_STEP
            numeric = (_relaxed_cost(ws, gap, plus, t) - _relaxed_cost(ws, gap, minus, t)) / (2 * FD_STEP)
            disagreement = max(disagreement, abs(analytic - numeric))
            grads.append(analytic)
        residual = max(residual, max(grads) - min(grads))
    return FocDiagnostics(residual, disagreement)


def fractional_foc_residual(instance: Instance, allocation: FractionalAllocation) -> float:
    """Largest spread of a class's marginal cost across items; zero at an interior optimum."""
    return foc_diagnostics(instance, allocation).residual


# ---------------------------------------------------------------- constructions and scenarios

def construct_high_misallocation(n_a: int, n_b: int, m: int) -> Arrangement:
    """Two B agents per item on items ``0..m-2`` (surplus on ``m-2``), all A agents on the last item."""
    if n_a < n_b or n_a + n_b < 2 * m or n_b < 2 * (m - 1) or m < 2:
        raise PreconditionViolated("needs n_a >= n_b, N >= 2m, n_b/2 >= m-1 and m >= 2")
    a, b = [0] * m, [0] * m
    for j in range(m - 1):
        b[j] = 2
    b[m - 2] += n_b - 2 * (m - 1)
    a[m - 1] = n_a
    inst = two_class_instance(n_a, n_b, m, Outcome.MEDIAN)
    return _certify(inst, ab_arrangement(inst, a, b))


def _polarized_instance(n: int, m: int, outcome: Outcome, cost: Number) -> Instance:
    return Instance(m, (AgentClass(Fraction(1), 1), AgentClass(Fraction(-1, 2), n - 1)), cost, outcome)


def scenario_no_ne_median(n: int, m: int, unlabeled_cost: Number = Fraction(3, 10)) -> Instance:
    """One agent of bias 1 and ``n-1`` of bias -1/2, unlabeled cost 3/10; no stable arrangement."""
    if not 2 < n < m:
        raise PreconditionViolated("needs 2 < N < m")
    return _polarized_instance(n, m, Outcome.MEDIAN, unlabeled_cost)


def scenario_no_ne_mean(n: int, m: int, unlabeled_cost: Number = Fraction(1, 5)) -> Instance:
    """Same biases under mean outcome; any cost strictly inside (1/8, 1/4) works."""
    if not 4 <= n < m:
        raise PreconditionViolated("needs 4 <= N < m")
    return _polarized_instance(n, m, Outcome.MEAN, unlabeled_cost)


def scenario_weighted_median_unstable(epsilon: Number = Fraction(1, 10)) -> Instance:
    """Four items, three agents of each type, first item heavier by ``epsilon``; no stable arrangement."""
    weights = (1 + epsilon, 1, 1, 1)
    return two_class_instance(3, 3, 4, Outcome.MEDIAN, weights=weights)


class ThreeAgentRegime(str, Enum):
    ALL_TOGETHER = "all_together"
    PAIR_PLUS_ONE = "pair_plus_one"
    ALL_SEPARATE = "all_separate"


def three_agent_regime(gap: Number, unlabeled_cost: Number) -> ThreeAgentRegime:
    """Which arrangement of two A agents and one B agent is stable (mean outcome, m >= 4)."""
    if gap <= 0 or unlabeled_cost <= 0:
        raise PreconditionViolated("gap and unlabeled cost must be positive")
    g = gap if isinstance(gap, float) else Fraction(gap)
    if unlabeled_cost <= g / 6:
        return ThreeAgentRegime.ALL_TOGETHER
    if unlabeled_cost <= g / 2:
        return ThreeAgentRegime.PAIR_PLUS_ONE
    return ThreeAgentRegime.ALL_SEPARATE


def three_agent_instance(gap: Number, unlabeled_cost: Number, m: int = 4) -> Instance:
    if m < 4:
        raise PreconditionViolated("three-agent regimes assume m >= 4")
    return Instance(m, (AgentClass(0, 2), AgentClass(gap, 1)), unlabeled_cost, Outcome.MEAN)


def three_agent_arrangement(instance: Instance, regime: ThreeAgentRegime) -> Arrangement:
    a, b = [0] * instance.num_items, [0] * instance.num_items
    if regime is ThreeAgentRegime.ALL_TOGETHER:
        a[0], b[0] = 2, 1
    elif regime is ThreeAgentRegime.PAIR_PLUS_ONE:
        a[0] = b[0] = a[1] = 1
    else:
        a[0] = a[1] = b[2] = 1
    return Arrangement.from_columns([a, b])


def hypothesis_close_violations(instance: Instance, stable: Sequence[Arrangement]) -> list[Arrangement]:
    """Stable arrangements that are not weight-proportional within 1 (expected: none)."""
    return [arr for arr in stable if not check_close_to_proportional(instance, arr)]
