"""Splitting a money budget over an envy-freeable allocation.

An outcome is monetarily envy-free (MEF) when it is weighted envy-free
outright, or when every agent that someone still envies (after folding
payments in) receives no money.  Any budget can be split this way over
an envy-freeable allocation: pay the minimum subsidies when the budget
covers them, spread the surplus in proportion to the weights, and
water-fill from the largest path lengths downward in a deficit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from . import envy
from .errors import NegativeBudget, NotEnvyFreeable
from .model import Allocation, Instance, Outcome, ZERO


@dataclass(frozen=True)
class MefResult:
    payments: Tuple[Fraction, ...]
    water_level: Fraction
    regime: str  # "exact" | "surplus" | "deficit"
    budget: Fraction

    def outcome(self, allocation: Allocation) -> Outcome:
        return Outcome(allocation, self.payments)


def is_mef(instance: Instance, outcome: Outcome):
    """(verdict, witness): witness is an envy pair (i, j) with p_j > 0."""
    wef, _ = envy.is_weighted_envy_free(instance, outcome)
    if wef:
        return True, None
    graph = envy.build_envy_graph_with_payments(instance, outcome)
    for i in range(graph.n):
        for j in range(graph.n):
            if i != j and graph.lengths[i][j] > 0 and outcome.payments[j] > 0:
                return False, (i, j)
    return True, None


def _water_level(weights, lengths, budget: Fraction) -> Fraction:
    """The threshold t with sum_i w_i * max(l_i - t, 0) == budget.

    The left side is piecewise linear and strictly decreasing until it
    hits zero, so walking the distinct path lengths downward pins the
    segment and the level is solved exactly in it.
    """
    levels = sorted(set(lengths), reverse=True)
    if budget == 0:
        return levels[0]
    active_weight = ZERO
    active_sum = ZERO
    for level in levels:
        spent = active_sum - active_weight * level
        if spent >= budget:
            break
        active_weight += sum(
            (w for w, l in zip(weights, lengths) if l == level), ZERO
        )
        active_sum += sum(
            (w * l for w, l in zip(weights, lengths) if l == level), ZERO
        )
    # budget is reached inside the current linear segment
    return (active_sum - budget) / active_weight


def allocate_budget_mef(instance: Instance, allocation: Allocation,
                        budget: Fraction) -> MefResult:
    """Split `budget` into non-negative payments so the outcome is MEF."""
    if budget < 0:
        raise NegativeBudget(f"budget {budget} is negative")
    subsidy = envy.min_subsidies(instance, allocation)  # raises NotEnvyFreeable
    lengths = subsidy.path_lengths
    needed = sum(subsidy.payments, ZERO)
    if budget == needed:
        return MefResult(subsidy.payments, ZERO, "exact", budget)
    if budget > needed:
        extra = budget - needed
        payments = tuple(
            p + w * extra for p, w in zip(subsidy.payments, instance.weights)
        )
        return MefResult(payments, ZERO, "surplus", budget)
    level = _water_level(instance.weights, lengths, budget)
    payments = tuple(
        w * max(l - level, ZERO) for w, l in zip(instance.weights, lengths)
    )
    return MefResult(payments, level, "deficit", budget)
