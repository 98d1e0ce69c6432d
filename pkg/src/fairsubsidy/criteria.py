"""Allocation-level fairness and efficiency predicates.

Every predicate returns (verdict, witness); the witness is the
lexicographically smallest violating pair/item so test output is
deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import TooLarge
from .model import (
    Allocation,
    Instance,
    ZERO,
    enumeration_limit,
    weighted_social_welfare,
)


def _pairs(n: int):
    for i in range(n):
        for j in range(n):
            if i != j:
                yield i, j


def is_wef1(instance: Instance, allocation: Allocation):
    """Weighted envy-free up to the removal of one item from the envied bundle."""
    for i, j in _pairs(instance.n):
        own = instance.value(i, allocation.bundles[i]) / instance.weights[i]
        other = allocation.bundles[j]
        if not other:
            if own < 0:
                return False, (i, j, None)
            continue
        ok = any(
            own >= instance.value(i, other - {g}) / instance.weights[j]
            for g in sorted(other)
        )
        if not ok:
            return False, (i, j, None)
    return True, None


def is_wwef1(instance: Instance, allocation: Allocation):
    """Weak WEF1: removal from the envied bundle or receipt of the item."""
    for i, j in _pairs(instance.n):
        own_bundle = allocation.bundles[i]
        own = instance.value(i, own_bundle) / instance.weights[i]
        other = allocation.bundles[j]
        if not other:
            continue
        other_value = instance.value(i, other) / instance.weights[j]
        ok = False
        for g in sorted(other):
            if own >= instance.value(i, other - {g}) / instance.weights[j]:
                ok = True
                break
            if instance.value(i, own_bundle | {g}) / instance.weights[i] >= other_value:
                ok = True
                break
        if not ok:
            return False, (i, j, None)
    return True, None


def is_wef1_t(instance: Instance, allocation: Allocation):
    """Weighted envy-free up to one item transfer."""
    for i, j in _pairs(instance.n):
        own_bundle = allocation.bundles[i]
        own = instance.value(i, own_bundle) / instance.weights[i]
        other = allocation.bundles[j]
        if not other:
            continue
        if own >= instance.value(i, other) / instance.weights[j]:
            continue
        ok = any(
            instance.value(i, own_bundle | {g}) / instance.weights[i]
            >= instance.value(i, other - {g}) / instance.weights[j]
            for g in sorted(other)
        )
        if not ok:
            return False, (i, j, None)
    return True, None


def is_non_wasteful(instance: Instance, allocation: Allocation):
    """No zero-marginal item held by one agent helps another agent."""
    for i in range(instance.n):
        bundle = allocation.bundles[i]
        for g in sorted(bundle):
            if instance.value(i, bundle) != instance.value(i, bundle - {g}):
                continue
            for j in range(instance.n):
                if j == i:
                    continue
                other = allocation.bundles[j]
                if instance.value(j, other | {g}) != instance.value(j, other):
                    return False, (i, j, g)
    return True, None


def _guard_enumeration(instance: Instance):
    limit = enumeration_limit()
    count = instance.n ** instance.m
    if count > limit:
        raise TooLarge(f"{count} allocations exceed the enumeration limit {limit}")


def enumerate_assignments(instance: Instance):
    _guard_enumeration(instance)
    return itertools.product(range(instance.n), repeat=instance.m)


def is_pareto_efficient(instance: Instance, allocation: Allocation):
    """Brute-force domination check over all allocations."""
    _guard_enumeration(instance)
    own_values = [instance.value(i, b) for i, b in enumerate(allocation.bundles)]
    for assignment in enumerate_assignments(instance):
        other = Allocation.from_assignment(instance, assignment)
        worse_somewhere = False
        better_somewhere = False
        for i in range(instance.n):
            v = instance.value(i, other.bundles[i])
            if v < own_values[i]:
                worse_somewhere = True
                break
            if v > own_values[i]:
                better_somewhere = True
        if not worse_somewhere and better_somewhere:
            return False, other
    return True, None


def is_nonzero_social_welfare(instance: Instance, allocation: Allocation):
    """SW(X) > 0, or zero welfare is unavoidable."""
    if weighted_social_welfare(instance, allocation) > 0:
        return True
    for assignment in enumerate_assignments(instance):
        other = Allocation.from_assignment(instance, assignment)
        if weighted_social_welfare(instance, other) > 0:
            return False
    return True


def is_weighted_welfare_maximizing(instance: Instance, allocation: Allocation):
    own = weighted_social_welfare(instance, allocation)
    for assignment in enumerate_assignments(instance):
        other = Allocation.from_assignment(instance, assignment)
        if weighted_social_welfare(instance, other) > own:
            return False, other
    return True, None


@dataclass(frozen=True)
class FairnessReport:
    wef1: bool
    wef1_witness: Optional[tuple]
    wwef1: bool
    wwef1_witness: Optional[tuple]
    wef1_t: bool
    wef1_t_witness: Optional[tuple]
    non_wasteful: bool
    non_wasteful_witness: Optional[tuple]
    pareto_efficient: Optional[bool]
    nonzero_social_welfare: Optional[bool]
    weighted_welfare_maximizing: Optional[bool]


def evaluate_report(instance: Instance, allocation: Allocation) -> FairnessReport:
    """Run every predicate; enumeration-bound ones become None when too large."""
    wef1, w1 = is_wef1(instance, allocation)
    wwef1, w2 = is_wwef1(instance, allocation)
    wef1_t, w3 = is_wef1_t(instance, allocation)
    nw, w4 = is_non_wasteful(instance, allocation)
    try:
        pareto, _ = is_pareto_efficient(instance, allocation)
        nonzero = is_nonzero_social_welfare(instance, allocation)
        swmax, _ = is_weighted_welfare_maximizing(instance, allocation)
    except TooLarge:
        pareto = nonzero = swmax = None
    return FairnessReport(wef1, w1, wwef1, w2, wef1_t, w3, nw, w4, pareto, nonzero, swmax)
