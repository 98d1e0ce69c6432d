"""Outcome-producing mechanisms.

Two procedures live here: the VCG mechanism with an up-front per-weight
subsidy (super-modular valuations, any number of agents) and the biased
weighted adjusted winner procedure (two agents, additive valuations).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from . import envy
from .criteria import _guard_enumeration
from .errors import (
    DegenerateInstance,
    InternalInconsistency,
    NotSupermodular,
    TooLarge,
    UpfrontTooSmall,
    WrongAgentCount,
    WrongValuationKind,
)
from .model import Allocation, Instance, Outcome, ZERO, subset_key


@dataclass(frozen=True)
class VcgOutcome:
    allocation: Allocation
    vcg_payments: Tuple[Fraction, ...]
    upfront_constant: Fraction
    net_payments: Tuple[Fraction, ...]

    def outcome(self) -> Outcome:
        return Outcome(self.allocation, self.net_payments)


def _check_supermodular(instance: Instance):
    for i, val in enumerate(instance.valuations):
        if val.kind in ("additive", "binary_additive", "identical_items"):
            continue  # additive kinds satisfy super-modularity with equality
        if val.kind == "table":
            try:
                val.check_supermodular()
            except ValueError as exc:
                a, b = exc.args[0]
                raise NotSupermodular(
                    f"agent {i} fails super-modularity on"
                    f" A={subset_key(a)!r}, B={subset_key(b)!r}",
                    witness=(a, b),
                )
            continue
        raise NotSupermodular(f"agent {i} has kind {val.kind}, which is not super-modular")


def _max_welfare(instance: Instance, agents, items) -> Fraction:
    """Best total value when allocating `items` among `agents` only."""
    agents = list(agents)
    items = sorted(items)
    if not agents or not items:
        return ZERO
    best = ZERO
    for assignment in itertools.product(range(len(agents)), repeat=len(items)):
        buckets: Dict[int, set] = {k: set() for k in range(len(agents))}
        for g, k in zip(items, assignment):
            buckets[k].add(g)
        total = sum(
            (instance.value(agents[k], frozenset(buckets[k])) for k in range(len(agents))),
            ZERO,
        )
        if total > best:
            best = total
    return best


def vcg_with_upfront_subsidy(instance: Instance, upfront: Optional[Fraction] = None) -> VcgOutcome:
    """VCG allocation and payments, funded by an up-front transfer C*w_i.

    The net subsidy for agent i is C*w_i minus the VCG payment.  The
    default C = m/w_min keeps every net subsidy non-negative whenever
    bundle values never exceed bundle sizes; raise C for larger values.
    """
    _check_supermodular(instance)
    _guard_enumeration(instance)

    from .allocators import brute_force_unweighted_sw_max

    allocation = brute_force_unweighted_sw_max(instance, assert_envy_freeable=True).allocation
    all_items = set(instance.items)
    q = []
    for i in range(instance.n):
        others = [j for j in range(instance.n) if j != i]
        with_all = _max_welfare(instance, others, all_items)
        without_own = _max_welfare(instance, others, all_items - set(allocation.bundles[i]))
        q.append(with_all - without_own)
    if upfront is None:
        upfront = Fraction(instance.m) / instance.w_min
    net = tuple(upfront * w - qi for w, qi in zip(instance.weights, q))
    short = [i for i, p in enumerate(net) if p < 0]
    if short:
        raise UpfrontTooSmall(
            f"up-front constant {upfront} leaves agent {short[0]} with a negative"
            " net subsidy; pass a larger constant"
        )
    result = VcgOutcome(allocation, tuple(q), upfront, net)
    wef, witness = envy.is_weighted_envy_free(instance, result.outcome())
    if not wef:
        raise InternalInconsistency(f"VCG outcome is not weighted envy-free: pair {witness}")
    return result


@dataclass(frozen=True)
class AdjustedWinnerResult:
    allocation: Allocation
    boundary_index: int  # 1-based position of the boundary item in sorted order
    contested_item: Optional[str]
    fraction_to_agent1: Fraction
    normalized_values: Tuple[Dict[str, Fraction], Dict[str, Fraction]]
    sorted_items: Tuple[str, ...]


def _ratio_sort(items, v1, v2):
    """Descending v1/v2 by cross-multiplication; v2 = 0 sorts first,
    both-zero items go last; equal ratios keep input order."""
    scored = []
    zeros = []
    for g in items:
        if v1[g] == 0 and v2[g] == 0:
            zeros.append(g)
        else:
            scored.append(g)

    import functools

    def compare(a, b):
        lhs = v1[a] * v2[b]
        rhs = v1[b] * v2[a]
        if lhs > rhs:
            return -1
        if lhs < rhs:
            return 1
        return 0

    scored.sort(key=functools.cmp_to_key(compare))
    return scored + zeros


def biased_weighted_adjusted_winner(instance: Instance) -> AdjustedWinnerResult:
    """Two-agent adjusted winner biased toward the higher-valuing agent.

    The integral output satisfies envy-freeability and envy-freeness up
    to one item transfer; the recorded fractional split of the contested
    item is exactly weighted-proportional for both agents.
    """
    if instance.n != 2:
        raise WrongAgentCount(f"adjusted winner needs exactly 2 agents, got {instance.n}")
    for v in instance.valuations:
        if v.kind not in ("additive", "binary_additive"):
            raise WrongValuationKind("adjusted winner needs additive valuations")
    w1, w2 = instance.weights
    raw1 = {g: instance.value(0, frozenset([g])) for g in instance.items}
    raw2 = {g: instance.value(1, frozenset([g])) for g in instance.items}
    total1 = sum(raw1.values(), ZERO)
    total2 = sum(raw2.values(), ZERO)
    if total1 == 0 and total2 == 0:
        raise DegenerateInstance("both agents value every item at zero")

    if total1 == 0 or total2 == 0:
        # the indifferent agent envies nobody; hand everything to the other
        winner = 0 if total1 > 0 else 1
        bundles = [frozenset(), frozenset()]
        bundles[winner] = instance.all_items()
        allocation = Allocation(tuple(bundles))
        norm1 = {g: (raw1[g] / total1 if total1 else ZERO) for g in instance.items}
        norm2 = {g: (raw2[g] / total2 if total2 else ZERO) for g in instance.items}
        return AdjustedWinnerResult(
            allocation, instance.m if winner == 0 else 0, None, Fraction(0),
            (norm1, norm2), tuple(instance.items),
        )

    norm1 = {g: raw1[g] / total1 for g in instance.items}
    norm2 = {g: raw2[g] / total2 for g in instance.items}
    ordered = _ratio_sort(instance.items, norm1, norm2)

    # boundary d: prefixes strictly below agent 1's proportional share up
    # to d-1, at least the share once g_d is included (agent 1's values only)
    m = len(ordered)
    prefix = [ZERO]
    for g in ordered:
        prefix.append(prefix[-1] + norm1[g])
    total = prefix[-1]  # == 1
    d = None
    for cand in range(1, m + 1):
        left_without = prefix[cand - 1]
        if (left_without / w1 < (total - left_without) / w2
                and prefix[cand] / w1 >= (total - prefix[cand]) / w2):
            d = cand
            break
    if d is None:
        raise InternalInconsistency("no boundary index exists; this should be impossible")

    def split_at(count: int) -> Allocation:
        left = frozenset(ordered[:count])
        return Allocation((left, frozenset(instance.items) - left))

    for count in (d, d - 1):
        candidate = split_at(count)
        wef, _ = envy.is_weighted_envy_free(instance, Outcome(candidate, (ZERO, ZERO)))
        if wef:
            return AdjustedWinnerResult(
                candidate, d, None, Fraction(1) if count == d else Fraction(0),
                (norm1, norm2), tuple(ordered),
            )

    contested = ordered[d - 1]
    left = frozenset(ordered[: d - 1])
    right = frozenset(instance.items) - left - {contested}
    # smallest fraction of the contested item giving agent 1 its
    # weighted-proportional share
    if norm1[contested] > 0:
        x = (w1 * total - prefix[d - 1]) / norm1[contested]
        if x < 0:
            x = ZERO
    else:
        x = ZERO
    if x > 1:
        raise InternalInconsistency("fractional split exceeds the whole item")
    # agent 2's share must already be covered at this split
    agent2_share = sum((norm2[g] for g in right), ZERO) + (1 - x) * norm2[contested]
    if agent2_share < w2 * sum(norm2.values(), ZERO):
        raise InternalInconsistency("contested split violates agent 2's proportional share")

    # whole-item award: the agent with the strictly higher value wins,
    # ties to agent 1 (comparison in the original scale keeps the
    # envy-freeability argument valid)
    if raw2[contested] > raw1[contested]:
        allocation = Allocation((left, right | {contested}))
    else:
        allocation = Allocation((left | {contested}, right))
    return AdjustedWinnerResult(
        allocation, d, contested, x, (norm1, norm2), tuple(ordered)
    )
