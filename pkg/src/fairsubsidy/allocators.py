"""Allocation procedures with per-valuation-class subsidy guarantees.

All tie-breaks go to the smallest agent index and items are processed in
input order, so every run is deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from . import envy
from .criteria import enumerate_assignments
from .errors import InternalPathError, NotEnvyFreeable, WrongValuationKind
from .model import (
    Allocation,
    Instance,
    ZERO,
    unweighted_social_welfare,
    weighted_social_welfare,
)


@dataclass(frozen=True)
class AllocatorResult:
    allocation: Allocation
    subsidy: envy.SubsidyVector
    guarantee: Optional[Fraction]
    trace: Tuple[str, ...]

    @property
    def max_subsidy(self) -> Fraction:
        return max(self.subsidy.payments, default=ZERO)


def _finish(instance: Instance, bundles: List[set], guarantee, trace) -> AllocatorResult:
    allocation = Allocation(tuple(frozenset(b) for b in bundles))
    subsidy = envy.min_subsidies(instance, allocation)
    return AllocatorResult(allocation, subsidy, guarantee, tuple(trace))


def _require_kinds(instance: Instance, kinds, what: str):
    bad = [v.kind for v in instance.valuations if v.kind not in kinds]
    if bad:
        raise WrongValuationKind(f"{what} needs {'/'.join(kinds)} valuations, got {bad[0]}")


def allocate_all_to_max(instance: Instance) -> AllocatorResult:
    """Give every item to the agent with the highest value for the whole set.

    Works for any valuation kind; the result is envy-freeable and has
    non-zero social welfare whenever any allocation does.
    """
    everything = instance.all_items()
    totals = [instance.value(i, everything) for i in range(instance.n)]
    winner = max(range(instance.n), key=lambda i: (totals[i], -i))
    bundles = [set() for _ in range(instance.n)]
    bundles[winner] = set(everything)
    trace = [f"all items -> agent {winner} (argmax total value, smallest index on ties)"]
    # each loser j pays w_j * v_j(M)/w_winner, and v_j(M) <= v_winner(M)
    guarantee = totals[winner] * instance.w_max / instance.w_min
    return _finish(instance, bundles, guarantee, trace)


def greedy_additive_welfare_max(instance: Instance) -> AllocatorResult:
    """Item-by-item argmax assignment for additive valuations."""
    _require_kinds(instance, ("additive", "binary_additive"), "greedy welfare max")
    bundles = [set() for _ in range(instance.n)]
    trace = []
    top = ZERO  # largest single-item value across agents
    for g in instance.items:
        values = [instance.value(i, frozenset([g])) for i in range(instance.n)]
        winner = max(range(instance.n), key=lambda i: (values[i], -i))
        bundles[winner].add(g)
        top = max(top, values[winner])
        trace.append(f"{g}: argmax item value -> agent {winner}")
    guarantee = Fraction(instance.m) * top * instance.w_max / instance.w_min
    return _finish(instance, bundles, guarantee, trace)


def _identical_additive_values(instance: Instance):
    _require_kinds(instance, ("additive", "binary_additive"), "identical-additive allocator")
    first = {g: instance.value(0, frozenset([g])) for g in instance.items}
    for i in range(1, instance.n):
        for g in instance.items:
            if instance.value(i, frozenset([g])) != first[g]:
                raise WrongValuationKind(
                    f"agents 0 and {i} disagree on item {g!r}; valuations are not identical"
                )
    return first


def alg1_identical_additive(instance: Instance) -> AllocatorResult:
    """Identical additive valuations: send each item to the argmin of
    (new bundle value / weight).  Per-agent subsidy is at most 1 when
    item values are at most 1."""
    item_value = _identical_additive_values(instance)
    bundles = [set() for _ in range(instance.n)]
    totals = [ZERO] * instance.n
    trace = []
    for g in instance.items:
        if item_value[g] == 0:
            # zero-value items affect no envy edge; park them on agent 0
            bundles[0].add(g)
            trace.append(f"{g}: zero value, parked on agent 0")
            continue
        scores = [(totals[i] + item_value[g]) / instance.weights[i] for i in range(instance.n)]
        u = min(range(instance.n), key=lambda i: (scores[i], i))
        bundles[u].add(g)
        totals[u] += item_value[g]
        trace.append(f"{g}: argmin bundle-value/weight -> agent {u}")
    return _finish(instance, bundles, Fraction(1), trace)


def _positive_path(instance: Instance, bundles, source: int, targets) -> Optional[List[int]]:
    """BFS for a path source -> ... -> j in targets where each hop i->k has
    v_i(X_k) > 0.  The trivial path [source] counts when source is a target."""
    if source in targets:
        return [source]
    parent = {source: None}
    queue = deque([source])
    while queue:
        i = queue.popleft()
        for k in range(instance.n):
            if k in parent or k == i:
                continue
            if instance.value(i, frozenset(bundles[k])) > 0:
                parent[k] = i
                if k in targets:
                    path = [k]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path
                queue.append(k)
    return None


def alg2_binary_additive(instance: Instance) -> AllocatorResult:
    """Binary additive valuations: augmenting-path assignment keeping the
    allocation non-wasteful with per-agent subsidy at most w_max/w_min."""
    _require_kinds(instance, ("binary_additive",), "binary-additive allocator")
    bundles = [set() for _ in range(instance.n)]
    totals = [0] * instance.n  # v_i(X_i); stays exact since items are 0/1
    trace = []
    deferred = []
    for g in instance.items:
        wanting = {i for i in range(instance.n) if instance.value(i, frozenset([g])) == 1}
        if not wanting:
            deferred.append(g)
            trace.append(f"{g}: valued by nobody, parked on agent 0")
            continue
        reachers = [
            i for i in range(instance.n)
            if _positive_path(instance, bundles, i, wanting) is not None
        ]
        u = min(
            reachers,
            key=lambda i: ((totals[i] + 1) / instance.weights[i], i),
        )
        path = _positive_path(instance, bundles, u, wanting)
        if path is None:
            raise InternalPathError(f"agent {u} lost its positive path while placing {g!r}")
        j = path[-1]
        bundles[j].add(g)
        # shift one wanted item backwards along every path edge
        for t in range(len(path) - 1):
            holder = path[t + 1]
            receiver = path[t]
            moved = None
            for candidate in sorted(bundles[holder]):
                if instance.value(receiver, frozenset([candidate])) == 1:
                    moved = candidate
                    break
            if moved is None:
                raise InternalPathError(
                    f"no transferable item from agent {holder} to agent {receiver}"
                )
            bundles[holder].remove(moved)
            bundles[receiver].add(moved)
        for i in range(instance.n):
            totals[i] = int(instance.value(i, frozenset(bundles[i])))
        trace.append(
            f"{g}: candidates {sorted(wanting)}, start agent {u},"
            f" path {path}, item lands on agent {j}"
        )
    for g in deferred:
        bundles[0].add(g)
    return _finish(instance, bundles, instance.w_max / instance.w_min, trace)


def alg3_identical_items(instance: Instance) -> AllocatorResult:
    """Identical items: hand items out along the ascending-value agent order,
    preferring the first agent whose next count keeps the count/weight chain
    monotone."""
    _require_kinds(instance, ("identical_items",), "identical-items allocator")
    n = instance.n
    per_item = [v.per_item for v in instance.valuations]
    order = sorted(range(n), key=lambda i: (per_item[i], i))  # stable on ties
    counts = [0] * n  # indexed by position in sorted order
    bundles = [set() for _ in range(n)]
    trace = []
    for g in instance.items:
        eligible = [
            pos for pos in range(n - 1)
            if (counts[pos] + 1) / instance.weights[order[pos]]
            <= counts[pos + 1] / instance.weights[order[pos + 1]]
        ] + [n - 1]
        pos = min(eligible)
        agent = order[pos]
        counts[pos] += 1
        bundles[agent].add(g)
        trace.append(f"{g}: eligible sorted positions {eligible}, -> agent {agent}")
    guarantee = Fraction(n - 1) * instance.w_max / instance.w_min + 1
    return _finish(instance, bundles, guarantee, trace)


def brute_force_unweighted_sw_max(instance: Instance, assert_envy_freeable=None) -> AllocatorResult:
    """Exhaustive argmax of total (unweighted) value, lexicographic tie-break.

    When every valuation is super-modular the output is envy-freeable;
    pass assert_envy_freeable=True to enforce that (it is asserted
    automatically when all valuations carry structural guarantees)."""
    best = None
    best_assignment = None
    for assignment in enumerate_assignments(instance):
        candidate = Allocation.from_assignment(instance, assignment)
        value = unweighted_social_welfare(instance, candidate)
        if best is None or value > best:
            best = value
            best_assignment = assignment
    allocation = Allocation.from_assignment(instance, best_assignment)
    if assert_envy_freeable is None:
        assert_envy_freeable = all(
            v.kind in ("additive", "binary_additive", "identical_items")
            or (v.kind == "table" and v.supermodular)
            for v in instance.valuations
        )
    trace = [f"unweighted welfare max {best} at assignment {best_assignment}"]
    try:
        subsidy = envy.min_subsidies(instance, allocation)
    except NotEnvyFreeable:
        if assert_envy_freeable:
            raise
        subsidy = envy.SubsidyVector((ZERO,) * instance.n, (ZERO,) * instance.n)
        trace.append("output is not envy-freeable (valuations not super-modular)")
    return AllocatorResult(allocation, subsidy, None, tuple(trace))


def brute_force_weighted_sw_max(instance: Instance) -> Allocation:
    """Exact argmax of the weighted social welfare, lexicographic tie-break."""
    best = None
    best_assignment = None
    for assignment in enumerate_assignments(instance):
        candidate = Allocation.from_assignment(instance, assignment)
        value = weighted_social_welfare(instance, candidate)
        if best is None or value > best:
            best = value
            best_assignment = assignment
    return Allocation.from_assignment(instance, best_assignment)


AUTO_DISPATCH_ORDER = (
    "binary_additive",
    "identical_items",
    "identical_additive",
    "additive",
    "general",
)


def auto_allocate(instance: Instance) -> Tuple[str, AllocatorResult]:
    """Pick the strongest applicable allocator for the instance's kinds."""
    kinds = {v.kind for v in instance.valuations}
    if kinds == {"binary_additive"}:
        return "alg2", alg2_binary_additive(instance)
    if kinds == {"identical_items"}:
        return "alg3", alg3_identical_items(instance)
    if kinds <= {"additive", "binary_additive"}:
        try:
            return "alg1", alg1_identical_additive(instance)
        except WrongValuationKind:
            return "greedy", greedy_additive_welfare_max(instance)
    return "all-to-max", allocate_all_to_max(instance)
