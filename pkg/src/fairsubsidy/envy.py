"""Weighted envy-graphs, envy-freeability tests and minimum subsidies.

The envy-graph of an allocation is the complete digraph on agents with
edge length l(i,j) = v_i(X_j)/w_j - v_i(X_i)/w_i.  An allocation admits
envy-removing payments exactly when this graph has no positive-length
cycle, and the cheapest such payments are w_i times the longest path
starting at i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import InternalInconsistency, NotEnvyFreeable
from .model import Allocation, Instance, Outcome, ZERO

BRUTE_FORCE_AGENT_LIMIT = 8


@dataclass(frozen=True)
class WeightedEnvyGraph:
    n: int
    lengths: Tuple[Tuple[Fraction, ...], ...]
    payment_adjusted: bool


@dataclass(frozen=True)
class SubsidyVector:
    payments: Tuple[Fraction, ...]
    path_lengths: Tuple[Fraction, ...]


def build_envy_graph(instance: Instance, allocation: Allocation) -> WeightedEnvyGraph:
    n = instance.n
    rows = []
    for i in range(n):
        own = instance.value(i, allocation.bundles[i]) / instance.weights[i]
        row = []
        for j in range(n):
            if i == j:
                row.append(ZERO)
            else:
                row.append(instance.value(i, allocation.bundles[j]) / instance.weights[j] - own)
        rows.append(tuple(row))
    return WeightedEnvyGraph(n, tuple(rows), payment_adjusted=False)


def build_envy_graph_with_payments(instance: Instance, outcome: Outcome) -> WeightedEnvyGraph:
    n = instance.n
    alloc = outcome.allocation
    p = outcome.payments
    rows = []
    for i in range(n):
        own = (instance.value(i, alloc.bundles[i]) + p[i]) / instance.weights[i]
        row = []
        for j in range(n):
            if i == j:
                row.append(ZERO)
            else:
                row.append(
                    (instance.value(i, alloc.bundles[j]) + p[j]) / instance.weights[j] - own
                )
        rows.append(tuple(row))
    return WeightedEnvyGraph(n, tuple(rows), payment_adjusted=True)


def _canonical_cycle(cycle: List[int]) -> Tuple[int, ...]:
    """Rotate a cycle (without the closing repeat) to start at its smallest agent."""
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def has_positive_cycle(graph: WeightedEnvyGraph):
    """Detect a strictly positive directed cycle.

    Runs Bellman-Ford relaxation on the negated lengths (a positive
    cycle becomes a negative one); returns (True, witness_cycle) or
    (False, None).  The witness is rotated to start at the smallest
    agent index.
    """
    n = graph.n
    if n <= 1:
        return False, None
    dist = [ZERO] * n  # virtual source at distance 0 to every agent
    pred: List[Optional[int]] = [None] * n
    neg = graph.lengths
    touched = None
    for round_ in range(n):
        touched = None
        for u in range(n):
            for v in range(n):
                if u == v:
                    continue
                cand = dist[u] - neg[u][v]  # negated edge weight
                if cand < dist[v]:
                    dist[v] = cand
                    pred[v] = u
                    touched = v
        if touched is None:
            return False, None
    # A relaxation happened in round n: walk predecessors into the cycle.
    node = touched
    for _ in range(n):
        node = pred[node]
    cycle = [node]
    cur = pred[node]
    while cur != node:
        cycle.append(cur)
        cur = pred[cur]
    cycle.reverse()  # predecessor order is reverse edge order
    return True, _canonical_cycle(cycle)


def _assignment_value(costs, perm) -> Fraction:
    return sum((costs[i][perm[i]] for i in range(len(perm))), ZERO)


def _best_permutation_brute(costs):
    n = len(costs)
    best_value = None
    best_perm = None
    for perm in itertools.permutations(range(n)):
        value = _assignment_value(costs, perm)
        if best_value is None or value > best_value:
            best_value = value
            best_perm = perm
    return best_value, best_perm


def _best_permutation_hungarian(costs):
    """Exact max-weight assignment via the potentials method (all Fractions)."""
    n = len(costs)
    inf = sum((abs(c) for row in costs for c in row), Fraction(1)) + 1
    # minimize negated costs; 1-based arrays with 0 as a virtual row/col
    a = [[ZERO] * (n + 1)] + [[ZERO] + [-costs[i][j] for j in range(n)] for i in range(n)]
    u = [ZERO] * (n + 1)
    v = [ZERO] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row matched to column j
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = a[i0][j] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        # augment along the alternating path
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    perm = [0] * n
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    value = _assignment_value(costs, perm)
    return value, tuple(perm)


def best_bundle_permutation(costs, verify: bool = False):
    """Max over permutations pi of sum_i costs[i][pi(i)], with a witness."""
    n = len(costs)
    if n <= BRUTE_FORCE_AGENT_LIMIT:
        value, perm = _best_permutation_brute(costs)
        if verify:
            h_value, _ = _best_permutation_hungarian(costs)
            if h_value != value:
                raise InternalInconsistency(
                    "assignment solvers disagree: "
                    f"brute force {value} vs hungarian {h_value}"
                )
        return value, perm
    return _best_permutation_hungarian(costs)


def is_reassignment_stable(instance: Instance, allocation: Allocation, verify: bool = False):
    """True iff no bundle permutation beats the identity.

    Compares sum_i v_i(X_pi(i))/w_pi(i) over all permutations via an
    assignment solve; returns (False, improving_permutation) otherwise.
    """
    n = instance.n
    costs = [
        [instance.value(i, allocation.bundles[j]) / instance.weights[j] for j in range(n)]
        for i in range(n)
    ]
    identity = sum((costs[i][i] for i in range(n)), ZERO)
    best_value, best_perm = best_bundle_permutation(costs, verify=verify)
    if best_value > identity:
        return False, best_perm
    return True, None


def is_weighted_envy_freeable(instance: Instance, allocation: Allocation,
                              verify: bool = True) -> bool:
    """Envy-freeability via the no-positive-cycle criterion.

    With verify=True (default) the reassignment-stability criterion is
    computed as well; disagreement is an implementation bug.
    """
    positive, _ = has_positive_cycle(build_envy_graph(instance, allocation))
    if verify:
        stable, _ = is_reassignment_stable(instance, allocation)
        if stable == positive:
            raise InternalInconsistency(
                "no-positive-cycle and reassignment-stability disagree"
            )
    return not positive


def longest_path_lengths(graph: WeightedEnvyGraph) -> Tuple[Fraction, ...]:
    """Longest path length from each agent (empty path counts, so >= 0).

    Valid only when the graph has no positive cycle: a walk of at most
    n-1 edges then dominates every walk.
    """
    n = graph.n
    lengths = graph.lengths
    best = [ZERO] * n
    for _ in range(max(n - 1, 0)):
        nxt = list(best)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                cand = lengths[i][j] + best[j]
                if cand > nxt[i]:
                    nxt[i] = cand
        if nxt == best:
            break
        best = nxt
    return tuple(best)


def min_subsidies(instance: Instance, allocation: Allocation) -> SubsidyVector:
    """Minimum per-agent payments making the allocation weighted envy-free."""
    graph = build_envy_graph(instance, allocation)
    positive, cycle = has_positive_cycle(graph)
    if positive:
        raise NotEnvyFreeable(
            f"allocation has a positive envy cycle through agents {cycle}", cycle=cycle
        )
    path_lengths = longest_path_lengths(graph)
    payments = tuple(w * l for w, l in zip(instance.weights, path_lengths))
    return SubsidyVector(payments, path_lengths)


def is_weighted_envy_free(instance: Instance, outcome: Outcome):
    """True iff no payment-adjusted envy edge is positive; witness pair otherwise."""
    graph = build_envy_graph_with_payments(instance, outcome)
    for i in range(graph.n):
        for j in range(graph.n):
            if i != j and graph.lengths[i][j] > 0:
                return False, (i, j)
    return True, None
