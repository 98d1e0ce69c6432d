"""Exhaustive ground truth on small instances, plus the bound fixtures.

Everything here recomputes quantities by enumeration, independently of
the graph-based code paths, so the two can cross-check each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from . import allocators, criteria, envy, mechanisms
from .errors import FixtureMismatch, TooLarge
from .model import (
    Allocation,
    Instance,
    Outcome,
    ZERO,
    enumeration_limit,
    validate_instance,
)

PERMUTATION_AGENT_LIMIT = 8


def enumerate_allocations(instance: Instance):
    """All n^m complete allocations in lexicographic assignment order."""
    count = instance.n ** instance.m
    limit = enumeration_limit()
    if count > limit:
        raise TooLarge(f"{count} allocations exceed the enumeration limit {limit}")
    for assignment in itertools.product(range(instance.n), repeat=instance.m):
        yield Allocation.from_assignment(instance, assignment)


def oracle_envy_freeable(instance: Instance, allocation: Allocation) -> bool:
    """Literal reassignment-stability check over all n! permutations."""
    if instance.n > PERMUTATION_AGENT_LIMIT:
        raise TooLarge(f"permutation oracle limited to {PERMUTATION_AGENT_LIMIT} agents")
    shares = [
        [instance.value(i, allocation.bundles[j]) / instance.weights[j]
         for j in range(instance.n)]
        for i in range(instance.n)
    ]
    identity = sum((shares[i][i] for i in range(instance.n)), ZERO)
    for perm in itertools.permutations(range(instance.n)):
        if sum((shares[i][perm[i]] for i in range(instance.n)), ZERO) > identity:
            return False
    return True


def oracle_min_max_subsidy(
    instance: Instance,
    allocation_filter: Optional[Callable[[Instance, Allocation], bool]] = None,
) -> Tuple[Fraction, Allocation]:
    """Minimum over (filtered) envy-freeable allocations of the largest
    per-agent minimum subsidy."""
    best = None
    witness = None
    for allocation in enumerate_allocations(instance):
        if allocation_filter is not None and not allocation_filter(instance, allocation):
            continue
        if not oracle_envy_freeable(instance, allocation):
            continue
        worst = max(envy.min_subsidies(instance, allocation).payments, default=ZERO)
        if best is None or worst < best:
            best = worst
            witness = allocation
    if best is None:
        raise FixtureMismatch("no allocation passed the filter and envy-freeability")
    return best, witness


def brute_force_min_payment_feasible(instance: Instance, allocation: Allocation) -> bool:
    """Check min_subsidies payments are feasible and component-wise minimal."""
    subsidy = envy.min_subsidies(instance, allocation)
    wef, _ = envy.is_weighted_envy_free(instance, Outcome(allocation, subsidy.payments))
    if not wef:
        return False
    for i, p in enumerate(subsidy.payments):
        if p == 0:
            continue
        reduced = list(subsidy.payments)
        reduced[i] = p / 2
        still_wef, _ = envy.is_weighted_envy_free(
            instance, Outcome(allocation, tuple(reduced))
        )
        if still_wef:
            return False
    return True


# ---------------------------------------------------------------------------
# Fixtures


@dataclass
class FixtureReport:
    name: str
    description: str
    checks: List[Tuple[str, bool, str]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


class _Checker:
    def __init__(self, name: str, description: str):
        self.report = FixtureReport(name, description, [])

    def equal(self, label: str, expected, actual):
        ok = expected == actual
        self.report.checks.append((label, ok, f"expected {expected}, got {actual}"))
        if not ok:
            raise FixtureMismatch(
                f"{self.report.name}: {label}", expected=expected, actual=actual
            )

    def truth(self, label: str, actual: bool):
        self.equal(label, True, bool(actual))


def _table_entries(items, bundle_value):
    """Explicit table for v(A) = bundle_value(A) over all subsets."""
    entries = {}
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            entries[",".join(sorted(combo))] = str(bundle_value(frozenset(combo)))
    return entries


def instance_example_inheritance() -> Instance:
    return validate_instance({
        "agents": [
            {"id": "spouse", "weight": "1/2"},
            {"id": "child1", "weight": "1/4"},
            {"id": "child2", "weight": "1/4"},
        ],
        "items": ["g1", "g2"],
        "valuations": [
            {"kind": "additive", "values": {"g1": "100", "g2": "40"}},
            {"kind": "additive", "values": {"g1": "70", "g2": "60"}},
            {"kind": "additive", "values": {"g1": "0", "g2": "0"}},
        ],
    })


def instance_substitute_items() -> Instance:
    items = ["g1", "g2"]
    return validate_instance({
        "agents": [{"id": "a1", "weight": "3/4"}, {"id": "a2", "weight": "1/4"}],
        "items": items,
        "valuations": [
            {"kind": "table",
             "entries": _table_entries(items, lambda A: 90 if A else 0)},
            {"kind": "table",
             "entries": _table_entries(items, lambda A: 30 if A else 0)},
        ],
    })


def instance_all_or_nothing(n=3, m=3, eps=Fraction(1, 10)) -> Instance:
    items = [f"g{k + 1}" for k in range(m)]
    # weights: one small agent, the rest split the remainder evenly
    w_min = Fraction(1, 2 * n - 1)
    w_max = Fraction(2, 2 * n - 1)
    valuations = [{
        "kind": "table",
        "entries": _table_entries(
            items, lambda A: m if len(A) == m else 0
        ),
        "supermodular": True,
    }]
    for _ in range(n - 1):
        valuations.append({
            "kind": "table",
            "entries": _table_entries(
                items, lambda A: Fraction(m) - eps if len(A) == m else Fraction(0)
            ),
            "supermodular": True,
        })
    return validate_instance({
        "agents": [{"id": "a1", "weight": str(w_min)}] + [
            {"id": f"a{i + 2}", "weight": str(w_max)} for i in range(n - 1)
        ],
        "items": items,
        "valuations": valuations,
    })


def instance_single_unit_item() -> Instance:
    return validate_instance({
        "agents": [{"id": "a1", "weight": "1/2"}, {"id": "a2", "weight": "1/2"}],
        "items": ["g1"],
        "valuations": [
            {"kind": "additive", "values": {"g1": "1"}},
            {"kind": "additive", "values": {"g1": "1"}},
        ],
    })


def instance_binary_lb() -> Instance:
    return validate_instance({
        "agents": [
            {"id": "a1", "weight": "1/2"},
            {"id": "a2", "weight": "1/4"},
            {"id": "a3", "weight": "1/4"},
        ],
        "items": ["g1"],
        "valuations": [
            {"kind": "binary_additive", "values": {"g1": 0}},
            {"kind": "binary_additive", "values": {"g1": 1}},
            {"kind": "binary_additive", "values": {"g1": 1}},
        ],
    })


def instance_capped_lb(k=3) -> Instance:
    items = [f"g{j + 1}" for j in range(2 * k)]
    return validate_instance({
        "agents": [{"id": "a1", "weight": "3/4"}, {"id": "a2", "weight": "1/4"}],
        "items": items,
        "valuations": [
            {"kind": "capped_additive", "values": {g: 1 for g in items}, "cap": k},
            {"kind": "capped_additive", "values": {g: 1 for g in items}, "cap": k},
        ],
    })


def instance_identical_items_lb(delta=Fraction(1, 100)) -> Instance:
    # three agents, ascending per-item values 1-2d, 1-d, 1; weights
    # w_max, w_min, (1+d) w_min with w_min = 1/4
    w_min = Fraction(1, 4)
    w3 = (1 + delta) * w_min
    w_max = 1 - w_min - w3
    return validate_instance({
        "agents": [
            {"id": "a1", "weight": str(w_max)},
            {"id": "a2", "weight": str(w_min)},
            {"id": "a3", "weight": str(w3)},
        ],
        "items": ["g1", "g2", "g3"],
        "valuations": [
            {"kind": "identical_items", "value": str(1 - 2 * delta)},
            {"kind": "identical_items", "value": str(1 - delta)},
            {"kind": "identical_items", "value": "1"},
        ],
    })


def instance_two_identical_items() -> Instance:
    return validate_instance({
        "agents": [{"id": "a1", "weight": "3/5"}, {"id": "a2", "weight": "2/5"}],
        "items": ["g1", "g2"],
        "valuations": [
            {"kind": "additive", "values": {"g1": "120", "g2": "120"}},
            {"kind": "additive", "values": {"g1": "60", "g2": "60"}},
        ],
    })


def instance_picking_sequence_counterexample() -> Instance:
    return validate_instance({
        "agents": [{"id": "a1", "weight": "4/5"}, {"id": "a2", "weight": "1/5"}],
        "items": ["g1"],
        "valuations": [
            {"kind": "additive", "values": {"g1": "1"}},
            {"kind": "additive", "values": {"g1": "2"}},
        ],
    })


def instance_greedy_tightness(m=4, eps=Fraction(1, 10)) -> Instance:
    items = [f"g{j + 1}" for j in range(m)]
    return validate_instance({
        "agents": [{"id": "small", "weight": "1/4"}, {"id": "big", "weight": "3/4"}],
        "items": items,
        "valuations": [
            {"kind": "additive", "values": {g: "1" for g in items}},
            {"kind": "additive", "values": {g: str(1 - eps) for g in items}},
        ],
    })


def _fx_example_inheritance() -> FixtureReport:
    c = _Checker(
        "example-1-inheritance",
        "house/car inheritance with weights 1/2, 1/4, 1/4",
    )
    inst = instance_example_inheritance()
    alloc_a = Allocation((frozenset({"g1", "g2"}), frozenset(), frozenset()))
    alloc_b = Allocation((frozenset({"g1"}), frozenset({"g2"}), frozenset()))
    c.truth("allocation A envy-freeable", envy.is_weighted_envy_freeable(inst, alloc_a))
    c.truth("allocation B envy-freeable", envy.is_weighted_envy_freeable(inst, alloc_b))
    c.equal(
        "allocation A minimum subsidies",
        (Fraction(0), Fraction(65), Fraction(65)),
        envy.min_subsidies(inst, alloc_a).payments,
    )
    c.equal(
        "allocation B minimum subsidies",
        (Fraction(0), Fraction(0), Fraction(0)),
        envy.min_subsidies(inst, alloc_b).payments,
    )
    return c.report


def _fx_example_incompatibility() -> FixtureReport:
    c = _Checker(
        "example-incompatibility",
        "two substitute items: welfare max and non-wastefulness clash with"
        " envy-freeability",
    )
    inst = instance_substitute_items()
    swmax = allocators.brute_force_weighted_sw_max(inst)
    c.equal("weighted SW max gives one item each", {1, 1},
            {len(b) for b in swmax.bundles})
    c.truth("SW max allocation not envy-freeable",
            not envy.is_weighted_envy_freeable(inst, swmax))
    one_each = [
        Allocation((frozenset({"g1"}), frozenset({"g2"}))),
        Allocation((frozenset({"g2"}), frozenset({"g1"}))),
    ]
    for k, alloc in enumerate(one_each):
        c.truth(f"one-each variant {k} non-wasteful",
                criteria.is_non_wasteful(inst, alloc)[0])
        c.truth(f"one-each variant {k} not envy-freeable",
                not envy.is_weighted_envy_freeable(inst, alloc))
    for alloc in enumerate_allocations(inst):
        sizes = sorted(len(b) for b in alloc.bundles)
        if sizes != [1, 1]:
            c.truth("lopsided allocations are wasteful",
                    not criteria.is_non_wasteful(inst, alloc)[0])
    # the defining arithmetic: identity shares 240 against swapped 400
    shares = Fraction(90) / inst.weights[0] + Fraction(30) / inst.weights[1]
    swapped = Fraction(90) / inst.weights[1] + Fraction(30) / inst.weights[0]
    c.equal("identity shares", Fraction(240), shares)
    c.equal("swapped shares", Fraction(400), swapped)
    return c.report


def _fx_prop_lb_general() -> FixtureReport:
    c = _Checker(
        "prop-lb-general",
        "all-or-nothing valuations force a (m - eps) * w_max/w_min subsidy",
    )
    eps = Fraction(1, 10)
    inst = instance_all_or_nothing(n=3, m=3, eps=eps)
    expected = (Fraction(3) - eps) * inst.w_max / inst.w_min
    actual, witness = oracle_min_max_subsidy(
        inst, lambda i, a: criteria.is_nonzero_social_welfare(i, a)
    )
    c.equal("min-max subsidy under non-zero-SW filter", expected, actual)
    c.equal("witness gives everything to agent 1", inst.all_items(), witness.bundles[0])
    return c.report


def _fx_thm_lb_identical_additive() -> FixtureReport:
    c = _Checker(
        "thm-lb-identical-additive",
        "two equal-weight agents, one unit item: someone needs subsidy 1",
    )
    inst = instance_single_unit_item()
    actual, _ = oracle_min_max_subsidy(inst)
    c.equal("min-max subsidy", Fraction(1), actual)
    return c.report


def _fx_thm_lb_binary_additive() -> FixtureReport:
    c = _Checker(
        "thm-lb-binary-additive",
        "one item, weights (1/2, 1/4, 1/4): someone needs w_max/w_min",
    )
    inst = instance_binary_lb()
    actual, _ = oracle_min_max_subsidy(inst)
    c.equal("min-max subsidy", inst.w_max / inst.w_min, actual)
    alloc = Allocation((frozenset(), frozenset({"g1"}), frozenset()))
    c.equal("item-to-agent-2 subsidies", (Fraction(2), Fraction(0), Fraction(1)),
            envy.min_subsidies(inst, alloc).payments)
    return c.report


def _fx_thm_lb_matroidal() -> FixtureReport:
    c = _Checker(
        "thm-lb-matroidal",
        "capped valuations, caps k = 3: non-wasteful costs k (w_max/w_min - 1)",
    )
    k = 3
    inst = instance_capped_lb(k=k)
    expected = k * (inst.w_max / inst.w_min - 1)
    actual, witness = oracle_min_max_subsidy(
        inst, lambda i, a: criteria.is_non_wasteful(i, a)[0]
    )
    c.equal("min-max subsidy under non-wasteful filter", expected, actual)
    c.equal("witness splits the items in half", {k, k},
            {len(b) for b in witness.bundles})
    return c.report


def _fx_thm_lb_identical_items() -> FixtureReport:
    delta = Fraction(1, 100)
    n = 3
    c = _Checker(
        "thm-lb-identical-items",
        "identical items, near-equal values: subsidy close to (n-1) w_max/w_min",
    )
    inst = instance_identical_items_lb(delta=delta)
    w3 = inst.weights[2]
    low_value = inst.valuations[0].per_item  # 1 - 2 delta
    # agent 1 ends up empty while the last agent holds n-1 items, so its
    # subsidy is at least w_max * v_1 * (n-1) / w3
    bound = (n - 1) * inst.w_max * low_value / w3
    eps = (n - 1) * inst.w_max / inst.w_min - bound
    c.truth("epsilon implied by delta is positive", eps > 0)
    c.truth("epsilon shrinks linearly with delta",
            eps <= 3 * delta * (n - 1) * inst.w_max / inst.w_min)
    actual, _ = oracle_min_max_subsidy(inst)
    c.truth(
        "min-max subsidy meets the (n-1) w_max/w_min - eps bound",
        actual >= (n - 1) * inst.w_max / inst.w_min - eps,
    )
    return c.report


def _fx_thm_additive_incompat() -> FixtureReport:
    c = _Checker(
        "thm-additive-incompat",
        "two identical items, weights (3/5, 2/5): envy-freeable and WWEF1"
        " cannot coexist",
    )
    inst = instance_two_identical_items()
    for alloc in enumerate_allocations(inst):
        freeable = envy.is_weighted_envy_freeable(inst, alloc)
        wwef1, _ = criteria.is_wwef1(inst, alloc)
        c.truth(
            f"allocation {alloc.assignment_vector(inst)} not both envy-freeable"
            " and WWEF1",
            not (freeable and wwef1),
        )
    w1, w2 = inst.weights
    c.equal("receipt share for the empty agent", Fraction(150),
            inst.value(1, frozenset({"g1"})) / w2)
    c.equal("envied bundle share", Fraction(200),
            inst.value(1, frozenset({"g1", "g2"})) / w1)
    c.equal("reverse receipt share", Fraction(200),
            inst.value(0, frozenset({"g1"})) / w1)
    c.equal("reverse envied share", Fraction(600),
            inst.value(0, frozenset({"g1", "g2"})) / w2)
    return c.report


def _fx_picking_sequence() -> FixtureReport:
    c = _Checker(
        "sec6-picking-sequence-counterexample",
        "single item valued 1 vs 2 with weights (4/5, 1/5)",
    )
    inst = instance_picking_sequence_counterexample()
    picking = Allocation((frozenset({"g1"}), frozenset()))
    c.truth("picking-sequence allocation not envy-freeable",
            not envy.is_weighted_envy_freeable(inst, picking))
    result = mechanisms.biased_weighted_adjusted_winner(inst)
    c.equal("adjusted winner sends the item to agent 2",
            frozenset({"g1"}), result.allocation.bundles[1])
    c.truth("adjusted winner output envy-freeable",
            envy.is_weighted_envy_freeable(inst, result.allocation))
    return c.report


def _fx_greedy_tightness() -> FixtureReport:
    m = 4
    eps = Fraction(1, 10)
    c = _Checker(
        "sec5-greedy-tightness",
        "greedy additive assignment really pays m (1 - eps) w_max/w_min",
    )
    inst = instance_greedy_tightness(m=m, eps=eps)
    result = allocators.greedy_additive_welfare_max(inst)
    c.equal("all items go to the small-weight agent", inst.all_items(),
            result.allocation.bundles[0])
    expected = m * (1 - eps) * inst.w_max / inst.w_min
    c.equal("big agent's subsidy", expected, result.subsidy.payments[1])
    return c.report


FIXTURES: Dict[str, Callable[[], FixtureReport]] = {
    "example-1-inheritance": _fx_example_inheritance,
    "example-incompatibility": _fx_example_incompatibility,
    "prop-lb-general": _fx_prop_lb_general,
    "thm-lb-identical-additive": _fx_thm_lb_identical_additive,
    "thm-lb-binary-additive": _fx_thm_lb_binary_additive,
    "thm-lb-matroidal": _fx_thm_lb_matroidal,
    "thm-lb-identical-items": _fx_thm_lb_identical_items,
    "thm-additive-incompat": _fx_thm_additive_incompat,
    "sec6-picking-sequence-counterexample": _fx_picking_sequence,
    "sec5-greedy-tightness": _fx_greedy_tightness,
}


def verify_fixture(name: str) -> FixtureReport:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return FIXTURES[name]()
