"""Instances, valuations, allocations and outcomes.

Everything here is immutable after validation and every operation is a
pure function of its inputs, so values can be shared freely across
threads.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .errors import (
    CheckTooLarge,
    InstanceError,
    NonMonotoneValuation,
    NonPositiveWeight,
    UnboundedValuation,
    WeightSumError,
)
from .rationals import format_rational, loads_exact, parse_rational

ZERO = Fraction(0)

# Exhaustive checks (monotonicity, super-modularity, boundedness of table
# valuations) walk all subsets; refuse above this many items.
DEFAULT_EXHAUSTIVE_LIMIT = 12
# Table valuations store all 2^m entries; refuse above this many items.
DEFAULT_TABLE_LIMIT = 16

ENUM_LIMIT_ENV = "FAIRSUBSIDY_ENUM_LIMIT"
DEFAULT_ENUM_LIMIT = 2_000_000


def enumeration_limit() -> int:
    """Allocation-enumeration guard, overridable via the environment."""
    raw = os.environ.get(ENUM_LIMIT_ENV)
    if raw is None:
        return DEFAULT_ENUM_LIMIT
    return int(raw)


Bundle = FrozenSet[str]


def subset_key(bundle: Iterable[str]) -> str:
    return ",".join(sorted(bundle))


@dataclass(frozen=True)
class TableValuation:
    """General monotone valuation given by an explicit subset table."""

    items: Tuple[str, ...]
    entries: Dict[Bundle, Fraction]
    supermodular: bool = False

    kind = "table"

    def value(self, bundle: Bundle) -> Fraction:
        return self.entries[frozenset(bundle)]

    def check_monotone(self):
        items = self.items
        for larger in all_subsets(items):
            v_larger = self.entries[larger]
            for g in larger:
                smaller = larger - {g}
                if self.entries[smaller] > v_larger:
                    raise NonMonotoneValuation(
                        f"v({subset_key(smaller)!r}) > v({subset_key(larger)!r})",
                        smaller=smaller,
                        larger=larger,
                    )

    def check_supermodular(self):
        subsets = list(all_subsets(self.items))
        for a in subsets:
            for b in subsets:
                lhs = self.entries[a | b] + self.entries[a & b]
                rhs = self.entries[a] + self.entries[b]
                if lhs < rhs:
                    raise ValueError((a, b))

    def to_payload(self) -> dict:
        payload = {
            "kind": "table",
            "entries": {
                subset_key(s): format_rational(v) for s, v in sorted(
                    self.entries.items(), key=lambda kv: (len(kv[0]), subset_key(kv[0]))
                )
            },
        }
        if self.supermodular:
            payload["supermodular"] = True
        return payload


@dataclass(frozen=True)
class AdditiveValuation:
    items: Tuple[str, ...]
    values: Dict[str, Fraction]

    kind = "additive"

    def value(self, bundle: Bundle) -> Fraction:
        return sum((self.values[g] for g in bundle), ZERO)

    def to_payload(self) -> dict:
        return {
            "kind": "additive",
            "values": {g: format_rational(self.values[g]) for g in self.items},
        }


@dataclass(frozen=True)
class BinaryAdditiveValuation:
    items: Tuple[str, ...]
    values: Dict[str, int]  # 0 or 1 per item

    kind = "binary_additive"

    def value(self, bundle: Bundle) -> Fraction:
        return Fraction(sum(self.values[g] for g in bundle))

    def to_payload(self) -> dict:
        return {
            "kind": "binary_additive",
            "values": {g: self.values[g] for g in self.items},
        }


@dataclass(frozen=True)
class IdenticalItemsValuation:
    """All items look the same: the bundle is worth (constant * size)."""

    items: Tuple[str, ...]
    per_item: Fraction

    kind = "identical_items"

    def value(self, bundle: Bundle) -> Fraction:
        return self.per_item * len(bundle)

    def to_payload(self) -> dict:
        return {"kind": "identical_items", "value": format_rational(self.per_item)}


@dataclass(frozen=True)
class CappedAdditiveValuation:
    """Uniform-matroid rank: min(cap, number of approved items held)."""

    items: Tuple[str, ...]
    values: Dict[str, int]  # 0 or 1 per item
    cap: int

    kind = "capped_additive"

    def value(self, bundle: Bundle) -> Fraction:
        return Fraction(min(self.cap, sum(self.values[g] for g in bundle)))

    def to_payload(self) -> dict:
        return {
            "kind": "capped_additive",
            "values": {g: self.values[g] for g in self.items},
            "cap": self.cap,
        }


VALUATION_KINDS = ("table", "additive", "binary_additive", "identical_items", "capped_additive")


def all_subsets(items: Tuple[str, ...]):
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


@dataclass(frozen=True)
class Instance:
    agent_ids: Tuple[str, ...]
    items: Tuple[str, ...]
    weights: Tuple[Fraction, ...]
    valuations: tuple
    bounded: bool = False

    @property
    def n(self) -> int:
        return len(self.agent_ids)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def w_min(self) -> Fraction:
        return min(self.weights)

    @property
    def w_max(self) -> Fraction:
        return max(self.weights)

    def value(self, agent: int, bundle: Iterable[str]) -> Fraction:
        """Exact value of a bundle for one agent."""
        return self.valuations[agent].value(frozenset(bundle))

    def all_items(self) -> Bundle:
        return frozenset(self.items)


@dataclass(frozen=True)
class Allocation:
    """Complete partition of the items into one bundle per agent."""

    bundles: Tuple[Bundle, ...]

    def owner_of(self, item: str) -> int:
        for i, bundle in enumerate(self.bundles):
            if item in bundle:
                return i
        raise KeyError(item)

    @staticmethod
    def from_assignment(instance: Instance, assignment: Iterable[int]) -> "Allocation":
        """Build from a per-item agent-index vector (item order = instance.items)."""
        buckets = [set() for _ in range(instance.n)]
        for item, agent in zip(instance.items, assignment):
            buckets[agent].add(item)
        return Allocation(tuple(frozenset(b) for b in buckets))

    def assignment_vector(self, instance: Instance) -> Tuple[int, ...]:
        return tuple(self.owner_of(g) for g in instance.items)


@dataclass(frozen=True)
class Outcome:
    allocation: Allocation
    payments: Tuple[Fraction, ...]


def check_allocation(instance: Instance, allocation: Allocation):
    """Raise InstanceError unless the allocation is a complete partition."""
    problems = []
    if len(allocation.bundles) != instance.n:
        problems.append(
            f"allocation has {len(allocation.bundles)} bundles for {instance.n} agents"
        )
    else:
        seen = set()
        for i, bundle in enumerate(allocation.bundles):
            unknown = bundle - set(instance.items)
            if unknown:
                problems.append(f"bundle {i} contains unknown items {sorted(unknown)}")
            overlap = bundle & seen
            if overlap:
                problems.append(f"items {sorted(overlap)} appear in multiple bundles")
            seen |= bundle
        missing = set(instance.items) - seen
        if missing:
            problems.append(f"items {sorted(missing)} are unallocated")
    if problems:
        raise InstanceError(problems)


def weighted_social_welfare(instance: Instance, allocation: Allocation) -> Fraction:
    return sum(
        (w * instance.value(i, bundle)
         for i, (w, bundle) in enumerate(zip(instance.weights, allocation.bundles))),
        ZERO,
    )


def unweighted_social_welfare(instance: Instance, allocation: Allocation) -> Fraction:
    return sum(
        (instance.value(i, bundle) for i, bundle in enumerate(allocation.bundles)),
        ZERO,
    )


# ---------------------------------------------------------------------------
# Parsing / validation


def _parse_valuation(raw: dict, items: Tuple[str, ...], index: int, problems: list):
    kind = raw.get("kind")
    prefix = f"valuations[{index}]"
    if kind not in VALUATION_KINDS:
        problems.append(f"{prefix}: unknown kind {kind!r}")
        return None
    try:
        if kind == "table":
            entries_raw = raw["entries"]
            entries = {}
            expected = {subset_key(s) for s in all_subsets(items)}
            got = set(entries_raw)
            if got != expected:
                missing = sorted(expected - got)[:4]
                extra = sorted(got - expected)[:4]
                problems.append(
                    f"{prefix}: table must list every subset exactly once"
                    f" (missing {missing}, unexpected {extra})"
                )
                return None
            for key, val in entries_raw.items():
                bundle = frozenset(k for k in key.split(",") if k)
                entries[bundle] = parse_rational(val)
            if entries[frozenset()] != 0:
                problems.append(f"{prefix}: v(empty set) must be 0")
                return None
            for bundle, val in entries.items():
                if val < 0:
                    problems.append(f"{prefix}: negative value for {subset_key(bundle)!r}")
                    return None
            return TableValuation(items, entries, bool(raw.get("supermodular", False)))
        if kind == "additive":
            values = {g: parse_rational(raw["values"][g]) for g in items}
            if any(v < 0 for v in values.values()):
                problems.append(f"{prefix}: negative item value")
                return None
            return AdditiveValuation(items, values)
        if kind == "binary_additive":
            values = {}
            for g in items:
                v = raw["values"][g]
                v = int(parse_rational(v))if not isinstance(v, int) else v
                if v not in (0, 1):
                    problems.append(f"{prefix}: value for {g!r} must be 0 or 1")
                    return None
                values[g] = v
            return BinaryAdditiveValuation(items, values)
        if kind == "identical_items":
            per_item = parse_rational(raw["value"])
            if per_item < 0:
                problems.append(f"{prefix}: negative per-item value")
                return None
            return IdenticalItemsValuation(items, per_item)
        if kind == "capped_additive":
            values = {}
            for g in items:
                v = raw["values"][g]
                v = int(parse_rational(v)) if not isinstance(v, int) else v
                if v not in (0, 1):
                    problems.append(f"{prefix}: approval for {g!r} must be 0 or 1")
                    return None
                values[g] = v
            cap = raw["cap"]
            if not isinstance(cap, int) or cap < 0:
                problems.append(f"{prefix}: cap must be a non-negative integer")
                return None
            return CappedAdditiveValuation(items, values, cap)
    except KeyError as exc:
        problems.append(f"{prefix}: missing field {exc}")
    except ValueError as exc:
        problems.append(f"{prefix}: {exc}")
    return None


def validate_instance(raw: dict, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
                      table_limit: int = DEFAULT_TABLE_LIMIT) -> Instance:
    """Validate a parsed instance description.

    Raises InstanceError with the full violation list, or one of the
    specific errors (WeightSumError, NonPositiveWeight,
    NonMonotoneValuation, UnboundedValuation, CheckTooLarge) when a
    single structural rule is broken.
    """
    problems = []
    agents_raw = raw.get("agents")
    if not isinstance(agents_raw, list) or not agents_raw:
        raise InstanceError(["'agents' must be a non-empty list"])
    items_raw = raw.get("items", [])
    if not isinstance(items_raw, list) or len(set(items_raw)) != len(items_raw):
        raise InstanceError(["'items' must be a list of distinct names"])
    items = tuple(str(g) for g in items_raw)

    agent_ids = []
    weights = []
    for i, entry in enumerate(agents_raw):
        agent_ids.append(str(entry.get("id", f"agent{i + 1}")))
        try:
            weights.append(parse_rational(entry["weight"]))
        except (KeyError, ValueError) as exc:
            problems.append(f"agents[{i}]: bad weight ({exc})")
            weights.append(ZERO)
    if problems:
        raise InstanceError(problems)

    for i, w in enumerate(weights):
        if w <= 0:
            raise NonPositiveWeight(f"agent {agent_ids[i]} has weight {format_rational(w)}")
    total = sum(weights, ZERO)
    if total != 1:
        raise WeightSumError(f"weights sum to {format_rational(total)}, expected 1")

    valuations_raw = raw.get("valuations")
    if not isinstance(valuations_raw, list) or len(valuations_raw) != len(agent_ids):
        raise InstanceError(["'valuations' must be a list parallel to 'agents'"])

    has_table = any(
        isinstance(v, dict) and v.get("kind") == "table" for v in valuations_raw
    )
    if has_table and len(items) > table_limit:
        raise CheckTooLarge(
            f"table valuations capped at {table_limit} items, got {len(items)}"
        )

    valuations = []
    for i, vraw in enumerate(valuations_raw):
        val = _parse_valuation(vraw, items, i, problems)
        if val is not None:
            valuations.append(val)
    if problems:
        raise InstanceError(problems)

    bounded = bool(raw.get("bounded", False))
    instance = Instance(tuple(agent_ids), items, tuple(weights), tuple(valuations), bounded)

    for i, val in enumerate(valuations):
        if val.kind == "table":
            if len(items) > exhaustive_limit:
                raise CheckTooLarge(
                    f"exhaustive table checks need m <= {exhaustive_limit}, got {len(items)}"
                )
            val.check_monotone()
            if val.supermodular:
                try:
                    val.check_supermodular()
                except ValueError as exc:
                    a, b = exc.args[0]
                    raise InstanceError(
                        [f"valuations[{i}]: flagged super-modular but fails on"
                         f" A={subset_key(a)!r}, B={subset_key(b)!r}"]
                    )
    if bounded:
        _check_bounded(instance, exhaustive_limit)
    return instance


def _check_bounded(instance: Instance, exhaustive_limit: int):
    for i, val in enumerate(instance.valuations):
        if val.kind == "table":
            # table size was already capped by validate_instance
            for bundle, v in val.entries.items():
                if v > len(bundle):
                    raise UnboundedValuation(
                        f"valuations[{i}]: v({subset_key(bundle)!r}) exceeds bundle size",
                        witness=bundle,
                    )
        elif val.kind == "additive":
            for g, v in val.values.items():
                if v > 1:
                    raise UnboundedValuation(
                        f"valuations[{i}]: item {g!r} valued above 1", witness=frozenset([g])
                    )
        elif val.kind == "identical_items":
            if val.per_item > 1:
                raise UnboundedValuation(
                    f"valuations[{i}]: per-item value above 1",
                    witness=frozenset(instance.items[:1]),
                )
        # binary_additive and capped_additive are bounded by construction


# ---------------------------------------------------------------------------
# Serialization


def instance_to_dict(instance: Instance) -> dict:
    data = {
        "agents": [
            {"id": a, "weight": format_rational(w)}
            for a, w in zip(instance.agent_ids, instance.weights)
        ],
        "items": list(instance.items),
        "valuations": [v.to_payload() for v in instance.valuations],
    }
    if instance.bounded:
        data["bounded"] = True
    return data


def parse_instance(text: str) -> Instance:
    return validate_instance(loads_exact(text))


def allocation_to_dict(instance: Instance, allocation: Allocation) -> dict:
    return {"bundles": [sorted(b) for b in allocation.bundles]}


def parse_allocation(instance: Instance, data: dict) -> Allocation:
    bundles = data.get("bundles")
    if not isinstance(bundles, list):
        raise InstanceError(["allocation file needs a 'bundles' list"])
    allocation = Allocation(tuple(frozenset(b) for b in bundles))
    check_allocation(instance, allocation)
    return allocation


def outcome_to_dict(instance: Instance, outcome: Outcome) -> dict:
    data = allocation_to_dict(instance, outcome.allocation)
    data["payments"] = [format_rational(p) for p in outcome.payments]
    return data


def parse_outcome(instance: Instance, data: dict) -> Outcome:
    allocation = parse_allocation(instance, data)
    raw_payments = data.get("payments")
    if not isinstance(raw_payments, list) or len(raw_payments) != instance.n:
        raise InstanceError(["outcome file needs one payment per agent"])
    payments = tuple(parse_rational(p) for p in raw_payments)
    if any(p < 0 for p in payments):
        raise InstanceError(["payments must be non-negative"])
    return Outcome(allocation, payments)
