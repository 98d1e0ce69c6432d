"""Fairness and efficiency predicates."""

import random
from fractions import Fraction

import pytest

from fairsubsidy.criteria import (
    evaluate_report,
    is_non_wasteful,
    is_nonzero_social_welfare,
    is_pareto_efficient,
    is_weighted_welfare_maximizing,
    is_wef1,
    is_wef1_t,
    is_wwef1,
)
from fairsubsidy.errors import TooLarge
from fairsubsidy.model import Allocation, validate_instance
from fairsubsidy.oracle import (
    instance_substitute_items,
    instance_two_identical_items,
)

from _generators import random_allocation, random_general_instance


def _two_agent_additive(w1, w2, v1, v2):
    items = [f"g{j + 1}" for j in range(len(v1))]
    return validate_instance({
        "agents": [{"id": "a1", "weight": w1}, {"id": "a2", "weight": w2}],
        "items": items,
        "valuations": [
            {"kind": "additive", "values": dict(zip(items, map(str, v1)))},
            {"kind": "additive", "values": dict(zip(items, map(str, v2)))},
        ],
    })


def test_wef1_detects_heavy_envy():
    inst = _two_agent_additive("1/2", "1/2", [5, 5, 5], [5, 5, 5])
    lopsided = Allocation((frozenset({"g1", "g2", "g3"}), frozenset()))
    ok, witness = is_wef1(inst, lopsided)
    assert not ok
    assert witness == (1, 0, None)
    balanced = Allocation((frozenset({"g1", "g2"}), frozenset({"g3"})))
    assert is_wef1(inst, balanced)[0]


def test_wef1_implies_wwef1():
    rng = random.Random(3)
    for _ in range(300):
        inst = random_general_instance(rng)
        alloc = random_allocation(rng, inst)
        if is_wef1(inst, alloc)[0]:
            assert is_wwef1(inst, alloc)[0]


def test_incompatibility_example_wwef1_witnesses():
    inst = instance_two_identical_items()
    w1, w2 = inst.weights
    everything = Allocation((frozenset({"g1", "g2"}), frozenset()))
    ok, witness = is_wwef1(inst, everything)
    assert not ok and witness[:2] == (1, 0)
    # the two sides of the failed comparison, in both directions
    assert inst.value(1, {"g1"}) / w2 == Fraction(150)
    assert inst.value(1, {"g1", "g2"}) / w1 == Fraction(200)
    reverse = Allocation((frozenset(), frozenset({"g1", "g2"})))
    ok, witness = is_wwef1(inst, reverse)
    assert not ok and witness[:2] == (0, 1)
    assert inst.value(0, {"g1"}) / w1 == Fraction(200)
    assert inst.value(0, {"g1", "g2"}) / w2 == Fraction(600)


def test_wef1_t_on_identical_items_example():
    inst = instance_two_identical_items()
    everything = Allocation((frozenset({"g1", "g2"}), frozenset()))
    # moving one item across placates the empty agent: 60/w2 >= 120/w1
    assert is_wef1_t(inst, everything)[0]
    one_each = Allocation((frozenset({"g1"}), frozenset({"g2"})))
    assert is_wef1_t(inst, one_each)[0]


def test_wef1_t_fails_when_one_transfer_is_not_enough():
    inst = _two_agent_additive("1/2", "1/2", [5, 5, 5], [5, 5, 5])
    lopsided = Allocation((frozenset({"g1", "g2", "g3"}), frozenset()))
    ok, witness = is_wef1_t(inst, lopsided)
    assert not ok
    assert witness == (1, 0, None)


def test_non_wasteful_flags_useless_holdings():
    inst = instance_substitute_items()
    all_to_first = Allocation((frozenset({"g1", "g2"}), frozenset()))
    ok, witness = is_non_wasteful(inst, all_to_first)
    assert not ok
    assert witness == (0, 1, "g1")
    one_each = Allocation((frozenset({"g1"}), frozenset({"g2"})))
    assert is_non_wasteful(inst, one_each)[0]


def test_pareto_and_welfare_max_on_small_instance():
    inst = _two_agent_additive("1/2", "1/2", [4, 1], [1, 4])
    good = Allocation((frozenset({"g1"}), frozenset({"g2"})))
    bad = Allocation((frozenset({"g2"}), frozenset({"g1"})))
    assert is_pareto_efficient(inst, good)[0]
    ok, dominator = is_pareto_efficient(inst, bad)
    assert not ok and dominator == good
    assert is_weighted_welfare_maximizing(inst, good)[0]
    assert not is_weighted_welfare_maximizing(inst, bad)[0]


def test_nonzero_social_welfare():
    inst = _two_agent_additive("1/2", "1/2", [0, 0], [3, 0])
    zero = Allocation((frozenset({"g1", "g2"}), frozenset()))
    assert not is_nonzero_social_welfare(inst, zero)
    positive = Allocation((frozenset(), frozenset({"g1", "g2"})))
    assert is_nonzero_social_welfare(inst, positive)


def test_enumeration_guard(monkeypatch):
    monkeypatch.setenv("FAIRSUBSIDY_ENUM_LIMIT", "4")
    inst = _two_agent_additive("1/2", "1/2", [1, 1, 1], [1, 1, 1])
    alloc = Allocation((frozenset({"g1", "g2", "g3"}), frozenset()))
    with pytest.raises(TooLarge):
        is_pareto_efficient(inst, alloc)
    report = evaluate_report(inst, alloc)
    assert report.pareto_efficient is None
    assert report.nonzero_social_welfare is None
    assert report.wef1 is False  # pairwise predicates still run


def test_evaluate_report_consistency():
    rng = random.Random(17)
    for _ in range(100):
        inst = random_general_instance(rng)
        alloc = random_allocation(rng, inst)
        report = evaluate_report(inst, alloc)
        assert report.wef1 == is_wef1(inst, alloc)[0]
        assert report.wwef1 == is_wwef1(inst, alloc)[0]
        assert report.wef1_t == is_wef1_t(inst, alloc)[0]
        if report.weighted_welfare_maximizing:
            assert report.pareto_efficient
