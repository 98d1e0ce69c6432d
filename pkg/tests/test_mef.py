"""Budget splitting and monetary envy-freeness."""

import random
from fractions import Fraction

import pytest

from fairsubsidy import mef
from fairsubsidy.envy import is_weighted_envy_free, min_subsidies
from fairsubsidy.errors import NegativeBudget, NotEnvyFreeable
from fairsubsidy.model import Allocation, Outcome, ZERO
from fairsubsidy.oracle import (
    instance_example_inheritance,
    instance_substitute_items,
)

from _generators import random_allocation, random_general_instance


def _freeable_pair(rng):
    while True:
        inst = random_general_instance(rng)
        alloc = random_allocation(rng, inst)
        try:
            subsidy = min_subsidies(inst, alloc)
        except NotEnvyFreeable:
            continue
        return inst, alloc, subsidy


def test_exact_budget_reproduces_min_subsidies():
    inst = instance_example_inheritance()
    alloc = Allocation((frozenset({"g1", "g2"}), frozenset(), frozenset()))
    result = mef.allocate_budget_mef(inst, alloc, Fraction(130))
    assert result.regime == "exact"
    assert result.payments == (Fraction(0), Fraction(65), Fraction(65))


def test_surplus_budget_spreads_by_weight():
    inst = instance_example_inheritance()
    alloc = Allocation((frozenset({"g1", "g2"}), frozenset(), frozenset()))
    result = mef.allocate_budget_mef(inst, alloc, Fraction(230))
    assert result.regime == "surplus"
    # 100 extra split 1/2 : 1/4 : 1/4
    assert result.payments == (Fraction(50), Fraction(90), Fraction(90))
    wef, _ = is_weighted_envy_free(inst, result.outcome(alloc))
    assert wef


def test_deficit_budget_water_fills_from_the_top():
    inst = instance_example_inheritance()
    alloc = Allocation((frozenset({"g1", "g2"}), frozenset(), frozenset()))
    # path lengths are (0, 260, 260); half the needed money
    result = mef.allocate_budget_mef(inst, alloc, Fraction(65))
    assert result.regime == "deficit"
    assert result.water_level == Fraction(130)
    assert result.payments == (ZERO, Fraction(65, 2), Fraction(65, 2))
    assert sum(result.payments, ZERO) == Fraction(65)
    verdict, _ = mef.is_mef(inst, result.outcome(alloc))
    assert verdict


def test_zero_budget_is_mef():
    rng = random.Random(211)
    for _ in range(50):
        inst, alloc, _ = _freeable_pair(rng)
        result = mef.allocate_budget_mef(inst, alloc, ZERO)
        assert sum(result.payments, ZERO) == 0
        verdict, _ = mef.is_mef(inst, result.outcome(alloc))
        assert verdict


def test_budget_always_spent_exactly_and_mef():
    rng = random.Random(223)
    for _ in range(150):
        inst, alloc, subsidy = _freeable_pair(rng)
        needed = sum(subsidy.payments, ZERO)
        for budget in (needed / 3, needed, needed + Fraction(7, 2)):
            result = mef.allocate_budget_mef(inst, alloc, budget)
            assert sum(result.payments, ZERO) == budget
            assert all(p >= 0 for p in result.payments)
            verdict, _ = mef.is_mef(inst, result.outcome(alloc))
            assert verdict


def test_negative_budget_rejected():
    inst = instance_example_inheritance()
    alloc = Allocation((frozenset({"g1", "g2"}), frozenset(), frozenset()))
    with pytest.raises(NegativeBudget):
        mef.allocate_budget_mef(inst, alloc, Fraction(-1))


def test_non_freeable_allocation_rejected():
    inst = instance_substitute_items()
    alloc = Allocation((frozenset({"g1"}), frozenset({"g2"})))
    with pytest.raises(NotEnvyFreeable):
        mef.allocate_budget_mef(inst, alloc, Fraction(5))


def test_is_mef_accepts_wef_and_zero_payment_envy():
    inst = instance_example_inheritance()
    alloc = Allocation((frozenset({"g1", "g2"}), frozenset(), frozenset()))
    # unpaid envy targets are fine: agents 2 and 3 envy agent 1, who gets 0
    verdict, _ = mef.is_mef(inst, Outcome(alloc, (ZERO, ZERO, ZERO)))
    assert verdict
    # paying an envied agent breaks it
    verdict, witness = mef.is_mef(inst, Outcome(alloc, (Fraction(5), ZERO, ZERO)))
    assert not verdict
    assert witness is not None and witness[1] == 0
