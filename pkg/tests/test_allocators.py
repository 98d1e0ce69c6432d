"""Allocation procedures and their subsidy guarantees."""

import random
from fractions import Fraction

import pytest

from fairsubsidy import allocators
from fairsubsidy.criteria import is_non_wasteful
from fairsubsidy.errors import WrongValuationKind
from fairsubsidy.model import Allocation, validate_instance
from fairsubsidy.oracle import (
    instance_greedy_tightness,
    instance_substitute_items,
)

from _generators import (
    random_binary_additive_instance,
    random_general_instance,
    random_identical_additive_instance,
    random_identical_items_instance,
    random_supermodular_instance,
)


def test_all_to_max_is_always_envy_freeable():
    rng = random.Random(41)
    for _ in range(150):
        inst = random_general_instance(rng)
        result = allocators.allocate_all_to_max(inst)
        # min_subsidies inside _finish would raise otherwise
        assert len([b for b in result.allocation.bundles if b]) <= 1
        assert result.max_subsidy <= result.guarantee


def test_greedy_matches_tightness_example():
    inst = instance_greedy_tightness()
    result = allocators.greedy_additive_welfare_max(inst)
    assert result.allocation.bundles[0] == inst.all_items()
    assert result.subsidy.payments[1] == Fraction(54, 5)
    assert result.max_subsidy <= result.guarantee


def test_greedy_rejects_table_valuations():
    inst = instance_substitute_items()
    with pytest.raises(WrongValuationKind):
        allocators.greedy_additive_welfare_max(inst)


def test_alg1_subsidy_at_most_one():
    rng = random.Random(43)
    for _ in range(300):
        inst = random_identical_additive_instance(rng)
        result = allocators.alg1_identical_additive(inst)
        assert result.max_subsidy <= 1


def test_alg1_small_hand_example():
    inst = validate_instance({
        "agents": [{"id": "a1", "weight": "2/3"}, {"id": "a2", "weight": "1/3"}],
        "items": ["g1", "g2"],
        "valuations": [
            {"kind": "additive", "values": {"g1": "1", "g2": "1"}},
            {"kind": "additive", "values": {"g1": "1", "g2": "1"}},
        ],
    })
    result = allocators.alg1_identical_additive(inst)
    assert result.allocation.bundles[0] == frozenset({"g1", "g2"})
    assert result.subsidy.payments == (Fraction(0), Fraction(1))


def test_alg1_rejects_non_identical_profiles():
    rng = random.Random(47)
    inst = random_general_instance(rng)
    while all(
        inst.value(i, inst.all_items()) == inst.value(0, inst.all_items())
        for i in range(inst.n)
    ):
        inst = random_general_instance(rng)
    # different totals imply different item values somewhere
    with pytest.raises(WrongValuationKind):
        allocators.alg1_identical_additive(inst)


def test_alg2_guarantee_and_non_wastefulness():
    rng = random.Random(53)
    for _ in range(300):
        inst = random_binary_additive_instance(rng)
        result = allocators.alg2_binary_additive(inst)
        assert result.max_subsidy <= inst.w_max / inst.w_min
        universally_unwanted = {
            g for g in inst.items
            if all(inst.value(i, {g}) == 0 for i in range(inst.n))
        }
        if not universally_unwanted:
            assert is_non_wasteful(inst, result.allocation)[0]


def test_alg2_corollary_high_utility_agents_need_little():
    rng = random.Random(59)
    for _ in range(300):
        inst = random_binary_additive_instance(rng)
        result = allocators.alg2_binary_additive(inst)
        threshold = inst.w_max / inst.w_min - 1
        for i in range(inst.n):
            if inst.value(i, result.allocation.bundles[i]) >= threshold:
                assert result.subsidy.payments[i] <= 1


def test_alg3_guarantee():
    rng = random.Random(61)
    for _ in range(300):
        inst = random_identical_items_instance(rng)
        result = allocators.alg3_identical_items(inst)
        bound = (inst.n - 1) * inst.w_max / inst.w_min + 1
        assert result.max_subsidy <= bound


def test_alg3_hand_simulation():
    inst = validate_instance({
        "agents": [{"id": "a1", "weight": "1/2"}, {"id": "a2", "weight": "1/2"}],
        "items": ["g1", "g2", "g3"],
        "valuations": [
            {"kind": "identical_items", "value": "1/2"},
            {"kind": "identical_items", "value": "1"},
        ],
    })
    result = allocators.alg3_identical_items(inst)
    # ascending value order is (a1, a2); counts settle at (1, 2)
    assert sorted(len(b) for b in result.allocation.bundles) == [1, 2]
    assert len(result.allocation.bundles[1]) == 2
    assert result.subsidy.payments == (Fraction(1, 2), Fraction(0))


def test_alg3_equal_values_split_evenly():
    inst = validate_instance({
        "agents": [{"id": "a1", "weight": "1/2"}, {"id": "a2", "weight": "1/2"}],
        "items": ["g1", "g2", "g3", "g4"],
        "valuations": [
            {"kind": "identical_items", "value": "1"},
            {"kind": "identical_items", "value": "1"},
        ],
    })
    result = allocators.alg3_identical_items(inst)
    assert sorted(len(b) for b in result.allocation.bundles) == [2, 2]


def test_brute_force_sw_max_supermodular_is_envy_freeable():
    rng = random.Random(67)
    for _ in range(60):
        inst = random_supermodular_instance(rng)
        # assert_envy_freeable defaults to True for flagged tables
        result = allocators.brute_force_unweighted_sw_max(inst)
        assert "not envy-freeable" not in " ".join(result.trace)


def test_weighted_sw_max_tie_break_is_lexicographic():
    inst = instance_substitute_items()
    alloc = allocators.brute_force_weighted_sw_max(inst)
    assert alloc.assignment_vector(inst) == (0, 1)


def test_auto_dispatch():
    rng = random.Random(71)
    inst = random_binary_additive_instance(rng)
    assert allocators.auto_allocate(inst)[0] == "alg2"
    inst = random_identical_items_instance(rng)
    assert allocators.auto_allocate(inst)[0] == "alg3"
    inst = random_identical_additive_instance(rng)
    assert allocators.auto_allocate(inst)[0] == "alg1"
    inst = random_supermodular_instance(rng)
    assert allocators.auto_allocate(inst)[0] == "all-to-max"
