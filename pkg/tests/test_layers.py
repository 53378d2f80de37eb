import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spd_alloc.flow import solve_stable_ind
from spd_alloc.layers import (
    EnumerationOverflow,
    NotStableError,
    compute_layers,
    count_stable_tiny,
    total_layer_items,
)
from spd_alloc.model import Allocation, Instance, max_usw, validate_instance
from spd_alloc.oracle import enumerate_all, verify_layer_invariance


def test_fixed_layers():
    inst = validate_instance([[1, 1, 1, 1], [0, 0, 0, 1], [0, 0, 0, 0]])
    lp = compute_layers(inst, solve_stable_ind(inst))
    assert lp.agents == {0: frozenset({2}), 1: frozenset({1}), 3: frozenset({0})}
    assert lp.items == {0: frozenset(), 1: frozenset({3}), 3: frozenset({0, 1, 2})}
    assert lp.minus_agents == {}
    assert lp.income_range(0) == (3, 3)
    assert lp.format() == "layer 0: agents=[3] items=[]\nlayer 1: agents=[2] items=[4]\nlayer 3: agents=[1] items=[1,2,3]"


def test_swinging_layer():
    inst = Instance(np.ones((3, 2), dtype=int))
    lp = compute_layers(inst, solve_stable_ind(inst))
    assert lp.agents == {}
    assert lp.minus_agents == {1: frozenset({0, 1, 2})}
    assert lp.minus_items == {1: frozenset({0, 1})}
    assert [lp.income_range(i) for i in range(3)] == [(0, 1)] * 3
    assert lp.format() == "layer 1-: agents=[1,2,3] items=[1,2]"


def test_sole_agent():
    inst = Instance(np.ones((1, 5), dtype=int))
    lp = compute_layers(inst, solve_stable_ind(inst))
    assert lp.agents == {5: frozenset({0})} and lp.income_range(0) == (5, 5)


def test_rejects_unstable():
    inst = validate_instance([[1, 1, 1], [0, 0, 1]])
    with pytest.raises(NotStableError):
        compute_layers(inst, Allocation.from_owner([0, 0, 0], 2))


def test_count_stable():
    assert count_stable_tiny(Instance(np.ones((2, 2), dtype=int))) == 2
    assert count_stable_tiny(Instance(np.ones((1, 2), dtype=int))) == 1
    assert count_stable_tiny(Instance(np.ones((3, 2), dtype=int))) == 6
    with pytest.raises(EnumerationOverflow):
        count_stable_tiny(Instance(np.ones((3, 6), dtype=int)), limit=10)


def test_groups_order():
    inst = validate_instance([[1, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 1], [0, 0, 0, 1]])
    lp = compute_layers(inst, solve_stable_ind(inst))
    keys = [(d, minus) for d, minus, _, _ in lp.groups()]
    assert keys == sorted(keys, key=lambda k: 2 * k[0] - k[1])


@st.composite
def tiny(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 7))
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m), min_size=n, max_size=n))
    return validate_instance(rows)


@settings(max_examples=120, deadline=None)
@given(tiny())
def test_partition_properties(inst):
    lp = compute_layers(inst, solve_stable_ind(inst))
    agents = [ag for _, _, ag, _ in lp.groups()]
    assert sorted(i for g in agents for i in g) == list(range(inst.n))
    assert total_layer_items(lp) == max_usw(inst)
    for d, group in lp.agents.items():
        assert len(lp.items[d]) == d * len(group)
    assert verify_layer_invariance(inst).passed


@settings(max_examples=60, deadline=None)
@given(tiny())
def test_count_matches_oracle(inst):
    assert count_stable_tiny(inst) == len(enumerate_all(inst).stable_set)
