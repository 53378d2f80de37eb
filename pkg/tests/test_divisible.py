from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from spd_alloc.criteria import Criterion
from spd_alloc.divisible import div_profile, is_stable_div, pieces_per_item, solve_stable_div
from spd_alloc.model import FractionalAllocation, Instance, is_clean, max_usw, profile, validate_instance
from spd_alloc.oracle import best_grid_profiles, hall_feasible
from spd_alloc.rng import XorShift64Star


def test_two_agents_three_items():
    sol = solve_stable_div(Instance(np.ones((2, 3), dtype=int)))
    assert sol.profile == (Fraction(3, 2), Fraction(3, 2))
    assert [layer.index for layer in sol.layers] == [Fraction(3, 2)]
    assert sol.pieces == pieces_per_item(2) == 8


def test_three_agents_two_items_thirds():
    # agents 2-4 share items 5-6
    inst = Instance(np.ones((3, 2), dtype=int))
    sol = solve_stable_div(inst)
    assert sol.profile == (Fraction(2, 3),) * 3
    assert all(a.denominator in (1, 3) for a in sol.allocation.shares.values())


def test_agent_without_likes():
    inst = validate_instance([[1, 1], [0, 0]])
    sol = solve_stable_div(inst)
    assert sol.profile == (2, 0)
    assert sol.layer_of(1).index == 0


def test_is_stable_div_examples():
    inst = Instance(np.ones((2, 1), dtype=int))
    half = FractionalAllocation(2, {(0, 0): Fraction(1, 2), (0, 1): Fraction(1, 2)})
    assert is_stable_div(inst, half)
    assert not is_stable_div(inst, FractionalAllocation(2, {(0, 0): Fraction(1)}))


def test_hall_condition():
    inst = validate_instance([[1, 0], [1, 0]])
    assert hall_feasible(inst, (Fraction(1, 2), Fraction(1, 2)))
    assert not hall_feasible(inst, (1, Fraction(1, 2)))


def test_grid_oracle_on_known_case():
    inst = Instance(np.ones((2, 3), dtype=int))
    assert best_grid_profiles(inst) == [(Fraction(3, 2), Fraction(3, 2))]
    assert best_grid_profiles(inst, criterion=Criterion.POTENTIAL_SQ) == [(Fraction(3, 2), Fraction(3, 2))]


def test_reference_scale_instance():
    inst = Instance(XorShift64Star(17).bernoulli_matrix(10, 50, 0.3))
    sol = solve_stable_div(inst)
    assert is_stable_div(inst, sol.allocation)
    assert sum(sol.profile) == max_usw(inst)


@st.composite
def tiny(draw, max_n=4, max_m=6):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m), min_size=n, max_size=n))
    return validate_instance(rows)


@settings(max_examples=80, deadline=None)
@given(tiny())
def test_solution_invariants(inst):
    sol = solve_stable_div(inst)
    fa = sol.allocation
    assert is_clean(inst, fa)
    assert profile(inst, fa) == sol.profile
    for j in range(inst.m):
        assert fa.item_total(j) == (1 if inst.likers[j] else 0)
    assert is_stable_div(inst, fa)
    # whole items per layer
    for j in range(inst.m):
        holders = set(fa.holders(j))
        if holders:
            assert len({sol.layer_of(i).index for i in holders}) == 1
    for layer in sol.layers:
        if layer.agents:
            assert layer.index == Fraction(len(layer.items), len(layer.agents))


@settings(max_examples=40, deadline=None)
@given(tiny(max_n=3, max_m=4))
def test_matches_grid_oracle(inst):
    assert best_grid_profiles(inst) == [div_profile(inst)]


@settings(max_examples=60, deadline=None)
@given(tiny(), st.permutations(range(4)))
def test_permutation_invariant(inst, perm):
    perm = [p for p in perm if p < inst.n]
    other = Instance(inst.likes[perm].astype(int))
    base = div_profile(inst)
    permuted = div_profile(other)
    assert tuple(permuted) == tuple(base[p] for p in perm)
