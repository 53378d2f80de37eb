import numpy as np
import pytest

from spd_alloc import oracle
from spd_alloc.criteria import BUILTIN_CRITERIA
from spd_alloc.model import Allocation, Instance, validate_instance
from spd_alloc.flow import solve_stable_ind
from spd_alloc.rng import XorShift64Star


def greedy_first_liker(inst):
    """Deliberately wrong solver: every item goes to its first liker."""
    return Allocation.from_owner([inst.likers[j][0] if inst.likers[j] else None for j in range(inst.m)], inst.n)


def test_enumeration_counts():
    assert len(oracle.enumerate_max_usw_clean(Instance(np.ones((2, 2), dtype=int)))) == 4
    assert len(oracle.enumerate_max_usw_clean(Instance(np.ones((1, 2), dtype=int)))) == 1
    assert oracle.enumerate_max_usw_clean(Instance(np.zeros((2, 3), dtype=int))) == [Allocation.empty(2)]


def test_enumeration_order():
    allocs = oracle.enumerate_max_usw_clean(Instance(np.ones((2, 2), dtype=int)))
    owners = [tuple(a.owner()[j] for j in range(2)) for a in allocs]
    assert owners == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_scale_guard():
    with pytest.raises(oracle.ScaleError):
        oracle.enumerate_all(Instance(np.ones((6, 2), dtype=int)))
    with pytest.raises(oracle.ScaleError):
        oracle.run_sweep(6, 3, 1, 0)


def test_three_agents_two_items():
    inst = Instance(np.ones((3, 2), dtype=int))
    res = oracle.enumerate_all(inst)
    assert len(res.stable_set) == 6
    assert all(res.optimal[c] == res.stable_set for c in BUILTIN_CRITERIA)
    assert oracle.verify_consistency(inst, res)
    assert oracle.verify_chebyshev_ind(inst, res).value == 1
    assert oracle.verify_layer_invariance(inst, res)


def test_small_cases():
    inst = validate_instance([[1, 1, 1], [0, 0, 1]])
    assert oracle.verify_consistency(inst)
    assert oracle.verify_consistency(Instance(np.ones((1, 3), dtype=int)))
    assert oracle.verify_chebyshev_ind(validate_instance([[1, 0], [0, 1]])).value == 0
    assert oracle.verify_chebyshev_ind(Instance(np.ones((2, 2), dtype=int))).value == 0


def test_solver_check_catches_mutant():
    inst = validate_instance([[1, 1, 1], [0, 0, 1]])
    assert oracle.verify_solver(inst, solve_stable_ind)
    bad = oracle.verify_solver(inst, greedy_first_liker)
    assert not bad and "nonstable" in bad.witness
    with pytest.raises(oracle.VerificationError):
        bad.require()


def test_fixture_report():
    rep = oracle.mixed_fixture()
    assert rep.ok
    assert {cl.item4_agent for cl in rep.classes} == {0, 3}
    assert all(sum(cl.profile) == 6 for cl in rep.classes)
    assert "leximin: item 4 -> agent 1, profile 2 4/3 4/3 4/3" in rep.format()


def test_sweep_deterministic_and_parallel_safe():
    a = oracle.run_sweep(3, 5, 6, 99, workers=1)
    b = oracle.run_sweep(3, 5, 6, 99, workers=2)
    assert a.ok and a.format() == b.format()
    assert a.format().startswith("# seed 99")


def test_sweep_with_mutant_fails():
    rep = oracle.run_sweep(3, 4, 20, 5, solver=greedy_first_liker, workers=1)
    assert not rep.ok
    assert rep.first_failure().name.startswith("solver-stable")


def test_empty_sweep():
    rep = oracle.run_sweep(3, 3, 0, 1)
    assert rep.ok and rep.checks == []


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SPD_ALLOC_THREADS", "3")
    assert oracle.worker_count() == 3
    monkeypatch.setenv("SPD_ALLOC_THREADS", "0")
    assert oracle.worker_count() >= 1
    monkeypatch.setenv("SPD_ALLOC_THREADS", "-1")
    with pytest.raises(ValueError):
        oracle.worker_count()


def test_div_checks_on_random():
    rng = XorShift64Star(12)
    for _ in range(10):
        inst = oracle.random_instance(rng, 3, 4, 0.5)
        assert oracle.verify_div_uniqueness(inst, rng)
        assert oracle.verify_div_layers(inst)


def test_check_line_format():
    c = oracle.CheckResult("x", False, "boom")
    assert c.line() == "x\tFAIL\tboom"
    assert oracle.CheckResult("y", True).line() == "y\tPASS\t-"
