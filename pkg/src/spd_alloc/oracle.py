"""Brute-force ground truth on tiny instances.

Stability here is decided from a transitive closure of the transfer graph
(bitmask based), independently of the breadth-first search used by
:mod:`spd_alloc.transfers`.  Divisible profiles are checked against a grid
search whose feasibility test is the Hall-type subset condition, not a flow.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .criteria import BUILTIN_CRITERIA, Criterion, compare, score
from .divisible import is_stable_div, solve_stable_div
from .flow import solve_stable_ind
from .layers import compute_layers
from .model import Allocation, FractionalAllocation, Instance, format_profile, from_item_major, max_usw, profile
from .rng import XorShift64Star
from .submodular import (
    PartitionValuation,
    SubInstance,
    UniformValuation,
    chebyshev,
    enumerate_clean_max_usw,
    optimal_sets,
    random_sub_instance,
)
from .transfers import apply_transfer, find_narrowing_transfer

MAX_AGENTS = 5
MAX_ITEMS = 10
DENSITIES = (0.3, 0.5, 0.8)
SUB_KINDS = ("uniform", "partition", "transversal")


class ScaleError(ValueError):
    pass


class VerificationError(AssertionError):
    def __init__(self, check: CheckResult):
        super().__init__(f"{check.name}: {check.witness}")
        self.check = check


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str = ""
    value: object = None

    def __bool__(self) -> bool:
        return self.passed

    def line(self) -> str:
        return f"{self.name}\t{'PASS' if self.passed else 'FAIL'}\t{self.witness or '-'}"

    def require(self) -> CheckResult:
        if not self.passed:
            raise VerificationError(self)
        return self


def _guard(inst: Instance):
    if inst.n > MAX_AGENTS or inst.m > MAX_ITEMS:
        raise ScaleError(f"brute force limited to n <= {MAX_AGENTS}, m <= {MAX_ITEMS}; got n={inst.n}, m={inst.m}")


def random_instance(rng: XorShift64Star, n: int, m: int, density: float) -> Instance:
    return Instance(rng.bernoulli_matrix(n, m, density))


# --------------------------------------------------------------- enumeration


def _owners(inst: Instance):
    items = inst.likable_items
    for pick in itertools.product(*(inst.likers[j] for j in items)):
        owner = [-1] * inst.m
        for j, i in zip(items, pick):
            owner[j] = i
        yield tuple(owner)


def enumerate_max_usw_clean(inst: Instance) -> list[Allocation]:
    """Every clean allocation giving each likable item to one of its likers."""
    _guard(inst)
    return [Allocation.from_owner(o, inst.n) for o in _owners(inst)]


def _liker_masks(inst: Instance) -> list[int]:
    return [sum(1 << i for i in inst.likers[j]) for j in range(inst.m)]


def brute_is_stable(inst: Instance, owner: Sequence[int], masks: list[int] | None = None) -> bool:
    """No pair u, v with v reachable from u in the transfer graph and h_u >= h_v + 2."""
    masks = masks or _liker_masks(inst)
    n = inst.n
    h = [0] * n
    succ = [0] * n
    for j, i in enumerate(owner):
        if i >= 0:
            h[i] += 1
            succ[i] |= masks[j]
    succ = [s & ~(1 << i) for i, s in enumerate(succ)]
    # transitive closure by repeated squaring of reachability sets
    reach = succ[:]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            r = reach[i]
            acc = r
            k = r
            while k:
                low = k & -k
                acc |= reach[low.bit_length() - 1]
                k ^= low
            if acc != r:
                reach[i] = acc
                changed = True
    for u in range(n):
        for v in range(n):
            if u != v and reach[u] >> v & 1 and h[u] >= h[v] + 2:
                return False
    return True


@dataclass
class EnumerationResult:
    all_allocations: list[Allocation]
    profiles: list[tuple]
    stable_set: frozenset  # indices into all_allocations
    optimal: dict = field(default_factory=dict)

    def stable_allocations(self) -> list[Allocation]:
        return [self.all_allocations[k] for k in sorted(self.stable_set)]


def enumerate_all(inst: Instance, criteria=BUILTIN_CRITERIA) -> EnumerationResult:
    _guard(inst)
    masks = _liker_masks(inst)
    allocs, profiles, stable = [], [], set()
    for k, owner in enumerate(_owners(inst)):
        a = Allocation.from_owner(owner, inst.n)
        allocs.append(a)
        profiles.append(tuple(len(b) for b in a.bundles))
        if brute_is_stable(inst, owner, masks):
            stable.add(k)
    cache: dict = {}
    optimal = {}
    for c in criteria:
        scores = []
        for p in profiles:
            key = (c, p)
            if key not in cache:
                cache[key] = score(c, p)
            scores.append(cache[key])
        best = min(scores)
        optimal[c] = frozenset(k for k, s in enumerate(scores) if s == best)
    return EnumerationResult(allocs, profiles, frozenset(stable), optimal)


def _fmt_alloc(a: Allocation) -> str:
    return "[" + " | ".join(",".join(str(j + 1) for j in sorted(b)) for b in a.bundles) + "]"


# ----------------------------------------------------------- indivisible checks


def verify_consistency(inst: Instance, res: EnumerationResult | None = None) -> CheckResult:
    """Every SPD criterion's optimal set equals the stable set; stable profiles are permutations."""
    res = res or enumerate_all(inst)
    for c, opt in res.optimal.items():
        if opt != res.stable_set:
            odd = sorted(opt ^ res.stable_set)[0]
            pool = res.stable_set if odd in opt else opt
            other = min(pool) if pool else odd
            a, b = res.all_allocations[odd], res.all_allocations[other]
            side = "optimal but not stable" if odd in opt else "stable but not optimal"
            return CheckResult("consistency", False, f"{c.value}: {_fmt_alloc(a)} is {side}; compare {_fmt_alloc(b)}")
    sorted_profiles = {tuple(sorted(res.profiles[k])) for k in res.stable_set}
    if len(sorted_profiles) != 1:
        a, b = sorted(sorted_profiles)[:2]
        return CheckResult("consistency", False, f"stable profiles {a} and {b} are not permutations")
    return CheckResult("consistency", True)


def verify_chebyshev_ind(inst: Instance, res: EnumerationResult | None = None) -> CheckResult:
    res = res or enumerate_all(inst)
    profiles = sorted({res.profiles[k] for k in res.stable_set})
    worst, pair = 0, None
    for p, q in itertools.combinations(profiles, 2):
        d = chebyshev(p, q)
        if d > worst:
            worst, pair = d, (p, q)
    witness = f"max={worst}" + (f" at {pair[0]} vs {pair[1]}" if pair and worst > 1 else "")
    return CheckResult("chebyshev-ind", worst <= 1, witness, worst)


def verify_layer_invariance(inst: Instance, res: EnumerationResult | None = None) -> CheckResult:
    """Layers are seed independent, respected by all stable allocations, and give exact income ranges."""
    res = res or enumerate_all(inst)
    stables = res.stable_allocations()
    ref = compute_layers(inst, stables[0])
    ref_key = (ref.agents, ref.items, ref.minus_agents, ref.minus_items)
    for a in stables[1:]:
        lp = compute_layers(inst, a)
        if (lp.agents, lp.items, lp.minus_agents, lp.minus_items) != ref_key:
            return CheckResult("layer-invariance", False, f"layers differ when seeded with {_fmt_alloc(a)}")
    for a in stables:
        own = a.owner()
        for _, _, agents, items in ref.groups():
            for j in items:
                if own.get(j) not in agents:
                    return CheckResult("layer-invariance", False, f"item {j + 1} leaves its layer in {_fmt_alloc(a)}")
    for i in range(inst.n):
        incomes = [len(a.bundles[i]) for a in stables]
        if ref.income_range(i) != (min(incomes), max(incomes)):
            return CheckResult("layer-invariance", False, f"agent {i + 1}: range {ref.income_range(i)} vs brute force {(min(incomes), max(incomes))}")
    if sum(len(items) for *_, items in ref.groups()) != max_usw(inst):
        return CheckResult("layer-invariance", False, "layer items do not cover the likable items")
    return CheckResult("layer-invariance", True)


def verify_transfer_improves(inst: Instance, res: EnumerationResult | None = None) -> CheckResult:
    """A narrowing transfer on any nonstable allocation strictly improves every criterion."""
    res = res or enumerate_all(inst)
    for k, a in enumerate(res.all_allocations):
        if k in res.stable_set:
            continue
        path = find_narrowing_transfer(inst, a)
        if path is None:
            return CheckResult("transfer-improves", False, f"no narrowing transfer found in nonstable {_fmt_alloc(a)}")
        p, q = profile(inst, a), profile(inst, apply_transfer(a, path))
        for c in BUILTIN_CRITERIA:
            if compare(c, q, p) != -1:
                return CheckResult("transfer-improves", False, f"{c.value}: {p} -> {q} via {path}")
    return CheckResult("transfer-improves", True)


def verify_solver(inst: Instance, solver: Callable = solve_stable_ind, res: EnumerationResult | None = None) -> CheckResult:
    res = res or enumerate_all(inst)
    out = solver(inst)
    owner = tuple(out.owner().get(j, -1) for j in range(inst.m))
    ok = any(tuple(a.owner().get(j, -1) for j in range(inst.m)) == owner for a in res.stable_allocations())
    return CheckResult("solver-stable", ok, "" if ok else f"solver returned nonstable {_fmt_alloc(out)}")


# -------------------------------------------------------------- divisible checks


def hall_feasible(inst: Instance, h: Sequence[Fraction]) -> bool:
    """Can every agent i receive exactly h[i] of liked item mass (items have mass 1)?"""
    n = inst.n
    liked_masks = [sum(1 << j for j in inst.liked[i]) for i in range(n)]
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        union = 0
        for i in members:
            union |= liked_masks[i]
        if sum(h[i] for i in members) > bin(union).count("1"):
            return False
    return True


def grid_profiles(inst: Instance, denominator: int):
    """All max-USW feasible profiles whose entries are multiples of 1/denominator."""
    total = max_usw(inst) * denominator
    caps = [len(inst.liked[i]) * denominator for i in range(inst.n)]

    def rec(i, left, acc):
        if i == inst.n - 1:
            if left <= caps[i]:
                yield acc + [left]
            return
        for x in range(min(left, caps[i]) + 1):
            yield from rec(i + 1, left - x, acc + [x])

    for units in rec(0, total, []):
        h = [Fraction(u, denominator) for u in units]
        if hall_feasible(inst, h):
            yield tuple(h)


def best_grid_profiles(inst: Instance, denominator: int | None = None, criterion: Criterion = Criterion.LEXIMIN) -> list[tuple]:
    """Best feasible grid profiles under *criterion* (default granularity 1 / (2 n^2))."""
    denominator = denominator or 2 * inst.n**2
    best, key = [], None
    for h in grid_profiles(inst, denominator):
        k = score(criterion, h)
        if key is None or k < key:
            best, key = [h], k
        elif k == key:
            best.append(h)
    return best


def _permute(inst: Instance, perm: Sequence[int]) -> Instance:
    return Instance(inst.likes[list(perm)].astype(int))


def verify_div_uniqueness(inst: Instance, rng: XorShift64Star, rounds: int = 5, grid: bool = True) -> CheckResult:
    sol = solve_stable_div(inst)
    base = sol.profile
    if not is_stable_div(inst, sol.allocation):
        return CheckResult("div-unique", False, "solver output admits a narrowing transfer")
    for _ in range(rounds):
        perm = rng.shuffle(list(range(inst.n)))
        other = solve_stable_div(_permute(inst, perm)).profile
        back = [None] * inst.n
        for pos, agent in enumerate(perm):
            back[agent] = other[pos]
        if tuple(back) != base:
            return CheckResult("div-unique", False, f"permutation {perm} gives {format_profile(back)} vs {format_profile(base)}")
    if grid:
        best = best_grid_profiles(inst)
        if best != [base]:
            return CheckResult("div-unique", False, f"grid optimum {[format_profile(b) for b in best]} vs solver {format_profile(base)}")
    return CheckResult("div-unique", True, value=base)


def verify_div_layers(inst: Instance) -> CheckResult:
    """Separation of rational layer indices and agreement with the indivisible layers."""
    sol = solve_stable_div(inst)
    idx = [layer.index for layer in sol.layers]
    sep = Fraction(1, inst.n**2)
    for a, b in itertools.combinations(idx, 2):
        if abs(a - b) < sep:
            return CheckResult("div-layers", False, f"indices {a} and {b} closer than 1/n^2")
    for layer in sol.layers:
        if layer.index != Fraction(len(layer.items), len(layer.agents)):
            return CheckResult("div-layers", False, f"index {layer.index} != |items|/|agents|")
    lp = compute_layers(inst, solve_stable_ind(inst))
    for i in range(inst.n):
        lo, hi = lp.income_range(i)
        if not lo <= sol.profile[i] <= hi:
            return CheckResult("div-layers", False, f"agent {i + 1}: divisible income {sol.profile[i]} outside [{lo}, {hi}]")
    return CheckResult("div-layers", True)


# ------------------------------------------------------------ submodular checks


def verify_submodular(si) -> CheckResult:
    allocs = enumerate_clean_max_usw(si)
    opt = optimal_sets(allocs)
    sets = set(opt.values())
    if len(sets) != 1:
        return CheckResult("sub-consistency", False, "optimal sets differ across criteria")
    profiles = {tuple(len(b) for b in allocs[k].bundles) for k in next(iter(sets))}
    worst = max((chebyshev(p, q) for p, q in itertools.combinations(profiles, 2)), default=0)
    return CheckResult("sub-chebyshev", worst <= 1, f"max={worst}", worst)


def repeated_agent_chain() -> tuple[SubInstance, Allocation]:
    """Items a..g = 0..6.  The only improving chain is (3,a,2,b,1,c,2,d,4).

    Agent 2 cannot hold a and b together, so the chain must pass through
    agent 2 twice; a search that refuses repeated agents finds nothing.
    """
    a, b, c, d, e, f, g = range(7)
    si = SubInstance(
        (
            UniformValuation(1, frozenset({b, c})),
            PartitionValuation(((frozenset({a, b}), 1), (frozenset({c, d}), 1))),
            UniformValuation(2, frozenset({a, f})),
            UniformValuation(3, frozenset({d, e, g})),
        ),
        7,
    )
    return si, Allocation((frozenset({b}), frozenset({a, c}), frozenset({f}), frozenset({d, e, g})))


# ------------------------------------------------------------- mixed fixture


MIXED_LIKES = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (1, 0, 0, 1),
    (0, 1, 1, 1),
    (0, 1, 1, 1),
)
MIXED_DIVISIBLE_ITEMS = frozenset({4, 5})
MIXED_LEXIMIN_SHARES = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (1, 0, 0, 0),
    (0, Fraction(1, 3), 0, Fraction(2, 3)),
    (0, 0, Fraction(1, 3), Fraction(2, 3)),
)
MIXED_LEXIMAX_SHARES = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (0, Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
    (0, Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
)


@dataclass
class MixedClass:
    item4_agent: int
    allocation: FractionalAllocation
    profile: tuple


@dataclass
class FixtureReport:
    classes: list[MixedClass]
    winners: dict
    checks: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def format(self) -> str:
        out = []
        for cl in self.classes:
            out.append(f"class item4->agent{cl.item4_agent + 1}: profile {format_profile(cl.profile)}")
        for c, cl in self.winners.items():
            out.append(f"{c.value}: item 4 -> agent {cl.item4_agent + 1}, profile {format_profile(cl.profile)}")
        out += [c.line() for c in self.checks]
        return "\n".join(out)


def mixed_fixture() -> FixtureReport:
    """Mixed divisible/indivisible instance where LexiMin and LexiMax optima disagree.

    Items 1-4 are indivisible and items 1-3 each have a single liker, so an
    allocation class is fixed by who gets item 4.  Within a class the
    divisible items are spread by the divisible solver, with the class's
    indivisible items entering as single-liker items.
    """
    inst = from_item_major(MIXED_LIKES)
    classes = []
    for agent in inst.likers[3]:
        likes = inst.likes.astype(int).copy()
        likes[:, 3] = 0
        likes[agent, 3] = 1
        sol = solve_stable_div(Instance(likes))
        classes.append(MixedClass(agent, sol.allocation, sol.profile))
    winners = {}
    for c in (Criterion.LEXIMIN, Criterion.LEXIMAX):
        winners[c] = min(classes, key=lambda cl: score(c, cl.profile))
    lmin, lmax = winners[Criterion.LEXIMIN], winners[Criterion.LEXIMAX]
    third = Fraction(1, 3)
    checks = [
        CheckResult("leximin-profile", lmin.profile == (2, 4 * third, 4 * third, 4 * third), format_profile(lmin.profile)),
        CheckResult("leximax-profile", lmax.profile == (1, 5 * third, 5 * third, 5 * third), format_profile(lmax.profile)),
        CheckResult("item4-differs", lmin.item4_agent != lmax.item4_agent, f"{lmin.item4_agent + 1} vs {lmax.item4_agent + 1}"),
        CheckResult("mass", all(sum(cl.profile) == 6 for cl in classes), ""),
        CheckResult(
            "reference-matrices",
            profile(inst, FractionalAllocation.from_item_major(MIXED_LEXIMIN_SHARES)) == lmin.profile
            and profile(inst, FractionalAllocation.from_item_major(MIXED_LEXIMAX_SHARES)) == lmax.profile,
            "",
        ),
    ]
    return FixtureReport(classes, winners, checks)



appendix_d_fixture = mixed_fixture

# -------------------------------------------------------------------- sweeps


@dataclass
class SweepReport:
    seed: int
    checks: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if not c.passed), None)

    def format(self) -> str:
        lines = [f"# seed {self.seed}"] + [c.line() for c in self.checks]
        passed = sum(c.passed for c in self.checks)
        lines.append(f"# {passed}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _trial(args) -> list[CheckResult]:
    trial, seed, max_n, max_m, solver = args
    rng = XorShift64Star(seed)
    n = 1 + rng.randrange(max_n)
    m = 1 + rng.randrange(max_m)
    density = DENSITIES[trial % len(DENSITIES)]
    inst = random_instance(rng, n, m, density)
    tag = f"t{trial}:n={n},m={m},p={density}"
    res = enumerate_all(inst)
    out = [
        verify_consistency(inst, res),
        verify_chebyshev_ind(inst, res),
        verify_layer_invariance(inst, res),
        verify_transfer_improves(inst, res),
        verify_solver(inst, solver, res),
        verify_div_uniqueness(inst, rng, grid=n <= 3 and m <= 6),
        verify_div_layers(inst),
    ]
    # profile samples for the SPD property
    p = [rng.randrange(51) for _ in range(max(n, 2))]
    j, k = sorted(rng.shuffle(list(range(len(p))))[:2], key=lambda i: p[i])
    if p[k] - p[j] >= 2:
        delta = 1 + rng.randrange((p[k] - p[j]) // 2)
        q = list(p)
        q[j] += delta
        q[k] -= delta
        bad = [c.value for c in BUILTIN_CRITERIA if compare(c, q, p) != -1]
        out.append(CheckResult("spd-monotone", not bad, f"{p}->{q} fails {bad}" if bad else ""))
    sn, sm = min(n, 4), min(m, 7)
    si = random_sub_instance(rng, sn, sm, SUB_KINDS[trial % len(SUB_KINDS)])
    out.append(verify_submodular(si))
    return [CheckResult(f"{c.name}[{tag}]", c.passed, c.witness, c.value) for c in out]


def worker_count() -> int:
    raw = os.environ.get("SPD_ALLOC_THREADS", "0").strip() or "0"
    k = int(raw)
    if k < 0:
        raise ValueError("SPD_ALLOC_THREADS must be >= 0")
    return k or (os.cpu_count() or 1)


def run_sweep(max_n: int, max_m: int, trials: int, seed: int, solver: Callable = solve_stable_ind, workers: int | None = None) -> SweepReport:
    if max_n < 1 or max_m < 1 or trials < 0:
        raise ValueError("need max_n >= 1, max_m >= 1, trials >= 0")
    if max_n > MAX_AGENTS or max_m > MAX_ITEMS:
        raise ScaleError(f"sweep limited to n <= {MAX_AGENTS}, m <= {MAX_ITEMS}")
    master = XorShift64Star(seed)
    jobs = [(t, master.next_u64(), max_n, max_m, solver) for t in range(trials)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_trial, jobs))
    else:
        chunks = [_trial(job) for job in jobs]
    return SweepReport(seed, [c for chunk in chunks for c in chunk])


def random_instances(seed: int, count: int, max_n: int, max_m: int) -> list[tuple[Instance, float]]:
    """Reproducible instance family cycling through the three like-densities."""
    rng = XorShift64Star(seed)
    out = []
    for t in range(count):
        n = 1 + rng.randrange(max_n)
        m = 1 + rng.randrange(max_m)
        p = DENSITIES[t % len(DENSITIES)]
        out.append((random_instance(rng, n, m, p), p))
    return out


def as_matrix(inst: Instance) -> np.ndarray:
    return inst.likes.astype(int)
