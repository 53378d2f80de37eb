"""Binary submodular (matroid-rank) valuations at desk scale.

A bundle is clean for an agent exactly when it is independent in that
agent's matroid.  Improvements are found by exchange sequences
``(i_0, o_1, i_1, ..., o_t, i_t)`` in which ``o_k`` moves from ``i_k`` to
``i_{k-1}``; the search tracks items and never reuses one, while agents
may recur (a repeated agent can be essential for keeping bundles clean).

Everything here is exponential in the worst case and guarded by hard
size limits.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .criteria import BUILTIN_CRITERIA, score
from .model import Allocation
from .rng import XorShift64Star

MAX_AGENTS = 5
MAX_ITEMS = 12


class DeskScaleError(ValueError):
    pass


def _guard(n: int, m: int):
    if n > MAX_AGENTS or m > MAX_ITEMS:
        raise DeskScaleError(f"desk-scale limit is n <= {MAX_AGENTS}, m <= {MAX_ITEMS}; got n={n}, m={m}")


# ---------------------------------------------------------------- valuations


class MatroidValuation:
    kind = "matroid"
    ground: frozenset

    def rank(self, items: Iterable[int]) -> int:
        raise NotImplementedError

    def is_independent(self, items) -> bool:
        items = set(items)
        return self.rank(items) == len(items)


@dataclass(frozen=True)
class UniformValuation(MatroidValuation):
    r: int
    ground: frozenset

    kind = "uniform"

    def rank(self, items):
        return min(len(self.ground.intersection(items)), self.r)


@dataclass(frozen=True)
class PartitionValuation(MatroidValuation):
    blocks: tuple[tuple[frozenset, int], ...]

    kind = "partition"

    def __post_init__(self):
        seen = set()
        for block, cap in self.blocks:
            if seen & block:
                raise ValueError("partition blocks overlap")
            if cap < 0:
                raise ValueError("negative block capacity")
            seen |= block

    @property
    def ground(self):
        return frozenset().union(*(b for b, _ in self.blocks))

    def rank(self, items):
        items = set(items)
        return sum(min(len(block & items), cap) for block, cap in self.blocks)


@dataclass(frozen=True)
class TransversalValuation(MatroidValuation):
    """Rank = maximum matching between the items and abstract slots."""

    edges: tuple[tuple[int, int], ...]  # (item, slot)

    kind = "transversal"

    @property
    def ground(self):
        return frozenset(j for j, _ in self.edges)

    def rank(self, items):
        adj: dict[int, list[int]] = {}
        for j, slot in self.edges:
            adj.setdefault(j, []).append(slot)
        match: dict[int, int] = {}  # slot -> item

        def augment(j, seen):
            for slot in adj.get(j, ()):
                if slot in seen:
                    continue
                seen.add(slot)
                if slot not in match or augment(match[slot], seen):
                    match[slot] = j
                    return True
            return False

        return sum(1 for j in sorted(set(items)) if j in adj and augment(j, set()))


def value(val: MatroidValuation, items) -> int:
    return val.rank(items)


@dataclass(frozen=True)
class SubInstance:
    valuations: tuple[MatroidValuation, ...]
    num_items: int

    def __post_init__(self):
        object.__setattr__(self, "valuations", tuple(self.valuations))
        for v in self.valuations:
            if any(not 0 <= j < self.num_items for j in v.ground):
                raise ValueError("valuation ground set exceeds the item range")

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return self.num_items


def is_clean(si: SubInstance, alloc: Allocation) -> bool:
    return all(v.is_independent(b) for v, b in zip(si.valuations, alloc.bundles))


def welfare(si: SubInstance, alloc: Allocation) -> int:
    return sum(v.rank(b) for v, b in zip(si.valuations, alloc.bundles))


# -------------------------------------------------------------- text format


def parse_sub_instance(text: str) -> SubInstance:
    """Parse ``SUB n m`` followed by one valuation line per agent (items 1-indexed).

    * ``uniform r g1 g2 ...``
    * ``partition cap:i1,i2;cap:i3`` (blocks separated by ``;``)
    * ``transversal i-s i-s ...`` (item-slot edges)
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "SUB":
        raise ValueError(f"malformed header {lines[0]!r}")
    n, m = int(head[1]), int(head[2])
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} agent lines, got {len(lines) - 1}")
    vals = []
    for ln in lines[1:]:
        kind, _, rest = ln.partition(" ")
        rest = rest.strip()
        if kind == "uniform":
            toks = rest.split()
            vals.append(UniformValuation(int(toks[0]), frozenset(int(t) - 1 for t in toks[1:])))
        elif kind == "partition":
            blocks = []
            for part in filter(None, rest.replace(" ", "").split(";")):
                cap, _, items = part.partition(":")
                blocks.append((frozenset(int(t) - 1 for t in items.split(",") if t), int(cap)))
            vals.append(PartitionValuation(tuple(blocks)))
        elif kind == "transversal":
            edges = []
            for tok in rest.split():
                j, _, slot = tok.partition("-")
                edges.append((int(j) - 1, int(slot)))
            vals.append(TransversalValuation(tuple(edges)))
        else:
            raise ValueError(f"unknown valuation kind {kind!r}")
    return SubInstance(tuple(vals), m)


def format_sub_instance(si: SubInstance) -> str:
    out = [f"SUB {si.n} {si.m}"]
    for v in si.valuations:
        if isinstance(v, UniformValuation):
            out.append(" ".join(["uniform", str(v.r)] + [str(j + 1) for j in sorted(v.ground)]))
        elif isinstance(v, PartitionValuation):
            out.append("partition " + ";".join(f"{cap}:" + ",".join(str(j + 1) for j in sorted(b)) for b, cap in v.blocks))
        else:
            out.append("transversal " + " ".join(f"{j + 1}-{s}" for j, s in v.edges))
    return "\n".join(out) + "\n"


# -------------------------------------------------------- exchange sequences


@dataclass(frozen=True)
class ExchangeSequence:
    """``agents = (i_0, ..., i_t)``, ``items = (o_1, ..., o_t)``; o_k moves i_k -> i_{k-1}.

    When ``augmenting`` is set the last item was unallocated and is simply
    handed to ``i_{t-1}`` (``i_t`` is then ``-1``).
    """

    agents: tuple[int, ...]
    items: tuple[int, ...]
    augmenting: bool = False

    def __str__(self):
        parts = [str(self.agents[0] + 1)]
        for o, a in zip(self.items, self.agents[1:]):
            parts += [f"o{o + 1}", "free" if a < 0 else str(a + 1)]
        return "(" + ",".join(parts) + ")"


def apply_exchange(alloc: Allocation, seq: ExchangeSequence) -> Allocation:
    bundles = [set(b) for b in alloc.bundles]
    for receiver, o, giver in zip(seq.agents, seq.items, seq.agents[1:]):
        if giver >= 0:
            if o not in bundles[giver]:
                raise ValueError(f"agent {giver + 1} does not hold item {o + 1}")
            bundles[giver].remove(o)
        bundles[receiver].add(o)
    return Allocation(tuple(frozenset(b) for b in bundles))


def _search(si: SubInstance, alloc: Allocation, *, augmenting: bool, distinct_agents: bool) -> ExchangeSequence | None:
    """Breadth-first search over exchange sequences, shortest first."""
    h = [len(b) for b in alloc.bundles]
    starts = sorted(range(si.n), key=lambda i: (h[i], i))
    # state: bundles, agents so far, items so far
    queue = deque((tuple(alloc.bundles), (i0,), ()) for i0 in starts)
    seen = set()
    while queue:
        bundles, agents, items = queue.popleft()
        a = agents[-1]
        i0 = agents[0]
        key = (bundles, a, i0, frozenset(items))
        if key in seen:
            continue
        seen.add(key)
        used = set(items)
        cur_owner = {j: i for i, b in enumerate(bundles) for j in b}
        for o in range(si.m):
            if o in used or o in bundles[a]:
                continue
            if not si.valuations[a].is_independent(bundles[a] | {o}):
                continue
            b = cur_owner.get(o)
            if b is None:
                if augmenting:
                    return ExchangeSequence(agents + (-1,), items + (o,), augmenting=True)
                continue
            if not augmenting and b != i0 and h[b] >= h[i0] + 2:
                return ExchangeSequence(agents + (b,), items + (o,))
            if distinct_agents and b in agents:
                continue
            new = list(bundles)
            new[a] = bundles[a] | {o}
            new[b] = bundles[b] - {o}
            queue.append((tuple(new), agents + (b,), items + (o,)))
    return None


def find_exchange_improvement(si: SubInstance, alloc: Allocation, *, distinct_agents: bool = False) -> ExchangeSequence | None:
    """Exchange sequence whose application strictly improves LexiMin, or None if none exists.

    ``distinct_agents=True`` forbids agents from recurring in the sequence;
    it exists only to demonstrate that such a search misses improvements.
    """
    _guard(si.n, si.m)
    if not is_clean(si, alloc):
        raise ValueError("allocation is not clean")
    if welfare(si, alloc) != max_usw_sub(si):
        raise ValueError("allocation is not max-USW")
    return _search(si, alloc, augmenting=False, distinct_agents=distinct_agents)


def _greedy(si: SubInstance) -> Allocation:
    bundles = [frozenset() for _ in range(si.n)]
    for o in range(si.m):
        gainers = [i for i in range(si.n) if si.valuations[i].is_independent(bundles[i] | {o})]
        if gainers:
            i = min(gainers, key=lambda k: (len(bundles[k]), k))
            bundles[i] = bundles[i] | {o}
    return Allocation(tuple(bundles))


def max_usw_allocation(si: SubInstance) -> Allocation:
    """Greedy start, then augmenting exchange sequences until welfare is maximal."""
    _guard(si.n, si.m)
    alloc = _greedy(si)
    while (seq := _search(si, alloc, augmenting=True, distinct_agents=False)) is not None:
        alloc = apply_exchange(alloc, seq)
    return alloc


def max_usw_sub(si: SubInstance) -> int:
    return welfare(si, max_usw_allocation(si))


def solve_leximin_sub_desk(si: SubInstance) -> Allocation:
    alloc = max_usw_allocation(si)
    while (seq := _search(si, alloc, augmenting=False, distinct_agents=False)) is not None:
        alloc = apply_exchange(alloc, seq)
    return alloc


# ------------------------------------------------------------- brute force


def enumerate_clean_max_usw(si: SubInstance) -> list[Allocation]:
    """All clean allocations achieving maximum welfare (items ascending, receivers ascending)."""
    _guard(si.n, si.m)
    target = max_usw_sub(si)
    out: list[Allocation] = []
    bundles = [frozenset() for _ in range(si.n)]

    def rec(o: int, got: int):
        if got + (si.m - o) < target:
            return
        if o == si.m:
            out.append(Allocation(tuple(bundles)))
            return
        for i in range(si.n):
            if si.valuations[i].is_independent(bundles[i] | {o}):
                bundles[i] = bundles[i] | {o}
                rec(o + 1, got + 1)
                bundles[i] = bundles[i] - {o}
        rec(o + 1, got)

    rec(0, 0)
    return out


def optimal_sets(allocs: Sequence[Allocation], criteria=BUILTIN_CRITERIA) -> dict:
    """For each criterion, the indices of allocations with the best score."""
    result = {}
    profiles = [tuple(len(b) for b in a.bundles) for a in allocs]
    for c in criteria:
        scores = [score(c, p) for p in profiles]
        best = min(scores) if scores else None
        result[c] = frozenset(k for k, s in enumerate(scores) if s == best)
    return result


def chebyshev(p: Sequence, q: Sequence):
    return max((abs(a - b) for a, b in zip(p, q)), default=0)


def chebyshev_sub(si: SubInstance) -> int:
    """Largest per-agent income gap between any two SPD-optimal allocations."""
    allocs = enumerate_clean_max_usw(si)
    opt = optimal_sets(allocs)
    members = sorted(frozenset().union(*opt.values()))
    profiles = {tuple(len(b) for b in allocs[k].bundles) for k in members}
    return max((chebyshev(p, q) for p, q in itertools.combinations(profiles, 2)), default=0)


# ------------------------------------------------------------------ random


def random_valuation(rng: XorShift64Star, m: int, kind: str) -> MatroidValuation:
    ground = rng.subset(range(m), 0.6) or [rng.randrange(m)]
    if kind == "uniform":
        return UniformValuation(1 + rng.randrange(len(ground)), frozenset(ground))
    if kind == "partition":
        k = 1 + rng.randrange(min(3, len(ground)))
        blocks: list[list[int]] = [[] for _ in range(k)]
        for j in ground:
            blocks[rng.randrange(k)].append(j)
        return PartitionValuation(tuple((frozenset(b), 1 + rng.randrange(len(b))) for b in blocks if b))
    if kind == "transversal":
        slots = 1 + rng.randrange(3)
        edges = []
        for j in ground:
            mine = rng.subset(range(slots), 0.5) or [rng.randrange(slots)]
            edges += [(j, s) for s in mine]
        return TransversalValuation(tuple(edges))
    raise ValueError(f"unknown matroid kind {kind!r}")


def random_sub_instance(rng: XorShift64Star, n: int, m: int, kind: str) -> SubInstance:
    return SubInstance(tuple(random_valuation(rng, m, kind) for _ in range(n)), m)
