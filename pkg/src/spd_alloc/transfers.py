"""Transfer graphs, narrowing-transfer search and transfer application.

An edge ``i -> i'`` exists when agent i holds (some of) an item that agent
i' also likes.  A transfer along a simple path moves one item (or an
amount ``delta`` of item mass) per hop, so only the endpoints change income.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import (
    Allocation,
    AnyAllocation,
    FractionalAllocation,
    Instance,
    format_rational,
    is_clean,
    profile,
)

NARROWING = "narrowing"
WIDENING = "widening"
SWAPPING = "swapping"


class StaleTransferError(ValueError):
    """The allocation no longer holds a witness item the path relies on."""


@dataclass(frozen=True)
class TransferGraph:
    """Adjacency with one witness item per edge (the smallest item index)."""

    num_agents: int
    witness: dict[tuple[int, int], int]

    def successors(self, i: int) -> list[int]:
        return self._adj[i]

    def predecessors(self, i: int) -> list[int]:
        return self._radj[i]

    def __post_init__(self):
        adj = [[] for _ in range(self.num_agents)]
        radj = [[] for _ in range(self.num_agents)]
        for (a, b) in sorted(self.witness):
            adj[a].append(b)
            radj[b].append(a)
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "_radj", radj)

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        return [(a, b, j) for (a, b), j in sorted(self.witness.items())]


@dataclass(frozen=True)
class TransferPath:
    agents: tuple[int, ...]
    items: tuple[int, ...]
    kind: str
    amount: Fraction | int = 1

    def __str__(self):
        parts = [str(self.agents[0] + 1)]
        for j, b in zip(self.items, self.agents[1:]):
            parts.append(f"-[item {j + 1}]-> {b + 1}")
        text = " ".join(parts) + f" ({self.kind})"
        if self.amount != 1:
            text += f" amount={format_rational(self.amount)}"
        return text


def holdings(alloc: AnyAllocation) -> list[dict[int, Fraction | int]]:
    """Per agent: item -> held amount (1 for integral allocations)."""
    if isinstance(alloc, Allocation):
        return [{j: 1 for j in sorted(b)} for b in alloc.bundles]
    out: list[dict] = [{} for _ in range(alloc.num_agents)]
    for (j, i), a in alloc.shares.items():
        out[i][j] = a
    return out


def build_transfer_graph(inst: Instance, alloc: AnyAllocation) -> TransferGraph:
    if not is_clean(inst, alloc):
        raise ValueError("transfer graph needs a clean allocation")
    witness: dict[tuple[int, int], int] = {}
    for i, held in enumerate(holdings(alloc)):
        for j in sorted(held):
            for k in inst.likers[j]:
                if k != i and (i, k) not in witness:
                    witness[(i, k)] = j
    return TransferGraph(inst.n, witness)


def classify(h_u, h_v, delta=None) -> str:
    """Kind of a transfer from an agent with income h_u to one with h_v."""
    if delta is None:
        if h_u >= h_v + 2:
            return NARROWING
    elif h_u - delta >= h_v + delta:
        return NARROWING
    if h_u <= h_v:
        return WIDENING
    return SWAPPING


def _bfs_path(graph: TransferGraph, sources: Sequence[int], is_target) -> list[int] | None:
    """Multi-source BFS; returns the lexicographically smallest shortest path to a target."""
    parent = {s: None for s in sources}
    queue = deque(sorted(sources))
    while queue:
        a = queue.popleft()
        for b in graph.successors(a):
            if b in parent:
                continue
            parent[b] = a
            if is_target(b):
                path = [b]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(b)
    return None


def find_narrowing_transfer(inst: Instance, alloc: AnyAllocation) -> TransferPath | None:
    """Shortest narrowing transfer, searching source income classes from the richest down.

    Integral allocations need an endpoint gap of at least 2; fractional
    ones any positive gap, with the moved amount set to
    ``min(gap / 2, smallest witness share on the path)``.
    """
    graph = build_transfer_graph(inst, alloc)
    h = profile(inst, alloc)
    fractional = isinstance(alloc, FractionalAllocation)
    need = 0 if fractional else 2
    for level in sorted(set(h), reverse=True):
        sources = [i for i in range(inst.n) if h[i] == level]
        if fractional:
            path = _bfs_path(graph, sources, lambda b: h[b] < level)
        else:
            path = _bfs_path(graph, sources, lambda b: h[b] <= level - need)
        if path is None:
            continue
        items = tuple(graph.witness[(a, b)] for a, b in zip(path, path[1:]))
        if fractional:
            held = holdings(alloc)
            gap = h[path[0]] - h[path[-1]]
            delta = min([gap / 2] + [held[a][j] for a, j in zip(path, items)])
            return TransferPath(tuple(path), items, NARROWING, Fraction(delta))
        return TransferPath(tuple(path), items, NARROWING, 1)
    return None


def is_stable(inst: Instance, alloc: AnyAllocation) -> bool:
    return find_narrowing_transfer(inst, alloc) is None


def apply_transfer(alloc: AnyAllocation, path: TransferPath) -> AnyAllocation:
    """Move each witness item one hop along *path*; only the endpoints change income."""
    hops = list(zip(path.agents, path.agents[1:], path.items))
    if isinstance(alloc, Allocation):
        bundles = [set(b) for b in alloc.bundles]
        for a, b, j in hops:
            if j not in bundles[a]:
                raise StaleTransferError(f"agent {a + 1} does not hold item {j + 1}")
            bundles[a].remove(j)
            bundles[b].add(j)
        return Allocation(tuple(frozenset(b) for b in bundles))
    delta = Fraction(path.amount)
    if delta <= 0:
        raise ValueError("transfer amount must be positive")
    shares = dict(alloc.shares)
    for a, b, j in hops:
        have = shares.get((j, a), Fraction(0))
        if have < delta:
            raise StaleTransferError(f"agent {a + 1} holds {have} of item {j + 1}, needs {delta}")
        shares[(j, a)] = have - delta
        shares[(j, b)] = shares.get((j, b), Fraction(0)) + delta
    return FractionalAllocation(alloc.num_agents, shares)


def stabilize(inst: Instance, alloc: AnyAllocation, max_steps: int = 100_000) -> AnyAllocation:
    """Apply narrowing transfers until none remains (integral allocations terminate quickly)."""
    for _ in range(max_steps):
        path = find_narrowing_transfer(inst, alloc)
        if path is None:
            return alloc
        alloc = apply_transfer(alloc, path)
    raise RuntimeError(f"no stable allocation reached after {max_steps} transfers")
