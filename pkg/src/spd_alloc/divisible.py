"""Stable allocations of divisible items via piece splitting.

Every item is cut into ``2 * n**2`` equal pieces and the indivisible flow
solver runs on the pieces (implicitly, through arc capacities).  The piece
allocation's layer partition pins down the exact rational income of each
layer as ``#items / #agents``, and each layer is then redistributed exactly
so that all of its agents receive that income.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .flow import build_network
from .layers import partition_agents
from .model import AnyAllocation, FractionalAllocation, Instance, check_allocation
from .transfers import TransferGraph, find_narrowing_transfer


@dataclass(frozen=True)
class DivLayer:
    index: Fraction
    agents: frozenset
    items: frozenset


@dataclass(frozen=True)
class DivSolution:
    allocation: FractionalAllocation
    profile: tuple
    layers: tuple[DivLayer, ...]
    pieces: int
    augmentations: int

    def layer_of(self, agent: int) -> DivLayer:
        for layer in self.layers:
            if agent in layer.agents:
                return layer
        raise IndexError(agent)


def pieces_per_item(n: int) -> int:
    return 2 * n * n


def _piece_graph(inst: Instance, flow: np.ndarray) -> TransferGraph:
    witness = {}
    for j, i in zip(*np.nonzero(flow)):
        for k in inst.likers[int(j)]:
            if k != i:
                key = (int(i), k)
                if key not in witness or witness[key] > j:
                    witness[key] = int(j)
    return TransferGraph(inst.n, witness)


def _max_flow_layer(inst: Instance, agents: list[int], items: list[int]) -> dict[tuple[int, int], int]:
    """Integer max flow: each item supplies len(agents) units, each agent demands len(items).

    Returns units per (item, agent); a unit is 1/len(agents) of an item.
    """
    na, ni = len(agents), len(items)
    supply = {j: na for j in items}
    demand = {i: ni for i in agents}
    units: dict[tuple[int, int], int] = {}
    liked = {j: [i for i in agents if inst.likes[i, j]] for j in items}
    # greedy sweep first: fills most of the demand without splitting items
    for j in items:
        for i in liked[j]:
            amt = min(supply[j], demand[i])
            if amt:
                units[(j, i)] = units.get((j, i), 0) + amt
                supply[j] -= amt
                demand[i] -= amt
    # then shortest augmenting paths item -> agent (-> item held by agent -> agent ...)
    while any(demand.values()):
        starts = [j for j in items if supply[j]]
        parent: dict = {("u", j): None for j in starts}
        queue = deque(("u", j) for j in starts)
        end = None
        while queue and end is None:
            node = queue.popleft()
            kind, x = node
            if kind == "u":
                for i in liked[x]:
                    nxt = ("v", i)
                    if nxt not in parent:
                        parent[nxt] = node
                        if demand[i]:
                            end = nxt
                            break
                        queue.append(nxt)
            else:
                for j in items:
                    if units.get((j, x), 0) > 0 and ("u", j) not in parent:
                        parent[("u", j)] = node
                        queue.append(("u", j))
        if end is None:
            raise RuntimeError("layer cannot be balanced exactly; piece layers are inconsistent")
        path = [end]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        amt = min(supply[path[0][1]], demand[end[1]])
        for a, b in zip(path, path[1:]):
            if a[0] == "v":  # reverse arc: agent a gives back item b
                amt = min(amt, units[(b[1], a[1])])
        for a, b in zip(path, path[1:]):
            if a[0] == "u":
                units[(a[1], b[1])] = units.get((a[1], b[1]), 0) + amt
            else:
                units[(b[1], a[1])] -= amt
        supply[path[0][1]] -= amt
        demand[end[1]] -= amt
    return {k: v for k, v in units.items() if v}


def solve_stable_div(inst: Instance) -> DivSolution:
    n = inst.n
    pieces = pieces_per_item(n)
    net = build_network(inst, pieces=pieces).run()
    flow = net.flow
    incomes = [int(x) for x in net.load]
    r, s = partition_agents(incomes, _piece_graph(inst, flow))
    held_items = [frozenset(int(j) for j in np.flatnonzero(flow[:, i])) for i in range(n)]

    by_index: dict[Fraction, tuple[set, set]] = {}
    for minus, groups in ((False, r), (True, s)):
        for d, agents in groups.items():
            items = frozenset().union(*(held_items[i] for i in agents))
            index = Fraction(len(items), len(agents))
            lo = Fraction(d - 1 if minus else d, pieces)
            hi = Fraction(d, pieces)
            if not lo <= index <= hi:
                raise AssertionError(f"layer index {index} outside piece window [{lo}, {hi}]")
            a, it = by_index.setdefault(index, (set(), set()))
            a |= agents
            it |= items

    shares: dict[tuple[int, int], Fraction] = {}
    layers = []
    for index in sorted(by_index):
        agents, items = by_index[index]
        layers.append(DivLayer(index, frozenset(agents), frozenset(items)))
        if not items:
            continue
        units = _max_flow_layer(inst, sorted(agents), sorted(items))
        for (j, i), u in units.items():
            shares[(j, i)] = Fraction(u, len(agents))
    alloc = FractionalAllocation(n, shares)
    prof = tuple(layer.index for i in range(n) for layer in layers if i in layer.agents)
    return DivSolution(alloc, prof, tuple(layers), pieces, net.augmentations)


def div_profile(inst: Instance) -> tuple:
    return solve_stable_div(inst).profile


def is_stable_div(inst: Instance, falloc: AnyAllocation) -> bool:
    """No transfer path from a richer to a strictly poorer agent."""
    if isinstance(falloc, FractionalAllocation):
        check_allocation(inst, falloc)
        return find_narrowing_transfer(inst, falloc) is None
    return is_stable_div(inst, FractionalAllocation.from_allocation(falloc))

