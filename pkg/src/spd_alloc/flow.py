"""Successive-shortest-path min-cost flow for stable indivisible allocations.

Network: source -> item (capacity ``pieces``), item -> agent for every liked
pair (capacity ``pieces``), and per agent a family of unit sink arcs whose
k-th arc costs ``(k - 1) * scale + costs[i]``.  Sink arcs are never
materialised: an agent's next unused arc costs ``load * scale + costs[i]``.

All item/agent arcs cost 0, so the shortest augmenting path ends at the
cheapest agent reachable from a non-saturated item in the residual graph.
Because sink-arc costs grow with the load, augmenting along such paths
never creates a negative residual cycle and no potentials are needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import Allocation, Instance

SOURCE = "s"
SINK = "t"


@dataclass
class FlowNetwork:
    """Residual state of the structured network.

    ``flow[j, i]`` is the number of units (pieces) of item j routed to agent i.
    """

    inst: Instance
    pieces: int = 1
    costs: np.ndarray | None = None
    scale: int = 1
    flow: np.ndarray = field(init=False)
    augmentations: int = field(init=False, default=0)

    def __post_init__(self):
        m, n = self.inst.m, self.inst.n
        if self.pieces < 1:
            raise ValueError("pieces must be positive")
        self.likes_t = np.ascontiguousarray(self.inst.likes.T)  # item-major
        self.flow = np.zeros((m, n), dtype=np.int64)
        self.costs = np.zeros(n, dtype=np.int64) if self.costs is None else np.asarray(self.costs, dtype=np.int64)
        if self.costs.shape != (n,):
            raise ValueError(f"expected {n} agent costs, got shape {self.costs.shape}")
        self.load = np.zeros(n, dtype=np.int64)
        self.item_used = np.zeros(m, dtype=np.int64)
        self.likable = self.likes_t.any(axis=1)
        self._held = np.zeros((m, n), dtype=bool)
        self._fwd = self.likes_t.copy()

    # ------------------------------------------------------------ structure

    @property
    def num_nodes(self) -> int:
        return self.inst.m + self.inst.n + 2

    def arcs(self) -> list[tuple]:
        """Every arc as ``(tail, head, capacity, cost)``; nodes named s, t, ('u', j), ('v', i)."""
        m, n, P = self.inst.m, self.inst.n, self.pieces
        out = [(SOURCE, ("u", j), P, 0) for j in range(m)]
        out += [(("u", j), ("v", i), P, 0) for j in range(m) for i in range(n) if self.likes_t[j, i]]
        for i in range(n):
            for k in range(1, m * P + 1):
                out.append((("v", i), SINK, 1, (k - 1) * self.scale + int(self.costs[i])))
        return out

    # --------------------------------------------------------- augmentation

    def next_arc_cost(self) -> np.ndarray:
        return self.load * self.scale + self.costs

    def _search(self):
        """Breadth-first reachability from the source; returns per-node levels."""
        m, n = self.inst.m, self.inst.n
        item_level = np.full(m, -1, dtype=np.int64)
        agent_level = np.full(n, -1, dtype=np.int64)
        start = self.likable & (self.item_used < self.pieces)
        if not start.any():
            return None
        item_level[start] = 0
        frontier = start
        level = 0
        while True:
            reached = self._fwd[frontier].any(axis=0) & (agent_level < 0)
            if not reached.any():
                break
            agent_level[reached] = level
            level += 1
            frontier = self._held[:, reached].any(axis=1) & (item_level < 0)
            if not frontier.any():
                break
            item_level[frontier] = level
        return item_level, agent_level

    def augment(self) -> bool:
        """Push one unit along a shortest augmenting path; False when the flow is maximum."""
        found = self._search()
        if found is None:
            return False
        item_level, agent_level = found
        reach = np.flatnonzero(agent_level >= 0)
        if reach.size == 0:
            return False
        cost = self.next_arc_cost()[reach]
        best = reach[cost == cost.min()]
        target = int(best[0])  # ties: smallest agent index
        self.load[target] += 1
        agent = target
        level = int(agent_level[agent])
        while True:
            j = int(np.flatnonzero((item_level == level) & self._fwd[:, agent])[0])
            self._route(j, agent, +1)
            if level == 0:
                self.item_used[j] += 1
                break
            level -= 1
            prev = int(np.flatnonzero((agent_level == level) & self._held[j])[0])
            self._route(j, prev, -1)
            agent = prev
        self.augmentations += 1
        return True

    def _route(self, j: int, i: int, delta: int):
        f = self.flow[j, i] + delta
        self.flow[j, i] = f
        self._held[j, i] = f > 0
        self._fwd[j, i] = self.likes_t[j, i] and f < self.pieces

    def run(self) -> FlowNetwork:
        while self.augment():
            pass
        return self

    @property
    def flow_value(self) -> int:
        return int(self.item_used.sum())

    def allocation(self) -> Allocation:
        if self.pieces != 1:
            raise ValueError("integral allocation only defined for pieces == 1")
        owner = [int(np.flatnonzero(row)[0]) if row.any() else None for row in self.flow]
        return Allocation.from_owner(owner, self.inst.n)


def build_network(inst: Instance, pieces: int = 1, costs: Sequence[int] | None = None, scale: int = 1) -> FlowNetwork:
    return FlowNetwork(inst, pieces=pieces, costs=None if costs is None else np.asarray(costs), scale=scale)


def solve_stable_ind(inst: Instance) -> Allocation:
    """Minimum-Congestion (hence stable) allocation of indivisible items."""
    return build_network(inst).run().allocation()


def linear_scale(costs: Sequence[int], m: int) -> int:
    """Multiplier A making congestion dominate any linear cost difference."""
    spread = max(costs) - min(costs) if len(costs) else 0
    return 1 + m * spread


def solve_linear_objective(inst: Instance, costs: Sequence[int]) -> Allocation:
    """Stable allocation minimising ``sum(costs[i] * h_i)`` among all stable allocations."""
    costs = [int(c) for c in costs]
    if len(costs) != inst.n:
        raise ValueError(f"expected {inst.n} costs, got {len(costs)}")
    base = min(costs)
    shifted = [c - base for c in costs]
    net = build_network(inst, costs=shifted, scale=linear_scale(costs, inst.m))
    return net.run().allocation()
