"""Layer partition of agents and items read off one stable allocation.

For income level d the agents holding d items split into

* ``p_d``: can pass an item down a transfer path to an agent holding d - 1,
* ``q_d``: can receive an item along a transfer path from an agent holding d + 1,
* ``r_d``: neither.

Agents in ``r_d`` hold exactly d items in every stable allocation; agents
in ``s_d = p_d | q_{d-1}`` hold d or d - 1.  The items held by each group
stay inside that group across all stable allocations.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import Allocation, Instance, check_allocation, profile
from .transfers import TransferGraph, build_transfer_graph, holdings, is_stable


class NotStableError(ValueError):
    pass


class EnumerationOverflow(RuntimeError):
    """Brute-force enumeration went past its configured limit."""


def _reach(starts: Iterable[int], step) -> set[int]:
    seen = set(starts)
    queue = deque(seen)
    while queue:
        a = queue.popleft()
        for b in step(a):
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return seen


def partition_agents(h: Sequence[int], graph: TransferGraph) -> tuple[dict[int, frozenset], dict[int, frozenset]]:
    """Split agents into fixed-income groups ``r[d]`` and swinging groups ``s[d]``.

    *h* are integral incomes (items, or pieces for the divisible solver).
    Only non-empty groups appear in the returned dicts.
    """
    n = len(h)
    by_level: dict[int, set[int]] = {}
    for i, x in enumerate(h):
        by_level.setdefault(x, set()).add(i)
    p: dict[int, set[int]] = {}
    q: dict[int, set[int]] = {}
    for d, members in by_level.items():
        below = by_level.get(d - 1)
        if below:
            # agents that reach some income-(d-1) agent: backward search from those
            back = _reach(below, graph.predecessors) - below
            p[d] = members & back
        above = by_level.get(d + 1)
        if above:
            fwd = _reach(above, graph.successors) - above
            q[d] = members & fwd
    r: dict[int, frozenset] = {}
    s: dict[int, frozenset] = {}
    for d, members in by_level.items():
        pd, qd = p.get(d, set()), q.get(d, set())
        if pd & qd:
            raise NotStableError(f"agents {sorted(pd & qd)} both give and receive at income {d}")
        rest = members - pd - qd
        if rest:
            r[d] = frozenset(rest)
        if pd:
            s.setdefault(d, frozenset())
            s[d] = s[d] | pd
        if qd:
            s.setdefault(d + 1, frozenset())
            s[d + 1] = s[d + 1] | qd
    assert sum(map(len, r.values())) + sum(map(len, s.values())) == n
    return dict(sorted(r.items())), dict(sorted(s.items()))


@dataclass(frozen=True)
class LayerPartition:
    """Agent and item layers of an instance; ``minus`` layers are the swinging ones."""

    allocation: Allocation
    agents: dict[int, frozenset]
    items: dict[int, frozenset]
    minus_agents: dict[int, frozenset]
    minus_items: dict[int, frozenset]

    def layer_of(self, agent: int) -> tuple[int, bool]:
        """``(d, is_minus)`` for the layer containing *agent*."""
        for d, group in self.agents.items():
            if agent in group:
                return d, False
        for d, group in self.minus_agents.items():
            if agent in group:
                return d, True
        raise IndexError(f"agent {agent} out of range")

    def income_range(self, agent: int) -> tuple[int, int]:
        d, minus = self.layer_of(agent)
        return (d - 1, d) if minus else (d, d)

    def groups(self):
        """Yield ``(d, is_minus, agents, items)`` in increasing layer order (r_0, s_1, r_1, s_2, ...)."""
        keys = sorted({(2 * d, False) for d in self.agents} | {(2 * d - 1, True) for d in self.minus_agents})
        for k, minus in keys:
            if minus:
                d = (k + 1) // 2
                yield d, True, self.minus_agents[d], self.minus_items.get(d, frozenset())
            else:
                d = k // 2
                yield d, False, self.agents[d], self.items.get(d, frozenset())

    def format(self) -> str:
        lines = []
        for d, minus, agents, items in self.groups():
            name = f"{d}-" if minus else f"{d}"
            a = ",".join(str(i + 1) for i in sorted(agents))
            it = ",".join(str(j + 1) for j in sorted(items))
            lines.append(f"layer {name}: agents=[{a}] items=[{it}]")
        return "\n".join(lines)


def _items_of(held: list[dict], groups: dict[int, frozenset]) -> dict[int, frozenset]:
    return {d: frozenset(j for i in agents for j in held[i]) for d, agents in groups.items()}


def compute_layers(inst: Instance, stable: Allocation) -> LayerPartition:
    check_allocation(inst, stable)
    if not is_stable(inst, stable):
        raise NotStableError("layer partition needs a stable allocation")
    graph = build_transfer_graph(inst, stable)
    r, s = partition_agents(profile(inst, stable), graph)
    held = holdings(stable)
    return LayerPartition(stable, r, _items_of(held, r), s, _items_of(held, s))


def count_stable_tiny(inst: Instance, limit: int = 1_000_000) -> int:
    """Number of stable allocations by exhaustive enumeration (n <= 5, m <= 10 intended)."""
    choices = [inst.likers[j] for j in range(inst.m) if inst.likers[j]]
    items = [j for j in range(inst.m) if inst.likers[j]]
    count = 0
    for k, pick in enumerate(itertools.product(*choices)):
        if k >= limit:
            raise EnumerationOverflow(f"more than {limit} allocations to enumerate")
        owner: list = [None] * inst.m
        for j, i in zip(items, pick):
            owner[j] = i
        if is_stable(inst, Allocation.from_owner(owner, inst.n)):
            count += 1
    return count


def total_layer_items(lp: LayerPartition) -> int:
    return sum(map(len, lp.items.values())) + sum(map(len, lp.minus_items.values()))

