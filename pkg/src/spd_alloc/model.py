"""Core domain types: instances, integral and fractional allocations, profiles.

Agents and items are 0-indexed everywhere in the Python API and 1-indexed in
every text format this package reads or writes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Profile = tuple
"""Per-agent incomes; ints for integral allocations, Fractions otherwise."""


class InstanceError(ValueError):
    """Raised for malformed instance data."""


@dataclass(frozen=True, eq=False)
class Instance:
    """n agents, m items and a binary like-matrix stored agent-major."""

    likes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.likes)
        if arr.ndim != 2:
            raise InstanceError(f"like-matrix must be 2-dimensional, got shape {arr.shape}")
        n, m = arr.shape
        if n < 1 or m < 1:
            raise InstanceError(f"need at least one agent and one item, got n={n}, m={m}")
        if not np.isin(arr, (0, 1)).all():
            raise InstanceError("like-matrix entries must be 0 or 1")
        arr = arr.astype(bool)
        arr.setflags(write=False)
        object.__setattr__(self, "likes", arr)

    @property
    def num_agents(self) -> int:
        return self.likes.shape[0]

    @property
    def num_items(self) -> int:
        return self.likes.shape[1]

    n = num_agents
    m = num_items

    @cached_property
    def likers(self) -> tuple[tuple[int, ...], ...]:
        """likers[j] = agents who like item j, ascending."""
        return tuple(tuple(int(i) for i in np.flatnonzero(col)) for col in self.likes.T)

    @cached_property
    def liked(self) -> tuple[frozenset[int], ...]:
        """liked[i] = items agent i likes."""
        return tuple(frozenset(int(j) for j in np.flatnonzero(row)) for row in self.likes)

    @cached_property
    def likable_items(self) -> tuple[int, ...]:
        return tuple(j for j, who in enumerate(self.likers) if who)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.likes.shape == other.likes.shape and bool((self.likes == other.likes).all())

    def __hash__(self):
        return hash((self.likes.shape, self.likes.tobytes()))

    def __repr__(self):
        return f"Instance(n={self.n}, m={self.m})"


def validate_instance(raw) -> Instance:
    """Build an :class:`Instance` from a nested sequence or array (agent-major).

    Ragged rows, non-binary entries and empty dimensions raise
    :class:`InstanceError`.
    """
    rows = list(raw)
    if not rows:
        raise InstanceError("no agents")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InstanceError(f"dimension mismatch: row lengths {sorted(widths)}")
    for r in rows:
        for x in r:
            if x not in (0, 1):
                raise InstanceError(f"non-binary entry {x!r}")
    return Instance(np.array(rows, dtype=np.int64).reshape(len(rows), widths.pop()))


def parse_instance(text: str) -> Instance:
    """Parse the v1 text format: header ``n m`` then n rows of m characters in {0,1}."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines:
        raise InstanceError("empty input")
    header = lines[0].split()
    if len(header) != 2 or not all(tok.isdigit() for tok in header):
        raise InstanceError(f"malformed header {lines[0]!r}")
    n, m = int(header[0]), int(header[1])
    if n < 1 or m < 1:
        raise InstanceError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    body = lines[1:]
    if len(body) != n:
        raise InstanceError(f"expected {n} agent rows, got {len(body)}")
    rows = []
    for k, ln in enumerate(body, start=1):
        if len(ln) != m:
            raise InstanceError(f"agent {k}: expected {m} characters, got {len(ln)}")
        if set(ln) - {"0", "1"}:
            raise InstanceError(f"agent {k}: non-binary entry in {ln!r}")
        rows.append([int(c) for c in ln])
    return validate_instance(rows)


def format_instance(inst: Instance) -> str:
    rows = ["".join("1" if x else "0" for x in row) for row in inst.likes]
    return "\n".join([f"{inst.n} {inst.m}", *rows]) + "\n"


def from_item_major(matrix: Sequence[Sequence[int]]) -> Instance:
    """Build an instance from an item-major matrix (row per item, column per agent)."""
    return validate_instance(np.asarray(matrix).T.tolist())


# ---------------------------------------------------------------- allocations


@dataclass(frozen=True)
class Allocation:
    """Integral allocation: one bundle (frozenset of item indices) per agent."""

    bundles: tuple[frozenset[int], ...]

    def __post_init__(self):
        bundles = tuple(frozenset(b) for b in self.bundles)
        seen: set[int] = set()
        for b in bundles:
            if seen & b:
                raise ValueError(f"bundles overlap on items {sorted(seen & b)}")
            seen |= b
        object.__setattr__(self, "bundles", bundles)

    @classmethod
    def empty(cls, n: int) -> Allocation:
        return cls(tuple(frozenset() for _ in range(n)))

    @classmethod
    def from_owner(cls, owner: Sequence[int | None], n: int) -> Allocation:
        """owner[j] is the agent holding item j, or None/-1 if unallocated."""
        bundles: list[set[int]] = [set() for _ in range(n)]
        for j, i in enumerate(owner):
            if i is not None and i >= 0:
                bundles[i].add(j)
        return cls(tuple(frozenset(b) for b in bundles))

    @property
    def num_agents(self) -> int:
        return len(self.bundles)

    def owner(self) -> dict[int, int]:
        return {j: i for i, b in enumerate(self.bundles) for j in b}

    def allocated_items(self) -> frozenset[int]:
        return frozenset().union(*self.bundles)


@dataclass(frozen=True)
class FractionalAllocation:
    """Exact shares of divisible items: ``shares[(item, agent)]`` in (0, 1]."""

    num_agents: int
    shares: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (j, i), amt in self.shares.items():
            amt = Fraction(amt)
            if amt < 0 or amt > 1:
                raise ValueError(f"share of item {j} for agent {i} outside [0, 1]: {amt}")
            if amt:
                clean[(int(j), int(i))] = amt
        totals: dict[int, Fraction] = {}
        for (j, _), amt in clean.items():
            totals[j] = totals.get(j, Fraction(0)) + amt
            if totals[j] > 1:
                raise ValueError(f"item {j} is over-allocated: total share {totals[j]}")
        object.__setattr__(self, "shares", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.num_agents, tuple(self.shares.items())))

    def item_total(self, j: int) -> Fraction:
        return sum((a for (jj, _), a in self.shares.items() if jj == j), Fraction(0))

    def holders(self, j: int) -> dict[int, Fraction]:
        return {i: a for (jj, i), a in self.shares.items() if jj == j}

    @classmethod
    def from_allocation(cls, alloc: Allocation) -> FractionalAllocation:
        return cls(alloc.num_agents, {(j, i): Fraction(1) for i, b in enumerate(alloc.bundles) for j in b})

    @classmethod
    def from_item_major(cls, matrix: Sequence[Sequence]) -> FractionalAllocation:
        """Read a (row per item, column per agent) share matrix."""
        n = len(matrix[0])
        return cls(n, {(j, i): Fraction(x) for j, row in enumerate(matrix) for i, x in enumerate(row) if x})


AnyAllocation = Union[Allocation, FractionalAllocation]


def _check_ranges(inst: Instance, alloc: AnyAllocation):
    if alloc.num_agents != inst.n:
        raise ValueError(f"allocation has {alloc.num_agents} agents, instance has {inst.n}")
    if isinstance(alloc, Allocation):
        pairs = ((j, i) for i, b in enumerate(alloc.bundles) for j in b)
    else:
        pairs = alloc.shares.keys()
    for j, i in pairs:
        if not 0 <= j < inst.m or not 0 <= i < inst.n:
            raise ValueError(f"allocation references item {j} / agent {i} outside the instance")


def profile(inst: Instance, alloc: AnyAllocation) -> Profile:
    """Per-agent incomes: bundle sizes, or summed shares for fractional allocations."""
    _check_ranges(inst, alloc)
    if isinstance(alloc, Allocation):
        return tuple(len(b) for b in alloc.bundles)
    inc = [Fraction(0)] * inst.n
    for (_, i), a in alloc.shares.items():
        inc[i] += a
    return tuple(inc)


def max_usw(inst: Instance) -> int:
    """Maximum utilitarian welfare: the number of items at least one agent likes."""
    return int(inst.likes.any(axis=0).sum())


def is_clean(inst: Instance, alloc: AnyAllocation) -> bool:
    _check_ranges(inst, alloc)
    if isinstance(alloc, Allocation):
        return all(inst.likes[i, j] for i, b in enumerate(alloc.bundles) for j in b)
    return all(inst.likes[i, j] for (j, i) in alloc.shares)


def is_max_usw(inst: Instance, alloc: AnyAllocation) -> bool:
    """True when every likable item is fully allocated (clean allocations only)."""
    if isinstance(alloc, Allocation):
        allocated = alloc.allocated_items()
        return all(j in allocated for j in inst.likable_items)
    totals = [Fraction(0)] * inst.m
    for (j, _), a in alloc.shares.items():
        totals[j] += a
    if any(t > 1 for t in totals):
        return False
    return all(totals[j] == 1 for j in inst.likable_items)


def check_allocation(inst: Instance, alloc: AnyAllocation):
    """Raise ValueError unless *alloc* is clean and max-USW for *inst*."""
    if not is_clean(inst, alloc):
        raise ValueError("allocation is not clean")
    if not is_max_usw(inst, alloc):
        raise ValueError("allocation is not max-USW")


# ------------------------------------------------------------------ rationals


def format_rational(x) -> str:
    """``num/den`` in lowest terms, or a bare integer when den == 1."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    return Fraction(text)


def format_profile(p: Iterable) -> str:
    return " ".join(format_rational(x) for x in p)


def format_allocation(alloc: AnyAllocation) -> str:
    """Integral: ``agent i: j1 j2 ...``; fractional: ``item j agent i num/den`` per share."""
    if isinstance(alloc, Allocation):
        lines = [f"agent {i + 1}:" + "".join(f" {j + 1}" for j in sorted(b)) for i, b in enumerate(alloc.bundles)]
    else:
        lines = [f"item {j + 1} agent {i + 1} {format_rational(a)}" for (j, i), a in sorted(alloc.shares.items())]
    return "\n".join(lines)
