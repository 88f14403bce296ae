"""Least fixed points of equation systems over finite-height domains."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

from .semantics import EquationSystem, evaluate


class SolverError(RuntimeError):
    """Raised on a non-monotone step or when the update cap is exceeded."""


@dataclass
class SolverStats:
    evaluations: int = 0
    updates: dict = field(default_factory=dict)

    @property
    def total_updates(self) -> int:
        return sum(self.updates.values())


@dataclass
class Solution:
    values: dict
    stats: SolverStats

    def __getitem__(self, index):
        return self.values[index]


class _Worklist:
    """Set-like worklist; ``order`` is "ordered" (smallest index first), "fifo" or "lifo"."""

    def __init__(self, order: str, rank: dict):
        if order not in ("ordered", "fifo", "lifo"):
            raise ValueError(f"unknown worklist order {order!r}")
        self.order = order
        self.rank = rank
        self.members = set()
        self.items = [] if order == "ordered" else deque()

    def push(self, index):
        if index in self.members:
            return
        self.members.add(index)
        if self.order == "ordered":
            heapq.heappush(self.items, (self.rank[index], index))
        else:
            self.items.append(index)

    def pop(self):
        if self.order == "ordered":
            _, index = heapq.heappop(self.items)
        elif self.order == "fifo":
            index = self.items.popleft()
        else:
            index = self.items.pop()
        self.members.discard(index)
        return index

    def __bool__(self):
        return bool(self.members)


def default_cap(system: EquationSystem, domain) -> int:
    return sum(domain.height(eq.universe) for eq in system.equations.values()) + len(system)


def bottom_vector(system: EquationSystem, domain) -> dict:
    return {idx: domain.bot(eq.universe) for idx, eq in system.equations.items()}


def solve(system: EquationSystem, domain, order: str = "ordered", cap: int | None = None) -> Solution:
    """Dependency-driven worklist iteration from bottom."""
    cap = default_cap(system, domain) if cap is None else cap
    values = bottom_vector(system, domain)
    stats = SolverStats(updates={idx: 0 for idx in system.indices})
    work = _Worklist(order, system.order)
    for idx in system.indices:
        work.push(idx)
    while work:
        idx = work.pop()
        stats.evaluations += 1
        new = evaluate(system, idx, values, domain)
        old = values[idx]
        if new == old:
            continue
        if not domain.leq(old, new):
            raise SolverError(f"non-monotone update at {idx}: {domain.render(old)} -> {domain.render(new)}")
        values[idx] = new
        stats.updates[idx] += 1
        if stats.total_updates > cap:
            raise SolverError(f"update cap {cap} exceeded; the domain is not finite-height or not monotone")
        for dep in system.dependents[idx]:
            work.push(dep)
    return Solution(values, stats)


def jacobi(system: EquationSystem, domain, max_rounds: int | None = None) -> dict:
    """Naive simultaneous iteration: re-evaluate every equation until stable."""
    max_rounds = default_cap(system, domain) + 1 if max_rounds is None else max_rounds
    values = bottom_vector(system, domain)
    for _ in range(max_rounds):
        new = {idx: evaluate(system, idx, values, domain) for idx in system.indices}
        if new == values:
            return values
        values = new
    raise SolverError("Jacobi iteration did not stabilise")


def verify_fixpoint(system: EquationSystem, values: dict, domain) -> bool:
    return all(evaluate(system, idx, values, domain) == values[idx] for idx in system.indices)
