"""Water-filling: split each arrival so the lowest neighbor loads rise together."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import LoadVector, format_rational, to_rational
from .errors import EmptyNeighborhood, IndexOutOfRange, NonpositiveQuantity
from .sequences import RequestSequence, validate


@dataclass(frozen=True)
class StepResult:
    allocation: LoadVector
    level: Fraction
    support: frozenset


def water_fill_step(N, q, loads: Sequence) -> StepResult:
    """Exact water level by scanning the sorted neighbor loads.

    With neighbor loads ``l_(1) <= l_(2) <= ...`` the level after filling the
    ``k`` lowest is ``(q + sum of those k loads) / k``; the right ``k`` is the
    first one whose level does not reach the next breakpoint.
    """
    N = frozenset(N)
    q = to_rational(q)
    loads = loads if isinstance(loads, LoadVector) else LoadVector(loads)
    if not N:
        raise EmptyNeighborhood("water-filling needs a nonempty neighborhood")
    if q <= 0:
        raise NonpositiveQuantity(f"quantity {q} is not positive")
    if any(not 1 <= i <= len(loads) for i in N):
        raise IndexOutOfRange(f"neighbors {sorted(N)} outside 1..{len(loads)}")

    ordered = sorted(N, key=lambda i: (loads[i - 1], i))
    level = Fraction(0)
    filled = Fraction(0)
    for k, i in enumerate(ordered, start=1):
        filled += loads[i - 1]
        level = (q + filled) / k
        if k == len(ordered) or level <= loads[ordered[k] - 1]:
            break
    x = [Fraction(0)] * len(loads)
    for i in N:
        if loads[i - 1] < level:
            x[i - 1] = level - loads[i - 1]
    support = frozenset(i for i in N if x[i - 1] > 0)
    return StepResult(LoadVector(x), level, support)


@dataclass(frozen=True)
class AllocationTrace:
    """Everything a sequential run produces.

    ``loads[t - 1]`` is the load vector right after arrival ``t``. ``heights``
    holds the common post-step load of each support, or ``None`` for an
    arrival whose support does not end level (possible for non-WF policies).
    """

    sequence: RequestSequence
    allocations: tuple
    loads: tuple
    heights: tuple
    supports: tuple

    @property
    def final_loads(self) -> LoadVector:
        return self.loads[-1]

    @property
    def active_edges(self) -> frozenset:
        return frozenset((i, t) for t, s in enumerate(self.supports, start=1) for i in s)

    @property
    def inactive_edges(self) -> frozenset:
        return self.sequence.edges() - self.active_edges

    def inactive_by_arrival(self) -> tuple:
        """``I_t``: neighbors of arrival ``t`` that received nothing."""
        return tuple(a.neighbors - s for a, s in zip(self.sequence.arrivals, self.supports))

    def to_dict(self) -> dict:
        return {
            "n": self.sequence.n,
            "allocations": [x.to_json() for x in self.allocations],
            "loads": [v.to_json() for v in self.loads],
            "heights": [None if h is None else format_rational(h) for h in self.heights],
            "active_edges": sorted([i, t] for i, t in self.active_edges),
            "inactive_edges": sorted([i, t] for i, t in self.inactive_edges),
            "final_loads": self.final_loads.to_json(),
        }


def common_level(support: frozenset, loads: LoadVector) -> Optional[Fraction]:
    values = {loads[i - 1] for i in support}
    return values.pop() if len(values) == 1 else None


def build_trace(E: RequestSequence, allocations: Sequence) -> AllocationTrace:
    """Assemble a trace from per-arrival allocations (assumed feasible)."""
    current = LoadVector.zeros(E.n)
    loads, heights, supports = [], [], []
    for x in allocations:
        current = current + x
        support = frozenset(i for i in range(1, E.n + 1) if x[i - 1] > 0)
        loads.append(current)
        supports.append(support)
        heights.append(common_level(support, current))
    return AllocationTrace(E, tuple(allocations), tuple(loads), tuple(heights), tuple(supports))


def run_waterfill(E: RequestSequence) -> AllocationTrace:
    validate(E)
    current = LoadVector.zeros(E.n)
    allocations, loads, heights, supports = [], [], [], []
    for a in E.arrivals:
        step = water_fill_step(a.neighbors, a.quantity, current)
        current = current + step.allocation
        allocations.append(step.allocation)
        loads.append(current)
        heights.append(step.level)
        supports.append(step.support)
    return AllocationTrace(E, tuple(allocations), tuple(loads), tuple(heights), tuple(supports))


def waterfill_loads(E: RequestSequence) -> LoadVector:
    return run_waterfill(E).final_loads
