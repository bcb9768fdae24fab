"""The majorization-minimal hindsight load vector and random feasible allocations.

Feasible load vectors of a sequence form the base polytope of the coverage
function ``f(S) = sum of q_t over arrivals touching S``. Its least-majorized
point is built level by level: the smallest density ``f(S)/|S|`` fixes the
lowest level, the maximal set achieving it is frozen at that level, and the
function is contracted onto the remaining nodes.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .core import LoadVector
from .errors import IndexOutOfRange, InstanceTooLarge
from .sequences import RequestSequence, validate

DEFAULT_MAX_N = 20
_INT64_SAFE = 2 ** 56


def max_n() -> int:
    """Subset-enumeration guard; ``AQUAFILL_MAX_N`` overrides the default."""
    raw = os.environ.get("AQUAFILL_MAX_N")
    return int(raw) if raw else DEFAULT_MAX_N


def _mask(nodes: Iterable[int]) -> int:
    m = 0
    for i in nodes:
        m |= 1 << (i - 1)
    return m


def rank(E: RequestSequence, S: Iterable[int]) -> Fraction:
    S = frozenset(S)
    bad = [i for i in S if not 1 <= i <= E.n]
    if bad:
        raise IndexOutOfRange(f"offline nodes {sorted(bad)} outside 1..{E.n}")
    return sum((a.quantity for a in E.arrivals if a.neighbors & S), Fraction(0))


class RankFunction:
    """Memoized coverage function of a sequence (one owner per instance)."""

    def __init__(self, E: RequestSequence):
        self.sequence = E
        self._cache: dict = {}

    def __call__(self, S: Iterable[int]) -> Fraction:
        key = frozenset(S)
        if key not in self._cache:
            self._cache[key] = rank(self.sequence, key)
        return self._cache[key]


def coverage_table(E: RequestSequence):
    """Integer table ``F[mask] = scale * f(mask)`` over all ``2**n`` subsets.

    Returns ``(F, scale)``. Computed from a subset-sum transform of the
    arrival masses: ``f(S) = q - (mass of arrivals inside the complement)``.
    """
    n = E.n
    scale = math.lcm(*(a.quantity.denominator for a in E.arrivals))
    weights = [int(a.quantity * scale) for a in E.arrivals]
    total = sum(weights)
    dtype = np.int64 if total * (n + 1) < _INT64_SAFE else object
    inside = np.zeros(1 << n, dtype=dtype)
    for a, w in zip(E.arrivals, weights):
        inside[_mask(a.neighbors)] += w
    cube = inside.reshape((2,) * n) if n else inside
    for axis in range(n):
        cube = np.cumsum(cube, axis=axis, dtype=dtype)
    inside = cube.reshape(-1)
    full = (1 << n) - 1
    F = total - inside[full ^ np.arange(1 << n)]
    return F, scale


def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    pc = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        pc += (idx >> b) & 1
    return pc


@dataclass(frozen=True)
class HindsightSolution:
    loads: LoadVector
    levels: tuple          # strictly increasing water levels
    blocks: tuple          # frozenset of nodes frozen at each level
    allocation: tuple      # witness per-arrival allocation


def _tight_levels(E: RequestSequence):
    n = E.n
    F, scale = coverage_table(E)
    idx = np.arange(1 << n)
    pc = _popcounts(n)
    frozen = 0
    levels, blocks = [], []
    while frozen != (1 << n) - 1:
        valid = ((idx & frozen) == 0) & (idx != 0)
        cand = idx[valid]
        gain = F[cand | frozen] - F[frozen]
        sizes = pc[cand].astype(F.dtype)
        best = None
        for s in range(1, n + 1):
            sel = sizes == s
            if sel.any():
                ratio = Fraction(int(gain[sel].min()), s)
                if best is None or ratio < best:
                    best = ratio
        num, den = best.numerator, best.denominator
        hits = cand[gain * den == sizes * num]
        block = int(np.bitwise_or.reduce(hits))
        frozen |= block
        levels.append(best / scale)
        blocks.append(frozenset(i + 1 for i in range(n) if block >> i & 1))
    return levels, blocks


def _max_flow_allocation(E: RequestSequence, targets: LoadVector) -> tuple:
    """Per-arrival allocation with node totals ``targets`` (exact Edmonds-Karp)."""
    m, n = E.m, E.n
    source, sink = 0, m + n + 1
    size = m + n + 2
    cap = [dict() for _ in range(size)]

    def add(u, v, c):
        cap[u][v] = cap[u].get(v, Fraction(0)) + c
        cap[v].setdefault(u, Fraction(0))

    for t, a in enumerate(E.arrivals, start=1):
        add(source, t, a.quantity)
        for i in sorted(a.neighbors):
            add(t, m + i, a.quantity)
    for i in range(1, n + 1):
        if targets[i - 1] > 0:
            add(m + i, sink, targets[i - 1])
    original = [dict(c) for c in cap]

    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in sorted(cap[u]):
                if v not in parent and cap[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        bottleneck, v = None, sink
        while parent[v] is not None:
            u = parent[v]
            bottleneck = cap[u][v] if bottleneck is None else min(bottleneck, cap[u][v])
            v = u
        v = sink
        while parent[v] is not None:
            u = parent[v]
            cap[u][v] -= bottleneck
            cap[v][u] += bottleneck
            v = u

    allocation = []
    for t in range(1, m + 1):
        x = [Fraction(0)] * n
        for i in E.arrivals[t - 1].neighbors:
            flow = original[t][m + i] - cap[t][m + i]
            x[i - 1] = flow
        allocation.append(LoadVector(x))
    return tuple(allocation)


def solve_hindsight(E: RequestSequence, guard: Optional[int] = None) -> HindsightSolution:
    validate(E)
    limit = max_n() if guard is None else guard
    if E.n > limit:
        raise InstanceTooLarge(
            f"n={E.n} exceeds the subset-enumeration guard {limit} (set AQUAFILL_MAX_N)")
    levels, blocks = _tight_levels(E)
    loads = [Fraction(0)] * E.n
    for level, block in zip(levels, blocks):
        for i in block:
            loads[i - 1] = level
    loads = LoadVector(loads)
    allocation = _max_flow_allocation(E, loads)
    return HindsightSolution(loads, tuple(levels), tuple(blocks), allocation)


def opt_hindsight(E: RequestSequence) -> LoadVector:
    return solve_hindsight(E).loads


def sample_feasible(E: RequestSequence, seed=0, resolution: int = 12) -> tuple:
    """Random rational point of each simplex ``Delta(N_t, q_t)``.

    Weights are integers in ``0..resolution``, so some neighbors may get
    nothing; this reaches the boundary of the simplex as well as its interior.
    """
    validate(E)
    rng = np.random.default_rng(seed)
    allocation = []
    for a in E.arrivals:
        nbrs = sorted(a.neighbors)
        w = [int(k) for k in rng.integers(0, resolution + 1, size=len(nbrs))]
        if not any(w):
            w[int(rng.integers(len(nbrs)))] = 1
        total = sum(w)
        x = [Fraction(0)] * E.n
        for i, k in zip(nbrs, w):
            x[i - 1] = a.quantity * k / total
        allocation.append(LoadVector(x))
    return tuple(allocation)
