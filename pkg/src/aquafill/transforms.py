"""Adversarial sequence transformations.

* :func:`nestify` turns any sequence into a nested one on which water-filling
  is no more equitable and the hindsight optimum no less equitable.
* :func:`policy_deviation` relabels a nested sequence so that a given policy
  ends up no more equitable than water-filling on the original.
* :func:`worstcase_upper_triangular` moves to the complete upper-triangular
  sequence with the same hindsight optimum.
* :func:`adaptive_game` plays the relabeling round by round against realized
  allocations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import LoadVector, format_rational
from .errors import NotNested
from .hindsight import opt_hindsight, solve_hindsight
from .policies import EXACT, ExpectationMode, Policy, PolicyEnsemble, PolicyRun
from .sequences import (
    Arrival,
    RequestSequence,
    induced_nested,
    is_nested,
    upper_triangular,
    validate,
)
from .waterfill import run_waterfill


def _require_nested(E: RequestSequence) -> None:
    validate(E)
    if not is_nested(E):
        raise NotNested("input sequence is not nested")


# -- nestify -------------------------------------------------------------------


@dataclass(frozen=True)
class NestifyAudit:
    """Intermediate artifacts of :func:`nestify`.

    ``order[k]`` is the original index of the arrival placed at position
    ``k + 1``; ``sigma[t - 1]`` is the new position of original arrival ``t``.
    """

    pruned: RequestSequence
    inactive: tuple
    heights: tuple
    order: tuple
    sigma: tuple
    permuted: RequestSequence
    output: RequestSequence
    mu: tuple

    @property
    def sigma_inverse(self) -> tuple:
        return self.order

    @property
    def pruned_edges(self) -> frozenset:
        return frozenset((i, t) for t, s in enumerate(self.inactive, start=1) for i in s)

    def to_dict(self) -> dict:
        return {
            "pruned": self.pruned.to_dict(),
            "inactive_edges": sorted([i, t] for i, t in self.pruned_edges),
            "heights": [format_rational(h) for h in self.heights],
            "order": list(self.order),
            "sigma": list(self.sigma),
            "permuted": self.permuted.to_dict(),
            "mu": list(self.mu),
            "output": self.output.to_dict(),
        }


def nestify(E: RequestSequence):
    """Prune inactive edges, sort arrivals by height, take the induced nested sequence.

    Equal heights are ordered latest arrival first.
    """
    validate(E)
    trace = run_waterfill(E)
    inactive = trace.inactive_by_arrival()
    pruned = RequestSequence(E.n, tuple(
        Arrival(a.neighbors - gone, a.quantity) for a, gone in zip(E.arrivals, inactive)))
    heights = run_waterfill(pruned).heights
    order = tuple(sorted(range(1, E.m + 1), key=lambda t: (heights[t - 1], -t)))
    sigma = [0] * E.m
    for pos, t in enumerate(order, start=1):
        sigma[t - 1] = pos
    permuted = RequestSequence(E.n, tuple(pruned.arrivals[t - 1] for t in order))
    output = induced_nested(permuted)
    audit = NestifyAudit(pruned, tuple(inactive), tuple(heights), order, tuple(sigma),
                         permuted, output, permuted.last_neighbor())
    return output, audit


# -- policy deviation and the adaptive game ------------------------------------


def removal_counts(E: RequestSequence) -> tuple:
    """``phi[t]`` for ``t = 0..m``: nodes whose last neighbor is arrival ``t``.

    ``phi[0]`` counts isolated nodes.
    """
    phi = [0] * (E.m + 1)
    for mu in E.last_neighbor():
        phi[mu] += 1
    return tuple(phi)


def _drop_lowest(active: list, loads, count: int) -> list:
    """The ``count`` active nodes of least load; ties drop the larger index."""
    ranked = sorted(active, key=lambda i: (loads[i - 1], -i))
    return ranked[:count]


@dataclass(frozen=True)
class DeviationAudit:
    phi: tuple
    removed: tuple        # removed[t] = nodes dropped after arrival t (t = 0 before play)
    loads: tuple          # expected (or realized) loads after each arrival
    relabel: tuple        # relabel[i - 1] = node of the output playing node i of the input
    samples: Optional[int] = None
    stderr: Optional[np.ndarray] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        out = {
            "phi": list(self.phi),
            "removed": [list(r) for r in self.removed],
            "loads": [v.to_json() for v in self.loads],
            "relabel": list(self.relabel),
        }
        if self.samples is not None:
            out["samples"] = self.samples
            out["stderr"] = [float(s) for s in self.stderr]
        return out


def _relabel(E: RequestSequence, removed: list) -> tuple:
    """Pair input nodes retiring at round ``t`` with output nodes removed then."""
    mu = E.last_neighbor()
    label = [0] * E.n
    for t, gone in enumerate(removed):
        src = [i for i in range(1, E.n + 1) if mu[i - 1] == t]
        for i, j in zip(src, sorted(gone)):
            label[i - 1] = j
    return tuple(label)


def _deviation_loop(E: RequestSequence, advance: Callable):
    phi = removal_counts(E)
    active = list(range(1, E.n + 1))
    zero = LoadVector.zeros(E.n)
    gone = _drop_lowest(active, zero, phi[0])
    removed = [tuple(sorted(gone))]
    active = [i for i in active if i not in gone]
    arrivals, history = [], []
    for t, a in enumerate(E.arrivals, start=1):
        arrival = Arrival(frozenset(active), a.quantity)
        arrivals.append(arrival)
        loads = advance(arrival)
        history.append(loads)
        gone = _drop_lowest(active, loads, phi[t])
        removed.append(tuple(sorted(gone)))
        active = [i for i in active if i not in gone]
    out = RequestSequence(E.n, tuple(arrivals))
    return out, phi, removed, history


def deviate(Et: RequestSequence, P: Policy, mode: ExpectationMode = EXACT):
    """:func:`policy_deviation` plus its :class:`DeviationAudit`."""
    _require_nested(Et)
    ensemble = PolicyEnsemble(Et.n, P, mode)
    out, phi, removed, history = _deviation_loop(Et, ensemble.advance)
    samples = None if mode.is_exact else mode.samples
    stderr = None if mode.is_exact else ensemble.standard_error()
    audit = DeviationAudit(phi, tuple(removed), tuple(history),
                           _relabel(Et, removed), samples, stderr)
    return out, audit


def policy_deviation(Et: RequestSequence, P: Policy,
                     mode: ExpectationMode = EXACT) -> RequestSequence:
    """Relabel a nested sequence against ``P``'s expected loads.

    After each arrival the adversary retires as many nodes as the input
    retires there, always picking those with the least expected load.
    """
    return deviate(Et, P, mode)[0]


@dataclass(frozen=True)
class GameTranscript:
    realized: RequestSequence
    allocations: tuple
    loads: tuple
    removed: tuple
    relabel: tuple
    final_loads: LoadVector
    realized_opt: LoadVector

    @property
    def rounds(self) -> int:
        return self.realized.m

    def to_dict(self) -> dict:
        return {
            "realized": self.realized.to_dict(),
            "allocations": [x.to_json() for x in self.allocations],
            "loads": [v.to_json() for v in self.loads],
            "removed": [list(r) for r in self.removed],
            "relabel": list(self.relabel),
            "final_loads": self.final_loads.to_json(),
            "realized_opt": self.realized_opt.to_json(),
        }


def adaptive_game(P: Policy, seed_sequence: RequestSequence, seed=0) -> GameTranscript:
    """Round-by-round relabeling against the policy's realized loads."""
    _require_nested(seed_sequence)
    run = PolicyRun(seed_sequence.n, P, np.random.default_rng(seed))

    def advance(arrival):
        run.advance(arrival)
        return run.loads

    realized, _, removed, history = _deviation_loop(seed_sequence, advance)
    allocations = tuple(x for _, x in run.history)
    return GameTranscript(realized, allocations, tuple(history), tuple(removed),
                          _relabel(seed_sequence, removed), run.loads,
                          opt_hindsight(realized))


# -- worst case ------------------------------------------------------------------


def worstcase_upper_triangular(Et: RequestSequence) -> RequestSequence:
    """Complete upper-triangular sequence whose quantities are the sorted optimum.

    Zero optimum entries (isolated nodes) would be zero-quantity arrivals;
    they are left out, which keeps water-filling equal to ``H q'``.
    """
    _require_nested(Et)
    q = sorted(opt_hindsight(Et))
    zeros = sum(1 for v in q if v == 0)
    full = upper_triangular(q)
    return RequestSequence(Et.n, full.arrivals[zeros:])


def worstcase_quantities(Et: RequestSequence) -> LoadVector:
    """``q'``: the sorted optimum, zeros included, length ``n``."""
    _require_nested(Et)
    return LoadVector(sorted(solve_hindsight(Et).loads))
