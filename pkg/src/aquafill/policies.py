"""Online allocation policies, seeded runs, and exact or sampled expected loads.

A policy sees the arrivals so far (with its own past allocations) and the
current loads, never the future. Randomness is injected: every run owns a
``numpy.random.Generator`` and a private copy of the policy object.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import LoadVector, to_rational
from .errors import (
    ExactUnavailable,
    InvalidParameter,
    PolicyInfeasibleOutput,
    UnsupportedDimension,
)
from .sequences import Arrival, RequestSequence, validate
from .waterfill import AllocationTrace, build_trace, water_fill_step

MAX_BRANCHES = 4096


class Policy:
    """Base class. Subclasses implement :meth:`step`.

    ``deterministic`` policies ignore the generator entirely.
    ``finite_support`` policies draw all their randomness in :meth:`start`
    from finitely many outcomes, listed by :meth:`branches`.
    """

    name = "policy"
    deterministic = True
    finite_support = True

    def start(self, n: int, rng: np.random.Generator) -> None:
        """Reset per-run state before the first arrival."""

    def step(self, history: Sequence, arrival: Arrival, loads: LoadVector,
             rng: np.random.Generator) -> LoadVector:
        raise NotImplementedError

    def branches(self, n: int) -> list:
        """``[(probability, deterministic policy), ...]`` covering all outcomes."""
        if self.deterministic:
            return [(Fraction(1), self)]
        raise ExactUnavailable(f"policy {self.name!r} has no finite branch list")

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class WaterFillingPolicy(Policy):
    name = "wf"

    def step(self, history, arrival, loads, rng):
        return water_fill_step(arrival.neighbors, arrival.quantity, loads).allocation


class ProportionalPolicy(Policy):
    """Equal split of each arrival over its neighbors."""

    name = "proportional"

    def step(self, history, arrival, loads, rng):
        share = arrival.quantity / len(arrival.neighbors)
        return LoadVector(share if i in arrival.neighbors else 0
                          for i in range(1, len(loads) + 1))


class GreedyLowestIndexPolicy(Policy):
    """Everything to the smallest-index neighbor."""

    name = "greedy-lowest"

    def step(self, history, arrival, loads, rng):
        target = min(arrival.neighbors)
        return LoadVector(arrival.quantity if i == target else 0
                          for i in range(1, len(loads) + 1))


THRESHOLD = Fraction(3, 4)


class ThresholdGuardPolicy(Policy):
    """Two-node policy with a uniformly random primary node.

    Arrivals adjacent to both nodes top the primary up to load 3/4 and send
    the rest to the other node; single-neighbor arrivals are forced.
    """

    name = "threshold-guard"

    def __init__(self, primary: Optional[int] = None):
        if primary not in (None, 1, 2):
            raise InvalidParameter("primary must be 1 or 2")
        self.fixed = primary
        self.primary = primary

    @property
    def deterministic(self) -> bool:
        return self.fixed is not None

    def start(self, n, rng):
        if n != 2:
            raise UnsupportedDimension(f"threshold-guard needs n = 2, got n = {n}")
        self.primary = self.fixed if self.fixed is not None else int(rng.integers(1, 3))

    def step(self, history, arrival, loads, rng):
        q = arrival.quantity
        if len(arrival.neighbors) == 1:
            (only,) = arrival.neighbors
            return LoadVector(q if i == only else 0 for i in (1, 2))
        u = self.primary
        to_primary = min(q, max(Fraction(0), THRESHOLD - loads[u - 1]))
        x = [q - to_primary, q - to_primary]
        x[u - 1] = to_primary
        return LoadVector(x)

    def branches(self, n):
        if n != 2:
            raise UnsupportedDimension(f"threshold-guard needs n = 2, got n = {n}")
        if self.fixed is not None:
            return [(Fraction(1), self)]
        return [(Fraction(1, 2), ThresholdGuardPolicy(1)),
                (Fraction(1, 2), ThresholdGuardPolicy(2))]

    def __repr__(self) -> str:
        return f"ThresholdGuardPolicy(primary={self.fixed})"


class RandomSplitPolicy(Policy):
    """Fresh random rational weights for every arrival (infinite support)."""

    name = "random-split"
    deterministic = False
    finite_support = False

    def __init__(self, resolution: int = 12):
        if resolution < 1:
            raise InvalidParameter("resolution must be positive")
        self.resolution = resolution

    def step(self, history, arrival, loads, rng):
        nbrs = sorted(arrival.neighbors)
        w = [int(k) + 1 for k in rng.integers(0, self.resolution, size=len(nbrs))]
        total = sum(w)
        x = [Fraction(0)] * len(loads)
        for i, k in zip(nbrs, w):
            x[i - 1] = arrival.quantity * k / total
        return LoadVector(x)


POLICIES = {
    "wf": WaterFillingPolicy,
    "proportional": ProportionalPolicy,
    "greedy-lowest": GreedyLowestIndexPolicy,
    "threshold-guard": ThresholdGuardPolicy,
    "random-split": RandomSplitPolicy,
}


def make_policy(name: str) -> Policy:
    try:
        return POLICIES[name]()
    except KeyError:
        raise InvalidParameter(
            f"unknown policy {name!r}; choose from {', '.join(POLICIES)}") from None


# -- running -----------------------------------------------------------------


def _check_step(arrival: Arrival, x, n: int, t: int, policy: Policy) -> LoadVector:
    try:
        x = x if isinstance(x, LoadVector) else LoadVector(to_rational(v) for v in x)
    except (TypeError, ValueError) as exc:
        raise PolicyInfeasibleOutput(f"{policy!r} at arrival {t}: {exc}") from None
    if len(x) != n:
        raise PolicyInfeasibleOutput(f"{policy!r} at arrival {t}: length {len(x)} != {n}")
    stray = [i for i in range(1, n + 1) if x[i - 1] != 0 and i not in arrival.neighbors]
    if stray:
        raise PolicyInfeasibleOutput(f"{policy!r} at arrival {t}: mass on non-neighbors {stray}")
    if x.total() != arrival.quantity:
        raise PolicyInfeasibleOutput(
            f"{policy!r} at arrival {t}: allocated {x.total()} of {arrival.quantity}")
    return x


class PolicyRun:
    """One seeded run that can be fed arrivals one at a time."""

    def __init__(self, n: int, policy: Policy, rng: np.random.Generator):
        self.n = n
        self.policy = copy.deepcopy(policy)
        self.rng = rng
        self.history: list = []
        self.loads = LoadVector.zeros(n)
        self.policy.start(n, rng)

    def advance(self, arrival: Arrival) -> LoadVector:
        t = len(self.history) + 1
        x = self.policy.step(tuple(self.history), arrival, self.loads, self.rng)
        x = _check_step(arrival, x, self.n, t, self.policy)
        self.history.append((arrival, x))
        self.loads = self.loads + x
        return x


def run_policy(E: RequestSequence, P: Policy, seed=0) -> AllocationTrace:
    validate(E)
    run = PolicyRun(E.n, P, np.random.default_rng(seed))
    allocations = [run.advance(a) for a in E.arrivals]
    return build_trace(E, allocations)


# -- expectations ------------------------------------------------------------


@dataclass(frozen=True)
class ExpectationMode:
    kind: str = "exact"
    samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "monte_carlo"):
            raise InvalidParameter(f"unknown expectation mode {self.kind!r}")
        if self.samples < 1:
            raise InvalidParameter("samples must be at least 1")

    @classmethod
    def exact(cls) -> "ExpectationMode":
        return cls("exact")

    @classmethod
    def monte_carlo(cls, samples: int, seed: int = 0) -> "ExpectationMode":
        return cls("monte_carlo", samples, seed)

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"


EXACT = ExpectationMode.exact()


class PolicyEnsemble:
    """Weighted family of runs advanced in lockstep.

    Exact mode holds one run per branch of a finite-support policy; Monte
    Carlo mode holds ``samples`` runs, run ``k`` seeded with ``seed + k``.
    """

    def __init__(self, n: int, policy: Policy, mode: ExpectationMode = EXACT):
        self.n = n
        self.mode = mode
        if mode.is_exact:
            if policy.deterministic:
                branches = [(Fraction(1), policy)]
            elif policy.finite_support:
                branches = policy.branches(n)
            else:
                raise ExactUnavailable(
                    f"policy {policy.name!r} has infinite support; use Monte Carlo")
            if len(branches) > MAX_BRANCHES:
                raise ExactUnavailable(f"{len(branches)} branches exceed {MAX_BRANCHES}")
            self.members = [(w, PolicyRun(n, p, np.random.default_rng(0)))
                            for w, p in branches]
        else:
            w = Fraction(1, mode.samples)
            self.members = [(w, PolicyRun(n, policy, np.random.default_rng(mode.seed + k)))
                            for k in range(mode.samples)]

    def advance(self, arrival: Arrival) -> LoadVector:
        for _, run in self.members:
            run.advance(arrival)
        return self.mean_loads()

    def mean_loads(self) -> LoadVector:
        total = [Fraction(0)] * self.n
        for w, run in self.members:
            for i, v in enumerate(run.loads):
                total[i] += w * v
        return LoadVector(total)

    def distribution(self) -> list:
        return [(w, run.loads) for w, run in self.members]

    def standard_error(self) -> np.ndarray:
        samples = np.array([run.loads.to_floats() for _, run in self.members])
        if len(samples) < 2:
            return np.zeros(self.n)
        return samples.std(axis=0, ddof=1) / np.sqrt(len(samples))


@dataclass(frozen=True)
class ExpectedLoads:
    steps: tuple                     # expected loads after each arrival
    samples: Optional[int]           # None in exact mode
    stderr: Optional[np.ndarray] = None

    @property
    def final(self) -> LoadVector:
        return self.steps[-1]


def expected_loads(E: RequestSequence, P: Policy,
                   mode: ExpectationMode = EXACT) -> ExpectedLoads:
    validate(E)
    ensemble = PolicyEnsemble(E.n, P, mode)
    steps = tuple(ensemble.advance(a) for a in E.arrivals)
    if mode.is_exact:
        return ExpectedLoads(steps, None)
    return ExpectedLoads(steps, mode.samples, ensemble.standard_error())


def final_load_distribution(E: RequestSequence, P: Policy,
                            mode: ExpectationMode = EXACT) -> list:
    """``[(weight, final loads), ...]`` over branches or samples."""
    validate(E)
    ensemble = PolicyEnsemble(E.n, P, mode)
    for a in E.arrivals:
        ensemble.advance(a)
    return ensemble.distribution()
