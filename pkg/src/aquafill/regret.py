"""Regret against the hindsight optimum and competitive ratios of water-filling.

On the complete upper-triangular sequence with sorted quantities ``l``,
water-filling ends at ``H l`` while the hindsight optimum is ``l`` itself.
Worst cases over all sequences therefore reduce to searches over sorted
vectors, which is what the numeric routines here do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .core import LoadVector, format_rational, harmonic_number, to_rational
from .errors import InvalidParameter, NotHomogeneous, UnknownObjective
from .hindsight import opt_hindsight
from .objectives import ObjectiveSpec, objective
from .policies import EXACT, ExpectationMode, Policy, final_load_distribution
from .sequences import RequestSequence

LOG_GAP_BOUND = 40.0


@dataclass(frozen=True)
class RegretReport:
    """Outcome of a regret evaluation or search.

    For searches, ``policy_value`` and ``hindsight_value`` are water-filling
    and optimum values at ``best_loads`` and ``regret`` is only a lower bound
    on the supremum (``lower_bound`` is set).
    """

    alpha: float
    objective: str
    domain: str
    policy_value: float
    hindsight_value: float
    regret: float
    best_loads: Optional[tuple] = None
    iterations: Optional[int] = None
    tolerance: Optional[float] = None
    lower_bound: bool = False
    samples: Optional[int] = None

    def to_dict(self) -> dict:
        out = {
            "alpha": self.alpha,
            "objective": self.objective,
            "domain": self.domain,
            "policy_value": self.policy_value,
            "hindsight_value": self.hindsight_value,
            "regret": self.regret,
        }
        if self.best_loads is not None:
            out["best_loads"] = list(self.best_loads)
            out["iterations"] = self.iterations
            out["tolerance"] = self.tolerance
            out["lower_bound"] = self.lower_bound
        if self.samples is not None:
            out["samples"] = self.samples
        return out


def combine(spec: ObjectiveSpec, alpha: float, policy_value: float,
            hindsight_value: float) -> float:
    if spec.maximize:
        return alpha * hindsight_value - policy_value
    return policy_value - alpha * hindsight_value


def alpha_regret(E: RequestSequence, P: Policy, spec: ObjectiveSpec, alpha: float,
                 mode: ExpectationMode = EXACT, name: str = "instance") -> RegretReport:
    """Regret of ``P`` on ``E`` with the policy side taken as ``E[f(loads)]``."""
    if not alpha > 0:
        raise InvalidParameter("alpha must be positive")
    dist = final_load_distribution(E, P, mode)
    policy_value = float(sum(float(w) * spec(loads) for w, loads in dist))
    hindsight_value = spec(opt_hindsight(E))
    return RegretReport(float(alpha), spec.label, name, policy_value, hindsight_value,
                        combine(spec, alpha, policy_value, hindsight_value),
                        samples=None if mode.is_exact else mode.samples)


# -- direct search -------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    starts: int = 32
    iterations: int = 400
    shrink: float = 0.5
    tolerance: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1 or self.iterations < 1:
            raise InvalidParameter("starts and iterations must be positive")
        if not 0 < self.shrink < 1:
            raise InvalidParameter("shrink must lie in (0, 1)")


@dataclass(frozen=True)
class SearchResult:
    value: float
    point: np.ndarray = field(compare=False)
    iterations: int


def compass_search(fun: Callable, lower: np.ndarray, upper: np.ndarray,
                   seeds: Sequence, config: SearchConfig) -> SearchResult:
    """Minimize ``fun`` over a box by multistart coordinate polling.

    Each start polls ``+-step`` along every coordinate, moves on the first
    improvement and halves the step (by ``shrink``) after a failed poll.
    Starts are the given seeds followed by uniform random points.
    """
    rng = np.random.default_rng(config.seed)
    dim = len(lower)
    starts = [np.clip(np.asarray(s, dtype=float), lower, upper) for s in seeds]
    while len(starts) < max(config.starts, len(seeds)):
        starts.append(rng.uniform(lower, upper))
    best = SearchResult(math.inf, starts[0], 0)
    total = 0

    def safe(x):
        v = fun(x)
        return v if math.isfinite(v) else math.inf

    for x in starts:
        fx = safe(x)
        step = (upper - lower) / 4.0
        for _ in range(config.iterations):
            total += 1
            improved = False
            for k in range(dim):
                for sign in (1.0, -1.0):
                    y = x.copy()
                    y[k] = min(max(y[k] + sign * step[k], lower[k]), upper[k])
                    fy = safe(y)
                    if fy < fx:
                        x, fx, improved = y, fy, True
                        break
            if not improved:
                step = step * config.shrink
                if step.max() < config.tolerance:
                    break
        if fx < best.value:
            best = SearchResult(fx, x, 0)
    return SearchResult(best.value, best.point, total)


# -- competitive ratios --------------------------------------------------------


def harmonic_apply(l: np.ndarray) -> np.ndarray:
    n = len(l)
    return np.cumsum(l / (n - np.arange(n)))


def _log_gap_profile(v: np.ndarray) -> np.ndarray:
    """Sorted profile with top entry 1 and ``l_i = l_{i+1} * exp(-v_i)``."""
    logs = -np.concatenate([np.cumsum(v[::-1])[::-1], [0.0]])
    return np.exp(logs)


def boundary_profiles(n: int, grid: int = 201) -> list:
    """The family ``(0, ..., 0, beta, 1, ..., 1)`` on a grid of ``beta``."""
    out = []
    for zeros in range(n):
        for beta in np.linspace(0.0, 1.0, grid):
            if zeros == n - 1 and beta == 0:
                continue
            l = np.ones(n)
            l[:zeros] = 0.0
            l[zeros] = beta
            out.append(l)
    return out


def _ratio(spec: ObjectiveSpec, l: np.ndarray) -> float:
    num, den = spec.func(harmonic_apply(l)), spec.func(l)
    if den == 0:
        return math.nan
    return num / den


def numeric_competitive_ratio(n: int, spec: ObjectiveSpec,
                              config: SearchConfig = SearchConfig()) -> float:
    """``inf f(Hl)/f(l)`` (maximization) or ``sup g(Hl)/g(l)`` over sorted ``l``.

    Profiles are parametrized by log gaps between consecutive entries, with
    the largest entry pinned to 1 (to the scale ``exp(s)`` times the capacity
    for capacity-scaled objectives). The boundary family with exact zeros is
    evaluated directly as extra candidates.
    """
    if n < 1:
        raise InvalidParameter("n must be positive")
    if spec.degree is None and not spec.capacity_scaled:
        raise NotHomogeneous(f"{spec.label} is not positively homogeneous")
    sign = 1.0 if spec.maximize else -1.0
    scale = spec.params[0][1] if spec.capacity_scaled else 1.0
    best = math.inf
    for l in boundary_profiles(n):
        for s in ([0.25, 0.5, 1.0, 2.0, 4.0] if spec.capacity_scaled else [1.0]):
            r = _ratio(spec, l * scale * s)
            if math.isfinite(r):
                best = min(best, sign * r)
    dim = n - 1 + (1 if spec.capacity_scaled else 0)
    if dim == 0:
        r = _ratio(spec, np.array([scale]))
        return r if math.isfinite(r) else best * sign

    def fun(z):
        v = z[: n - 1]
        top = scale * math.exp(z[-1]) if spec.capacity_scaled else 1.0
        r = _ratio(spec, _log_gap_profile(v) * top)
        return sign * r

    lower = np.zeros(dim)
    upper = np.full(dim, LOG_GAP_BOUND)
    if spec.capacity_scaled:
        lower[-1], upper[-1] = -8.0, 8.0
    seeds = [lower.copy(), np.where(np.arange(dim) < n - 1, LOG_GAP_BOUND, 0.0)]
    result = compass_search(fun, lower, upper, seeds, config)
    best = min(best, result.value)
    return sign * best


def fm_sequence(k: int) -> Fraction:
    """``M_k = (1/k) * sum_{i=0..k} min(1, H_k - H_i)``, exactly."""
    if k < 1:
        raise InvalidParameter("k must be positive")
    Hk = harmonic_number(k)
    total = Fraction(0)
    Hi = Fraction(0)
    for i in range(k + 1):
        if i:
            Hi += Fraction(1, i)
        total += min(Fraction(1), Hk - Hi)
    return total / k


@dataclass(frozen=True)
class ClosedFormCR:
    """Closed-form competitive ratio; ``lower_bound`` marks a bound only."""

    objective: str
    n: int
    value: object          # Fraction when rational, float otherwise
    lower_bound: bool = False

    def __float__(self) -> float:
        return float(self.value)

    def text(self) -> str:
        if isinstance(self.value, Fraction):
            return format_rational(self.value)
        return repr(float(self.value))


_CR_NAMES = {
    "nsw": "nsw",
    "egalitarian": "maximin", "maximin": "maximin",
    "makespan": "makespan", "minimax": "makespan", "makespan-min": "makespan",
    "matching": "matching",
    "separable-concave": "separable-concave",
}


def closed_form_cr(name, n: int) -> ClosedFormCR:
    if n < 1:
        raise InvalidParameter("n must be positive")
    key = name.name if isinstance(name, ObjectiveSpec) else str(name).partition(":")[0]
    key = _CR_NAMES.get(key.strip().lower())
    if key is None:
        raise UnknownObjective(f"no closed-form competitive ratio for {name!r}")
    if key == "nsw":
        return ClosedFormCR(key, n, math.factorial(n) ** (-1.0 / n))
    if key == "maximin":
        return ClosedFormCR(key, n, Fraction(1, n))
    if key == "makespan":
        return ClosedFormCR(key, n, harmonic_number(n))
    mk = min(fm_sequence(k) for k in range(1, n + 1))
    return ClosedFormCR(key, n, mk, lower_bound=(key == "separable-concave"))


CR_OBJECTIVES = {"nsw": "nsw", "maximin": "egalitarian", "makespan": "makespan",
                 "matching": "matching:1"}


def cr_objective(name: str) -> ObjectiveSpec:
    """Objective used for the numeric ratio of a closed-form row name."""
    key = _CR_NAMES.get(name.partition(":")[0].strip().lower())
    if key in CR_OBJECTIVES and ":" not in name:
        return objective(CR_OBJECTIVES[key])
    return objective(name)


def cr_table(name: str, ns: Sequence[int], mode: str = "both",
             config: SearchConfig = SearchConfig()) -> list:
    """Rows ``{"n", "closed", "closed_exact", "numeric", "lower_bound"}``."""
    if mode not in ("closed", "numeric", "both"):
        raise InvalidParameter(f"unknown mode {mode!r}")
    rows = []
    for n in ns:
        row = {"objective": name, "n": n}
        if mode in ("closed", "both"):
            cf = closed_form_cr(name, n)
            row["closed"] = float(cf)
            row["closed_exact"] = cf.text()
            row["lower_bound"] = cf.lower_bound
        if mode in ("numeric", "both"):
            row["numeric"] = numeric_competitive_ratio(n, cr_objective(name), config)
        rows.append(row)
    return rows


# -- minimax regret ------------------------------------------------------------


def sorted_simplex_point(w: np.ndarray, q: float) -> np.ndarray:
    """Map weights ``w >= 0`` to a sorted vector with total ``q``."""
    n = len(w)
    total = w.sum()
    if total <= 0:
        return np.full(n, math.nan)
    d = q * w / ((n - np.arange(n)) * total)
    return np.cumsum(d)


def numeric_minimax_regret(n: int, spec: ObjectiveSpec, alpha: float, q=1,
                           config: SearchConfig = SearchConfig()) -> RegretReport:
    """Best found ``alpha*f(l) - f(Hl)`` (or ``g(Hl) - alpha*g(l)``) over sorted ``l``.

    The value is a lower bound on the supremum, never a certificate of it.
    """
    if n < 1:
        raise InvalidParameter("n must be positive")
    if not alpha > 0:
        raise InvalidParameter("alpha must be positive")
    qf = float(to_rational(q)) if not isinstance(q, float) else q
    if not qf > 0:
        raise InvalidParameter("q must be positive")

    def regret_at(l):
        return combine(spec, alpha, spec.func(harmonic_apply(l)), spec.func(l))

    def fun(w):
        l = sorted_simplex_point(w, qf)
        if not np.all(np.isfinite(l)):
            return math.inf
        return -regret_at(l)

    seeds = [np.eye(n)[k] for k in range(n)] + [np.ones(n)]
    result = compass_search(fun, np.zeros(n), np.ones(n), seeds, config)
    l = sorted_simplex_point(result.point, qf)
    wf, opt = spec.func(harmonic_apply(l)), spec.func(l)
    return RegretReport(float(alpha), spec.label, f"sorted simplex n={n} q={q}",
                        wf, opt, combine(spec, alpha, wf, opt),
                        best_loads=tuple(float(v) for v in l),
                        iterations=result.iterations, tolerance=config.tolerance,
                        lower_bound=True)
