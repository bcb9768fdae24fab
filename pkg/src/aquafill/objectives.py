"""Schur-monotone objectives and the piecewise concave decomposition.

Objective values are the one place floating point enters: loads are
converted to ``float64`` at the boundary and evaluated with numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .core import LoadVector, to_rational
from .errors import (
    InvalidParameter,
    NotConcaveNondecreasing,
    UnknownObjective,
    ValidationError,
)

MAXIMIZE = "maximize"
MINIMIZE = "minimize"
SCHUR_CONCAVE = "schur-concave"
SCHUR_CONVEX = "schur-convex"


@dataclass(frozen=True)
class ObjectiveSpec:
    """A named objective with its classification.

    ``symmetric`` marks objectives that are symmetric and concave (for
    maximization) or symmetric and convex (for minimization). ``degree`` is
    the degree of positive homogeneity, ``None`` when there is none;
    ``capacity_scaled`` marks objectives that become scale invariant once a
    capacity parameter is scaled along with the loads.
    """

    name: str
    direction: str
    schur_class: str
    symmetric: bool
    func: Callable = field(compare=False, repr=False)
    degree: Optional[float] = None
    params: tuple = ()
    capacity_scaled: bool = False

    @property
    def maximize(self) -> bool:
        return self.direction == MAXIMIZE

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ":".join(_fmt_param(v) for _, v in self.params)

    def __call__(self, loads) -> float:
        return evaluate(self, loads)


def _fmt_param(v) -> str:
    return str(v) if not isinstance(v, float) or not v.is_integer() else str(int(v))


def _as_floats(loads) -> np.ndarray:
    if isinstance(loads, LoadVector):
        return loads.to_floats()
    if isinstance(loads, np.ndarray):
        arr = loads.astype(float)
    else:
        arr = np.array([float(to_rational(v)) if not isinstance(v, float) else v
                        for v in loads], dtype=float)
    if arr.size == 0:
        raise ValidationError("objective needs at least one entry")
    if np.any(arr < 0):
        raise ValidationError("loads must be nonnegative")
    return arr


def evaluate(spec: ObjectiveSpec, loads) -> float:
    return float(spec.func(_as_floats(loads)))


# -- catalog -------------------------------------------------------------------


def _nsw(x: np.ndarray) -> float:
    if np.any(x <= 0):
        return 0.0
    return float(np.exp(np.mean(np.log(x))))


def _power_mean(p: float) -> Callable:
    def f(x: np.ndarray) -> float:
        if p == 0:
            return _nsw(x)
        if p < 0 and np.any(x <= 0):
            return 0.0
        return float(np.mean(x ** p) ** (1.0 / p))
    return f


def _gini(x: np.ndarray) -> float:
    total = x.sum()
    if total <= 0:
        return 0.0
    return float(np.abs(x[:, None] - x[None, :]).sum() / (2 * len(x) * total))


def _lp(p: float) -> Callable:
    return lambda x: float(np.sum(x ** p) ** (1.0 / p))


def _matching(c: float) -> Callable:
    return lambda x: float(np.minimum(c, x).sum())


def _indicator_half(x: np.ndarray) -> float:
    return float(np.all(x > 0.5))


_ALIASES = {"maximin": "egalitarian", "minimax": "makespan", "makespan-min": "makespan"}


def _param(name: str, raw: Optional[str], default: float) -> float:
    if raw is None:
        return default
    try:
        return float(Fraction(raw)) if "/" in raw else float(raw)
    except ValueError:
        raise InvalidParameter(f"{name}: cannot parse parameter {raw!r}") from None


def objective(name: str) -> ObjectiveSpec:
    """Parse ``name`` or ``name:param`` into an :class:`ObjectiveSpec`."""
    base, _, raw = name.partition(":")
    base = _ALIASES.get(base.strip().lower(), base.strip().lower())
    raw = raw.strip() or None
    if base == "nsw":
        return ObjectiveSpec("nsw", MAXIMIZE, SCHUR_CONCAVE, True, _nsw, degree=1.0)
    if base == "egalitarian":
        return ObjectiveSpec("egalitarian", MAXIMIZE, SCHUR_CONCAVE, True,
                             lambda x: float(x.min()), degree=1.0)
    if base == "matching":
        c = _param(base, raw, 1.0)
        if not c > 0 or not math.isfinite(c):
            raise InvalidParameter(f"matching capacity must be positive, got {c}")
        return ObjectiveSpec("matching", MAXIMIZE, SCHUR_CONCAVE, True, _matching(c),
                             params=(("c", c),), capacity_scaled=True)
    if base == "powermean":
        p = _param(base, raw, 0.5)
        if not p < 1:
            raise InvalidParameter(f"power mean needs p < 1 to be Schur-concave, got {p}")
        return ObjectiveSpec("powermean", MAXIMIZE, SCHUR_CONCAVE, True, _power_mean(p),
                             degree=1.0, params=(("p", p),))
    if base == "gini":
        return ObjectiveSpec("gini", MINIMIZE, SCHUR_CONVEX, False, _gini, degree=0.0)
    if base == "variance":
        return ObjectiveSpec("variance", MINIMIZE, SCHUR_CONVEX, True,
                             lambda x: float(np.var(x)), degree=2.0)
    if base == "makespan":
        return ObjectiveSpec("makespan", MINIMIZE, SCHUR_CONVEX, True,
                             lambda x: float(x.max()), degree=1.0)
    if base == "lpnorm":
        p = _param(base, raw, 2.0)
        if not p >= 1 or not math.isfinite(p):
            raise InvalidParameter(f"lp norm needs p >= 1, got {p}")
        return ObjectiveSpec("lpnorm", MINIMIZE, SCHUR_CONVEX, True, _lp(p),
                             degree=1.0, params=(("p", p),))
    if base == "indicator-half":
        return ObjectiveSpec("indicator-half", MAXIMIZE, SCHUR_CONCAVE, False,
                             _indicator_half)
    raise UnknownObjective(
        f"unknown objective {name!r}; choose from nsw, matching:c, egalitarian, "
        "powermean:p, gini, variance, makespan, lpnorm:p, indicator-half")


CATALOG = ("nsw", "matching:1", "egalitarian", "powermean:0.5", "powermean:-1",
           "gini", "variance", "makespan", "lpnorm:2", "indicator-half")


def catalog() -> list:
    return [objective(name) for name in CATALOG]


# -- piecewise concave decomposition -------------------------------------------


@dataclass(frozen=True)
class ConcaveDecomposition:
    """``f(x) = gamma * x + sum(beta * min(c, x))`` over the pieces ``(beta, c)``."""

    gamma: object
    pieces: tuple

    def __call__(self, x):
        return self.gamma * x + sum(beta * min(c, x) for beta, c in self.pieces)


def _exact(values) -> bool:
    return all(not isinstance(v, float) for v in values)


def concave_decompose(points: Sequence, values: Sequence,
                      tol: float = 1e-12) -> ConcaveDecomposition:
    """Decompose samples of a concave nondecreasing ``f`` with ``f(0) = 0``.

    Exact when every input is rational; float inputs are compared with an
    absolute slack ``tol``.
    """
    if len(points) != len(values) or not points:
        raise InvalidParameter("need equally many points and values, at least one")
    exact = _exact(points) and _exact(values)
    conv = to_rational if exact else float
    xs = [conv(x) for x in points]
    vs = [conv(v) for v in values]
    slack = 0 if exact else tol
    if xs[0] <= 0 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise InvalidParameter("points must be positive and strictly increasing")
    slopes = [vs[0] / xs[0]]
    slopes += [(vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k]) for k in range(len(xs) - 1)]
    if slopes[-1] < -slack:
        raise NotConcaveNondecreasing("samples decrease")
    for k, (a, b) in enumerate(zip(slopes, slopes[1:])):
        if b > a + slack:
            raise NotConcaveNondecreasing(f"chord slope rises between samples {k} and {k + 1}")
    gamma = max(slopes[-1], 0 * slopes[-1])
    pieces = []
    for k in range(len(xs) - 1):
        beta = slopes[k] - slopes[k + 1]
        if beta > slack:
            pieces.append((beta, xs[k]))
    return ConcaveDecomposition(gamma, tuple(pieces))
