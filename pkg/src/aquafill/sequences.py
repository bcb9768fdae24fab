"""Request sequences: arrivals of divisible quantity over ``n`` offline nodes.

Offline nodes are labelled ``1..n`` and arrivals ``t = 1..m`` everywhere in the
public interface, including the JSON instance format::

    {"n": 4, "arrivals": [{"neighbors": [2, 4], "q": "2"}, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import LoadVector, format_rational, to_rational
from .errors import (
    DegenerateOutput,
    EmptyNeighborhood,
    IndexOutOfRange,
    NonpositiveQuantity,
    ValidationError,
)


@dataclass(frozen=True)
class Arrival:
    neighbors: frozenset
    quantity: Fraction

    def __post_init__(self):
        object.__setattr__(self, "neighbors", frozenset(int(i) for i in self.neighbors))
        object.__setattr__(self, "quantity", to_rational(self.quantity))

    def __repr__(self) -> str:
        nbrs = ",".join(str(i) for i in sorted(self.neighbors))
        return f"Arrival({{{nbrs}}}, {format_rational(self.quantity)})"


@dataclass(frozen=True)
class RequestSequence:
    """Ordered arrivals over ``n`` offline nodes.

    Construction only normalises types; call :func:`validate` (every algorithm
    in the package does) to enforce the invariants.
    """

    n: int
    arrivals: tuple = field(default_factory=tuple)

    def __post_init__(self):
        arrivals = tuple(
            a if isinstance(a, Arrival) else Arrival(*a) for a in self.arrivals
        )
        object.__setattr__(self, "arrivals", arrivals)
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_lists(cls, n: int, rows: Iterable) -> "RequestSequence":
        """Build from ``[(neighbors, q), ...]`` pairs."""
        return cls(n, tuple(Arrival(nb, q) for nb, q in rows))

    @property
    def m(self) -> int:
        return len(self.arrivals)

    @property
    def neighborhoods(self) -> tuple:
        return tuple(a.neighbors for a in self.arrivals)

    @property
    def quantities(self) -> tuple:
        return tuple(a.quantity for a in self.arrivals)

    def total_quantity(self) -> Fraction:
        return sum(self.quantities, Fraction(0))

    def gamma(self, i: int) -> tuple:
        """Arrival indices (1-based) adjacent to offline node ``i``."""
        return tuple(t for t, a in enumerate(self.arrivals, start=1) if i in a.neighbors)

    def last_neighbor(self) -> tuple:
        """``mu_i``: index of the latest arrival adjacent to ``i`` (0 if none)."""
        mu = [0] * self.n
        for t, a in enumerate(self.arrivals, start=1):
            for i in a.neighbors:
                if 1 <= i <= self.n:
                    mu[i - 1] = t
        return tuple(mu)

    def edges(self) -> frozenset:
        """All ``(i, t)`` pairs with ``i`` in ``N_t``."""
        return frozenset((i, t) for t, a in enumerate(self.arrivals, start=1)
                         for i in a.neighbors)

    def relabel(self, label: Sequence[int]) -> "RequestSequence":
        """Rename offline node ``i`` to ``label[i - 1]``."""
        return RequestSequence(self.n, tuple(
            Arrival((label[i - 1] for i in a.neighbors), a.quantity)
            for a in self.arrivals))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "arrivals": [
                {"neighbors": sorted(a.neighbors), "q": format_rational(a.quantity)}
                for a in self.arrivals
            ],
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def __repr__(self) -> str:
        body = ", ".join(repr(a) for a in self.arrivals)
        return f"RequestSequence(n={self.n}, [{body}])"


def validate(candidate: RequestSequence) -> RequestSequence:
    """Return ``candidate`` unchanged if it is a well-formed sequence."""
    if candidate.n < 1:
        raise ValidationError("need at least one offline node")
    if candidate.m < 1:
        raise ValidationError("need at least one arrival")
    for t, a in enumerate(candidate.arrivals, start=1):
        if not a.neighbors:
            raise EmptyNeighborhood(f"arrival {t} has no neighbors")
        if a.quantity <= 0:
            raise NonpositiveQuantity(f"arrival {t} has quantity {a.quantity}")
        bad = [i for i in a.neighbors if not 1 <= i <= candidate.n]
        if bad:
            raise IndexOutOfRange(
                f"arrival {t} lists offline nodes {sorted(bad)} outside 1..{candidate.n}")
    return candidate


def is_nested(E: RequestSequence) -> bool:
    nbhds = E.neighborhoods
    return all(later <= earlier for earlier, later in zip(nbhds, nbhds[1:]))


def induced_nested(E: RequestSequence) -> RequestSequence:
    """Replace each ``N_t`` by ``{i : t <= mu_i}``; quantities are unchanged."""
    validate(E)
    mu = E.last_neighbor()
    arrivals = []
    for t, a in enumerate(E.arrivals, start=1):
        nbhd = frozenset(i for i in range(1, E.n + 1) if mu[i - 1] >= t)
        if not nbhd:
            raise DegenerateOutput(f"induced neighborhood of arrival {t} is empty")
        arrivals.append(Arrival(nbhd, a.quantity))
    return RequestSequence(E.n, tuple(arrivals))


def check_feasible(E: RequestSequence, allocation: Sequence) -> bool:
    """Per-arrival compatibility, nonnegativity and full distribution."""
    if len(allocation) != E.m:
        return False
    for a, x in zip(E.arrivals, allocation):
        if len(x) != E.n:
            return False
        values = [to_rational(v) for v in x]
        for i, v in enumerate(values, start=1):
            if v < 0 or (v != 0 and i not in a.neighbors):
                return False
        if sum(values, Fraction(0)) != a.quantity:
            return False
    return True


def allocation_loads(n: int, allocation: Sequence) -> LoadVector:
    totals = [Fraction(0)] * n
    for x in allocation:
        for i, v in enumerate(x):
            totals[i] += to_rational(v)
    return LoadVector(totals)


# -- serialization ---------------------------------------------------------


def sequence_from_dict(data: dict) -> RequestSequence:
    if not isinstance(data, dict) or "n" not in data or "arrivals" not in data:
        raise ValidationError("instance must be an object with 'n' and 'arrivals'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError("'n' must be an integer")
    arrivals = []
    for t, row in enumerate(data["arrivals"], start=1):
        try:
            nbrs = row["neighbors"]
            q = row["q"]
        except (KeyError, TypeError):
            raise ValidationError(f"arrival {t}: expected keys 'neighbors' and 'q'") from None
        if not isinstance(nbrs, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in nbrs):
            raise ValidationError(f"arrival {t}: 'neighbors' must be a list of integers")
        if isinstance(q, float):
            raise ValidationError(f"arrival {t}: quantity must be a string or integer")
        try:
            arrivals.append(Arrival(frozenset(nbrs), to_rational(q)))
        except (TypeError, ValidationError) as exc:
            raise ValidationError(f"arrival {t}: {exc}") from None
    return validate(RequestSequence(n, tuple(arrivals)))


def parse_sequence(text: str, source: str = "<string>") -> RequestSequence:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return sequence_from_dict(data)
    except ValidationError as exc:
        raise type(exc)(f"{source}: {exc}") from None


def load_sequence(path) -> RequestSequence:
    with open(path, encoding="utf-8") as fh:
        return parse_sequence(fh.read(), source=str(path))


def dump_sequence(E: RequestSequence, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(E.to_json(indent=2))
        fh.write("\n")


# -- random instances --------------------------------------------------------


@dataclass(frozen=True)
class InstanceParams:
    """Knobs for :func:`random_instance`.

    ``total_quantity=None`` leaves the total free so every quantity keeps the
    small denominator ``denominator``; otherwise quantities are rescaled
    exactly to the requested total.
    """

    n: int
    m: int
    total_quantity: Optional[Fraction] = None
    density: float = 0.5
    denominator: int = 12
    max_numerator: int = 24
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError("n and m must be positive")
        if self.total_quantity is not None:
            object.__setattr__(self, "total_quantity", to_rational(self.total_quantity))
            if self.total_quantity <= 0:
                raise ValidationError("total_quantity must be positive")
        if not 0 < self.density <= 1:
            raise ValidationError("density must lie in (0, 1]")


def _quantities(rng: np.random.Generator, params: InstanceParams) -> list:
    ks = [int(k) for k in rng.integers(1, params.max_numerator + 1, size=params.m)]
    if params.total_quantity is None:
        return [Fraction(k, params.denominator) for k in ks]
    scale = params.total_quantity / sum(ks)
    return [k * scale for k in ks]


def random_instance(params: InstanceParams) -> RequestSequence:
    """Deterministic random sequence; each node joins each arrival w.p. ``density``."""
    rng = np.random.default_rng(params.seed)
    qs = _quantities(rng, params)
    arrivals = []
    for q in qs:
        if params.density >= 1:
            nbhd = set(range(1, params.n + 1))
        else:
            mask = rng.random(params.n) < params.density
            nbhd = {i + 1 for i in np.flatnonzero(mask)}
            if not nbhd:
                nbhd = {int(rng.integers(1, params.n + 1))}
        arrivals.append(Arrival(frozenset(nbhd), q))
    return validate(RequestSequence(params.n, tuple(arrivals)))


def random_nested_instance(params: InstanceParams) -> RequestSequence:
    """Random chain ``N_1 ⊇ ... ⊇ N_m`` over a random node order.

    ``N_1`` may omit some nodes, so isolated offline nodes do occur.
    """
    rng = np.random.default_rng(params.seed)
    qs = _quantities(rng, params)
    order = [int(i) + 1 for i in rng.permutation(params.n)]
    sizes = sorted((int(s) for s in rng.integers(1, params.n + 1, size=params.m)),
                   reverse=True)
    arrivals = [Arrival(frozenset(order[:s]), q) for s, q in zip(sizes, qs)]
    return validate(RequestSequence(params.n, tuple(arrivals)))


def upper_triangular(quantities: Sequence) -> RequestSequence:
    """Complete upper-triangular sequence ``N_t = {t, ..., n}``."""
    n = len(quantities)
    return RequestSequence(n, tuple(
        Arrival(frozenset(range(t, n + 1)), q) for t, q in enumerate(quantities, start=1)))
