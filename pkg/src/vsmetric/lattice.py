"""Finite-dimensional vector lattice with coordinatewise order.

Values live in R^m ordered coordinatewise, which makes every pair of
elements lattice-comparable through sup/inf and makes the space
Archimedean by construction.  Points of the carrier set and elements of
the value lattice share one representation (:class:`Vec`); dimension
agreement is enforced per operation.

Order convergence of a monotone sequence to zero is decided over a
finite recorded prefix with an explicit tolerance, since exact infima
of infinite sequences are not computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatchError

DEFAULT_ZERO_TOL = 1e-9


@dataclass(frozen=True)
class Vec:
    """Immutable vector of finite floats.

    Used both for carrier points and for lattice values; arithmetic is
    plain IEEE double, coordinatewise.
    """

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        for c in coords:
            if not math.isfinite(c):
                raise ValueError(f"non-finite coordinate {c!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]

    def __add__(self, other: "Vec") -> "Vec":
        _check_dims(self, other)
        return Vec(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Vec") -> "Vec":
        _check_dims(self, other)
        return Vec(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, scalar: float) -> "Vec":
        return Vec(tuple(a * scalar for a in self.coords))

    __rmul__ = __mul__

    def __neg__(self) -> "Vec":
        return Vec(tuple(-a for a in self.coords))

    def __abs__(self) -> "Vec":
        return Vec(tuple(abs(a) for a in self.coords))

    def max_coord(self) -> float:
        """Coordinatewise maximum, i.e. the l-infinity value for nonnegative vectors."""
        return max(self.coords)

    def __repr__(self) -> str:
        return "Vec(" + ", ".join(repr(c) for c in self.coords) + ")"


# The carrier and the value lattice use the same concrete vectors; the
# aliases keep signatures readable.
Point = Vec
LatticeElement = Vec


def vec(*coords: float) -> Vec:
    return Vec(tuple(coords))


def zero(dim: int) -> Vec:
    return Vec((0.0,) * dim)


def _check_dims(a: Vec, b: Vec) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(
            f"dimension mismatch: {a.dim} vs {b.dim} (malformed problem)"
        )


def leq(a: Vec, b: Vec) -> bool:
    """Coordinatewise partial order: every coordinate of a is <= that of b."""
    _check_dims(a, b)
    return all(x <= y for x, y in zip(a.coords, b.coords))


def sup(a: Vec, b: Vec) -> Vec:
    """Coordinatewise maximum (least upper bound)."""
    _check_dims(a, b)
    return Vec(tuple(max(x, y) for x, y in zip(a.coords, b.coords)))


def inf(a: Vec, b: Vec) -> Vec:
    """Coordinatewise minimum (greatest lower bound)."""
    _check_dims(a, b)
    return Vec(tuple(min(x, y) for x, y in zip(a.coords, b.coords)))


def leq_with_slack(a: Vec, b: Vec, abs_slack: float = 0.0, ulps: int = 4) -> bool:
    """``a`` <= ``b`` coordinatewise, up to floating-point slack.

    Each coordinate comparison allows ``abs_slack`` plus ``ulps`` units in
    the last place of the larger operand; geometric recurrences accumulate
    rounding and would otherwise fail strict comparisons spuriously.
    """
    _check_dims(a, b)
    for x, y in zip(a.coords, b.coords):
        slack = abs_slack + ulps * math.ulp(max(abs(x), abs(y)))
        if x > y + slack:
            return False
    return True


def violation(a: Vec, b: Vec) -> float:
    """Largest coordinatewise excess of a over b (0.0 when a <= b holds)."""
    _check_dims(a, b)
    return max(0.0, max(x - y for x, y in zip(a.coords, b.coords)))


@dataclass(frozen=True)
class DominatingSequence:
    """Non-increasing lattice sequence bounding residuals from above.

    The witness object for order convergence: residual sequences are
    dominated coordinatewise by these values, which themselves decrease.
    ``tolerance`` records the threshold at which the tail was accepted
    as having reached zero.
    """

    values: tuple[Vec, ...]
    tolerance: float = 0.0

    def __post_init__(self):
        values = tuple(self.values)
        if not values:
            raise ValueError("empty dominating sequence")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        for prev, cur in zip(values, values[1:]):
            if not leq(cur, prev):
                raise ValueError("dominating sequence must be non-increasing")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int) -> Vec:
        return self.values[i]


def decreases_to_zero(seq: Sequence[Vec], tol: float = DEFAULT_ZERO_TOL) -> bool:
    """True iff the sequence is coordinatewise non-increasing and its final
    element has every coordinate <= tol."""
    if not seq:
        raise ValueError("empty sequence")
    for prev, cur in zip(seq, seq[1:]):
        if not leq(cur, prev):
            return False
    return all(c <= tol for c in seq[-1].coords)


def tail_supremum(seq: Sequence[Vec], tolerance: float = 0.0) -> DominatingSequence:
    """Suffix suprema of a sequence: mu_n = sup over {seq_k : k >= n}.

    The result is non-increasing and dominates the input pointwise, which
    is exactly the shape a convergence witness needs.
    """
    if not seq:
        raise ValueError("empty sequence")
    out: list[Vec] = [seq[-1]]
    for v in reversed(seq[:-1]):
        out.append(sup(v, out[-1]))
    out.reverse()
    return DominatingSequence(tuple(out), tolerance)
