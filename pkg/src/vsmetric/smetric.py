"""Vector S-metric evaluation and statistical validation of its axioms.

An S-metric assigns a lattice value S(x, y, z) >= 0 to point triples,
vanishing exactly on coincident triples and satisfying a triangle-type
inequality against a fourth point:

    S(x, y, z) <= S(x, y, a) + S(y, y, a) + S(z, z, a)

The first summand above mixes both lead arguments; the more common
"standard" form uses S(x, x, a) instead.  Both coincide whenever the
first two arguments are equal, which is the only way the inequality is
used downstream, but the mixed form is the defining one here and an
``axiom_c_variant`` switch checks the standard form in addition.

Two builtin metric shapes are provided:

* ``abs_sum``     — scalar-valued: sum of L1 distances to z from x and y.
* ``weighted_pair`` — value in R^2: (rho*|x-z|, sigma*|y-z|) with L1 |.|.

Custom metrics are arbitrary expression maps on the concatenated triple
(x, y, z); they are validated by sampling, never trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DimensionMismatchError, ProblemError
from .expr import MapSpec, eval_map, format_map, parse_map
from .lattice import Vec
from .sampling import BoxSampler

Q_ULPS = 4  # ulp slack used by axiom inequality checks


@dataclass(frozen=True)
class SMetricSpec:
    """Shape and parameters of a vector S-metric on points of dimension carrier_dim."""

    kind: str  # "abs_sum" | "weighted_pair" | "custom"
    carrier_dim: int
    rho: float = 1.0
    sigma: float = 1.0
    custom: Optional[MapSpec] = None
    codomain_dim: int = field(default=0)

    def __post_init__(self):
        if self.carrier_dim < 1:
            raise ProblemError("carrier_dim must be >= 1")
        if self.kind == "abs_sum":
            object.__setattr__(self, "codomain_dim", 1)
        elif self.kind == "weighted_pair":
            if self.rho <= 0 or self.sigma <= 0:
                raise ProblemError("weighted_pair weights must be positive")
            object.__setattr__(self, "codomain_dim", 2)
        elif self.kind == "custom":
            if self.custom is None:
                raise ProblemError("custom metric needs an expression map")
            if self.custom.in_dim != 3 * self.carrier_dim:
                raise ProblemError(
                    f"custom metric input dimension must be 3*{self.carrier_dim}"
                )
            object.__setattr__(self, "codomain_dim", self.custom.out_dim)
        else:
            raise ProblemError(f"unknown metric kind {self.kind!r}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "carrier_dim": self.carrier_dim}
        if self.kind == "weighted_pair":
            d["rho"] = self.rho
            d["sigma"] = self.sigma
        if self.kind == "custom":
            d["expressions"] = format_map(self.custom)
            d["codomain_dim"] = self.codomain_dim
        return d

    @staticmethod
    def from_dict(d: dict) -> "SMetricSpec":
        kind = d["kind"]
        carrier_dim = int(d["carrier_dim"])
        if kind == "custom":
            custom = parse_map(d["expressions"], 3 * carrier_dim)
            return SMetricSpec(kind, carrier_dim, custom=custom)
        return SMetricSpec(
            kind,
            carrier_dim,
            rho=float(d.get("rho", 1.0)),
            sigma=float(d.get("sigma", 1.0)),
        )


def _l1(x: Vec, z: Vec) -> float:
    return sum(abs(a - b) for a, b in zip(x.coords, z.coords))


def eval_s(spec: SMetricSpec, x: Vec, y: Vec, z: Vec) -> Vec:
    """Evaluate S(x, y, z); the result lives in R^codomain_dim."""
    for p in (x, y, z):
        if p.dim != spec.carrier_dim:
            raise DimensionMismatchError(
                f"point dimension {p.dim} != carrier dimension {spec.carrier_dim}"
            )
    if spec.kind == "abs_sum":
        return Vec((_l1(x, z) + _l1(y, z),))
    if spec.kind == "weighted_pair":
        return Vec((spec.rho * _l1(x, z), spec.sigma * _l1(y, z)))
    return eval_map(spec.custom, Vec(x.coords + y.coords + z.coords))


def s_distance(spec: SMetricSpec, a: Vec, b: Vec) -> float:
    """Scalar separation of two points: max coordinate of S(a, a, b)."""
    return eval_s(spec, a, a, b).max_coord()


@dataclass
class AxiomEntry:
    name: str
    passed: bool
    worst_violation: float
    witness: Optional[tuple[Vec, ...]]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "worst_violation": self.worst_violation,
            "witness": None if self.witness is None else [list(p.coords) for p in self.witness],
        }


@dataclass
class AxiomReport:
    entries: list[AxiomEntry]
    samples: int
    seed: int
    tol: float

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, name: str) -> AxiomEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
            "axioms": [e.to_dict() for e in self.entries],
        }


@dataclass
class SymmetryReport:
    passed: bool
    max_deviation: float
    witness: Optional[tuple[Vec, Vec]]
    samples: int
    seed: int
    tol: float

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_deviation": self.max_deviation,
            "witness": None
            if self.witness is None
            else [list(p.coords) for p in self.witness],
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
        }


def _excess(lhs: Vec, rhs: Vec, ulps: int = Q_ULPS) -> float:
    """Largest coordinatewise amount by which lhs exceeds rhs beyond ulp slack."""
    worst = 0.0
    for lv, rv in zip(lhs.coords, rhs.coords):
        slack = ulps * math.ulp(max(abs(lv), abs(rv)))
        worst = max(worst, lv - rv - slack)
    return worst


def validate_axioms(
    spec: SMetricSpec,
    sampler: BoxSampler,
    n: int,
    tol: float = 1e-9,
    axiom_c_variant: str = "literal",
) -> AxiomReport:
    """Check the defining S-metric axioms on n sampled point tuples.

    * nonnegativity of every sampled value;
    * zero exactly on coincident triples: S(a,a,a) ~ 0 and tol-separated
      triples map to a value with at least one positive coordinate;
    * the triangle-type inequality on sampled 4-tuples, in its mixed form
      and, when ``axiom_c_variant == "standard"``, additionally in the
      standard split form.

    Failures are report content (with witnesses), not exceptions.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if axiom_c_variant not in ("literal", "standard"):
        raise ValueError(f"unknown axiom_c_variant {axiom_c_variant!r}")

    nonneg = AxiomEntry("nonnegativity", True, 0.0, None)
    coincide = AxiomEntry("coincidence_zero", True, 0.0, None)
    separated = AxiomEntry("separation_positive", True, 0.0, None)
    triangle = AxiomEntry("triangle", True, 0.0, None)
    entries = [nonneg, coincide, separated, triangle]
    tri_std = None
    if axiom_c_variant == "standard":
        tri_std = AxiomEntry("triangle_standard", True, 0.0, None)
        entries.append(tri_std)

    for _ in range(n):
        x, y, z, a = (sampler.point() for _ in range(4))

        s = eval_s(spec, x, y, z)
        neg = max(0.0, -min(s.coords))
        if neg > 0.0 and neg > nonneg.worst_violation:
            nonneg.passed = False
            nonneg.worst_violation = neg
            nonneg.witness = (x, y, z)

        s_aaa = eval_s(spec, x, x, x)
        dev = abs(s_aaa).max_coord()
        if dev > coincide.worst_violation:
            coincide.worst_violation = dev
            if dev > tol:
                coincide.passed = False
                coincide.witness = (x,)

        sep = max(_l1(x, z), _l1(y, z), _l1(x, y))
        if sep >= tol and s.max_coord() <= 0.0 and min(s.coords) >= 0.0:
            separated.passed = False
            if sep > separated.worst_violation:
                separated.worst_violation = sep
                separated.witness = (x, y, z)

        rhs = (
            eval_s(spec, x, y, a)
            + eval_s(spec, y, y, a)
            + eval_s(spec, z, z, a)
        )
        excess = _excess(s, rhs)
        if excess > triangle.worst_violation:
            triangle.passed = False
            triangle.worst_violation = excess
            triangle.witness = (x, y, z, a)

        if tri_std is not None:
            rhs2 = (
                eval_s(spec, x, x, a)
                + eval_s(spec, y, y, a)
                + eval_s(spec, z, z, a)
            )
            excess2 = _excess(s, rhs2)
            if excess2 > tri_std.worst_violation:
                tri_std.passed = False
                tri_std.worst_violation = excess2
                tri_std.witness = (x, y, z, a)

    return AxiomReport(entries, n, sampler.seed, tol)


def check_symmetry(
    spec: SMetricSpec, sampler: BoxSampler, n: int, tol: float = 0.0
) -> SymmetryReport:
    """Largest coordinatewise deviation of S(a,a,b) from S(b,b,a) over n pairs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    worst = 0.0
    witness = None
    for _ in range(n):
        a = sampler.point()
        b = sampler.point()
        d = abs(eval_s(spec, a, a, b) - eval_s(spec, b, b, a)).max_coord()
        if d > worst:
            worst = d
            witness = (a, b)
    return SymmetryReport(worst <= tol, worst, witness, n, sampler.seed, tol)
