"""Numerical verification of the common-fixed-point hypotheses.

Each sub-check samples the carrier and reports pass/fail with a concrete
worst witness; nothing is proven, but every failure is reproducible by
re-evaluating the witness.  Sample sets combine the box corners (as
deterministic anchors, since ratio suprema are often attained on the
boundary) with seeded uniform fill.

The contraction constant is estimated as a ratio supremum: for each
sampled pair (x, y) the distance S(fx, fx, fy) is compared against a
mode-dependent candidate set of distances built from K-images and
f-images, taking the most favorable candidate per pair (the weakest
reading of the hypothesis) and the worst pair overall.  The resulting
q_hat is a lower bound on any constant q for which the contraction
hypothesis could hold, so q_hat >= 1/3 refutes applicability at the
sampled resolution.  Stricter per-candidate estimates are reported too.

Continuity is not decidable from finitely many samples; the modulus
ladder is advisory only and never gates applicability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InversionError
from .expr import MapSpec, eval_map
from .lattice import Vec
from .sampling import BoxSampler
from .smetric import eval_s
from .solver import ProblemSpec, invert_map

Q_THRESHOLD = 1.0 / 3.0

DEFAULT_H_LADDER = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def _sample_points(problem: ProblemSpec, sampler: BoxSampler, n: int) -> list[Vec]:
    """Box corners first (deterministic anchors), uniform fill up to n."""
    anchors = problem.carrier.corners()
    if len(anchors) >= n:
        return anchors[:n]
    return anchors + sampler.points(n - len(anchors))


def _sample_pairs(
    problem: ProblemSpec, sampler: BoxSampler, n: int
) -> list[tuple[Vec, Vec]]:
    corners = problem.carrier.corners(cap=8)
    anchors = [(a, b) for a in corners for b in corners]
    if len(anchors) >= n:
        return anchors[:n]
    extra = [(sampler.point(), sampler.point()) for _ in range(n - len(anchors))]
    return anchors + extra


@dataclass
class CommuteReport:
    passed: bool
    max_deviation: float
    witness: Optional[Vec]

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_deviation": self.max_deviation,
            "witness": None if self.witness is None else list(self.witness.coords),
        }


def commute_deviation(problem: ProblemSpec, x: Vec) -> float:
    """Scalar size of S(f(K(x)), f(K(x)), K(f(x))) at one point."""
    fk = eval_map(problem.f, eval_map(problem.K, x))
    kf = eval_map(problem.K, eval_map(problem.f, x))
    return eval_s(problem.metric, fk, fk, kf).max_coord()


def check_commutes(
    problem: ProblemSpec, sampler: BoxSampler, n: int, tol: float = 1e-9
) -> CommuteReport:
    """Does f commute with K?  Largest S-deviation of fK from Kf over samples."""
    if n < 1:
        raise ValueError("n must be >= 1")
    worst = -1.0
    witness = None
    for x in _sample_points(problem, sampler, n):
        dev = commute_deviation(problem, x)
        if dev > worst:
            worst = dev
            witness = x
    passed = worst <= tol
    return CommuteReport(passed, worst, None if passed else witness)


@dataclass
class RangeReport:
    passed: bool
    witness: Optional[Vec]
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "witness": None if self.witness is None else list(self.witness.coords),
            "detail": self.detail,
        }


def check_range_containment(
    problem: ProblemSpec, sampler: BoxSampler, n: int, tol: float = 1e-9
) -> RangeReport:
    """Range hypothesis at sampled points.

    thm22/cor23: every f(x) must have a K-preimage inside the carrier.
    thm24:       every f(K(x)) must have a K^2-preimage inside the carrier.
    The first unresolvable point is returned as the witness.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if problem.theorem_mode == "thm24":
        forward = problem.k_squared()
        inverse = problem.k_squared_inverse()
        image_of = lambda x: eval_map(problem.f, eval_map(problem.K, x))
    else:
        forward = problem.K
        inverse = problem.K_inverse
        image_of = lambda x: eval_map(problem.f, x)

    for x in _sample_points(problem, sampler, n):
        target = image_of(x)
        try:
            y = invert_map(problem, target, forward=forward, inverse=inverse, witness=x)
        except InversionError as exc:
            return RangeReport(False, x, str(exc))
        back = eval_map(forward, y)
        residual = max(abs(a - b) for a, b in zip(back.coords, target.coords))
        if residual > tol:
            return RangeReport(
                False, x, f"preimage residual {residual:g} exceeds tol {tol:g}"
            )
    return RangeReport(True, None)


_CANDIDATE_LABELS = {
    "thm22": ("KxKy", "Kx_fx", "Ky_fy", "Kx_fy", "Ky_fx"),
    "cor23": ("KxKy",),
    "thm24": ("KxKy", "Kx_fx", "Ky_fy", "avg_cross"),
}


def _candidates(problem: ProblemSpec, x: Vec, y: Vec) -> list[Vec]:
    m = problem.metric
    fx = eval_map(problem.f, x)
    fy = eval_map(problem.f, y)
    kx = eval_map(problem.K, x)
    ky = eval_map(problem.K, y)
    base = [
        eval_s(m, kx, kx, ky),
        eval_s(m, kx, kx, fx),
        eval_s(m, ky, ky, fy),
    ]
    if problem.theorem_mode == "thm24":
        cross = (eval_s(m, kx, kx, fy) + eval_s(m, ky, ky, fx)) * (1.0 / 3.0)
        return base + [cross]
    if problem.theorem_mode == "cor23":
        return base[:1]
    return base + [eval_s(m, kx, kx, fy), eval_s(m, ky, ky, fx)]


def _ratio_vec(numerator: Vec, candidate: Vec) -> float:
    """max over coordinates of numerator/candidate (0/0 -> 0, pos/0 -> inf)."""
    worst = 0.0
    for num, den in zip(numerator.coords, candidate.coords):
        if den == 0.0:
            r = 0.0 if num == 0.0 else math.inf
        else:
            r = num / den
        worst = max(worst, r)
    return worst


@dataclass
class QEstimate:
    q_hat: float
    argmax_pair: Optional[tuple[Vec, Vec]]
    per_candidate: dict[str, float]

    def to_dict(self) -> dict:
        def num(v: float):
            return None if math.isinf(v) else v

        return {
            "q_hat": num(self.q_hat),
            "argmax_pair": None
            if self.argmax_pair is None
            else [list(p.coords) for p in self.argmax_pair],
            "per_candidate": {k: num(v) for k, v in sorted(self.per_candidate.items())},
        }


def estimate_q(problem: ProblemSpec, sampler: BoxSampler, n: int) -> QEstimate:
    """Empirical contraction constant over sampled pairs.

    Per pair: the minimum over the mode's candidate set of the
    coordinatewise worst ratio S(fx,fx,fy)/candidate.  q_hat is the
    maximum of these per-pair ratios, attained at argmax_pair, and is a
    lower bound on any valid constant q.  Per-candidate maxima (the
    stricter fixed-choice readings) are reported alongside.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    labels = _CANDIDATE_LABELS[problem.theorem_mode]
    per_candidate = {label: 0.0 for label in labels}
    q_hat = 0.0
    argmax: Optional[tuple[Vec, Vec]] = None
    for x, y in _sample_pairs(problem, sampler, n):
        fx = eval_map(problem.f, x)
        fy = eval_map(problem.f, y)
        numerator = eval_s(problem.metric, fx, fx, fy)
        ratios = [_ratio_vec(numerator, c) for c in _candidates(problem, x, y)]
        for label, r in zip(labels, ratios):
            per_candidate[label] = max(per_candidate[label], r)
        pair_ratio = min(ratios)
        if pair_ratio > q_hat:
            q_hat = pair_ratio
            argmax = (x, y)
    return QEstimate(q_hat, argmax, per_candidate)


@dataclass
class ContinuityReport:
    advisory: bool  # always True: this check cannot falsify continuity
    passed: bool
    modulus_table: list[tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "advisory": self.advisory,
            "pass": self.passed,
            "modulus_table": [[h, m] for h, m in self.modulus_table],
        }


def check_continuity(
    map_spec: MapSpec,
    problem: ProblemSpec,
    sampler: BoxSampler,
    n: int,
    h_ladder: Sequence[float] = DEFAULT_H_LADDER,
) -> ContinuityReport:
    """Perturbation moduli of a map on a decreasing step ladder.

    For each sampled x and step h the recorded modulus is the largest
    change of the map over the 2d axis directions +-h*e_i.  Advisory pass
    requires the ladder to be non-increasing and to actually shrink
    (final modulus at most half the first, unless already ~zero); a
    ladder that stalls at a fixed height is the signature of a jump.
    """
    ladder = list(h_ladder)
    if not ladder or any(h <= 0 for h in ladder) or any(
        a <= b for a, b in zip(ladder, ladder[1:])
    ):
        raise ValueError("h_ladder must be strictly decreasing and positive")
    base_points = _sample_points(problem, sampler, n)
    # The box center is a cheap deterministic anchor for interior jumps.
    base_points = [problem.carrier.center()] + base_points

    d = map_spec.in_dim
    table: list[tuple[float, float]] = []
    for h in ladder:
        worst = 0.0
        for x in base_points:
            mx = eval_map(map_spec, x)
            for i in range(d):
                for sign in (1.0, -1.0):
                    shifted = Vec(
                        tuple(
                            c + sign * h if j == i else c
                            for j, c in enumerate(x.coords)
                        )
                    )
                    worst = max(
                        worst, abs(eval_map(map_spec, shifted) - mx).max_coord()
                    )
        table.append((h, worst))

    zero_floor = 1e-12
    non_increasing = all(
        later <= earlier * (1.0 + 1e-9) + zero_floor
        for (_, earlier), (_, later) in zip(table, table[1:])
    )
    first, last = table[0][1], table[-1][1]
    shrinks = first <= zero_floor or last <= 0.5 * first
    return ContinuityReport(True, non_increasing and shrinks, table)


@dataclass
class CheckReport:
    mode: str
    commutes: CommuteReport
    range_ok: RangeReport
    continuity: ContinuityReport
    q_estimate: QEstimate
    q_threshold: float
    applicable: bool
    samples: int
    seed: int
    tol: float

    @property
    def q_hat(self) -> float:
        return self.q_estimate.q_hat

    def q_position(self) -> str:
        """Where q_hat falls relative to the 1/3 threshold and to 1."""
        if self.q_hat < self.q_threshold:
            return "below_threshold"
        if self.q_hat < 1.0:
            return "between_threshold_and_one"
        return "at_least_one"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "commutes": self.commutes.to_dict(),
            "range": self.range_ok.to_dict(),
            "continuity": self.continuity.to_dict(),
            "q": self.q_estimate.to_dict(),
            "q_threshold": self.q_threshold,
            "q_position": self.q_position(),
            "applicable": self.applicable,
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
        }


def check_applicability(
    problem: ProblemSpec,
    sampler: BoxSampler,
    n: int,
    tol: float = 1e-9,
) -> CheckReport:
    """Run every hypothesis check for the problem's theorem mode.

    applicable = commutation holds and the range hypothesis holds and
    q_hat < 1/3.  The continuity ladder is attached as advisory context
    and does not gate the verdict.
    """
    commutes = check_commutes(problem, sampler, n, tol)
    range_ok = check_range_containment(problem, sampler, n, tol)
    q_est = estimate_q(problem, sampler, n)
    continuity_map = (
        problem.k_squared() if problem.theorem_mode == "thm24" else problem.K
    )
    continuity = check_continuity(
        continuity_map, problem, sampler, max(1, min(n, 200))
    )
    applicable = commutes.passed and range_ok.passed and q_est.q_hat < Q_THRESHOLD
    return CheckReport(
        mode=problem.theorem_mode,
        commutes=commutes,
        range_ok=range_ok,
        continuity=continuity,
        q_estimate=q_est,
        q_threshold=Q_THRESHOLD,
        applicable=applicable,
        samples=n,
        seed=sampler.seed,
        tol=tol,
    )
