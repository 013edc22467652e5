"""Common-fixed-point iteration for a commuting map pair (f, K).

The scheme is the classical Jungck iteration: starting from v_0, each
step computes h = f(v) and then pulls h back through K to get the next
iterate, so that the recorded orbit satisfies h_b = f(v_b) = K(v_{b+1}).
When the pair satisfies the contraction hypotheses the h-orbit is a
geometrically-Cauchy sequence converging to the unique common fixed
point h* with K(h*) = f(h*) = h*.

Stopping is two-staged on purpose: the iteration halts when consecutive
step values fall below tolerance, but convergence is only declared after
re-evaluating both fixed-point residuals at the candidate.  A stalled
orbit of a non-contractive pair can have tiny steps while sitting far
from any common fixed point, and must be reported as non-converged.

K-inversion prefers a user-supplied inverse map (verified on every use);
without one, scalar problems fall back to bracketed bisection over the
carrier interval with a deterministic leftmost-root tie-break.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .convergence import OrbitTrace, RateCertificate
from .errors import InversionError, ProblemError
from .expr import MapSpec, compose, eval_map, format_map
from .lattice import Vec
from .sampling import Box
from .smetric import SMetricSpec, eval_s, s_distance

ANALYTIC_INVERSE_TOL = 1e-12
BISECTION_RESIDUAL_TOL = 1e-10
BISECTION_ITERATIONS = 200
BRACKET_SCAN_CELLS = 64
CARRIER_SLACK = 1e-9

THEOREM_MODES = ("thm22", "cor23", "thm24")


@dataclass(frozen=True)
class ProblemSpec:
    """A complete problem: carrier box, the pair (f, K), metric, and mode."""

    carrier: Box
    f: MapSpec
    K: MapSpec
    metric: SMetricSpec
    K_inverse: Optional[MapSpec] = None
    q_claimed: Optional[float] = None
    theorem_mode: str = "thm22"

    def __post_init__(self):
        d = self.carrier.dim
        for name, m in (("f", self.f), ("K", self.K)):
            if m.in_dim != d or m.out_dim != d:
                raise ProblemError(
                    f"{name} must be a self-map of the carrier "
                    f"(dimension {d}), got {m.in_dim} -> {m.out_dim}"
                )
        if self.K_inverse is not None and (
            self.K_inverse.in_dim != d or self.K_inverse.out_dim != d
        ):
            raise ProblemError("K_inverse must be a self-map of the carrier")
        if self.metric.carrier_dim != d:
            raise ProblemError(
                f"metric carrier dimension {self.metric.carrier_dim} != {d}"
            )
        if self.q_claimed is not None and not (0.0 <= self.q_claimed < 1.0):
            raise ProblemError("q_claimed must lie in [0, 1)")
        if self.theorem_mode not in THEOREM_MODES:
            raise ProblemError(
                f"theorem_mode must be one of {THEOREM_MODES}, got {self.theorem_mode!r}"
            )

    @property
    def dim(self) -> int:
        return self.carrier.dim

    def k_squared(self) -> MapSpec:
        return compose(self.K, self.K)

    def k_squared_inverse(self) -> Optional[MapSpec]:
        if self.K_inverse is None:
            return None
        return compose(self.K_inverse, self.K_inverse)

    def to_dict(self) -> dict:
        return {
            "carrier": self.carrier.to_dict(),
            "f": format_map(self.f),
            "K": format_map(self.K),
            "K_inverse": None if self.K_inverse is None else format_map(self.K_inverse),
            "metric": self.metric.to_dict(),
            "q_claimed": self.q_claimed,
            "theorem_mode": self.theorem_mode,
        }


def invert_map(
    problem: ProblemSpec,
    target: Vec,
    forward: Optional[MapSpec] = None,
    inverse: Optional[MapSpec] = None,
    witness: Optional[Vec] = None,
) -> Vec:
    """Solve forward(y) = target for y inside the carrier.

    Defaults to inverting the problem's K.  A supplied analytic inverse is
    verified on every use to within 1e-12; the scalar bisection fallback
    scans 64 subintervals for a sign change (leftmost wins) and accepts a
    residual of 1e-10.  Failure signals that the target has no preimage in
    the carrier, i.e. a concrete range-containment violation.
    """
    forward = forward if forward is not None else problem.K
    inverse = inverse if inverse is not None else problem.K_inverse
    box = problem.carrier

    if inverse is not None:
        y = eval_map(inverse, target)
        back = eval_map(forward, y)
        err = max(abs(a - b) for a, b in zip(back.coords, target.coords))
        if err > ANALYTIC_INVERSE_TOL:
            raise InversionError(
                f"supplied inverse is inconsistent: |K(K^-1(t)) - t| = {err:g} "
                f"> {ANALYTIC_INVERSE_TOL:g} at t = {list(target.coords)}",
                witness=witness,
            )
        if not box.contains(y, slack=CARRIER_SLACK):
            raise InversionError(
                f"preimage {list(y.coords)} falls outside the carrier box",
                witness=witness if witness is not None else target,
            )
        return y

    if box.dim != 1:
        raise InversionError(
            "no inverse map supplied and bisection fallback only supports "
            "1-dimensional carriers",
            witness=witness,
        )
    return _bisect_scalar(forward, target.coords[0], box, witness)


def _bisect_scalar(
    forward: MapSpec, target: float, box: Box, witness: Optional[Vec]
) -> Vec:
    lo, hi = box.lower[0], box.upper[0]

    def g(t: float) -> float:
        return eval_map(forward, Vec((t,))).coords[0] - target

    grid = [lo + (hi - lo) * k / BRACKET_SCAN_CELLS for k in range(BRACKET_SCAN_CELLS + 1)]
    values = [g(t) for t in grid]

    a = b = None
    for k in range(BRACKET_SCAN_CELLS):
        if values[k] == 0.0:
            return Vec((grid[k],))
        if values[k] * values[k + 1] < 0.0:
            a, b = grid[k], grid[k + 1]
            fa = values[k]
            break
    else:
        if values[-1] == 0.0:
            return Vec((grid[-1],))
        raise InversionError(
            f"no preimage of {target!r} found in carrier [{lo}, {hi}]: "
            "range containment fails at this point",
            witness=witness,
        )

    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break  # bracket cannot shrink further in floating point
        fm = g(mid)
        if fm == 0.0:
            a = b = mid
            break
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    y = 0.5 * (a + b)
    residual = abs(g(y))
    if residual > BISECTION_RESIDUAL_TOL:
        raise InversionError(
            f"bisection residual {residual:g} exceeds {BISECTION_RESIDUAL_TOL:g} "
            f"for target {target!r}",
            witness=witness,
        )
    return Vec((y,))


def jungck_step(problem: ProblemSpec, v: Vec) -> tuple[Vec, Vec]:
    """One iteration step: h = f(v), then next_v with K(next_v) = h.

    Raises InversionError when h has no K-preimage inside the carrier,
    which is a concrete witness against the range-containment hypothesis.
    """
    if not problem.carrier.contains(v, slack=CARRIER_SLACK):
        raise ProblemError(f"point {list(v.coords)} lies outside the carrier box")
    h = eval_map(problem.f, v)
    next_v = invert_map(problem, h, witness=v)
    return next_v, h


@dataclass
class SolveReport:
    converged: bool
    fixed_point: Vec
    residual_f: Vec
    residual_K: Vec
    iterations: int
    observed_sigma: float
    trace: OrbitTrace
    certificate: Optional[RateCertificate] = None

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "fixed_point": list(self.fixed_point.coords),
            "residual_f": list(self.residual_f.coords),
            "residual_K": list(self.residual_K.coords),
            "iterations": self.iterations,
            "observed_sigma": None
            if math.isinf(self.observed_sigma)
            else self.observed_sigma,
            "trace_length": len(self.trace),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def residuals(problem: ProblemSpec, x: Vec) -> tuple[Vec, Vec]:
    """Fixed-point residuals (S(fx, fx, x), S(Kx, Kx, x)) at a candidate."""
    fx = eval_map(problem.f, x)
    kx = eval_map(problem.K, x)
    return (
        eval_s(problem.metric, fx, fx, x),
        eval_s(problem.metric, kx, kx, x),
    )


def _observed_sigma(steps: Sequence[Vec]) -> float:
    worst = 0.0
    for prev, cur in zip(steps, steps[1:]):
        for num, den in zip(cur.coords, prev.coords):
            if den == 0.0:
                r = 0.0 if num == 0.0 else math.inf
            else:
                r = num / den
            worst = max(worst, r)
    return worst


def solve(
    problem: ProblemSpec,
    x0: Vec,
    max_iters: int = 100,
    tol: float = 1e-9,
) -> SolveReport:
    """Iterate the scheme from x0, recording the full orbit.

    Stops when the coordinatewise maximum of the latest step value drops
    below tol (or at max_iters), then confirms convergence by evaluating
    both residuals at the candidate fixed point.  In thm24 mode the start
    is first projected into the range of K by one application of K, and
    the candidate is f(K(p)) with p the limit of the f-images of the
    orbit, matching that theorem's fixed-point construction.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    v = x0
    if problem.theorem_mode == "thm24":
        v = eval_map(problem.K, x0)
        if not problem.carrier.contains(v, slack=CARRIER_SLACK):
            raise ProblemError(
                "projected start K(x0) falls outside the carrier box"
            )
    hs: list[Vec] = []
    steps: list[Vec] = []
    iterations = 0
    while True:
        # Each step yields h_b = f(v_b) together with v_{b+1}; the step
        # value compares h_b against the previous image h_{b-1}.
        try:
            v, h = jungck_step(problem, v)
        except InversionError as exc:
            raise InversionError(
                f"iteration {iterations}: {exc}", witness=exc.witness
            ) from exc
        hs.append(h)
        if len(hs) >= 2:
            s = eval_s(problem.metric, hs[-2], hs[-2], h)
            steps.append(s)
            iterations += 1
            if s.max_coord() <= tol or iterations >= max_iters:
                break

    if problem.theorem_mode == "thm24":
        p = eval_map(problem.f, hs[-1])
        candidate = eval_map(problem.f, eval_map(problem.K, p))
    else:
        candidate = hs[-1]

    res_f, res_k = residuals(problem, candidate)
    converged = res_f.max_coord() <= tol and res_k.max_coord() <= tol
    trace = OrbitTrace(tuple(hs), tuple(steps))
    return SolveReport(
        converged=converged,
        fixed_point=candidate,
        residual_f=res_f,
        residual_K=res_k,
        iterations=iterations,
        observed_sigma=_observed_sigma(steps),
        trace=trace,
    )


@dataclass
class Cluster:
    representative: Vec
    members: list[Vec]
    diameter: float

    def to_dict(self) -> dict:
        return {
            "representative": list(self.representative.coords),
            "size": len(self.members),
            "diameter": self.diameter,
        }


@dataclass
class StartFailure:
    index: int
    start: Vec
    reason: str

    def to_dict(self) -> dict:
        return {"index": self.index, "start": list(self.start.coords), "reason": self.reason}


@dataclass
class UniquenessReport:
    starts: int
    converged_count: int
    clusters: list[Cluster]
    failures: list[StartFailure]

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    def to_dict(self) -> dict:
        return {
            "starts": self.starts,
            "converged": self.converged_count,
            "cluster_count": self.cluster_count,
            "clusters": [c.to_dict() for c in self.clusters],
            "failures": [f.to_dict() for f in self.failures],
        }


def multi_start(
    problem: ProblemSpec,
    starts: Sequence[Vec],
    max_iters: int = 100,
    tol: float = 1e-9,
    cluster_radius: float = 1e-6,
) -> UniquenessReport:
    """Probe uniqueness: solve from every start and cluster the fixed points.

    Starts are processed independently in index order; converged fixed
    points join the first existing cluster whose representative lies
    within cluster_radius in S-distance, so the outcome is deterministic.
    Non-converged or faulting starts are recorded as failures, not errors.
    """
    if not starts:
        raise ValueError("need at least one start")
    clusters: list[Cluster] = []
    failures: list[StartFailure] = []
    converged_count = 0
    for i, x0 in enumerate(starts):
        try:
            report = solve(problem, x0, max_iters=max_iters, tol=tol)
        except (InversionError, ProblemError) as exc:
            failures.append(StartFailure(i, x0, str(exc)))
            continue
        if not report.converged:
            failures.append(
                StartFailure(
                    i,
                    x0,
                    "did not converge: residuals "
                    f"{list(report.residual_f.coords)} / {list(report.residual_K.coords)}",
                )
            )
            continue
        converged_count += 1
        fp = report.fixed_point
        for cluster in clusters:
            if s_distance(problem.metric, cluster.representative, fp) <= cluster_radius:
                cluster.members.append(fp)
                break
        else:
            clusters.append(Cluster(fp, [fp], 0.0))

    for cluster in clusters:
        diam = 0.0
        for j, a in enumerate(cluster.members):
            for b in cluster.members[j + 1:]:
                diam = max(diam, s_distance(problem.metric, a, b))
        cluster.diameter = diam

    return UniquenessReport(len(starts), converged_count, clusters, failures)
