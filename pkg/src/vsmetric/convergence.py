"""Order-convergence detection for orbit traces and geometric-rate certificates.

Convergence and Cauchyness here are the dominated kind: a sequence
converges (is Cauchy) when its residuals are bounded by some lattice
sequence decreasing to zero.  For recorded finite traces the witness is
constructed explicitly as the tail supremum of the residuals, and the
"decreases to zero" judgment is made at an explicit tolerance over an
explicit horizon; both are reported with every verdict, because that is
the only computable rendering of the infinite-sequence definitions.

The rate certificate checks two things against a contraction factor
``alpha < 1``: that consecutive step values shrink geometrically, and
that pairwise separations obey the closed-form tail bound

    S(h_l, h_l, h_b)  <=  2 * alpha^l / (1 - alpha) * S(h_0, h_0, h_1)

which is what geometric steps imply for any later pair (l < b).
Comparisons use absolute slack 1e-12 plus 4 ulps of the larger operand,
since geometric recurrences accumulate rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .lattice import (
    DominatingSequence,
    Vec,
    decreases_to_zero,
    leq_with_slack,
    sup,
    tail_supremum,
)
from .smetric import SMetricSpec, eval_s

STEP_ABS_SLACK = 1e-12
STEP_ULPS = 4

TRACE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class OrbitTrace:
    """Recorded iteration orbit: points h_0..h_T plus consecutive step values.

    step_values[b] stores S(h_b, h_b, h_{b+1}); there is one fewer step
    value than points and every step value is nonnegative.
    """

    points: tuple[Vec, ...]
    step_values: tuple[Vec, ...]

    def __post_init__(self):
        points = tuple(self.points)
        steps = tuple(self.step_values)
        if len(steps) != len(points) - 1:
            raise ValueError("need exactly len(points) - 1 step values")
        for s in steps:
            if min(s.coords) < 0.0:
                raise ValueError("step values must be nonnegative")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "step_values", steps)

    @staticmethod
    def from_points(points: Sequence[Vec], spec: SMetricSpec) -> "OrbitTrace":
        pts = tuple(points)
        steps = tuple(
            eval_s(spec, a, a, b) for a, b in zip(pts, pts[1:])
        )
        return OrbitTrace(pts, steps)

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class RateCertificate:
    """Outcome of checking a trace against a geometric contraction factor."""

    alpha: float
    step_ok: bool
    pair_bound_ok: bool
    worst_step_ratio: float
    worst_pair_slack: float
    horizon: int

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "step_ok": self.step_ok,
            "pair_bound_ok": self.pair_bound_ok,
            "worst_step_ratio": _json_number(self.worst_step_ratio),
            "worst_pair_slack": self.worst_pair_slack,
            "horizon": self.horizon,
        }


def _json_number(x: float):
    # Infinity is not valid JSON; reports encode it as null.
    return None if math.isinf(x) else x


def _ratio(num: float, den: float) -> float:
    """Nonnegative ratio with the order-comparison conventions 0/0 -> 0, pos/0 -> inf."""
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def _slack_leq(a: Vec, b: Vec) -> bool:
    return leq_with_slack(a, b, abs_slack=STEP_ABS_SLACK, ulps=STEP_ULPS)


def is_v_convergent(
    trace_points: Sequence[Vec],
    limit: Vec,
    spec: SMetricSpec,
    tol: float,
) -> tuple[bool, DominatingSequence]:
    """Decide dominated convergence of the points to ``limit``.

    Residuals r_n = S(x_n, x_n, limit) are dominated by their tail
    supremum mu; the verdict is whether mu decreases below tol, and mu is
    returned as the witness.
    """
    if not trace_points:
        raise ValueError("empty trace")
    residuals = [eval_s(spec, p, p, limit) for p in trace_points]
    mu = tail_supremum(residuals, tolerance=tol)
    return decreases_to_zero(list(mu), tol), mu


def is_v_cauchy(
    trace_points: Sequence[Vec],
    spec: SMetricSpec,
    tol: float,
    horizon: int,
) -> tuple[bool, DominatingSequence]:
    """Decide the dominated Cauchy property over index gaps 1..horizon.

    c_n = sup over q in [1, horizon] of S(x_n, x_n, x_{n+q}), computed for
    every n with n + horizon in range; the witness is tail_supremum(c).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if len(trace_points) <= horizon:
        raise ValueError(
            f"trace too short: need more than horizon={horizon} points, "
            f"got {len(trace_points)}"
        )
    cs: list[Vec] = []
    for n in range(len(trace_points) - horizon):
        c = eval_s(spec, trace_points[n], trace_points[n], trace_points[n + 1])
        for q in range(2, horizon + 1):
            c = sup(c, eval_s(spec, trace_points[n], trace_points[n], trace_points[n + q]))
        cs.append(c)
    mu = tail_supremum(cs, tolerance=tol)
    return decreases_to_zero(list(mu), tol), mu


def certify_geometric_rate(
    trace: OrbitTrace, alpha: float, spec: SMetricSpec
) -> RateCertificate:
    """Check a trace against contraction factor alpha.

    step_ok:       S(h_b, h_b, h_{b+1}) <= alpha * S(h_{b-1}, h_{b-1}, h_b)
                   for every b, up to fp slack.
    pair_bound_ok: S(h_l, h_l, h_b) <= 2 alpha^l / (1-alpha) * S(h_0,h_0,h_1)
                   for all l < b up to the horizon (the last trace index).

    worst_step_ratio is the largest coordinatewise step ratio seen
    (0/0 counts as 0, positive/0 as infinity); worst_pair_slack is the
    signed worst margin of the pair bound (negative means headroom).
    """
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    if len(trace) < 3:
        raise ValueError("trace needs at least 3 points")

    step_ok = True
    worst_ratio = 0.0
    for prev, cur in zip(trace.step_values, trace.step_values[1:]):
        if not _slack_leq(cur, alpha * prev):
            step_ok = False
        for num, den in zip(cur.coords, prev.coords):
            worst_ratio = max(worst_ratio, _ratio(num, den))

    horizon = len(trace) - 1
    first = trace.step_values[0]
    pair_ok = True
    worst_slack = -math.inf
    for l in range(horizon):
        bound = (2.0 * alpha**l / (1.0 - alpha)) * first
        for b in range(l + 1, horizon + 1):
            sep = eval_s(spec, trace.points[l], trace.points[l], trace.points[b])
            if not _slack_leq(sep, bound):
                pair_ok = False
            worst_slack = max(
                worst_slack,
                max(s - bd for s, bd in zip(sep.coords, bound.coords)),
            )

    return RateCertificate(alpha, step_ok, pair_ok, worst_ratio, worst_slack, horizon)


def write_trace(path: str | Path, trace: OrbitTrace, spec: SMetricSpec) -> None:
    """Serialize a trace as JSON lines, one record per index.

    The first line is a header carrying the schema version and the metric,
    so a trace file is self-contained for later certification.
    """
    lines = [
        json.dumps(
            {
                "schema_version": TRACE_SCHEMA_VERSION,
                "kind": "orbit-trace",
                "metric": spec.to_dict(),
            },
            sort_keys=True,
        )
    ]
    for i, p in enumerate(trace.points):
        step = (
            list(trace.step_values[i].coords) if i < len(trace.step_values) else None
        )
        lines.append(
            json.dumps(
                {"index": i, "point": list(p.coords), "step_value": step},
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace(path: str | Path) -> tuple[OrbitTrace, Optional[SMetricSpec]]:
    """Read a JSON-lines trace; returns the trace and its metric if recorded."""
    text = Path(path).read_text(encoding="utf-8")
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not records:
        raise ValueError(f"empty trace file {path}")
    spec = None
    if isinstance(records[0], dict) and records[0].get("kind") == "orbit-trace":
        header = records.pop(0)
        spec = SMetricSpec.from_dict(header["metric"])
    points = []
    steps = []
    for rec in records:
        points.append(Vec(tuple(rec["point"])))
        if rec.get("step_value") is not None:
            steps.append(Vec(tuple(rec["step_value"])))
    return OrbitTrace(tuple(points), tuple(steps)), spec
