import dataclasses
import math
import random

import pytest

from vsmetric.catalog import load_catalog_problem
from vsmetric.convergence import certify_geometric_rate
from vsmetric.errors import InversionError, ProblemError
from vsmetric.expr import eval_map, parse_map
from vsmetric.lattice import vec
from vsmetric.sampling import Box
from vsmetric.smetric import SMetricSpec, eval_s
from vsmetric.solver import (
    ProblemSpec,
    jungck_step,
    multi_start,
    residuals,
    solve,
)


@pytest.fixture(scope="module")
def quarter_half():
    problem, _ = load_catalog_problem("example_2_6")
    return problem


@pytest.fixture(scope="module")
def square_pair():
    problem, _ = load_catalog_problem("example_2_5")
    return problem


def with_carrier(problem, lo, hi):
    return dataclasses.replace(problem, carrier=Box((lo,), (hi,)))


def test_jungck_step_quarter_half(quarter_half):
    next_v, h = jungck_step(quarter_half, vec(1.0))
    assert h == vec(0.25)
    assert next_v == vec(0.5)
    next_v, h = jungck_step(quarter_half, vec(0.0))
    assert next_v == vec(0.0) and h == vec(0.0)


def test_jungck_step_rejects_outside_start(quarter_half):
    with pytest.raises(ProblemError):
        jungck_step(quarter_half, vec(2.0))


def test_jungck_step_bisection_inverse(square_pair):
    # f(0) = 5, so the step must solve 2 y^2 = 5 inside [-3, 3];
    # oracle: y = sqrt(2.5), and the deterministic tie-break picks the
    # leftmost of the two roots.
    next_v, h = jungck_step(with_carrier(square_pair, -2.0, 2.0), vec(0.0))
    assert h == vec(5.0)
    assert abs(abs(next_v.coords[0]) - math.sqrt(2.5)) < 1e-10
    assert next_v.coords[0] < 0
    back = eval_map(square_pair.K, next_v)
    assert abs(back.coords[0] - 5.0) <= 1e-10


def test_jungck_step_inversion_failure_carries_witness(square_pair):
    narrow = with_carrier(square_pair, 0.0, 1.0)
    with pytest.raises(InversionError) as err:
        jungck_step(narrow, vec(0.5))
    assert err.value.witness == vec(0.5)


def test_solve_quarter_half_from_one(quarter_half):
    report = solve(quarter_half, vec(1.0), max_iters=100, tol=1e-9)
    assert report.converged
    assert report.iterations <= 40
    assert abs(report.fixed_point.coords[0]) <= 1e-9
    assert report.observed_sigma == 0.5
    # the orbit is exactly h_b = 2^-(b+2)
    for b, p in enumerate(report.trace.points):
        assert p == vec(2.0 ** -(b + 2))


def test_solve_quarter_half_from_zero(quarter_half):
    report = solve(quarter_half, vec(0.0))
    assert report.converged
    assert report.iterations == 1
    assert report.fixed_point == vec(0.0)
    assert report.residual_f == vec(0.0)
    assert report.residual_K == vec(0.0)


def test_solve_square_pair_never_confirms(square_pair):
    # f(x) = x^2 + 5 has no real fixed point: x^2 - x + 5 >= 4.75 at the
    # parabola vertex x = 1/2, so the residual is bounded away from zero
    # while the h-orbit itself stays >= 5.
    report = solve(square_pair, vec(1.0), max_iters=200, tol=1e-9)
    assert not report.converged
    assert min(report.residual_f.coords) >= 4.75 - 1e-9
    assert all(p.coords[0] >= 5.0 for p in report.trace.points)


def test_residual_fixtures(quarter_half, square_pair):
    rf, rk = residuals(quarter_half, vec(0.0))
    assert rf == vec(0.0) and rk == vec(0.0)
    rf, rk = residuals(quarter_half, vec(1.0))
    assert rf == vec(1.5)  # 2|1/4 - 1|
    assert rk == vec(1.0)  # 2|1/2 - 1|
    rf, _ = residuals(square_pair, vec(0.5))
    assert rf == vec(4.75, 4.75)  # f(1/2) - 1/2 = 4.75 in both weights


def test_step_identity_invariant(quarter_half, square_pair):
    rng = random.Random(404)
    for _ in range(25):
        v = vec(rng.uniform(0.0, 1.0))
        next_v, h = jungck_step(quarter_half, v)
        assert abs(eval_map(quarter_half.K, next_v) - h).max_coord() <= 1e-12
    for _ in range(25):
        v = vec(rng.uniform(-3.0, 3.0))
        next_v, h = jungck_step(square_pair, v)
        assert abs(eval_map(square_pair.K, next_v) - h).max_coord() <= 1e-10


def test_trace_step_values_match_recomputation(quarter_half):
    report = solve(quarter_half, vec(0.7))
    trace = report.trace
    for i, s in enumerate(trace.step_values):
        assert s == eval_s(
            quarter_half.metric, trace.points[i], trace.points[i], trace.points[i + 1]
        )


def test_contraction_transfer(quarter_half):
    rng = random.Random(82)
    for _ in range(10):
        report = solve(quarter_half, vec(rng.uniform(0.0, 1.0)))
        if report.observed_sigma < 1.0 and len(report.trace) >= 3:
            cert = certify_geometric_rate(
                report.trace, report.observed_sigma, quarter_half.metric
            )
            assert cert.step_ok


def test_convergence_soundness_idempotent(quarter_half):
    report = solve(quarter_half, vec(0.9), tol=1e-9)
    assert report.converged
    rf, rk = residuals(quarter_half, report.fixed_point)
    assert rf.max_coord() <= 1e-9
    assert rk.max_coord() <= 1e-9


def test_thm24_mode_quarter_half(quarter_half):
    problem = dataclasses.replace(quarter_half, theorem_mode="thm24")
    report = solve(problem, vec(1.0), tol=1e-9)
    assert report.converged
    assert abs(report.fixed_point.coords[0]) <= 1e-9
    # commuting-pair conjugacy at the candidate c: K(c) ~ c and f(c) ~ c
    c = report.fixed_point
    assert abs(eval_map(problem.K, c) - c).max_coord() <= 1e-9
    assert abs(eval_map(problem.f, c) - c).max_coord() <= 1e-9


def test_wrong_analytic_inverse_is_rejected(quarter_half):
    bad = dataclasses.replace(quarter_half, K_inverse=parse_map(["3*x0"], 1))
    with pytest.raises(InversionError):
        solve(bad, vec(0.8))


def test_multidimensional_with_analytic_inverse():
    problem = ProblemSpec(
        carrier=Box((0.0, 0.0), (1.0, 1.0)),
        f=parse_map(["x0/4", "x1/4"], 2),
        K=parse_map(["x0/2", "x1/2"], 2),
        K_inverse=parse_map(["2*x0", "2*x1"], 2),
        metric=SMetricSpec("abs_sum", 2),
    )
    report = solve(problem, vec(1.0, 0.5))
    assert report.converged
    assert abs(report.fixed_point).max_coord() <= 1e-9


def test_multidimensional_without_inverse_is_refused():
    problem = ProblemSpec(
        carrier=Box((0.0, 0.0), (1.0, 1.0)),
        f=parse_map(["x0/4", "x1/4"], 2),
        K=parse_map(["x0/2", "x1/2"], 2),
        metric=SMetricSpec("abs_sum", 2),
    )
    with pytest.raises(InversionError):
        solve(problem, vec(1.0, 0.5))


def test_multi_start_unique_cluster(quarter_half):
    rng = random.Random(11)
    starts = [vec(rng.uniform(0.0, 1.0)) for _ in range(40)]
    report = multi_start(quarter_half, starts, cluster_radius=1e-6)
    assert report.cluster_count == 1
    assert report.converged_count == 40
    assert report.clusters[0].diameter <= 1e-8
    assert abs(report.clusters[0].representative.coords[0]) <= 1e-9


def test_multi_start_single_start_at_fixed_point(quarter_half):
    report = multi_start(quarter_half, [vec(0.0)])
    assert report.cluster_count == 1
    assert report.clusters[0].diameter == 0.0


def test_multi_start_square_pair_no_clusters(square_pair):
    rng = random.Random(23)
    starts = [vec(rng.uniform(-3.0, 3.0)) for _ in range(20)]
    report = multi_start(square_pair, starts)
    assert report.cluster_count == 0
    assert report.converged_count == 0
    assert len(report.failures) == 20


def test_sign_flipping_map_needs_residual_confirmation():
    # f = -x/4 flips sign, so the residual at the candidate is 2.5|h|
    # while the step criterion fires at ~2|h|: at tol 1e-9 the loop stops
    # one iteration before the residual clears, and the report must be an
    # honest non-convergence even though the candidate is already tiny.
    problem = ProblemSpec(
        carrier=Box((-1.0,), (1.0,)),
        f=parse_map(["-x0/4"], 1),
        K=parse_map(["-x0/2"], 1),
        metric=SMetricSpec("abs_sum", 1),
    )
    report = solve(problem, vec(1.0), tol=1e-9)
    assert not report.converged
    assert abs(report.fixed_point.coords[0]) < 1e-9
    assert report.residual_f.max_coord() > 1e-9
    # the orbit halves each step, so the residual is 1.25x the stopping
    # step value; a tolerance with enough headroom above the nearest power
    # of two lets the same orbit confirm
    assert solve(problem, vec(1.0), tol=1.5e-9).converged


def test_decreasing_k_inverts_by_bisection():
    problem = ProblemSpec(
        carrier=Box((-1.0,), (1.0,)),
        f=parse_map(["-x0/4"], 1),
        K=parse_map(["-x0/2"], 1),
        metric=SMetricSpec("abs_sum", 1),
    )
    next_v, h = jungck_step(problem, vec(1.0))
    assert h == vec(-0.25)
    assert abs(eval_map(problem.K, next_v) - h).max_coord() <= 1e-10


def test_problem_spec_validation():
    with pytest.raises(ProblemError):
        ProblemSpec(
            carrier=Box((0.0,), (1.0,)),
            f=parse_map(["x0", "x0"], 1),  # not a self-map
            K=parse_map(["x0"], 1),
            metric=SMetricSpec("abs_sum", 1),
        )
    with pytest.raises(ProblemError):
        ProblemSpec(
            carrier=Box((0.0,), (1.0,)),
            f=parse_map(["x0"], 1),
            K=parse_map(["x0"], 1),
            metric=SMetricSpec("abs_sum", 1),
            q_claimed=1.5,
        )
    with pytest.raises(ProblemError):
        ProblemSpec(
            carrier=Box((0.0,), (1.0,)),
            f=parse_map(["x0"], 1),
            K=parse_map(["x0"], 1),
            metric=SMetricSpec("abs_sum", 1),
            theorem_mode="thm99",
        )
