"""Command-line front end.

Subcommands
    validate-space   sample-check the metric axioms of a problem's S-metric
    check            verify every hypothesis for the problem's theorem mode
    solve            run the common-fixed-point iteration from a start point
    probe            multi-start uniqueness probe with fixed-point clustering
    certify          check a recorded trace against a geometric rate alpha

Exit codes: 0 pass, 1 hypothesis/convergence finding, 2 input fault,
3 inversion fault.  All sampling is seeded and the seed is recorded in
the report, so a rerun with identical inputs produces byte-identical
JSON output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import resolve_problem
from .checker import check_applicability
from .convergence import certify_geometric_rate, read_trace, write_trace
from .errors import (
    DimensionMismatchError,
    EvaluationFault,
    ExprSyntaxError,
    InversionError,
    ProblemError,
)
from .lattice import Vec
from .problemfile import RunOptions
from .sampling import BoxSampler
from .smetric import check_symmetry, validate_axioms
from .solver import ProblemSpec, multi_start, solve

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_FINDING = 1
EXIT_INPUT_FAULT = 2
EXIT_INVERSION_FAULT = 3

_INPUT_FAULTS = (
    ProblemError,
    ExprSyntaxError,
    EvaluationFault,
    DimensionMismatchError,
    ValueError,
)


def _emit(args, command: str, payload: dict, problem_ref: str | None, options: dict,
          summary: str) -> None:
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "problem": problem_ref,
        "options": options,
        "report": payload,
    }
    text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    if getattr(args, "json", False):
        sys.stdout.write(text)
    else:
        print(summary)


def _merge_options(args, defaults: RunOptions) -> RunOptions:
    return RunOptions(
        tol=args.tol if args.tol is not None else defaults.tol,
        max_iters=getattr(args, "max_iters", None) or defaults.max_iters,
        samples=getattr(args, "samples", None) or defaults.samples,
        seed=args.seed if getattr(args, "seed", None) is not None else defaults.seed,
    )


def _parse_point(text: str, dim: int, what: str) -> Vec:
    try:
        coords = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ProblemError(f"{what}: cannot parse {text!r} as a point") from None
    if len(coords) != dim:
        raise ProblemError(
            f"{what}: expected {dim} comma-separated coordinates, got {len(coords)}"
        )
    return Vec(coords)


def _guard_custom_metric(problem: ProblemSpec, opts: RunOptions, force: bool) -> None:
    """Custom metrics are validated, never trusted, before solving."""
    if problem.metric.kind != "custom" or force:
        return
    sampler = BoxSampler(problem.carrier, opts.seed)
    report = validate_axioms(problem.metric, sampler, opts.samples, opts.tol)
    if not report.passed:
        failed = ", ".join(e.name for e in report.entries if not e.passed)
        raise ProblemError(
            f"custom metric failed axiom validation ({failed}); "
            "rerun with --force to proceed anyway"
        )


def cmd_validate_space(args) -> int:
    problem, defaults = resolve_problem(args.problem)
    opts = _merge_options(args, defaults)
    sampler = BoxSampler(problem.carrier, opts.seed)
    axioms = validate_axioms(
        problem.metric, sampler, opts.samples, opts.tol, args.axiom_c_variant
    )
    symmetry = check_symmetry(problem.metric, sampler, opts.samples, opts.tol)
    ok = axioms.passed and symmetry.passed
    payload = {"axioms": axioms.to_dict(), "symmetry": symmetry.to_dict()}
    worst = max(
        [e.worst_violation for e in axioms.entries] + [symmetry.max_deviation]
    )
    _emit(
        args,
        "validate-space",
        payload,
        args.problem,
        opts.to_dict() | {"axiom_c_variant": args.axiom_c_variant},
        f"validate-space: {'PASS' if ok else 'FAIL'} "
        f"(samples={opts.samples}, worst violation {worst:g})",
    )
    return EXIT_PASS if ok else EXIT_FINDING


def cmd_check(args) -> int:
    problem, defaults = resolve_problem(args.problem)
    opts = _merge_options(args, defaults)
    sampler = BoxSampler(problem.carrier, opts.seed)
    report = check_applicability(problem, sampler, opts.samples, opts.tol)
    q = "inf" if report.q_hat == float("inf") else f"{report.q_hat:g}"
    _emit(
        args,
        "check",
        report.to_dict(),
        args.problem,
        opts.to_dict(),
        f"check[{report.mode}]: {'APPLICABLE' if report.applicable else 'NOT APPLICABLE'} "
        f"(commutes={'pass' if report.commutes.passed else 'FAIL'}, "
        f"range={'pass' if report.range_ok.passed else 'FAIL'}, "
        f"q_hat={q} vs {report.q_threshold:g})",
    )
    return EXIT_PASS if report.applicable else EXIT_FINDING


def cmd_solve(args) -> int:
    problem, defaults = resolve_problem(args.problem)
    opts = _merge_options(args, defaults)
    _guard_custom_metric(problem, opts, args.force)
    if args.x0 is not None:
        x0 = _parse_point(args.x0, problem.dim, "--x0")
    else:
        x0 = problem.carrier.center()
    report = solve(problem, x0, max_iters=opts.max_iters, tol=opts.tol)
    if args.certify_alpha is not None:
        report.certificate = certify_geometric_rate(
            report.trace, args.certify_alpha, problem.metric
        )
    if args.trace_out:
        write_trace(args.trace_out, report.trace, problem.metric)
    options = opts.to_dict() | {
        "x0": list(x0.coords),
        "certify_alpha": args.certify_alpha,
    }
    point = "(" + ", ".join(f"{c:.12g}" for c in report.fixed_point.coords) + ")"
    _emit(
        args,
        "solve",
        report.to_dict(),
        args.problem,
        options,
        f"solve: {'CONVERGED' if report.converged else 'NOT CONVERGED'} "
        f"in {report.iterations} iterations, fixed point {point}, "
        f"observed sigma {report.observed_sigma:g}",
    )
    return EXIT_PASS if report.converged else EXIT_FINDING


def cmd_probe(args) -> int:
    problem, defaults = resolve_problem(args.problem)
    opts = _merge_options(args, defaults)
    _guard_custom_metric(problem, opts, args.force)
    sampler = BoxSampler(problem.carrier, opts.seed)
    starts = sampler.points(args.starts)
    report = multi_start(
        problem,
        starts,
        max_iters=opts.max_iters,
        tol=opts.tol,
        cluster_radius=args.cluster_radius,
    )
    options = opts.to_dict() | {
        "starts": args.starts,
        "cluster_radius": args.cluster_radius,
    }
    _emit(
        args,
        "probe",
        report.to_dict(),
        args.problem,
        options,
        f"probe: {report.cluster_count} cluster(s) from {report.starts} starts "
        f"({report.converged_count} converged)",
    )
    return EXIT_PASS if report.cluster_count == 1 else EXIT_FINDING


def cmd_certify(args) -> int:
    trace, metric = read_trace(args.trace)
    if args.problem is not None:
        problem, _ = resolve_problem(args.problem)
        metric = problem.metric
    if metric is None:
        raise ProblemError(
            "trace file carries no metric header; pass --problem to supply one"
        )
    cert = certify_geometric_rate(trace, args.alpha, metric)
    ok = cert.step_ok and cert.pair_bound_ok
    options = {"alpha": args.alpha, "trace": args.trace}
    _emit(
        args,
        "certify",
        cert.to_dict(),
        args.problem,
        options,
        f"certify: {'PASS' if ok else 'FAIL'} at alpha={args.alpha:g} "
        f"(step_ok={cert.step_ok}, pair_bound_ok={cert.pair_bound_ok}, "
        f"worst step ratio {cert.worst_step_ratio:g})",
    )
    return EXIT_PASS if ok else EXIT_FINDING


def _add_common(p: argparse.ArgumentParser, with_problem: bool = True) -> None:
    if with_problem:
        p.add_argument(
            "--problem",
            required=True,
            help="problem file path or builtin catalog name (example_1_9, "
            "example_2_5, example_2_6)",
        )
    p.add_argument("--out", help="write the JSON report to this file")
    p.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--seed", type=int, default=None, help="sampling seed override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vsmetric",
        description="Common-fixed-point solving and hypothesis checking on "
        "vector S-metric spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-space", help="sample-check the S-metric axioms")
    _add_common(p)
    p.add_argument("--samples", type=int, default=None, help="sample count override")
    p.add_argument(
        "--axiom-c-variant",
        choices=("literal", "standard"),
        default="literal",
        help="also check the standard split form of the triangle axiom",
    )
    p.set_defaults(func=cmd_validate_space)

    p = sub.add_parser("check", help="verify the theorem hypotheses numerically")
    _add_common(p)
    p.add_argument("--samples", type=int, default=None, help="sample count override")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="run the common-fixed-point iteration")
    _add_common(p)
    p.add_argument("--x0", help="start point, comma-separated (default: box center)")
    p.add_argument("--max-iters", type=int, default=None, dest="max_iters")
    p.add_argument(
        "--certify-alpha",
        type=float,
        default=None,
        help="attach a geometric-rate certificate at this alpha",
    )
    p.add_argument("--trace-out", help="write the orbit trace (JSON lines) here")
    p.add_argument(
        "--force",
        action="store_true",
        help="run even if a custom metric fails axiom validation",
    )
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("probe", help="multi-start uniqueness probe")
    _add_common(p)
    p.add_argument("--starts", type=int, default=20, help="number of start points")
    p.add_argument("--max-iters", type=int, default=None, dest="max_iters")
    p.add_argument(
        "--cluster-radius",
        type=float,
        default=1e-6,
        help="cluster fixed points within this S-distance",
    )
    p.add_argument("--force", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("certify", help="certify a recorded trace at a given alpha")
    p.add_argument("--trace", required=True, help="trace file (JSON lines)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument(
        "--problem",
        default=None,
        help="problem file supplying the metric when the trace has no header",
    )
    p.add_argument("--out", help="write the JSON report to this file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InversionError as exc:
        witness = "" if exc.witness is None else f" (witness {list(exc.witness.coords)})"
        print(f"error: inversion fault: {exc}{witness}", file=sys.stderr)
        return EXIT_INVERSION_FAULT
    except _INPUT_FAULTS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_FAULT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_FAULT


if __name__ == "__main__":
    sys.exit(main())
