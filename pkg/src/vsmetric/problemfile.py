"""Strict TOML problem-file ingestion.

A problem file declares the carrier box, the map pair, the metric, the
theorem mode, and default run options.  Parsing is strict: unknown keys
or sections are fatal, so a typo like ``theorem_mod`` cannot silently
select the wrong hypothesis set.

Sections and keys::

    [carrier]   dim, lower, upper
    [maps]      f, K, K_inverse          (expression string or list per coord)
    [metric]    kind, rho, sigma, expressions, codomain_dim
    [theorem]   mode, q_claimed
    [options]   tol, max_iters, samples, seed

``[options]`` provides defaults; command-line flags override them.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ProblemError
from .expr import parse_map
from .sampling import Box
from .smetric import SMetricSpec
from .solver import ProblemSpec

_SECTION_KEYS = {
    "carrier": {"dim", "lower", "upper"},
    "maps": {"f", "K", "K_inverse"},
    "metric": {"kind", "rho", "sigma", "expressions", "codomain_dim"},
    "theorem": {"mode", "q_claimed"},
    "options": {"tol", "max_iters", "samples", "seed"},
}

DEFAULT_OPTIONS = {
    "tol": 1e-9,
    "max_iters": 100,
    "samples": 1000,
    "seed": 0,
}


@dataclass
class RunOptions:
    tol: float = 1e-9
    max_iters: int = 100
    samples: int = 1000
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "max_iters": self.max_iters,
            "samples": self.samples,
            "seed": self.seed,
        }


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ProblemError(message)


def _check_keys(data: dict, path: str | Path) -> None:
    for section, body in data.items():
        if section not in _SECTION_KEYS:
            raise ProblemError(f"{path}: unknown section [{section}]")
        if not isinstance(body, dict):
            raise ProblemError(f"{path}: [{section}] must be a table")
        for key in body:
            if key not in _SECTION_KEYS[section]:
                raise ProblemError(f"{path}: unknown key {key!r} in [{section}]")
    for required in ("carrier", "maps", "metric", "theorem"):
        if required not in data:
            raise ProblemError(f"{path}: missing section [{required}]")


def _as_float_list(value, dim: int, what: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    _require(isinstance(value, list), f"{what} must be a number or list of numbers")
    out = tuple(float(v) for v in value)
    _require(len(out) == dim, f"{what} must have {dim} entries, got {len(out)}")
    return out


def _as_expr_list(value, what: str) -> list[str]:
    if isinstance(value, str):
        return [value]
    _require(
        isinstance(value, list) and all(isinstance(v, str) for v in value),
        f"{what} must be an expression string or list of expression strings",
    )
    return list(value)


def load_problem(path: str | Path) -> tuple[ProblemSpec, RunOptions]:
    """Parse a problem file into a ProblemSpec plus its default run options."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ProblemError(f"problem file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ProblemError(f"{path}: TOML parse error: {exc}") from exc

    _check_keys(data, path)

    carrier_tbl = data["carrier"]
    _require("dim" in carrier_tbl, f"{path}: [carrier] needs dim")
    dim = int(carrier_tbl["dim"])
    _require(dim >= 1, f"{path}: carrier dim must be >= 1")
    lower = _as_float_list(carrier_tbl.get("lower"), dim, f"{path}: carrier lower")
    upper = _as_float_list(carrier_tbl.get("upper"), dim, f"{path}: carrier upper")
    carrier = Box(lower, upper)

    maps_tbl = data["maps"]
    _require("f" in maps_tbl and "K" in maps_tbl, f"{path}: [maps] needs f and K")
    f = parse_map(_as_expr_list(maps_tbl["f"], f"{path}: maps.f"), dim)
    k = parse_map(_as_expr_list(maps_tbl["K"], f"{path}: maps.K"), dim)
    k_inv = None
    if "K_inverse" in maps_tbl:
        k_inv = parse_map(
            _as_expr_list(maps_tbl["K_inverse"], f"{path}: maps.K_inverse"), dim
        )

    metric_tbl = data["metric"]
    _require("kind" in metric_tbl, f"{path}: [metric] needs kind")
    kind = metric_tbl["kind"]
    if kind == "custom":
        _require(
            "expressions" in metric_tbl,
            f"{path}: custom metric needs expressions",
        )
        custom = parse_map(
            _as_expr_list(metric_tbl["expressions"], f"{path}: metric.expressions"),
            3 * dim,
        )
        if "codomain_dim" in metric_tbl:
            _require(
                int(metric_tbl["codomain_dim"]) == custom.out_dim,
                f"{path}: codomain_dim does not match the expression count",
            )
        metric = SMetricSpec("custom", dim, custom=custom)
    else:
        for forbidden in ("expressions", "codomain_dim"):
            _require(
                forbidden not in metric_tbl,
                f"{path}: {forbidden} is only valid for kind = \"custom\"",
            )
        if kind == "abs_sum":
            for forbidden in ("rho", "sigma"):
                _require(
                    forbidden not in metric_tbl,
                    f"{path}: {forbidden} is only valid for kind = \"weighted_pair\"",
                )
            metric = SMetricSpec("abs_sum", dim)
        elif kind == "weighted_pair":
            metric = SMetricSpec(
                "weighted_pair",
                dim,
                rho=float(metric_tbl.get("rho", 1.0)),
                sigma=float(metric_tbl.get("sigma", 1.0)),
            )
        else:
            raise ProblemError(f"{path}: unknown metric kind {kind!r}")

    theorem_tbl = data["theorem"]
    _require("mode" in theorem_tbl, f"{path}: [theorem] needs mode")
    mode = theorem_tbl["mode"]
    q_claimed = theorem_tbl.get("q_claimed")
    if q_claimed is not None:
        q_claimed = float(q_claimed)

    options_tbl = dict(DEFAULT_OPTIONS)
    options_tbl.update(data.get("options", {}))
    options = RunOptions(
        tol=float(options_tbl["tol"]),
        max_iters=int(options_tbl["max_iters"]),
        samples=int(options_tbl["samples"]),
        seed=int(options_tbl["seed"]),
    )

    problem = ProblemSpec(
        carrier=carrier,
        f=f,
        K=k,
        metric=metric,
        K_inverse=k_inv,
        q_claimed=q_claimed,
        theorem_mode=mode,
    )
    return problem, options
