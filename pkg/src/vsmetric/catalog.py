"""Builtin problem catalog shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import ProblemError
from .problemfile import RunOptions, load_problem
from .solver import ProblemSpec

CATALOG_NAMES = ("example_1_9", "example_2_5", "example_2_6")


def catalog_path(name: str) -> Path:
    """Filesystem path of a catalog entry; accepts bare names or foo.toml."""
    stem = name[:-5] if name.endswith(".toml") else name
    if stem not in CATALOG_NAMES:
        raise ProblemError(
            f"unknown catalog entry {name!r}; available: {', '.join(CATALOG_NAMES)}"
        )
    with resources.as_file(
        resources.files("vsmetric").joinpath("catalog", f"{stem}.toml")
    ) as p:
        return Path(p)


def load_catalog_problem(name: str) -> tuple[ProblemSpec, RunOptions]:
    return load_problem(catalog_path(name))


def resolve_problem(ref: str) -> tuple[ProblemSpec, RunOptions]:
    """Resolve a --problem argument: a filesystem path, a catalog name, or
    a catalog/<name>.toml style reference."""
    p = Path(ref)
    if p.exists():
        return load_problem(p)
    name = p.name if p.parent.name == "catalog" else ref
    stem = name[:-5] if name.endswith(".toml") else name
    if stem in CATALOG_NAMES:
        return load_catalog_problem(stem)
    raise ProblemError(f"problem file not found: {ref}")
