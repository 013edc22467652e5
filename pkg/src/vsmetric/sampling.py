"""Carrier boxes and seeded uniform samplers.

All randomized checks in the package draw from a :class:`BoxSampler`
seeded explicitly, so every report is reproducible from its recorded
seed.  Corner enumeration is exposed separately: several checks want
deterministic boundary anchors in addition to uniform fill, because
worst cases of ratio estimates are often attained on the boundary.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .lattice import Vec


@dataclass(frozen=True)
class Box:
    """Axis-aligned closed box: per-coordinate [lower, upper] intervals."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("box needs matching nonempty lower/upper bounds")
        for lo, hi in zip(self.lower, self.upper):
            if not (lo <= hi):
                raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, p: Vec, slack: float = 0.0) -> bool:
        if p.dim != self.dim:
            return False
        return all(
            lo - slack <= x <= hi + slack
            for x, lo, hi in zip(p.coords, self.lower, self.upper)
        )

    def center(self) -> Vec:
        return Vec(tuple((lo + hi) / 2.0 for lo, hi in zip(self.lower, self.upper)))

    def corners(self, cap: int = 64) -> list[Vec]:
        """All box corners, truncated to ``cap`` for high dimensions."""
        out: list[Vec] = []
        for picks in itertools.product(*zip(self.lower, self.upper)):
            out.append(Vec(picks))
            if len(out) >= cap:
                break
        return out

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}


class BoxSampler:
    """Uniform sampler over a box, deterministic for a given seed."""

    def __init__(self, box: Box, seed: int):
        self.box = box
        self.seed = int(seed)
        self._rng = random.Random(self.seed)

    def point(self) -> Vec:
        return Vec(
            tuple(
                self._rng.uniform(lo, hi)
                for lo, hi in zip(self.box.lower, self.box.upper)
            )
        )

    def points(self, n: int) -> list[Vec]:
        return [self.point() for _ in range(n)]
