"""Seeded random instances for property suites."""

from __future__ import annotations

import math

import numpy as np

from .interpolation import RootSpec
from .trigpoly import RakedTrigPoly, canonical_angle

MIN_SEPARATION = 0.15
MAX_SPAN = 0.75 * math.pi


def random_composition(total: int, parts: int, rng: np.random.Generator) -> list[int]:
    """Uniform composition of ``total`` into ``parts`` positive integers."""
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False)) if parts > 1 else []
    bounds = np.concatenate(([0], cuts, [total]))
    return [int(x) for x in np.diff(bounds)]


def random_angles_in_arc(n: int, rng: np.random.Generator, min_sep: float = MIN_SEPARATION, max_span: float = MAX_SPAN) -> list[float]:
    """``n`` angles at pairwise distance ``>= min_sep`` inside an arc no longer than ``max_span``."""
    start = rng.uniform(0.0, 2 * math.pi)
    if n == 1:
        return [canonical_angle(start)]
    floor = min_sep * (n - 1)
    if floor > max_span:
        raise ValueError(f"{n} points at separation {min_sep} do not fit in {max_span}")
    span = rng.uniform(floor, max_span)
    gaps = min_sep + (span - floor) * rng.dirichlet(np.ones(n - 1))
    offsets = np.concatenate(([0.0], np.cumsum(gaps)))
    return [canonical_angle(start + o) for o in offsets]


def random_root_spec(k: int, rng: np.random.Generator, max_mult: int | None = None) -> RootSpec:
    """Random admissible root data: composition of ``2k`` placed in a short arc."""
    max_mult = 2 * k if max_mult is None else max_mult
    lowest = -(-2 * k // max_mult)
    while True:
        n = int(rng.integers(lowest, 2 * k + 1))
        mults = random_composition(2 * k, n, rng)
        if max(mults) <= max_mult:
            break
    angles = random_angles_in_arc(n, rng)
    return RootSpec(tuple(zip(angles, mults)), k)


def random_raked(k: int, rng: np.random.Generator, constant: float | None = None) -> RakedTrigPoly:
    c = rng.normal() if constant is None else constant
    return RakedTrigPoly(c, rng.normal(size=k), rng.normal(size=k))


def random_semicircle_angles(n: int, rng: np.random.Generator, span: float = 0.9 * math.pi) -> list[float]:
    """``n`` uniform angles in a random arc of length ``span``."""
    start = rng.uniform(0.0, 2 * math.pi)
    return [canonical_angle(start + x) for x in np.sort(rng.uniform(0.0, span, n))]
