"""Critical arc lengths of two-endpoint tangent polynomials and the threshold phi_k."""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BracketFailure, InvalidInput, SingularSystem
from .interpolation import RootSpec, interpolate, positivity_margin
from .trigpoly import CirclePoint, RakedTrigPoly, canonical_angle, ccw_offset, critical_points

DEFAULT_TOL = 1e-10
BRACKET_LO = math.pi / 2 + 1e-6
# distances below pi tried, in order, for the upper end of the bracket; the
# system is singular at L = pi itself
BRACKET_HI_GAPS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.4)


@dataclass(frozen=True)
class Split:
    """Even endpoint multiplicities ``(m_a, m_b)`` of a tangent polynomial."""

    m_a: int
    m_b: int

    def __post_init__(self):
        for m in (self.m_a, self.m_b):
            if m < 2 or m % 2:
                raise InvalidInput(f"split multiplicities must be positive and even, got {m}")

    @property
    def k(self) -> int:
        return (self.m_a + self.m_b) // 2

    @property
    def is_canonical(self) -> bool:
        return self.m_a <= self.m_b

    def canonical(self) -> "Split":
        return self if self.is_canonical else Split(self.m_b, self.m_a)

    def as_tuple(self) -> tuple[int, int]:
        return (self.m_a, self.m_b)


def canonical_splits(k: int) -> list[Split]:
    """``(2, 2k-2), (4, 2k-4), ...`` up to ``m_a <= m_b``."""
    return [Split(2 * i, 2 * k - 2 * i) for i in range(1, k // 2 + 1)]


def ordered_splits(k: int) -> list[Split]:
    return [Split(2 * i, 2 * k - 2 * i) for i in range(1, k)]


def _as_split(split) -> Split:
    return split if isinstance(split, Split) else Split(*split)


@dataclass(frozen=True)
class CriticalArcResult:
    split: Split
    length: float
    poly: RakedTrigPoly
    extra_root: CirclePoint
    bisection_width: float

    @property
    def k(self) -> int:
        return self.split.k

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "m_a": self.split.m_a,
            "m_b": self.split.m_b,
            "L_star": self.length,
            "extra_root": self.extra_root.angle,
            "bisection_width": self.bisection_width,
            "poly": self.poly.to_dict(),
        }


def endpoint_poly(k: int, split, L: float) -> RakedTrigPoly:
    """Interpolant with a root of multiplicity ``m_a`` at 0 and ``m_b`` at ``L``."""
    split = _as_split(split)
    if split.k != k:
        raise InvalidInput(f"split {split.as_tuple()} does not sum to 2k = {2 * k}")
    if not 0.0 < L < math.pi:
        raise InvalidInput(f"arc length must lie in (0, pi), got {L}")
    return interpolate(RootSpec(((0.0, split.m_a), (L, split.m_b)), k))


def _opposite_min_of(f: RakedTrigPoly, L: float) -> tuple[CirclePoint, float]:
    cands = [math.pi, math.pi + L]
    cands += [t for t in critical_points(f) if ccw_offset(math.pi, t) <= L]
    vals = f(np.array(cands))
    i = int(np.argmin(vals))
    return CirclePoint(cands[i]), float(vals[i])


def opposite_min(k: int, split, L: float) -> tuple[CirclePoint, float]:
    """Minimiser and minimum of :func:`endpoint_poly` over the closed arc ``[pi, pi + L]``."""
    return _opposite_min_of(endpoint_poly(k, split, L), L)


def critical_length(k: int, split, tol: float = DEFAULT_TOL) -> CriticalArcResult:
    """Bisect for the arc length at which the tangent polynomial first touches zero opposite.

    For ``L`` below the critical length the opposite-arc minimum is positive
    and above it negative, so only the sign of the minimum is used.
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    split = _as_split(split)
    lo = BRACKET_LO
    if opposite_min(k, split, lo)[1] <= 0:
        raise BracketFailure(f"opposite minimum is not positive at L = pi/2 for split {split.as_tuple()}")
    hi = None
    for gap in BRACKET_HI_GAPS:
        try:
            value = opposite_min(k, split, math.pi - gap)[1]
        except SingularSystem:
            continue
        if value >= 0:
            raise BracketFailure(f"opposite minimum is not negative at L = pi - {gap:g} for split {split.as_tuple()}")
        hi = math.pi - gap
        break
    if hi is None:
        raise BracketFailure(f"no well-conditioned upper bracket below pi for split {split.as_tuple()}")

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if opposite_min(k, split, mid)[1] > 0:
            lo = mid
        else:
            hi = mid
    L = 0.5 * (lo + hi)
    f = endpoint_poly(k, split, L)
    extra, _ = _opposite_min_of(f, L)
    return CriticalArcResult(split, L, f, extra, hi - lo)


def _critical_length_args(args):
    return critical_length(*args)


def critical_lengths(k: int, tol: float = DEFAULT_TOL, jobs: int = 1) -> list[CriticalArcResult]:
    """Critical lengths for every canonical split, in split order."""
    if k < 2:
        raise InvalidInput("phi is defined here for k >= 2")
    tasks = [(k, s, tol) for s in canonical_splits(k)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_critical_length_args, tasks))
    return [critical_length(*t) for t in tasks]


def phi(k: int, tol: float = DEFAULT_TOL, jobs: int = 1) -> tuple[float, Split]:
    """Neighborliness threshold and the split attaining it."""
    best = min(critical_lengths(k, tol, jobs), key=lambda r: r.length)
    return best.length, best.split


@functools.lru_cache(maxsize=64)
def cached_phi(k: int, tol: float = DEFAULT_TOL) -> float:
    return phi(k, tol)[0]


@dataclass(frozen=True)
class SemicircleReport:
    k: int
    margins: dict
    quarter_arc_min: dict

    @property
    def min_margin(self) -> float:
        return min(self.margins.values())

    @property
    def ok(self) -> bool:
        return self.min_margin > 0


def semicircle_check(k: int, radius: float = 0.05) -> SemicircleReport:
    """Positivity of every quarter-circle tangent polynomial off its two roots.

    For each ordered split ``(2m, 2n)`` the polynomial with roots at 0 and
    pi/2 is examined: its minimum away from ``radius``-balls around the
    roots, and its minimum over ``[pi, 3pi/2]``.
    """
    if k < 2:
        raise InvalidInput("k must be at least 2")
    margins, quarter = {}, {}
    for s in ordered_splits(k):
        f = endpoint_poly(k, s, math.pi / 2)
        margins[s.as_tuple()] = positivity_margin(f, [0.0, math.pi / 2], radius)
        _, quarter[s.as_tuple()] = _opposite_min_of(f, math.pi / 2)
    return SemicircleReport(k, margins, quarter)
