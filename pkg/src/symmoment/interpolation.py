"""Raked polynomials with prescribed roots, and face certificates built from them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import InvalidInput, SingularSystem, ZeroPolynomial
from .trigpoly import (
    TWO_PI,
    CirclePoint,
    RakedTrigPoly,
    as_angle,
    canonical_angle,
    ccw_offset,
    circular_distance,
    critical_points,
    sup_norm,
)

DISTINCT_TOL = 1e-9
MAX_CONDITION = 1e13
DEFAULT_RADIUS = 0.05


def spanning_arc(angles: Sequence[float]) -> tuple[float, float]:
    """Smallest closed arc containing all angles, as ``(start, length)``."""
    ts = np.sort([canonical_angle(t) for t in angles])
    if ts.size == 1:
        return float(ts[0]), 0.0
    gaps = np.diff(np.concatenate((ts, [ts[0] + TWO_PI])))
    i = int(np.argmax(gaps))
    start = ts[(i + 1) % ts.size]
    return float(start), float(TWO_PI - gaps[i])


def in_open_semicircle(angles: Sequence[float], slack: float = 1e-12) -> bool:
    return spanning_arc(angles)[1] < math.pi - slack


def min_separation(angles: Sequence[float]) -> float:
    ts = [as_angle(t) for t in angles]
    if len(ts) < 2:
        return math.inf
    return min(circular_distance(s, t) for i, s in enumerate(ts) for t in ts[i + 1 :])


def _check_distinct(angles: Sequence[float]) -> None:
    if min_separation(angles) <= DISTINCT_TOL:
        raise InvalidInput(f"points must be pairwise distinct (separation > {DISTINCT_TOL:g})")


@dataclass(frozen=True)
class RootSpec:
    """Distinct circle points with multiplicities summing to ``2k``, inside an open semicircle."""

    roots: tuple[tuple[CirclePoint, int], ...]
    k: int

    def __post_init__(self):
        roots = tuple((p if isinstance(p, CirclePoint) else CirclePoint(p), int(m)) for p, m in self.roots)
        object.__setattr__(self, "roots", roots)
        if not roots:
            raise InvalidInput("a root spec needs at least one root")
        if any(m < 1 for _, m in roots):
            raise InvalidInput("multiplicities must be positive")
        if sum(m for _, m in roots) != 2 * self.k:
            raise InvalidInput(f"multiplicities sum to {sum(m for _, m in roots)}, expected 2k = {2 * self.k}")
        _check_distinct(self.points)
        if not in_open_semicircle(self.points):
            raise InvalidInput("root spec points must lie in an open semicircle")

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, int]], k: Optional[int] = None) -> "RootSpec":
        pairs = tuple(pairs)
        if k is None:
            total = sum(int(m) for _, m in pairs)
            if total % 2:
                raise InvalidInput("multiplicities must sum to an even number")
            k = total // 2
        return cls(pairs, k)

    @property
    def points(self) -> list[float]:
        return [p.angle for p, _ in self.roots]

    @property
    def multiplicities(self) -> list[int]:
        return [m for _, m in self.roots]

    def shifted(self, a: float) -> "RootSpec":
        return RootSpec(tuple((p.shifted(a), m) for p, m in self.roots), self.k)

    def with_point(self, index: int, angle: float) -> "RootSpec":
        roots = list(self.roots)
        roots[index] = (CirclePoint(angle), roots[index][1])
        return RootSpec(tuple(roots), self.k)


def _derivative_rows(k: int, t: float, order: int, dtype=float) -> np.ndarray:
    """Row of d^order/dt^order [cos(n t), sin(n t)] over odd n, scaled by (2k-1)^-order."""
    n = np.arange(1, 2 * k, 2).astype(dtype)
    nt = n * dtype(t)
    c, s = np.cos(nt), np.sin(nt)
    # d/dt maps (cos, sin) -> (-sin, cos)
    c, s = ((c, s), (-s, c), (-c, -s), (s, -c))[order % 4]
    scale = (n / dtype(2 * k - 1)) ** order
    return np.concatenate((scale * c, scale * s))


def _system(spec: RootSpec, dtype=float) -> tuple[np.ndarray, np.ndarray]:
    rows, rhs = [], []
    for t, m in zip(spec.points, spec.multiplicities):
        for r in range(m):
            rows.append(_derivative_rows(spec.k, t, r, dtype))
            rhs.append(-1.0 if r == 0 else 0.0)
    return np.array(rows, dtype=dtype), np.array(rhs, dtype=dtype)


REFINEMENT_STEPS = 2


def interpolate(spec: RootSpec) -> RakedTrigPoly:
    """Unique raked polynomial with constant term 1 and the prescribed roots.

    Solves the ``2k x 2k`` system ``f^(r)(t_i) = 0`` for ``r < m_i`` with LU
    and partial pivoting; rows for derivative order ``r`` are divided by
    ``(2k-1)^r`` to keep them commensurate. Residuals for iterative
    refinement are formed in extended precision.
    """
    k = spec.k
    A, rhs = _system(spec)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularSystem(f"interpolation matrix condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    lu = scipy.linalg.lu_factor(A)
    x = scipy.linalg.lu_solve(lu, rhs)
    A_ext, rhs_ext = _system(spec, np.longdouble)
    for _ in range(REFINEMENT_STEPS):
        residual = rhs_ext - A_ext @ x.astype(np.longdouble)
        x = x + scipy.linalg.lu_solve(lu, residual.astype(float))
    return RakedTrigPoly(1.0, x[:k], x[k:])


def root_residuals(f: RakedTrigPoly, spec: RootSpec) -> np.ndarray:
    """``|f^(r)(t_i)|`` for every prescribed ``(t_i, r < m_i)``, evaluated in extended precision."""
    if f.k != spec.k:
        raise InvalidInput("polynomial and root spec disagree on k")
    A, _ = _system(spec, np.longdouble)
    orders = np.array([r for m in spec.multiplicities for r in range(m)])
    scale = np.longdouble(2 * spec.k - 1) ** orders
    x = np.concatenate((f.a, f.b)).astype(np.longdouble)
    values = scale * (A @ x) + np.where(orders == 0, np.longdouble(f.c), 0)
    return np.abs(values).astype(float)


def minimize_off(f: RakedTrigPoly, excluded: Sequence = (), radius: float = 0.0) -> tuple[float, float]:
    """``(argmin, min)`` of ``f`` outside open balls of ``radius`` around ``excluded``.

    Candidates are the critical points of ``f``, the ball boundaries and a
    uniform safety grid.
    """
    ex = np.array([as_angle(e) for e in excluded], dtype=float)
    grid = np.linspace(0.0, TWO_PI, 64 * (2 * f.k - 1), endpoint=False)
    cands = [critical_points(f), grid]
    if ex.size and radius > 0:
        cands.append(np.concatenate((ex - radius, ex + radius)))
    cands = np.concatenate(cands)
    if ex.size:
        d = np.abs((cands[:, None] - ex[None, :] + math.pi) % TWO_PI - math.pi)
        keep = np.all(d >= radius * (1 - 1e-12), axis=1) if radius > 0 else np.all(d > 0, axis=1)
        cands = cands[keep]
    if cands.size == 0:
        return math.nan, math.inf
    vals = f(cands)
    i = int(np.argmin(vals))
    return canonical_angle(cands[i]), float(vals[i])


def positivity_margin(f: RakedTrigPoly, excluded: Sequence = (), radius: float = 0.0) -> float:
    """Minimum of ``f`` on the circle minus open balls around ``excluded``.

    A negative value means ``f`` changes sign off the excluded set.
    """
    if not np.any(f.coefficients):
        raise ZeroPolynomial("positivity margin of the zero polynomial")
    return minimize_off(f, excluded, radius)[1]


def default_radius(points: Sequence) -> float:
    sep = min_separation(points)
    return DEFAULT_RADIUS if sep >= 0.15 else sep / 3.0


class FaceStatus(str, enum.Enum):
    FACE = "FACE"
    NOT_FACE = "NOT_FACE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class FaceCertificate:
    """Non-negative raked polynomial (constant term 1) vanishing to even order exactly at ``points``."""

    poly: RakedTrigPoly
    points: tuple[CirclePoint, ...]
    margin: float

    def to_dict(self) -> dict:
        return {"poly": self.poly.to_dict(), "points": [p.angle for p in self.points], "margin": self.margin}


@dataclass(frozen=True)
class FaceVerdict:
    status: FaceStatus
    certificate: Optional[FaceCertificate] = None
    witness: Optional[CirclePoint] = None

    def __post_init__(self):
        if self.status is FaceStatus.FACE and (self.certificate is None or not self.certificate.margin > 0):
            raise ValueError("FACE verdict requires a certificate with positive margin")
        if self.status is FaceStatus.NOT_FACE and self.witness is None:
            raise ValueError("NOT_FACE verdict requires a witness")

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "certificate": None if self.certificate is None else self.certificate.poly.to_dict(),
            "margin": None if self.certificate is None else self.certificate.margin,
            "witness": None if self.witness is None else self.witness.angle,
        }


def _double_root_poly(k: int, angles: Sequence[float]) -> RakedTrigPoly:
    return interpolate(RootSpec(tuple((t, 2) for t in angles), k))


def _root_quotient(f: RakedTrigPoly, points: Sequence[float], ts: np.ndarray) -> np.ndarray:
    """``f / prod(1 - cos(t - p))`` at ``ts`` off the points, and its limit at the points."""
    pts = np.asarray(points, dtype=float)
    ts = np.asarray(ts, dtype=float)
    w = np.prod(1.0 - np.cos(ts[:, None] - pts[None, :]), axis=1)
    out = f(ts) / w
    curvature = f.deriv(2)
    at_points = []
    for i, p in enumerate(pts):
        others = np.delete(pts, i)
        at_points.append(curvature(p) / np.prod(1.0 - np.cos(p - others)))
    return np.concatenate((out, at_points))


def _check_certificate(f, points, radius, tol):
    """Return ``(status, witness, margin)`` for a candidate that should vanish doubly at ``points``.

    Positivity is judged on the quotient by ``prod(1 - cos(t - p))`` so that
    clustered roots do not shrink the margin.
    """
    norm = sup_norm(f)
    for t in points:
        if abs(f(t)) > tol * norm:
            return FaceStatus.NOT_FACE, t, -abs(f(t))
    t_min, margin = minimize_off(f, points, radius)
    if margin < -tol * norm:
        return FaceStatus.NOT_FACE, t_min, margin
    ex = np.asarray(points, dtype=float)
    grid = np.linspace(0.0, TWO_PI, 64 * (2 * f.k - 1), endpoint=False)
    cands = np.concatenate((critical_points(f), grid, ex - radius, ex + radius))
    d = np.abs((cands[:, None] - ex[None, :] + math.pi) % TWO_PI - math.pi)
    cands = cands[np.all(d >= radius * (1 - 1e-12), axis=1)]
    quotient = float(np.min(_root_quotient(f, points, cands)))
    if quotient > tol * norm:
        return FaceStatus.FACE, None, quotient
    return FaceStatus.UNKNOWN, None, quotient


def _semicircle_window(angles: Sequence[float], size: int) -> Optional[list[float]]:
    """``size`` circularly consecutive points with the shortest span below pi."""
    ts = sorted(canonical_angle(t) for t in angles)
    best, best_span = None, math.pi
    for i in range(len(ts)):
        window = [ts[(i + j) % len(ts)] for j in range(size)]
        span = ccw_offset(window[0], window[-1])
        if span < best_span - 1e-12:
            best, best_span = window, span
    return best


def _aux_layout(angles: Sequence[float], count: int) -> list[tuple[float, float, int, int]]:
    """Gaps of the spanning arc as ``(start, length, slots, index)`` after sharing out ``count`` slots.

    Each auxiliary point goes to the gap whose share is currently largest.
    """
    start, _ = spanning_arc(angles)
    ts = sorted(ccw_offset(start, t) for t in angles)
    gaps = [[start + ts[i], ts[i + 1] - ts[i], 0] for i in range(len(ts) - 1)]
    for _ in range(count):
        g = max(gaps, key=lambda g: g[1] / (g[2] + 1))
        g[2] += 1
    return [(s, length, slots, i) for i, (s, length, slots) in enumerate(gaps)]


def _aux_points(layout, shift: float) -> list[float]:
    out = []
    for s, length, slots, _ in layout:
        for j in range(1, slots + 1):
            out.append(s + length * (j + shift) / (slots + 1))
    return out


PAD_SHIFTS = (0.25, 0.1, 0.03, 0.01, 0.003, 0.001)


def _padded_verdict(k: int, pts: list[float], radius: float, tol: float) -> Optional[FaceVerdict]:
    layout = _aux_layout(pts, k - len(pts))
    for shift in PAD_SHIFTS:
        polys = []
        for sgn in (-1.0, 1.0):
            aux = _aux_points(layout, sgn * shift)
            try:
                f = _double_root_poly(k, pts + aux)
            except (SingularSystem, InvalidInput):
                break
            status, _, _ = _check_certificate(f, pts + aux, min(radius, default_radius(pts + aux)), tol)
            if status is not FaceStatus.FACE:
                break
            polys.append(f)
        if len(polys) == 2:
            # the two padded faces meet exactly in the original points
            g = (polys[0] + polys[1]) / 2.0
            status, _, margin = _check_certificate(g, pts, radius, tol)
            if status is FaceStatus.FACE:
                cert = FaceCertificate(g, tuple(CirclePoint(t) for t in pts), margin)
                return FaceVerdict(FaceStatus.FACE, certificate=cert)
    return None


LP_EXCLUSION = 1e-4
LP_ROUNDS = 25


def _lp_verdict(k: int, pts: list[float], grid: int) -> FaceVerdict:
    """Try to refute the face with a supporting-hyperplane LP on a sample of the curve.

    The sample starts as a uniform grid and is refined with the minimisers of
    each optimal hyperplane polynomial until the margin vanishes or stalls.
    Separations are weighted by squared distance to the points.
    """
    from .polytope import LP_MARGIN_THRESHOLD, distance_weights, embed_many, lp_face_margin

    def far(ts):
        return [t for t in ts if min(circular_distance(t, p) for p in pts) > LP_EXCLUSION]

    inside = range(len(pts))
    sample = far(np.linspace(0.0, TWO_PI, grid, endpoint=False))
    for _ in range(LP_ROUNDS):
        P = embed_many(k, list(pts) + sample)
        w = distance_weights(P, inside)
        margin, duals, coef = lp_face_margin(P, inside, with_coefficients=True, weights=w)
        if margin <= LP_MARGIN_THRESHOLD:
            j = int(np.argmax(np.abs(duals))) if len(duals) else 0
            return FaceVerdict(FaceStatus.NOT_FACE, witness=CirclePoint(sample[j]))
        c, delta = coef[:-1], coef[-1]
        g = RakedTrigPoly(delta, -c[0::2], -c[1::2])
        crit = np.array(far(critical_points(g)))
        if crit.size == 0:
            break
        wc = distance_weights(embed_many(k, list(pts) + list(crit)), inside)[len(pts) :]
        new = [t for t, wt in zip(crit, wc) if g(t) < 0.5 * margin * wt]
        if not new:
            break
        sample += new
    return FaceVerdict(FaceStatus.UNKNOWN)


def is_face(
    k: int,
    points: Sequence,
    *,
    radius: Optional[float] = None,
    tol: float = 1e-9,
    lp_grid: int = 2048,
) -> FaceVerdict:
    """Decide whether ``conv(U(t_1), ..., U(t_n))`` is a face of the body.

    * ``n >= k`` with ``k`` of the points in an open semicircle: the only
      candidate certificate is the interpolant with double roots at those
      ``k`` points, so the verdict is FACE or NOT_FACE unless the candidate
      is tangent to zero within ``tol``.
    * ``n < k`` inside a semicircle: two paddings with auxiliary double roots
      whose positions differ are tried; their average certifies the face.
    * Otherwise a discretised supporting-hyperplane LP may prove NOT_FACE,
      and UNKNOWN is returned when it cannot.
    """
    if k < 1:
        raise InvalidInput("k must be positive")
    pts = [canonical_angle(as_angle(p)) for p in points]
    if not pts:
        raise InvalidInput("at least one point is required")
    _check_distinct(pts)
    if len(pts) > 2 * k - 1 and len(pts) > 1:
        # more than 4k-2 roots counted with multiplicity is impossible
        raise InvalidInput(f"{len(pts)} double roots exceed what degree {2 * k - 1} allows")
    if radius is None:
        radius = default_radius(pts)

    if len(pts) == 1:
        t0 = pts[0]
        f = RakedTrigPoly.from_harmonics(k, c=1.0, cos={1: -math.cos(t0)}, sin={1: -math.sin(t0)})
        margin = positivity_margin(f, pts, radius)
        return FaceVerdict(FaceStatus.FACE, certificate=FaceCertificate(f, (CirclePoint(t0),), margin))

    if len(pts) >= k:
        base = _semicircle_window(pts, k)
        if base is None:
            return _lp_verdict(k, pts, lp_grid)
        try:
            f = _double_root_poly(k, base)
        except SingularSystem:
            return FaceVerdict(FaceStatus.UNKNOWN)
        status, witness, margin = _check_certificate(f, pts, radius, tol)
        if status is FaceStatus.FACE:
            cert = FaceCertificate(f, tuple(CirclePoint(t) for t in pts), margin)
            return FaceVerdict(status, certificate=cert)
        if status is FaceStatus.NOT_FACE:
            return FaceVerdict(status, witness=CirclePoint(witness))
        return FaceVerdict(FaceStatus.UNKNOWN)

    if not in_open_semicircle(pts):
        return _lp_verdict(k, pts, lp_grid)
    verdict = _padded_verdict(k, pts, radius, tol)
    return verdict if verdict is not None else _lp_verdict(k, pts, lp_grid)


def family_velocity(spec: RootSpec, moving_index: int, s, h: float = 1e-6) -> RakedTrigPoly:
    """``d/ds`` of the interpolant whose ``moving_index``-th root sits at ``s``.

    Central difference of the coefficient vectors with step ``h``.
    """
    s = as_angle(s)
    f_plus = interpolate(spec.with_point(moving_index, s + h))
    f_minus = interpolate(spec.with_point(moving_index, s - h))
    return RakedTrigPoly(0.0, (f_plus.a - f_minus.a) / (2 * h), (f_plus.b - f_minus.b) / (2 * h))
