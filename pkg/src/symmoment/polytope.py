"""Points on the symmetric moment curve, vertex configurations and face counts."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import CombinatorialExplosion, InvalidInput, SolverFailure, SpreadTooLarge
from .trigpoly import CirclePoint, as_angle, canonical_angle, circular_distance

LP_MARGIN_THRESHOLD = 1e-7
DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class CurvePoint:
    t: CirclePoint
    coords: np.ndarray

    @property
    def k(self) -> int:
        return self.coords.size // 2


def embed_many(k: int, angles: Iterable) -> np.ndarray:
    """Rows ``(cos t, sin t, cos 3t, sin 3t, ..., cos(2k-1)t, sin(2k-1)t)``."""
    if k < 1:
        raise InvalidInput("k must be positive")
    ts = np.array([as_angle(t) for t in angles], dtype=float)
    nt = np.outer(ts, np.arange(1, 2 * k, 2))
    out = np.empty((ts.size, 2 * k))
    out[:, 0::2] = np.cos(nt)
    out[:, 1::2] = np.sin(nt)
    return out


def embed(k: int, t) -> CurvePoint:
    p = CirclePoint(as_angle(t))
    coords = embed_many(k, [as_angle(t)])[0]
    coords.setflags(write=False)
    return CurvePoint(p, coords)


def _is_symmetric(angles: Sequence[float], tol: float = 1e-9) -> bool:
    return all(min(circular_distance(t + math.pi, s) for s in angles) <= tol for t in angles)


@dataclass(frozen=True)
class VertexConfig:
    k: int
    angles: tuple[CirclePoint, ...]
    symmetric: bool

    def __post_init__(self):
        pts = tuple(p if isinstance(p, CirclePoint) else CirclePoint(p) for p in self.angles)
        object.__setattr__(self, "angles", pts)
        if self.k < 1:
            raise InvalidInput("k must be positive")
        ts = [p.angle for p in pts]
        for i, s in enumerate(ts):
            for t in ts[i + 1 :]:
                if circular_distance(s, t) <= 1e-12:
                    raise InvalidInput("configuration angles must be pairwise distinct")
        if self.symmetric and not _is_symmetric(ts):
            raise InvalidInput("configuration flagged symmetric is not invariant under t -> t + pi")

    @classmethod
    def of(cls, k: int, angles: Iterable) -> "VertexConfig":
        ts = [canonical_angle(as_angle(t)) for t in angles]
        return cls(k, tuple(CirclePoint(t) for t in ts), _is_symmetric(ts))

    @property
    def values(self) -> list[float]:
        return [p.angle for p in self.angles]

    def points(self) -> np.ndarray:
        return embed_many(self.k, self.values)


def default_spread(k: int) -> float:
    from .critical_arc import cached_phi

    return min(0.1, (cached_phi(k) - math.pi / 2) / 2)


def clustered_config(k: int, m: int, spread: Optional[float] = None) -> VertexConfig:
    """Four clusters of ``m`` equally spaced angles centred at ``0, pi/2, pi, 3pi/2``."""
    from .critical_arc import cached_phi

    if m < 1:
        raise InvalidInput("m must be positive")
    if spread is None:
        spread = default_spread(k)
    if spread < 0 or (m > 1 and spread <= 0):
        raise InvalidInput("spread must be positive")
    if math.pi / 2 + spread >= cached_phi(k):
        raise SpreadTooLarge(f"pi/2 + spread = {math.pi / 2 + spread:.6g} is not below phi_{k}")
    offsets = [0.0] if m == 1 else [spread * (i / (m - 1) - 0.5) for i in range(m)]
    angles = [canonical_angle(j * math.pi / 2 + o) for j in range(4) for o in offsets]
    return VertexConfig(k, tuple(CirclePoint(t) for t in angles), True)


def random_config(k: int, n: int, rng: np.random.Generator) -> VertexConfig:
    return VertexConfig.of(k, rng.uniform(0.0, 2 * math.pi, n))


def distance_weights(points: np.ndarray, subset: Iterable[int]) -> np.ndarray:
    """``prod_i |p_j - p_i|^2`` over the subset, scaled to a maximum of 1."""
    P = np.asarray(points, dtype=float)
    w = np.ones(len(P))
    for i in set(int(i) for i in subset):
        w *= np.sum((P - P[i]) ** 2, axis=1)
    top = float(np.max(w))
    return w / top if top > 0 else np.ones(len(P))


def lp_face_margin(points: np.ndarray, subset: Iterable[int], with_coefficients: bool = False, weights=None):
    """Largest separation ``s`` of a hyperplane through ``subset`` from the other points.

    Maximises ``s`` subject to ``<c, p_i> = delta`` on ``subset`` and
    ``<c, p_j> <= delta - s * w_j`` elsewhere, with ``|c|_inf <= 1`` and
    ``0 <= s <= 1``. Weights default to 1; positive weights leave the sign of
    the optimum unchanged. Returns ``s`` and the dual values of the separation
    constraints, plus ``(c, delta)`` as one vector when ``with_coefficients``
    is set.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] < 1:
        raise InvalidInput("points must be a 2-d array with at least one column")
    n, d = P.shape
    inside = sorted(set(int(i) for i in subset))
    if any(i < 0 or i >= n for i in inside):
        raise InvalidInput("subset index out of range")
    outside = [j for j in range(n) if j not in set(inside)]
    if not outside:
        trivial = (1.0, np.zeros(0))
        return trivial + (np.zeros(d + 1),) if with_coefficients else trivial
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w[outside] <= 0):
        raise InvalidInput("weights must be positive, one per point")
    # variables: c (d), delta, s
    cost = np.zeros(d + 2)
    cost[-1] = -1.0
    A_ub = np.hstack((P[outside], -np.ones((len(outside), 1)), w[outside, None]))
    b_ub = np.zeros(len(outside))
    A_eq = b_eq = None
    if inside:
        A_eq = np.hstack((P[inside], -np.ones((len(inside), 1)), np.zeros((len(inside), 1))))
        b_eq = np.zeros(len(inside))
    bounds = [(-1.0, 1.0)] * d + [(None, None), (0.0, 1.0)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverFailure(f"LP solver failed: {res.message}")
    out = (float(-res.fun), np.asarray(res.ineqlin.marginals))
    return out + (np.asarray(res.x[:-1]),) if with_coefficients else out


def lp_face_oracle(points: np.ndarray, subset: Iterable[int], relative: bool = False) -> bool:
    """Whether ``conv(points[subset])`` is a face of ``conv(points)``.

    With ``relative`` the separation of each point is measured against
    :func:`distance_weights`, which keeps the threshold meaningful for
    points crowding the subset.
    """
    subset = list(subset)
    weights = distance_weights(points, subset) if relative else None
    return lp_face_margin(points, subset, weights=weights)[0] > LP_MARGIN_THRESHOLD


def edge_threshold(k: int) -> float:
    return (2 * k - 2) * math.pi / (2 * k - 1)


def edge_check(k: int, a, b) -> bool:
    """Whether ``[U(a), U(b)]`` is an edge: the shorter arc is below ``(2k-2) pi / (2k-1)``."""
    if k < 1:
        raise InvalidInput("k must be positive")
    d = circular_distance(as_angle(a), as_angle(b))
    if d <= 1e-12:
        raise InvalidInput("edge endpoints must differ")
    return d < edge_threshold(k)


@dataclass(frozen=True)
class FaceCount:
    dim: int
    verified_count: int
    unknown_count: int
    not_face_count: int
    total_subsets: int
    faces: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.verified_count + self.unknown_count + self.not_face_count != self.total_subsets:
            raise ValueError("face count categories do not add up to the subset total")

    @property
    def verified_fraction(self) -> float:
        return self.verified_count / self.total_subsets if self.total_subsets else math.nan

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "verified": self.verified_count,
            "unknown": self.unknown_count,
            "not_face": self.not_face_count,
            "total": self.total_subsets,
        }


def _classify(args) -> str:
    from .interpolation import is_face

    k, angles = args
    return is_face(k, angles).status.value


def count_faces(config: VertexConfig, face_dim: int, cap: int = DEFAULT_CAP, jobs: int = 1) -> FaceCount:
    """Classify every ``(face_dim + 1)``-subset of the configuration with :func:`is_face`."""
    size = face_dim + 1
    if face_dim < 0 or size > config.k:
        raise InvalidInput(f"face_dim must satisfy 0 <= face_dim <= k - 1 = {config.k - 1}")
    total = math.comb(len(config.angles), size)
    if total > cap:
        raise CombinatorialExplosion(f"{total} subsets exceed the cap {cap}")
    ts = config.values
    subsets = list(itertools.combinations(range(len(ts)), size))
    tasks = [(config.k, [ts[i] for i in s]) for s in subsets]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            statuses = list(ex.map(_classify, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        statuses = [_classify(t) for t in tasks]
    faces = tuple(s for s, st in zip(subsets, statuses) if st == "FACE")
    n_not = sum(st == "NOT_FACE" for st in statuses)
    return FaceCount(face_dim, len(faces), total - len(faces) - n_not, n_not, total, faces)


def clustered_bound(k: int, m: int) -> int:
    """Lower bound ``4 C(2m, k) - 4 C(m, k)`` on faces of a clustered configuration."""
    return 4 * math.comb(2 * m, k) - 4 * math.comb(m, k)
