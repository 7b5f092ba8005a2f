"""Raked trigonometric polynomials and their roots on the circle.

A raked polynomial of degree at most ``2k - 1`` is

    f(t) = c + sum_j a_j cos((2j - 1) t) + sum_j b_j sin((2j - 1) t),   j = 1..k.

Internally the odd harmonics are stored as complex weights ``w_j = a_j - i b_j``
so that ``f(t) = c + Re sum_j w_j exp(i (2j - 1) t)``; differentiation and
rotation are then coefficient-wise multiplications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.cluster import hierarchy

from .errors import IllConditioned, InvalidInput, ZeroPolynomial

TWO_PI = 2.0 * math.pi

DEFAULT_CLUSTER_TOL = 1e-7
DEFAULT_RESIDUAL_TOL = 1e-12


def canonical_angle(t: float) -> float:
    """Representative of ``t`` in ``[0, 2*pi)``."""
    r = float(t) % TWO_PI
    # tiny negative inputs round up to exactly 2*pi
    if r >= TWO_PI:
        r -= TWO_PI
    return r


def circular_distance(s: float, t: float) -> float:
    d = canonical_angle(float(s) - float(t))
    return min(d, TWO_PI - d)


def ccw_offset(start: float, t: float) -> float:
    """Counterclockwise travel from ``start`` to ``t``, in ``[0, 2*pi)``."""
    return canonical_angle(float(t) - float(start))


@dataclass(frozen=True)
class CirclePoint:
    """A point of the circle R / 2piZ, stored by its canonical angle."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", canonical_angle(self.angle))

    def antipode(self) -> "CirclePoint":
        return CirclePoint(self.angle + math.pi)

    def distance(self, other) -> float:
        return circular_distance(self.angle, as_angle(other))

    def shifted(self, a: float) -> "CirclePoint":
        return CirclePoint(self.angle + a)

    def __float__(self) -> float:
        return self.angle


def as_angle(x) -> float:
    if isinstance(x, CirclePoint):
        return x.angle
    return float(x)


@dataclass(frozen=True)
class Arc:
    """Open arc traversed counterclockwise from ``start``."""

    start: CirclePoint
    length: float

    def __post_init__(self):
        if not isinstance(self.start, CirclePoint):
            object.__setattr__(self, "start", CirclePoint(self.start))
        if not 0.0 < self.length < TWO_PI:
            raise InvalidInput(f"arc length must lie in (0, 2pi), got {self.length}")

    @property
    def end(self) -> CirclePoint:
        return self.start.shifted(self.length)

    def contains(self, p) -> bool:
        d = ccw_offset(self.start.angle, as_angle(p))
        return 0.0 < d < self.length

    def opposite(self) -> "Arc":
        return Arc(self.start.antipode(), self.length)


class RakedTrigPoly:
    """Immutable raked trigonometric polynomial with ``k`` odd harmonics.

    Parameters
    ----------
    c : float
        Constant term.
    a, b : sequence of float
        Cosine and sine coefficients of harmonics ``1, 3, ..., 2k - 1``.
    """

    __slots__ = ("c", "a", "b")

    def __init__(self, c, a, b):
        a = np.array(a, dtype=float).reshape(-1)
        b = np.array(b, dtype=float).reshape(-1)
        if a.shape != b.shape or a.size == 0:
            raise InvalidInput("a and b must be non-empty and of equal length")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("RakedTrigPoly is immutable")

    def __reduce__(self):
        return (type(self), (self.c, self.a, self.b))

    # construction helpers ------------------------------------------------

    @classmethod
    def from_harmonics(cls, k: int, c: float = 0.0, cos=None, sin=None) -> "RakedTrigPoly":
        """Build from ``{harmonic: coefficient}`` maps, e.g. ``cos={3: -1.0}``."""
        a = np.zeros(k)
        b = np.zeros(k)
        for target, terms in ((a, cos or {}), (b, sin or {})):
            for n, v in terms.items():
                if n % 2 == 0 or not 1 <= n <= 2 * k - 1:
                    raise InvalidInput(f"harmonic {n} is not odd and at most {2 * k - 1}")
                target[(n - 1) // 2] = v
        return cls(c, a, b)

    @classmethod
    def from_complex(cls, c: float, w) -> "RakedTrigPoly":
        w = np.asarray(w, dtype=complex)
        return cls(c, w.real, -w.imag)

    @classmethod
    def zero(cls, k: int) -> "RakedTrigPoly":
        return cls(0.0, np.zeros(k), np.zeros(k))

    # basic properties ----------------------------------------------------

    @property
    def k(self) -> int:
        return int(self.a.size)

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(1, 2 * self.k, 2)

    @property
    def weights(self) -> np.ndarray:
        return self.a - 1j * self.b

    @property
    def coefficients(self) -> np.ndarray:
        """Flat vector ``(c, a_1..a_k, b_1..b_k)``."""
        return np.concatenate(([self.c], self.a, self.b))

    def coef_norm(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    @property
    def degree(self) -> int:
        """Highest harmonic present; 0 for a constant, -1 for the zero polynomial."""
        nz = np.nonzero((self.a != 0) | (self.b != 0))[0]
        if nz.size:
            return int(2 * nz[-1] + 1)
        return 0 if self.c != 0 else -1

    # evaluation and calculus ---------------------------------------------

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        phase = np.exp(1j * np.multiply.outer(t_arr, self.harmonics))
        val = self.c + (phase @ self.weights).real
        if t_arr.ndim == 0:
            return float(val)
        return val

    def deriv(self, order: int = 1) -> "RakedTrigPoly":
        if order < 0:
            raise InvalidInput("derivative order must be non-negative")
        if order == 0:
            return self
        w = self.weights * (1j * self.harmonics) ** order
        return RakedTrigPoly.from_complex(0.0, w)

    def shift(self, a: float) -> "RakedTrigPoly":
        """The polynomial ``t -> f(t + a)``."""
        w = self.weights * np.exp(1j * self.harmonics * float(a))
        return RakedTrigPoly.from_complex(self.c, w)

    def reflect(self) -> "RakedTrigPoly":
        """The polynomial ``t -> f(-t)``."""
        return RakedTrigPoly(self.c, self.a, -self.b)

    def padded(self, k: int) -> "RakedTrigPoly":
        if k < self.k:
            raise InvalidInput("cannot pad to fewer harmonics")
        extra = np.zeros(k - self.k)
        return RakedTrigPoly(self.c, np.concatenate((self.a, extra)), np.concatenate((self.b, extra)))

    def lift(self) -> "ComplexPoly":
        return lift(self)

    # arithmetic ----------------------------------------------------------

    def _aligned(self, other):
        k = max(self.k, other.k)
        return self.padded(k), other.padded(k)

    def __add__(self, other):
        if not isinstance(other, RakedTrigPoly):
            return NotImplemented
        p, q = self._aligned(other)
        return RakedTrigPoly(p.c + q.c, p.a + q.a, p.b + q.b)

    def __sub__(self, other):
        if not isinstance(other, RakedTrigPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return RakedTrigPoly(-self.c, -self.a, -self.b)

    def __mul__(self, s):
        if isinstance(s, RakedTrigPoly):
            return NotImplemented
        s = float(s)
        return RakedTrigPoly(self.c * s, self.a * s, self.b * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / float(s))

    def __eq__(self, other):
        if not isinstance(other, RakedTrigPoly):
            return NotImplemented
        return (
            self.k == other.k
            and self.c == other.c
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )

    __hash__ = None

    def allclose(self, other: "RakedTrigPoly", atol: float = 1e-10) -> bool:
        p, q = self._aligned(other)
        return bool(np.allclose(p.coefficients, q.coefficients, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"RakedTrigPoly(c={self.c!r}, a={self.a.tolist()!r}, b={self.b.tolist()!r})"

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {"k": self.k, "c": self.c, "a": self.a.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "RakedTrigPoly":
        p = cls(d["c"], d["a"], d["b"])
        if "k" in d and int(d["k"]) != p.k:
            raise InvalidInput(f"k={d['k']} disagrees with {p.k} coefficients")
        return p


@dataclass(frozen=True)
class ComplexPoly:
    """Complex polynomial with ascending-degree coefficients."""

    coeffs: np.ndarray

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else -1

    def roots(self, rel_cutoff: float = 1e-14) -> np.ndarray:
        """All roots, from the eigenvalues of the companion matrix."""
        c = np.asarray(self.coeffs, dtype=complex)
        scale = np.max(np.abs(c)) if c.size else 0.0
        if scale == 0.0:
            raise ZeroPolynomial("cannot take roots of the zero polynomial")
        small = np.abs(c) <= rel_cutoff * scale
        c = np.where(small, 0.0, c)
        hi = np.nonzero(c)[0][-1]
        lo = np.nonzero(c)[0][0]
        core = c[lo : hi + 1]
        zeros = np.zeros(lo, dtype=complex)
        if core.size <= 1:
            return zeros
        comp = npoly.polycompanion(core)
        return np.concatenate((zeros, np.linalg.eigvals(comp)))


@dataclass(frozen=True)
class CircleRoot:
    point: CirclePoint
    multiplicity: int

    @property
    def angle(self) -> float:
        return self.point.angle

    def to_dict(self) -> dict:
        return {"angle": self.angle, "mult": self.multiplicity}


# ---------------------------------------------------------------------------
# module-level operations


def evaluate(f: RakedTrigPoly, t) -> float:
    return f(as_angle(t))


def derivative(f: RakedTrigPoly, order: int = 1) -> RakedTrigPoly:
    return f.deriv(order)


def lift(f: RakedTrigPoly) -> ComplexPoly:
    """Complex polynomial ``p`` with ``p(exp(it)) = exp((2k-1)it) f(t)``."""
    k = f.k
    mid = 2 * k - 1
    coeffs = np.zeros(4 * k - 1, dtype=complex)
    coeffs[mid] = f.c
    for j, n in enumerate(f.harmonics):
        coeffs[mid + n] += 0.5 * (f.a[j] - 1j * f.b[j])
        coeffs[mid - n] += 0.5 * (f.a[j] + 1j * f.b[j])
    return ComplexPoly(coeffs)


def _newton(f: RakedTrigPoly, order: int, t0: float, max_step: float, maxit: int = 40, tol: float = 1e-15):
    """Newton iteration on the ``order``-th derivative of ``f`` started at ``t0``.

    Returns the polished angle, or ``None`` if the iteration leaves the
    ``max_step`` neighbourhood of ``t0``.
    """
    g = f.deriv(order)
    dg = g.deriv(1)
    t = t0
    for _ in range(maxit):
        slope = dg(t)
        if slope == 0.0:
            break
        step = g(t) / slope
        t -= step
        if abs(t - t0) > max_step:
            return None
        if abs(step) <= tol * max(1.0, abs(t)):
            break
    return t


def critical_points(f: RakedTrigPoly) -> np.ndarray:
    """Angles where ``f'`` vanishes (a superset is polished, then deduplicated)."""
    df = f.deriv(1)
    if not np.any(df.weights):
        return np.empty(0)
    z = lift(df).roots()
    z = z[(np.abs(z) > 0.5) & (np.abs(z) < 2.0)]
    out = []
    for t0 in np.angle(z):
        t = _newton(f, 1, float(t0), max_step=0.05)
        out.append(canonical_angle(t0 if t is None else t))
    if not out:
        return np.empty(0)
    out = np.sort(np.array(out))
    keep = np.concatenate(([True], np.diff(out) > 1e-13))
    return out[keep]


def sup_norm(f: RakedTrigPoly, grid: int = 4096) -> float:
    """``max |f|`` over the circle: dense grid plus polished critical points."""
    n = max(grid, 64 * (2 * f.k - 1))
    ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
    cands = np.concatenate((ts, critical_points(f)))
    return float(np.max(np.abs(f(cands))))


def circle_roots(
    f: RakedTrigPoly,
    tol: float = DEFAULT_CLUSTER_TOL,
    res_tol: float = DEFAULT_RESIDUAL_TOL,
    link_radius: float = 0.1,
) -> list[CircleRoot]:
    """Roots of ``f`` on the circle with multiplicities.

    The roots of ``lift(f)`` near the unit circle are grouped by single-linkage
    clustering. A cluster of ``m`` eigenvalues is accepted as a root of
    multiplicity ``m`` when, after Newton polishing of ``f^(m-1)`` from the
    cluster centroid, the derivatives ``f, ..., f^(m-1)`` vanish to within
    ``tol * ||f|| * (2k-1)^r`` and ``f^(m)`` stays above the rounding floor.
    Rejected clusters are split along their longest linkage edge and retried.

    Raises
    ------
    ZeroPolynomial
        If ``||f|| <= tol``.
    IllConditioned
        If a cluster passes the vanishing tests but its next derivative is at
        the rounding floor, or two accepted roots coincide.
    """
    norm = sup_norm(f)
    if norm <= tol:
        raise ZeroPolynomial(f"sup norm {norm:.3g} does not exceed tol {tol:.3g}")
    # floating-point floor for evaluating a derivative, before the n**r factor
    noise = 64 * np.finfo(float).eps * float(np.sum(np.abs(f.coefficients)))
    z = lift(f).roots()
    cand = z[np.abs(np.abs(z) - 1.0) < 2 * link_radius]
    if cand.size == 0:
        return []
    n = 2 * f.k - 1
    derivs = [f]

    def dval(r, t):
        while len(derivs) <= r:
            derivs.append(derivs[-1].deriv(1))
        return derivs[r](t)

    accepted: list[tuple[float, int]] = []

    def verify(members: np.ndarray):
        m = members.size
        zc = members.mean()
        if m == 1 and abs(abs(zc) - 1.0) > tol:
            return None
        spread = float(np.max(np.abs(members - zc)))
        theta0 = float(np.angle(zc))
        theta = _newton(f, m - 1, theta0, max_step=spread + 1e-3, tol=res_tol)
        if theta is None:
            return None
        for r in range(m):
            if abs(dval(r, theta)) > tol * norm * n**r:
                return None
        if abs(dval(m, theta)) <= noise * n**m:
            raise IllConditioned(
                f"cluster of {m} roots near angle {canonical_angle(theta):.6g} has a vanishing "
                f"derivative of order {m}; multiplicity is ambiguous at tol={tol:g}"
            )
        return canonical_angle(theta)

    def visit(node):
        members = cand[node.pre_order()]
        if node.is_leaf() or node.dist <= link_radius:
            theta = verify(members)
            if theta is not None:
                accepted.append((theta, members.size))
                return
        if not node.is_leaf():
            visit(node.left)
            visit(node.right)

    if cand.size == 1:
        theta = verify(cand)
        if theta is not None:
            accepted.append((theta, 1))
    else:
        xy = np.column_stack((cand.real, cand.imag))
        visit(hierarchy.to_tree(hierarchy.linkage(xy, method="single")))

    accepted.sort()
    for (t1, _), (t2, _) in zip(accepted, accepted[1:] + accepted[:1]):
        if len(accepted) > 1 and circular_distance(t1, t2) < 1e-9:
            raise IllConditioned(f"two root clusters collapse onto angle {t1:.6g}")
    return [CircleRoot(CirclePoint(t), m) for t, m in accepted]


def total_multiplicity(roots: Iterable[CircleRoot]) -> int:
    return sum(r.multiplicity for r in roots)


def max_semicircle_multiplicity(roots: Sequence[CircleRoot]) -> int:
    """Largest total multiplicity of roots lying in one open semicircle.

    Windows anchored at a root, ``[t_r, t_r + pi)``, realise every maximal
    case; such a window never holds an antipodal pair.
    """
    best = 0
    for r in roots:
        total = sum(q.multiplicity for q in roots if ccw_offset(r.angle, q.angle) < math.pi - 1e-12)
        best = max(best, total)
    return best


def roots_to_json(roots: Iterable[CircleRoot]) -> list[dict]:
    return [r.to_dict() for r in roots]
