"""Pair-sum deformation of even raked polynomials and the sin-power families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import brentq

from .errors import InvalidInput, NoRoot, NotEven, PairingFailure
from .trigpoly import RakedTrigPoly

EVEN_TOL = 1e-10
PAIR_TOL = 1e-6
ALPHA_SCAN_STEP = math.pi / 8192
ALPHA_SCAN_CAP = math.pi / 2 - 1e-6


# double factorials


def double_factorial(n: int) -> int:
    """``n!!`` with ``0!! = (-1)!! = 1``."""
    if n < -1:
        raise InvalidInput("double factorial needs n >= -1")
    return math.prod(range(n, 0, -2))


def odd_over_even(j: int) -> float:
    """``(2j-1)!! / (2j)!!`` as a running product of ``(2i-1)/(2i)``."""
    r = 1.0
    for i in range(1, j + 1):
        r *= (2 * i - 1) / (2 * i)
    return r


def even_over_odd(k: int) -> float:
    """``(2k-2)!! / (2k-1)!!`` as a running product of ``2i/(2i+1)``."""
    r = 1.0
    for i in range(1, k):
        r *= (2 * i) / (2 * i + 1)
    return r


# deformation


@dataclass(frozen=True)
class RootPairing:
    """Roots of a lifted even polynomial grouped into reciprocal pairs."""

    pairs: tuple[tuple[complex, complex], ...]

    @property
    def sums(self) -> np.ndarray:
        return np.array([z + w for z, w in self.pairs])

    @property
    def products(self) -> np.ndarray:
        return np.array([z * w for z, w in self.pairs])

    def roots(self) -> np.ndarray:
        return np.array([z for pair in self.pairs for z in pair])


def _check_even(f: RakedTrigPoly) -> None:
    if np.max(np.abs(f.b), initial=0.0) > EVEN_TOL * max(1.0, f.coef_norm()):
        raise NotEven("polynomial is not even: sine coefficients are nonzero")
    if f.a[-1] == 0.0:
        raise PairingFailure("top harmonic vanishes, so the lifted polynomial has roots at 0 and infinity")


def pair_roots(f: RakedTrigPoly, tol: float = PAIR_TOL) -> RootPairing:
    """Match each root of ``lift(f)`` greedily with the remaining root closest to its reciprocal."""
    _check_even(f)
    roots = list(f.lift().roots())
    pairs = []
    while roots:
        z = roots.pop(0)
        if not roots:
            raise PairingFailure("odd number of roots left unpaired")
        target = 1.0 / z
        j = int(np.argmin([abs(w - target) for w in roots]))
        w = roots.pop(j)
        if abs(z * w - 1.0) > tol:
            raise PairingFailure(f"root {z:.6g} has no reciprocal partner within {tol:g}")
        pairs.append((z, w))
    return RootPairing(tuple(pairs))


def lambda_deform(f: RakedTrigPoly, lam: float) -> RakedTrigPoly:
    """Scale every reciprocal root-pair sum of ``lift(f)`` by ``lam``.

    For an even ``f`` with ``f(t) = g(cos t)`` this is ``g(cos t / lam)``,
    evaluated exactly through Chebyshev interpolation, then divided by the
    constant term when it is nonzero.
    """
    if lam == 0 or not math.isfinite(lam):
        raise InvalidInput("lambda must be finite and nonzero")
    _check_even(f)
    k = f.k
    deg = 2 * k - 1
    series = np.zeros(deg + 1)
    series[0] = f.c
    series[1::2] = f.a
    out = C.chebinterpolate(lambda x: C.chebval(x / lam, series), deg)
    scale = max(1.0, float(np.max(np.abs(out))))
    if np.max(np.abs(out[2::2]), initial=0.0) > 1e-9 * scale:
        raise PairingFailure("deformed polynomial acquired even harmonics")
    c = out[0] if abs(out[0]) > 1e-14 * scale else 0.0
    g = RakedTrigPoly(c, out[1::2], np.zeros(k))
    return g / c if c != 0.0 else g


# sin-power family


@lru_cache(maxsize=None)
def _sin_power_exact(k: int) -> tuple[Fraction, ...]:
    """Exact sine coefficients of ``sin^(2k-1) t`` for harmonics ``1, 3, ..., 2k-1``."""
    b = [Fraction(0)] * k
    scale = Fraction(1, (-4) ** (k - 1))
    for j in range(k):
        n = 2 * k - 2 * j - 1
        b[(n - 1) // 2] = scale * math.comb(2 * k - 1, j) * (-1) ** j
    return tuple(b)


def sin_power(k: int) -> RakedTrigPoly:
    """``sin^(2k-1) t`` as a raked polynomial."""
    if k < 1:
        raise InvalidInput("k must be positive")
    return RakedTrigPoly(0.0, np.zeros(k), [float(x) for x in _sin_power_exact(k)])


@lru_cache(maxsize=None)
def _h_exact(k: int) -> tuple[Fraction, tuple[Fraction, ...]]:
    b = _sin_power_exact(k)
    a = tuple(-b[i] / (2 * i + 1) for i in range(k))
    return -sum(a, Fraction(0)), a


def h_poly(k: int) -> RakedTrigPoly:
    """Antiderivative of ``sin^(2k-1)`` vanishing at 0."""
    if k < 1:
        raise InvalidInput("k must be positive")
    c, a = _h_exact(k)
    return RakedTrigPoly(float(c), [float(x) for x in a], np.zeros(k))


def h_closed_form(k: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    s2 = np.sin(t) ** 2
    total = np.zeros_like(t)
    for j in range(k):
        total = total + odd_over_even(j) * s2**j
    return even_over_odd(k) * (1.0 - np.cos(t) * total)


def gap_function(k: int):
    """``t -> sin^2 t * h_(k-1)(t) - h_k(t)``."""
    if k < 2:
        raise InvalidInput("k must be at least 2")
    lower, upper = h_poly(k - 1), h_poly(k)
    return lambda t: np.sin(t) ** 2 * lower(t) - upper(t)


@lru_cache(maxsize=256)
def beta(k: int, tol: float = 1e-14) -> float:
    """Unique zero of :func:`gap_function` in ``(pi/2, pi)``."""
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    F = gap_function(k)
    return float(brentq(F, math.pi / 2, math.pi, xtol=tol, rtol=4 * np.finfo(float).eps))


def witness_poly(k: int) -> RakedTrigPoly:
    """``sin^2(beta_k) h_(k-1) - h_k``: non-negative, vanishing at 0 and ``+-beta_k`` only."""
    s2 = math.sin(beta(k)) ** 2
    return h_poly(k - 1).padded(k) * s2 - h_poly(k)


def alpha_equation(k: int, alpha):
    """``cos a + 1 + sum_{j=1}^{k-1} (-1)^j (2j-1)!!/(2j)!! tan^(2j) a``."""
    alpha = np.asarray(alpha, dtype=float)
    t2 = np.tan(alpha) ** 2
    total = np.cos(alpha) + 1.0
    r = 1.0
    for j in range(1, k):
        r *= (2 * j - 1) / (2 * j)
        total = total + (-1) ** j * r * t2**j
    return total


def alpha_conjecture(k: int, tol: float = 1e-14) -> float:
    """Smallest positive root of :func:`alpha_equation` in ``(0, pi/2)``, for even ``k``."""
    if k < 2 or k % 2:
        raise InvalidInput("alpha is defined for even k >= 2")
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    grid = np.arange(ALPHA_SCAN_STEP, ALPHA_SCAN_CAP, ALPHA_SCAN_STEP)
    grid = np.append(grid, ALPHA_SCAN_CAP)
    vals = alpha_equation(k, grid)
    change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    if change.size == 0:
        raise NoRoot(f"no sign change of the alpha equation on (0, pi/2) for k = {k}")
    i = int(change[0])
    if vals[i] == 0.0:
        return float(grid[i])
    return float(brentq(lambda a: float(alpha_equation(k, a)), grid[i], grid[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
