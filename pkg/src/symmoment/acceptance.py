"""Reproduction suite: every acceptance criterion as a function returning a result row."""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.linalg import null_space

from . import critical_arc, deformation, interpolation, polytope, sampling
from .interpolation import FaceStatus, RootSpec, family_velocity, interpolate, is_face, root_residuals
from .trigpoly import (
    RakedTrigPoly,
    circle_roots,
    circular_distance,
    max_semicircle_multiplicity,
    sup_norm,
    total_multiplicity,
)

DEFAULT_SEED = 2024


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: object
    expected: object
    deviation: Optional[float] = None
    detail: str = ""

    def line(self) -> str:
        dev = "" if self.deviation is None else f" deviation={self.deviation:.3g}"
        extra = f" ({self.detail})" if self.detail else ""
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.name}: measured={_fmt(self.measured)} expected={_fmt(self.expected)}{dev}{extra}"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "expected": self.expected,
            "deviation": self.deviation,
            "detail": self.detail,
        }


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def default_golden_path() -> Path:
    return Path(str(resources.files("symmoment").joinpath("data/golden.json")))


def load_golden(path=None) -> dict:
    path = default_golden_path() if path is None else Path(path)
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("golden file must hold a JSON object")
    return data


def _golden(golden: dict, key: str) -> float:
    try:
        value = golden[key]["value"]
    except (KeyError, TypeError) as exc:
        raise KeyError(f"golden value {key!r} missing") from exc
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise TypeError(f"golden value {key!r} is not a number")
    return float(value)


@dataclass
class Context:
    golden: dict
    tol: Optional[float] = None
    seed: int = DEFAULT_SEED
    cache: dict = field(default_factory=dict)

    def within(self, stated: float) -> float:
        return stated if self.tol is None else max(stated, self.tol)

    def phi(self, k: int):
        if k not in self.cache:
            self.cache[k] = critical_arc.critical_lengths(k)
        results = self.cache[k]
        best = min(results, key=lambda r: r.length)
        return best, results


# criteria


def crit_phi2(ctx: Context) -> CriterionResult:
    expected = _golden(ctx.golden, "phi_2")
    start = time.perf_counter()
    value, split = critical_arc.phi(2)
    elapsed = time.perf_counter() - start
    dev = abs(value - expected)
    ok = dev < ctx.within(1e-8) and elapsed < 1.0 and split.as_tuple() == (2, 2)
    return CriterionResult(1, "phi_2", ok, value, expected, dev, f"runtime {elapsed:.3f} s")


def _phi_golden(ctx: Context, number: int, k: int) -> tuple[CriterionResult, object]:
    key = f"phi_{k}"
    expected = _golden(ctx.golden, key)
    want_split = tuple(ctx.golden[key].get("split", ()))
    best, results = ctx.phi(k)
    dev = abs(best.length - expected)
    ok = dev < ctx.within(1e-8) and best.split.as_tuple() == want_split
    res = CriterionResult(number, key, ok, best.length, expected, dev, f"split {best.split.as_tuple()}")
    return res, results


def crit_phi3(ctx: Context) -> CriterionResult:
    return _phi_golden(ctx, 2, 3)[0]


def crit_phi4(ctx: Context) -> CriterionResult:
    res, results = _phi_golden(ctx, 3, 4)
    other = next(r for r in results if r.split.as_tuple() == (2, 6))
    res.passed = res.passed and other.length > res.measured
    res.detail += f"; split (2, 6) gives {other.length:.12g}"
    return res


def crit_conjecture(ctx: Context) -> CriterionResult:
    gaps = {}
    for k in (2, 4):
        gaps[k] = abs(2 * deformation.alpha_conjecture(k) - ctx.phi(k)[0].length)
    alpha2 = deformation.alpha_conjecture(2)
    expected = _golden(ctx.golden, "alpha_2")
    dev2 = abs(alpha2 - expected)
    ok = all(g < ctx.within(1e-7) for g in gaps.values()) and dev2 < ctx.within(1e-10)
    worst = max(gaps.values())
    return CriterionResult(4, "2*alpha_k = phi_k", ok, worst, 0.0, worst, f"|alpha_2 - pi/3| = {dev2:.3g}")


def crit_deformation(ctx: Context) -> CriterionResult:
    double = _golden(ctx.golden, "deformation_double_root")
    quad = _golden(ctx.golden, "deformation_quadruple_root")
    f = RakedTrigPoly.from_harmonics(3, c=1.0, cos={5: -1.0})
    g = deformation.lambda_deform(f, 1.0 / math.cos(math.pi / 5))
    roots = circle_roots(g)
    want = [(double, 2), (quad, 4), (2 * math.pi - double, 2)]
    got = sorted((r.angle, r.multiplicity) for r in roots)
    if len(got) != len(want) or any(m != wm for (_, m), (_, wm) in zip(got, want)):
        return CriterionResult(5, "deformation of 1 - cos 5t", False, got, want, None, "root pattern differs")
    dev = max(circular_distance(t, wt) for (t, _), (wt, _) in zip(got, want))
    return CriterionResult(5, "deformation of 1 - cos 5t", dev < ctx.within(1e-8), [m for _, m in got], [2, 4, 2], dev)


def crit_beta(ctx: Context) -> CriterionResult:
    ks = range(2, 31)
    betas = [deformation.beta(k) for k in ks]
    inside = all(math.pi / 2 < b < math.pi for b in betas)
    bound = min(math.sin(b) ** 2 - (2 * k - 2) / (2 * k - 1) for k, b in zip(ks, betas))
    decreasing = all(x > y for x, y in zip(betas, betas[1:]))
    trend = betas[-1] - math.pi / 2 < betas[0] - math.pi / 2
    ok = inside and bound > 0 and decreasing and trend
    detail = f"min sin^2 excess {bound:.3g}, decreasing={decreasing}"
    return CriterionResult(6, "beta_k for k = 2..30", ok, betas[-1] - math.pi / 2, "< beta_2 - pi/2", None, detail)


def crit_semicircle(ctx: Context) -> CriterionResult:
    margins = {k: critical_arc.semicircle_check(k).min_margin for k in range(2, 7)}
    worst = min(margins.values())
    return CriterionResult(7, "quarter-arc positivity, k = 2..6", worst > 0, worst, "> 0")


def crit_interpolation(ctx: Context) -> CriterionResult:
    rng = np.random.default_rng(ctx.seed)
    worst_res = worst_shift = 0.0
    failures = []
    constant_ok = True
    for k in (2, 3, 4, 5):
        for _ in range(200):
            spec = sampling.random_root_spec(k, rng)
            f = interpolate(spec)
            norm = sup_norm(f)
            constant_ok &= f.c == 1.0
            worst_res = max(worst_res, float(root_residuals(f, spec).max()) / norm)
            roots = circle_roots(f)
            for t, m in zip(spec.points, spec.multiplicities):
                got = [r.multiplicity for r in roots if circular_distance(r.angle, t) < 1e-5]
                if got != [m]:
                    failures.append((k, t, m, got))
            a = rng.uniform(0.0, 2 * math.pi)
            moved = interpolate(spec.shifted(a))
            worst_shift = max(worst_shift, float(np.max(np.abs(moved.coefficients - f.shift(-a).coefficients))) / norm)
    ok = constant_ok and worst_res < ctx.within(1e-9) and not failures and worst_shift < ctx.within(1e-9)
    detail = f"shift error {worst_shift:.3g}, multiplicity failures {len(failures)}, constant term exact={constant_ok}"
    return CriterionResult(8, "interpolation properties", ok, worst_res, "< 1e-9", worst_res, detail)


def _half_open_windows(roots) -> int:
    """Largest total multiplicity in a half-open semicircle ``[t_r, t_r + pi)``."""
    best = 0
    for r in roots:
        best = max(best, sum(s.multiplicity for s in roots if (s.angle - r.angle) % (2 * math.pi) < math.pi - 1e-9))
    return best


def _zero_constant_with_roots(k: int, angles) -> RakedTrigPoly:
    rows = [interpolation._derivative_rows(k, t, 0) for t in angles]
    v = null_space(np.array(rows))[:, 0]
    return RakedTrigPoly(0.0, v[:k], v[k:])


def crit_root_bounds(ctx: Context) -> CriterionResult:
    rng = np.random.default_rng(ctx.seed + 1)
    violations = []
    tight = {"zero_constant": 0, "semicircle": 0}
    for k in (2, 3, 4):
        for i in range(500):
            kind = i % 4
            if kind == 0:
                f = sampling.random_raked(k, rng)
            elif kind == 1:
                f = sampling.random_raked(k, rng, constant=0.0)
            elif kind == 2:
                angles = sampling.random_angles_in_arc(2 * k - 1, rng, min_sep=0.15, max_span=0.9 * math.pi)
                f = _zero_constant_with_roots(k, angles)
            else:
                f = interpolate(sampling.random_root_spec(k, rng))
            roots = circle_roots(f)
            if total_multiplicity(roots) > 4 * k - 2:
                violations.append(("total", k, i))
            if f.c == 0.0:
                w = _half_open_windows(roots)
                tight["zero_constant"] += w == 2 * k - 1
                if w > 2 * k - 1:
                    violations.append(("zero constant", k, i))
            s = max_semicircle_multiplicity(roots)
            tight["semicircle"] += s == 2 * k
            if s > 2 * k:
                violations.append(("semicircle", k, i))
    detail = f"bounds attained: zero-constant {tight['zero_constant']}, semicircle {tight['semicircle']}"
    return CriterionResult(9, "root-count bounds", not violations, len(violations), 0, None, detail)


def crit_oracle(ctx: Context, grid: int = 2048) -> CriterionResult:
    rng = np.random.default_rng(ctx.seed + 2)
    disagreements, decided = [], 0
    ts = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    for k in (2, 3):
        for i in range(200):
            config = sampling.random_angles_in_arc(8, rng, min_sep=0.1, max_span=0.95 * math.pi)
            subset = sorted(rng.choice(len(config), size=k, replace=False))
            chosen = [config[j] for j in subset]
            verdict = is_face(k, chosen).status
            if verdict is FaceStatus.UNKNOWN:
                continue
            decided += 1
            sample = [t for t in ts if min(circular_distance(t, p) for p in config) > 1e-6]
            pts = polytope.embed_many(k, config + sample)
            oracle = polytope.lp_face_oracle(pts, subset, relative=True)
            if oracle != (verdict is FaceStatus.FACE):
                disagreements.append((k, i, verdict.value, oracle))
    ok = not disagreements and decided > 0
    return CriterionResult(10, "certificate vs LP oracle", ok, len(disagreements), 0, None, f"{decided} decided instances")


def crit_edges(ctx: Context) -> CriterionResult:
    wrong = []
    total = 0
    for k in (2, 3):
        threshold = polytope.edge_threshold(k)
        for base in np.linspace(0.1, 2 * math.pi + 0.1, 8, endpoint=False):
            for offset in (-0.05, -0.01, 0.01, 0.05):
                total += 1
                a, b = base, base + threshold + offset
                edge = offset < 0
                status = is_face(k, [a, b]).status
                want = FaceStatus.FACE if edge else FaceStatus.NOT_FACE
                if polytope.edge_check(k, a, b) != edge or status is not want:
                    wrong.append((k, float(base), offset, status.value))
    return CriterionResult(11, "edge threshold (2k-2)pi/(2k-1)", not wrong, total - len(wrong), total)


def crit_polytope(ctx: Context, draws: int = 32) -> CriterionResult:
    bound = int(_golden(ctx.golden, "clustered_edge_bound"))
    target = _golden(ctx.golden, "uniform_edge_fraction")
    clustered = polytope.count_faces(polytope.clustered_config(2, 5, 0.05), 1).verified_count
    rng = np.random.default_rng(ctx.seed + 3)
    fractions = [polytope.count_faces(polytope.random_config(2, 20, rng), 1).verified_fraction for _ in range(draws)]
    mean = float(np.mean(fractions))
    dev = abs(mean - target)
    ok = clustered >= bound and dev < ctx.within(0.03)
    detail = f"clustered verified {clustered} >= {bound}; per-draw std {np.std(fractions):.3g}"
    return CriterionResult(12, "edge counts", ok, mean, target, dev, detail)


def crit_velocity(ctx: Context) -> CriterionResult:
    base = RootSpec(((0.0, 2), (0.6, 2), (1.5, 2)), 3)
    samples = np.linspace(0.8, 2.6, 32)
    scale = max(interpolate(base.with_point(2, s)).coef_norm() for s in samples)
    smallest = min(family_velocity(base, 2, s).coef_norm() for s in samples)
    ratio = smallest / scale
    return CriterionResult(13, "family velocity never vanishes", ratio > 1e-3, ratio, "> 1e-3")


def crit_walk(ctx: Context) -> CriterionResult:
    step = 2 * math.pi / 5 / 11
    statuses = [
        is_face(3, [i * step, 0.0, -j * step]).status for i, j in itertools.product(range(1, 11), repeat=2)
    ]
    faces = sum(s is FaceStatus.FACE for s in statuses)
    return CriterionResult(14, "three-point walk faces", faces == len(statuses), faces, len(statuses))


CRITERIA: list[tuple[int, str, Callable[[Context], CriterionResult]]] = [
    (1, "phi_2", crit_phi2),
    (2, "phi_3", crit_phi3),
    (3, "phi_4", crit_phi4),
    (4, "2*alpha_k = phi_k", crit_conjecture),
    (5, "deformation of 1 - cos 5t", crit_deformation),
    (6, "beta_k for k = 2..30", crit_beta),
    (7, "quarter-arc positivity, k = 2..6", crit_semicircle),
    (8, "interpolation properties", crit_interpolation),
    (9, "root-count bounds", crit_root_bounds),
    (10, "certificate vs LP oracle", crit_oracle),
    (11, "edge threshold (2k-2)pi/(2k-1)", crit_edges),
    (12, "edge counts", crit_polytope),
    (13, "family velocity never vanishes", crit_velocity),
    (14, "three-point walk faces", crit_walk),
]


def run_criterion(number: int, ctx: Context) -> CriterionResult:
    _, name, fn = next(c for c in CRITERIA if c[0] == number)
    try:
        return fn(ctx)
    except Exception as exc:  # a crashing criterion is a failing criterion
        return CriterionResult(number, name, False, None, None, None, f"{type(exc).__name__}: {exc}")


def repro_all(tol: Optional[float] = None, golden=None, seed: int = DEFAULT_SEED, only=None) -> list[CriterionResult]:
    """Run the acceptance criteria; ``tol`` can only loosen the stated tolerances."""
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")
    try:
        data = load_golden(golden)
    except (OSError, ValueError) as exc:
        data = {"__error__": str(exc)}
    ctx = Context(data, tol, seed)
    numbers = [c[0] for c in CRITERIA] if only is None else list(only)
    return [run_criterion(n, ctx) for n in numbers]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)
