import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symmoment.deformation import beta, witness_poly
from symmoment.errors import InvalidInput, SingularSystem, ZeroPolynomial
from symmoment.interpolation import (
    FaceCertificate,
    FaceStatus,
    FaceVerdict,
    RootSpec,
    default_radius,
    family_velocity,
    in_open_semicircle,
    interpolate,
    is_face,
    positivity_margin,
    root_residuals,
    spanning_arc,
)
from symmoment.sampling import random_root_spec
from symmoment.trigpoly import CirclePoint, RakedTrigPoly, circle_roots, circular_distance, sup_norm

seeds = st.integers(0, 2**32 - 1)


def spec_of(seed, k):
    return random_root_spec(k, np.random.default_rng(seed))


# geometry helpers


def test_spanning_arc_wraps():
    start, length = spanning_arc([6.0, 0.3, 0.1])
    assert start == pytest.approx(6.0)
    assert length == pytest.approx(0.3 + 2 * math.pi - 6.0)
    assert in_open_semicircle([0.0, 3.0])
    assert not in_open_semicircle([0.0, math.pi])
    assert not in_open_semicircle([0.0, 2.1, 4.2])


# root specs


def test_root_spec_validation():
    with pytest.raises(InvalidInput):
        RootSpec(((0.0, 2), (1.0, 1)), 2)
    with pytest.raises(InvalidInput):
        RootSpec(((0.0, 2), (1e-12, 2)), 2)
    with pytest.raises(InvalidInput):
        RootSpec(((0.0, 2), (math.pi, 2)), 2)
    with pytest.raises(InvalidInput):
        RootSpec(((0.0, 0), (1.0, 4)), 2)
    assert RootSpec.of([(0.0, 2), (1.0, 2)]).k == 2


# interpolation


def test_interpolate_one_minus_cos_3t():
    f = interpolate(RootSpec(((2 * math.pi / 3, 2), (4 * math.pi / 3, 2)), 2))
    target = RakedTrigPoly.from_harmonics(2, c=1.0, cos={3: -1.0})
    assert np.abs(f.coefficients - target.coefficients).max() < 1e-10


def test_interpolate_single_double_root():
    f = interpolate(RootSpec(((0.0, 2),), 1))
    assert f.allclose(RakedTrigPoly(1.0, [-1.0], [0.0]), atol=1e-14)


@given(seeds)
def test_residuals_two_two_two(seed):
    rng = np.random.default_rng(seed)
    from symmoment.sampling import random_angles_in_arc

    spec = RootSpec(tuple((t, 2) for t in random_angles_in_arc(3, rng)), 3)
    f = interpolate(spec)
    assert root_residuals(f, spec).max() < 1e-9 * sup_norm(f)


@given(st.integers(2, 5), seeds)
def test_interpolant_properties(k, seed):
    spec = spec_of(seed, k)
    f = interpolate(spec)
    assert f.c == 1.0
    assert f.a[-1] != 0 or f.b[-1] != 0
    assert root_residuals(f, spec).max() < 1e-9 * sup_norm(f)
    roots = circle_roots(f)
    for t, m in zip(spec.points, spec.multiplicities):
        assert [r.multiplicity for r in roots if circular_distance(r.angle, t) < 1e-5] == [m]


@given(st.integers(2, 4), seeds, st.floats(0, 2 * math.pi))
def test_shift_equivariance(k, seed, a):
    spec = spec_of(seed, k)
    f = interpolate(spec)
    g = interpolate(spec.shifted(a))
    assert np.abs(g.coefficients - f.shift(-a).coefficients).max() < 1e-10 * sup_norm(f)


@given(st.integers(2, 4), seeds)
def test_uniqueness_under_reordering(k, seed):
    spec = spec_of(seed, k)
    rev = RootSpec(tuple(reversed(spec.roots)), k)
    assert np.abs(interpolate(spec).coefficients - interpolate(rev).coefficients).max() < 1e-10 * sup_norm(interpolate(spec))


@given(st.integers(2, 4), seeds)
def test_continuous_dependence(k, seed):
    spec = spec_of(seed, k)
    f = interpolate(spec)
    i = len(spec.roots) - 1
    t = spec.points[i]
    changes = []
    for h in (1e-6, 2e-6):
        try:
            g = interpolate(spec.with_point(i, t + h))
        except InvalidInput:
            return
        changes.append(np.abs(g.coefficients - f.coefficients).max())
    # Lipschitz estimate from the first step must predict the second
    assert changes[1] <= 2 * changes[0] * 1.01 + 1e-12 * f.coef_norm()


@given(st.integers(2, 4), seeds)
def test_even_multiplicity_sign(k, seed):
    rng = np.random.default_rng(seed)
    from symmoment.sampling import random_angles_in_arc, random_composition

    n = int(rng.integers(1, k + 1))
    mults = [2 * m for m in random_composition(k, n, rng)]
    spec = RootSpec(tuple(zip(random_angles_in_arc(n, rng), mults)), k)
    f = interpolate(spec)
    if positivity_margin(f, spec.points, default_radius(spec.points)) >= 0:
        assert f(np.linspace(0, 2 * math.pi, 20000)).min() >= -1e-9 * sup_norm(f)


def test_singular_system_for_antipodal_limit():
    with pytest.raises(SingularSystem):
        interpolate(RootSpec(((0.0, 4), (math.pi - 1e-7, 4)), 4))


# positivity


def test_positivity_margin_examples():
    f = RakedTrigPoly.from_harmonics(2, c=1.0, cos={3: -1.0})
    roots = [0.0, 2 * math.pi / 3, 4 * math.pi / 3]
    assert positivity_margin(f, roots, 0.1) > 0
    assert positivity_margin(RakedTrigPoly.from_harmonics(1, sin={1: 1.0})) == pytest.approx(-1.0)
    w = witness_poly(3)
    assert positivity_margin(w, [0.0, beta(3), -beta(3)], 0.05) > 0
    with pytest.raises(ZeroPolynomial):
        positivity_margin(RakedTrigPoly.zero(2))


# face test


def test_is_face_short_pair():
    v = is_face(2, [0.0, 0.9 * 2 * math.pi / 3])
    assert v.status is FaceStatus.FACE
    assert v.certificate.margin > 0


def test_is_face_equilateral_triangle():
    v = is_face(2, [0.0, 2 * math.pi / 3, 4 * math.pi / 3])
    assert v.status is FaceStatus.FACE
    target = RakedTrigPoly.from_harmonics(2, c=1.0, cos={3: -1.0})
    assert v.certificate.poly.allclose(target, atol=1e-9)


def test_is_face_three_points_k3():
    a = 2 * math.pi / 5 - 0.05
    assert is_face(3, [a, 0.0, -a]).status is FaceStatus.FACE


def test_is_face_long_pair_not_face():
    v = is_face(2, [0.0, 2 * math.pi / 3 + 0.05])
    assert v.status is FaceStatus.NOT_FACE
    assert v.witness is not None


def test_is_face_single_point():
    v = is_face(4, [1.0])
    assert v.status is FaceStatus.FACE
    assert v.certificate.poly(1.0) == pytest.approx(0.0, abs=1e-15)


def test_is_face_padding_for_pair_k3():
    v = is_face(3, [0.0, 2.0])
    assert v.status is FaceStatus.FACE
    f = v.certificate.poly
    assert f.c == pytest.approx(1.0)
    assert abs(f(0.0)) < 1e-9 and abs(f(2.0)) < 1e-9
    assert positivity_margin(f, [0.0, 2.0], 0.05) > 0


def test_is_face_rejects_bad_input():
    with pytest.raises(InvalidInput):
        is_face(2, [0.0, 0.0])
    with pytest.raises(InvalidInput):
        is_face(2, [])
    with pytest.raises(InvalidInput):
        is_face(2, [0.0, 1.0, 2.0, 3.0])


def test_is_face_not_in_semicircle_uses_lp():
    # three points spread round the circle: no semicircle holds all of them
    v = is_face(3, [0.0, 2.0, 4.0])
    assert v.status in (FaceStatus.NOT_FACE, FaceStatus.UNKNOWN)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        FaceVerdict(FaceStatus.FACE)
    with pytest.raises(ValueError):
        FaceVerdict(FaceStatus.NOT_FACE)
    f = RakedTrigPoly(1.0, [-1.0], [0.0])
    cert = FaceCertificate(f, (CirclePoint(0.0),), -1.0)
    with pytest.raises(ValueError):
        FaceVerdict(FaceStatus.FACE, certificate=cert)


def test_verdict_json():
    d = is_face(2, [0.0, 1.0]).to_dict()
    assert d["status"] == "FACE"
    assert set(d["certificate"]) == {"k", "c", "a", "b"}
    assert d["witness"] is None


# parametric families


def test_family_velocity_vanishing_orders():
    spec = RootSpec(((0.0, 2), (0.6, 3), (1.5, 1)), 3)
    g = family_velocity(spec, 0, 0.1)
    assert g.c == 0.0
    scale = g.coef_norm() * 5**3
    moved = spec.with_point(0, 0.1)
    for t, m in zip(moved.points[1:], moved.multiplicities[1:]):
        for r in range(m):
            assert abs(g.deriv(r)(t)) < 1e-6 * scale
    # moving root of multiplicity 2: order >= 1
    assert abs(g(0.1)) < 1e-6 * scale


@given(seeds)
def test_family_velocity_nonzero(seed):
    rng = np.random.default_rng(seed)
    base = RootSpec(((0.0, 2), (0.5, 2), (1.2, 2)), 3)
    scale = interpolate(base).coef_norm()
    for s in rng.uniform(1.4, 2.5, 4):
        assert family_velocity(base, 2, s).coef_norm() > 1e-3 * scale
