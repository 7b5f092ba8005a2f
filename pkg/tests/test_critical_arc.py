import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from symmoment.critical_arc import (
    BRACKET_LO,
    Split,
    canonical_splits,
    critical_length,
    critical_lengths,
    endpoint_poly,
    opposite_min,
    ordered_splits,
    phi,
    semicircle_check,
)
from symmoment.deformation import beta
from symmoment.errors import InvalidInput, SingularSystem
from symmoment.trigpoly import circle_roots, circular_distance, sup_norm

PHI_2 = 2 * math.pi / 3
PHI_3 = 1.962719002250
PHI_4 = 1.870658532322


def grid_opposite_min(f, L, n=200001):
    ts = np.linspace(math.pi, math.pi + L, n)
    vals = f(ts)
    i = int(np.argmin(vals))
    return ts[i], vals[i]


# splits


def test_split_validation():
    with pytest.raises(InvalidInput):
        Split(1, 3)
    with pytest.raises(InvalidInput):
        Split(0, 4)
    assert Split(4, 2).canonical() == Split(2, 4)
    assert Split(2, 6).k == 4


def test_split_enumeration():
    assert [s.as_tuple() for s in canonical_splits(4)] == [(2, 6), (4, 4)]
    assert [s.as_tuple() for s in ordered_splits(3)] == [(2, 4), (4, 2)]
    assert all(s.is_canonical for s in canonical_splits(7))


# endpoint polynomial


def test_endpoint_poly_k2():
    f = endpoint_poly(2, (2, 2), 2 * math.pi / 3)
    for t in (0.0, 2 * math.pi / 3, 4 * math.pi / 3):
        assert abs(f(t)) < 1e-10
    with pytest.raises(InvalidInput):
        endpoint_poly(2, (2, 2), math.pi)
    with pytest.raises(InvalidInput):
        endpoint_poly(3, (2, 2), 1.0)


@pytest.mark.parametrize(
    "L,sign",
    [(0.5, 1), (2.5, -1), (2 * math.pi / 3, 0)],
)
def test_opposite_min_against_grid(L, sign):
    f = endpoint_poly(2, (2, 2), L)
    point, value = opposite_min(2, (2, 2), L)
    _, grid_value = grid_opposite_min(f, L)
    assert value <= grid_value + 1e-12
    assert value == pytest.approx(grid_value, abs=1e-8 * sup_norm(f))
    if sign == 0:
        assert abs(value) < 1e-10
        assert circular_distance(point.angle, 4 * math.pi / 3) < 1e-5
    else:
        assert np.sign(value) == sign


@given(st.sampled_from([(3, (2, 4)), (3, (4, 2)), (4, (2, 6)), (4, (4, 4))]), st.floats(1.6, 3.0))
def test_opposite_min_matches_grid_oracle(case, L):
    k, split = case
    f = endpoint_poly(k, split, L)
    _, value = opposite_min(k, split, L)
    _, grid_value = grid_opposite_min(f, L, 20001)
    assert value <= grid_value + 1e-10 * sup_norm(f)
    assert grid_value - value < 1e-6 * sup_norm(f)


# critical length


@pytest.mark.parametrize(
    "k,split,expected",
    [(2, (2, 2), PHI_2), (3, (2, 4), PHI_3), (4, (4, 4), PHI_4), (4, (2, 6), 1.897726172064)],
)
def test_critical_length_values(k, split, expected):
    r = critical_length(k, split)
    assert r.length == pytest.approx(expected, abs=1e-9)
    assert r.bisection_width <= 1e-10
    assert r.to_dict()["L_star"] == r.length


def test_mirror_split_same_length():
    assert critical_length(3, (4, 2)).length == pytest.approx(critical_length(3, (2, 4)).length, abs=1e-9)


@pytest.mark.parametrize("k,expected,split", [(2, PHI_2, (2, 2)), (3, PHI_3, (2, 4)), (4, PHI_4, (4, 4))])
def test_phi_values(k, expected, split):
    value, argmin = phi(k)
    assert value == pytest.approx(expected, abs=1e-9)
    assert argmin.as_tuple() == split


def test_phi_parallel_matches_serial():
    serial = [r.length for r in critical_lengths(5)]
    parallel = [r.length for r in critical_lengths(5, jobs=2)]
    assert serial == parallel


def test_phi_rejects_k1():
    with pytest.raises(InvalidInput):
        phi(1)
    with pytest.raises(InvalidInput):
        critical_length(2, (2, 2), tol=0.0)


@pytest.fixture(scope="module")
def results_by_k():
    return {k: critical_lengths(k, tol=1e-9) for k in range(2, 9)}


def test_phi_strictly_between_quarter_and_half(results_by_k):
    for rs in results_by_k.values():
        for r in rs:
            assert math.pi / 2 < r.length < math.pi


def test_phi_decreasing(results_by_k):
    values = [min(r.length for r in results_by_k[k]) for k in range(2, 9)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_phi_at_most_beta(results_by_k):
    for k, rs in results_by_k.items():
        assert min(r.length for r in rs) <= beta(k) + 1e-9


def test_touching_polynomial_nonnegative(results_by_k):
    for rs in results_by_k.values():
        for r in rs:
            f = r.poly
            grid = f(np.linspace(0, 2 * math.pi, 40001))
            assert grid.min() >= -1e-7 * sup_norm(f)


def test_extra_root_has_even_multiplicity(results_by_k):
    for k in (2, 3, 4, 5):
        for r in results_by_k[k]:
            near = [x for x in circle_roots(r.poly, tol=1e-6) if circular_distance(x.angle, r.extra_root.angle) < 1e-3]
            assert near, (k, r.split)
            assert sum(x.multiplicity for x in near) % 2 == 0


@settings(max_examples=30)
@given(st.sampled_from([(2, (2, 2)), (3, (2, 4)), (4, (2, 6)), (4, (4, 4))]), st.floats(0.0, 1.0))
def test_single_sign_change(case, u):
    k, split = case
    L_star = critical_length(k, split, tol=1e-8).length
    L = BRACKET_LO + u * (math.pi - 0.01 - BRACKET_LO)
    if abs(L - L_star) < 1e-6:
        return
    try:
        value = opposite_min(k, split, L)[1]
    except SingularSystem:
        assume(False)
    assert (value > 0) == (L < L_star)


# quarter circle


@pytest.mark.parametrize("k", [2, 5])
def test_semicircle_check(k):
    report = semicircle_check(k)
    assert report.ok
    assert set(report.margins) == {s.as_tuple() for s in ordered_splits(k)}


def test_quarter_arc_minimum_k3():
    report = semicircle_check(3)
    assert report.quarter_arc_min[(2, 4)] >= 1.0
