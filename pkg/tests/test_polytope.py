import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symmoment.errors import CombinatorialExplosion, InvalidInput, SpreadTooLarge
from symmoment.interpolation import FaceStatus, is_face
from symmoment.polytope import (
    FaceCount,
    VertexConfig,
    clustered_bound,
    clustered_config,
    count_faces,
    distance_weights,
    edge_check,
    edge_threshold,
    embed,
    embed_many,
    lp_face_margin,
    lp_face_oracle,
    random_config,
)
from symmoment.trigpoly import circular_distance

TAU = 2 * math.pi


# embedding


def test_embed_examples():
    np.testing.assert_allclose(embed(2, 0.0).coords, [1, 0, 1, 0])
    np.testing.assert_allclose(embed(2, math.pi / 2).coords, [0, 1, 0, -1], atol=1e-15)
    assert embed(3, 1.0).k == 3


@given(st.integers(1, 6), st.floats(0, TAU))
def test_embed_antipodal_and_norm(k, t):
    p, q = embed_many(k, [t, t + math.pi])
    np.testing.assert_allclose(q, -p, atol=1e-12)
    assert np.linalg.norm(p) == pytest.approx(math.sqrt(k))


# configurations


def test_clustered_config_layout():
    cfg = clustered_config(2, 5)
    assert len(cfg.angles) == 20
    assert cfg.symmetric
    centres = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    for t in cfg.values:
        assert min(circular_distance(t, c) for c in centres) <= 0.05 + 1e-12
    assert clustered_config(3, 1).values == pytest.approx(centres)


def test_clustered_config_spread_too_large():
    with pytest.raises(SpreadTooLarge):
        clustered_config(2, 5, spread=0.6)
    with pytest.raises(InvalidInput):
        clustered_config(2, 0)


def test_vertex_config_validation():
    with pytest.raises(InvalidInput):
        VertexConfig(2, (0.0, 0.0), False)
    with pytest.raises(InvalidInput):
        VertexConfig(2, (0.0, 1.0), True)
    assert VertexConfig.of(2, [0.0, math.pi]).symmetric
    assert not VertexConfig.of(2, [0.0, 1.0]).symmetric


# linear programming oracle


def test_lp_square():
    square = np.array([[1, 1], [1, -1], [-1, -1], [-1, 1]], dtype=float)
    assert lp_face_oracle(square, [0])
    assert lp_face_oracle(square, [0, 1])
    assert not lp_face_oracle(square, [0, 2])
    s, duals, coeffs = lp_face_margin(square, [0], with_coefficients=True)
    assert s > 0
    assert coeffs.shape == (3,)
    assert duals.shape == (3,)


def test_lp_interior_point_is_not_a_vertex():
    pts = np.array([[0, 0], [1, 0], [0, 1], [0.2, 0.2]], dtype=float)
    assert not lp_face_oracle(pts, [3])
    with pytest.raises(InvalidInput):
        lp_face_margin(pts, [7])
    with pytest.raises(InvalidInput):
        lp_face_margin(pts, [0], weights=np.zeros(4))


def test_distance_weights():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    w = distance_weights(pts, [0])
    np.testing.assert_allclose(w, [0.0, 0.25, 1.0])


def test_random_pairs_agree_with_lp(rng):
    k = 2
    grid = np.linspace(0, TAU, 512, endpoint=False)
    decided = 0
    for _ in range(200):
        a, b = rng.uniform(0, TAU, 2)
        if abs(circular_distance(a, b) - edge_threshold(k)) < 1e-3:
            continue
        v = is_face(k, [a, b])
        keep = [t for t in grid if min(circular_distance(t, a), circular_distance(t, b)) > 1e-6]
        pts = embed_many(k, [a, b] + keep)
        if v.status is FaceStatus.UNKNOWN:
            continue
        decided += 1
        assert (v.status is FaceStatus.FACE) == lp_face_oracle(pts, [0, 1], relative=True)
    assert decided >= 190


# edges


def test_edge_check_examples():
    assert edge_threshold(2) == pytest.approx(2 * math.pi / 3)
    assert edge_check(2, 0.0, 2.0)
    assert not edge_check(2, 0.0, 2.2)
    assert edge_check(3, 0.0, 4 * math.pi / 5 - 0.01)
    assert not edge_check(3, 0.0, 4 * math.pi / 5 + 0.01)
    assert edge_check(2, 0.1, TAU - 0.1)
    with pytest.raises(InvalidInput):
        edge_check(2, 1.0, 1.0)


@pytest.mark.parametrize("k", [2, 3])
def test_edge_check_agrees_with_is_face(k):
    thr = edge_threshold(k)
    for d in np.arange(0.05, math.pi, 0.01):
        if abs(d - thr) < 0.02:
            continue
        v = is_face(k, [0.3, 0.3 + d])
        assert v.status is not FaceStatus.UNKNOWN
        assert (v.status is FaceStatus.FACE) == edge_check(k, 0.3, 0.3 + d), d


# face counting


@pytest.fixture(scope="module")
def clustered_edges():
    cfg = clustered_config(2, 5)
    return cfg, count_faces(cfg, 1)


def test_clustered_edge_count(clustered_edges):
    cfg, fc = clustered_edges
    assert fc.verified_count >= clustered_bound(2, 5) == 140
    assert fc.total_subsets == math.comb(20, 2)


def test_long_pairs_are_not_faces(clustered_edges):
    cfg, fc = clustered_edges
    ts = cfg.values
    faces = set(fc.faces)
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            if circular_distance(ts[i], ts[j]) > edge_threshold(2):
                assert (i, j) not in faces


def _antipodal_index(cfg):
    ts = cfg.values
    return [min(range(len(ts)), key=lambda j: circular_distance(ts[j], t + math.pi)) for t in ts]


def test_faces_invariant_under_antipodal_map(clustered_edges):
    cfg, fc = clustered_edges
    perm = _antipodal_index(cfg)
    faces = set(fc.faces)
    assert {tuple(sorted(perm[i] for i in f)) for f in faces} == faces


def test_subsets_of_faces_are_faces():
    cfg = clustered_config(3, 2)
    triangles = count_faces(cfg, 2)
    edges = set(count_faces(cfg, 1).faces)
    assert triangles.verified_count > 0
    for f in triangles.faces:
        for pair in ((f[0], f[1]), (f[0], f[2]), (f[1], f[2])):
            assert pair in edges


def test_count_faces_limits():
    cfg = random_config(2, 30, np.random.default_rng(0))
    with pytest.raises(CombinatorialExplosion):
        count_faces(cfg, 1, cap=100)
    with pytest.raises(InvalidInput):
        count_faces(cfg, 2)


def test_count_faces_parallel_matches_serial():
    cfg = clustered_config(2, 3)
    assert count_faces(cfg, 1, jobs=2) == count_faces(cfg, 1)


def test_face_count_invariant():
    with pytest.raises(ValueError):
        FaceCount(1, 3, 0, 0, 4)
    fc = FaceCount(1, 3, 0, 1, 4)
    assert fc.verified_fraction == 0.75
    assert fc.to_dict()["total"] == 4
