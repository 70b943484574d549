import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import facet_projection
from bellgeom import geometry
from bellgeom.geometry import (
    PERES_HORODECKI_VERTICES,
    PHYSICAL_VERTICES,
    SEPARABLE,
    Classification,
    DomainError,
    Kind,
    classify,
    classify_many,
    distance_to_separable,
    project_l1_many,
    project_onto_separable,
    sample_array,
    sample_octahedron,
    sample_states,
)
from bellgeom.verify import halfspace_members

coord = st.floats(-1, 1, allow_nan=False)
points = st.tuples(coord, coord, coord)


def tetrahedron_symmetries():
    """The 24 signed permutations with an even number of sign flips."""
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            if math.prod(signs) == 1:
                yield perm, np.array(signs)


def test_vertex_parity():
    assert all(math.prod(v) == -1 for v in PHYSICAL_VERTICES)
    assert all(math.prod(v) == 1 for v in PERES_HORODECKI_VERTICES)


def test_classify_examples():
    assert classify((1, -1, 1)) == Classification(Kind.ENTANGLED, (1, -1, 1))
    assert classify((0, 0, 0)) is SEPARABLE
    assert classify((0.5, 0.5, 0.5)).kind is Kind.NONPHYSICAL
    assert str(classify((-1, -1, -1))) == "entangled(-1,-1,-1)"


def test_classify_boundaries_are_closed():
    assert classify((1, 0, 0)).kind is Kind.SEPARABLE
    assert classify((0.5, -0.5 - 5e-11, 0)).kind is Kind.SEPARABLE
    assert classify((1, 1, -1)).kind is Kind.ENTANGLED
    # rho_4 = -1e-11 / 4 is inside the tolerance
    assert classify((1 / 3 + 1e-11 / 3,) * 3).kind is not Kind.NONPHYSICAL


def test_classification_needs_corner_iff_entangled():
    with pytest.raises(ValueError):
        Classification(Kind.ENTANGLED)
    with pytest.raises(ValueError):
        Classification(Kind.SEPARABLE, (1, -1, 1))


def test_classify_many_agrees_with_scalar(rng):
    rs = rng.uniform(-1, 1, size=(2000, 3))
    kind, corner = classify_many(rs)
    for r, k, c in zip(rs, kind, corner):
        cl = classify(r)
        assert cl.kind == k
        if cl.corner is not None:
            assert PHYSICAL_VERTICES[c] == cl.corner


def test_octahedron_equivalence(rng):
    rs = rng.uniform(-1, 1, size=(100_000, 3))
    l1 = np.sum(np.abs(rs), axis=1) <= 1
    np.testing.assert_array_equal(l1, halfspace_members(rs))


def test_octahedron_is_intersection_of_tetrahedra(rng):
    rs = rng.uniform(-1, 1, size=(20_000, 3))
    kind, _ = classify_many(rs)
    flipped, _ = classify_many(rs * [1, -1, 1])
    both = (kind != Kind.NONPHYSICAL) & (flipped != Kind.NONPHYSICAL)
    np.testing.assert_array_equal(both, np.sum(np.abs(rs), axis=1) <= 1 + 1e-10)


def test_corner_uniqueness(rng):
    rs = sample_array(20_000, 5, "physical")
    dots = rs @ np.array(PHYSICAL_VERTICES, dtype=float).T
    assert np.all(np.sum(dots > 1, axis=1) <= 1)


def test_classify_symmetry_orbits(rng):
    rs = rng.uniform(-1, 1, size=(300, 3))
    for perm, signs in tetrahedron_symmetries():
        for r in rs:
            image = signs * r[list(perm)]
            a, b = classify(r), classify(image)
            assert a.kind is b.kind
            if a.corner is not None:
                mapped = tuple(int(v) for v in signs * np.array(a.corner)[list(perm)])
                assert mapped == b.corner
    assert len(list(tetrahedron_symmetries())) == 24


def test_distance_examples():
    assert distance_to_separable((1, -1, 1)) == pytest.approx(2 / math.sqrt(3), abs=1e-15)
    assert distance_to_separable((0.1, 0.2, -0.3)) == 0.0
    assert distance_to_separable((0.5, -0.5, 0.5)) == pytest.approx(0.5 / math.sqrt(3), abs=1e-15)
    p = np.array(project_onto_separable((0.5, -0.5, 0.5)))
    assert np.linalg.norm(np.array([0.5, -0.5, 0.5]) - p) == pytest.approx(0.5 / math.sqrt(3), abs=1e-15)


def test_distance_rejects_nonphysical():
    with pytest.raises(DomainError):
        distance_to_separable((0.5, 0.5, 0.5))


def test_projection_examples():
    assert project_onto_separable((0, 0, 0)) == (0, 0, 0)
    p = project_onto_separable((1, -1, 1))
    np.testing.assert_allclose(p, (1 / 3, -1 / 3, 1 / 3), atol=1e-15)
    assert math.dist((1, -1, 1), p) == pytest.approx(2 / math.sqrt(3), abs=1e-15)
    # inside the ball: untouched
    assert project_onto_separable((0.9, 0.05, 0)) == (0.9, 0.05, 0)


@pytest.mark.parametrize("p", [(1, -1, 1), (0.95, 0.4, 0), (0.9, 0.5, -0.3), (0.2, -0.9, 0.6), (1, 1, 1), (0.95, -0.9, 0.02), (-0.7, -0.7, -0.7)])
def test_projection_matches_grid_oracle(p):
    np.testing.assert_allclose(project_onto_separable(p), facet_projection(p), atol=1e-9, rtol=0)


def test_projection_matches_grid_oracle_on_samples():
    for p in sample_array(200, 9, "cube"):
        np.testing.assert_allclose(project_onto_separable(p), facet_projection(p), atol=1e-9, rtol=0)


def test_projection_is_optimal(rng):
    ent = sample_array(10_000, 11, "entangled")
    proj = project_l1_many(ent)
    gap = np.linalg.norm(ent - proj, axis=1)
    rivals = sample_octahedron(100 * len(ent), rng).reshape(len(ent), 100, 3)
    rival_gap = np.linalg.norm(ent[:, None, :] - rivals, axis=2)
    assert np.all(gap[:, None] <= rival_gap + 1e-12)


def test_plane_distance_equals_projection_distance():
    ent = sample_array(10_000, 12, "entangled")
    gap = np.linalg.norm(ent - project_l1_many(ent), axis=1)
    plane = np.array([distance_to_separable(s) for s in ent])
    assert np.max(np.abs(plane - gap)) <= 1e-10


def test_project_many_matches_scalar(rng):
    rs = rng.uniform(-2, 2, size=(50, 3))
    out = project_l1_many(rs)
    for r, p in zip(rs, out):
        np.testing.assert_array_equal(p, project_onto_separable(r))
    assert project_l1_many(rs.reshape(5, 10, 3)).shape == (5, 10, 3)


@settings(max_examples=300, deadline=None)
@given(points)
def test_projection_properties(r):
    p = np.array(project_onto_separable(r))
    assert np.sum(np.abs(p)) <= 1 + 1e-12
    if np.sum(np.abs(r)) <= 1:
        np.testing.assert_array_equal(p, r)
    # idempotent and sign-preserving
    np.testing.assert_allclose(project_onto_separable(p), p, atol=1e-15)
    assert np.all(p * np.array(r) >= 0)


def test_octahedron_sampler_stays_inside(rng):
    pts = sample_octahedron(50_000, rng)
    assert np.all(np.sum(np.abs(pts), axis=1) <= 1)
    # uniform in the ball: P(|r|_1 <= 1/2) = 1/8
    assert abs(np.mean(np.sum(np.abs(pts), axis=1) <= 0.5) - 0.125) < 0.01


def test_sampling_volume_fractions():
    cube = sample_array(1000, 42, "cube")
    kind, _ = classify_many(cube)
    assert abs(np.mean(kind != Kind.NONPHYSICAL) - 1 / 3) <= 0.05
    phys = sample_array(1000, 42, "physical")
    kind, _ = classify_many(phys)
    assert abs(np.mean(kind == Kind.ENTANGLED) - 0.5) <= 0.05


@pytest.mark.parametrize("region", ["cube", "physical", "entangled", "separable"])
def test_sampling_region_postcondition(region):
    pts = sample_states(300, 3, region)
    assert len(pts) == 300
    assert all(-1 <= v <= 1 for p in pts for v in p)
    kinds = {classify(p).kind for p in pts}
    expected = {
        "cube": {Kind.SEPARABLE, Kind.ENTANGLED, Kind.NONPHYSICAL},
        "physical": {Kind.SEPARABLE, Kind.ENTANGLED},
        "entangled": {Kind.ENTANGLED},
        "separable": {Kind.SEPARABLE},
    }[region]
    assert kinds == expected


def test_sampling_single_separable():
    (p,) = sample_states(1, 123, "separable")
    assert classify(p) is SEPARABLE


def test_sampling_is_deterministic_and_prefix_stable():
    a = sample_array(500, 8, "entangled")
    np.testing.assert_array_equal(a, sample_array(500, 8, "entangled"))
    np.testing.assert_array_equal(a[:100], sample_array(100, 8, "entangled"))
    assert not np.array_equal(a, sample_array(500, 9, "entangled"))


def test_sampling_rejects_bad_args():
    with pytest.raises(ValueError):
        sample_array(0, 1)
    with pytest.raises(ValueError):
        sample_array(1, 1, "tetrahedron")


def test_sampling_stall(monkeypatch):
    monkeypatch.setattr(geometry, "_accepts", lambda region, rs: np.zeros(len(rs), dtype=bool))
    monkeypatch.setattr(geometry, "MAX_ATTEMPTS", 10_000)
    with pytest.raises(geometry.SamplingStalled):
        sample_array(1, 1, "separable")
