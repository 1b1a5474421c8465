"""Vertices, distances, apartments and residues."""

import random
from fractions import Fraction

import pytest

from sl3building.building import (
    Frame,
    IrregularSegmentError,
    LatticeVertex,
    dist2,
    distance_to_apartment,
    dominant,
    frame_vertex,
    germ_face,
    is_regular,
    opposition_involution,
    residue_chambers,
    residue_lines,
    residue_opposite,
    residue_projection,
    standard_vertex,
    vector_distance,
    weyl_dist2,
)
from sl3building.boundary import Flag
from sl3building.padic_linalg import det3, from_columns, mat_mul
from sl3building.sqrtsum import SqrtSum
from oracles import (
    distance_to_apartment_bruteforce,
    residue_opposite_chamber_count,
    residue_projection_oracle,
)


def rand_vertex(p, rng, spread=2):
    while True:
        m = tuple(tuple(rng.randint(-p ** spread, p ** spread) for _ in range(3))
                  for _ in range(3))
        if det3(m) != 0:
            return LatticeVertex.from_matrix(p, m)


def rand_sl3(rng, bound=3):
    while True:
        m = tuple(tuple(rng.randint(-bound, bound) for _ in range(3))
                  for _ in range(3))
        if det3(m) == 1:
            return m


def test_weyl_vector_utilities():
    assert dominant((0, 2, 1)) == (2, 1, 0)
    assert dominant((-1, 3, 1)) == (4, 2, 0)
    assert opposition_involution((0, 0, 0)) == (0, 0, 0)
    assert opposition_involution((2, 1, 0)) == (2, 1, 0)
    assert opposition_involution((3, 1, 0)) == (3, 2, 0)
    assert is_regular((2, 1, 0))
    assert not is_regular((0, 0, 0)) and not is_regular((2, 2, 0))


def test_vector_distance_examples():
    p = 5
    x = standard_vertex(p)
    assert vector_distance(x, x) == (0, 0, 0)
    y = LatticeVertex.from_matrix(p, ((5, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert vector_distance(x, y) == (1, 0, 0)


def test_vertex_type_is_canonical():
    p = 3
    x = standard_vertex(p)
    assert x.vertex_type == 0
    y = LatticeVertex.from_matrix(p, ((3, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert y.vertex_type == 1
    # same lattice presented differently
    z = LatticeVertex.from_matrix(p, ((3, 3, 0), (0, 1, 0), (0, 0, 1)))
    assert z == y and z.vertex_type == 1


def test_theta_symmetry_through_the_involution():
    rng = random.Random(17)
    p = 3
    for _ in range(1000):
        x = rand_vertex(p, rng)
        y = rand_vertex(p, rng)
        assert vector_distance(y, x) == opposition_involution(vector_distance(x, y))


def test_distance_symmetry_and_triangle_inequality():
    rng = random.Random(23)
    p = 2
    for _ in range(300):
        x, y, z = (rand_vertex(p, rng) for _ in range(3))
        assert dist2(x, y) == dist2(y, x)
        dxy = SqrtSum.of_squares((dist2(x, y),))
        dyz = SqrtSum.of_squares((dist2(y, z),))
        dxz = SqrtSum.of_squares((dist2(x, z),))
        assert dxz <= dxy + dyz


def test_isometry_equivariance_of_vector_distance():
    rng = random.Random(29)
    p = 5
    for _ in range(200):
        x = rand_vertex(p, rng)
        y = rand_vertex(p, rng)
        g = rand_sl3(rng)
        assert vector_distance(x.apply(g), y.apply(g)) == vector_distance(x, y)


def test_squared_length_values():
    assert weyl_dist2((0, 0, 0)) == 0
    assert weyl_dist2((1, 0, 0)) == 1
    assert weyl_dist2((1, 1, 0)) == 1
    assert weyl_dist2((2, 1, 0)) == 3


def test_frame_canonicalization_is_order_free():
    f1 = Frame.from_lines(((1, 0, 0), (0, 2, 0), (0, 0, -3)))
    f2 = Frame.from_lines(((0, 0, 1), (1, 0, 0), (0, 1, 0)))
    assert f1 == f2
    with pytest.raises(Exception):
        Frame.from_lines(((1, 0, 0), (0, 1, 0), (1, 1, 0)))


def test_distance_to_apartment_member_is_zero():
    p = 5
    frame = Frame.from_lines(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    v = frame_vertex(frame, p, (2, 1, 0))
    q, w = distance_to_apartment(v, frame)
    assert q == 0 and w == v


def test_distance_to_apartment_perturbed_frame():
    p = 5
    x = standard_vertex(p)
    u = ((1, Fraction(1, 5), 0), (0, 1, 0), (0, 0, 1))
    frame = Frame.from_lines(((1, 0, 0), (0, 1, 0), (0, 0, 1))).apply(u)
    q, w = distance_to_apartment(x, frame)
    assert q > 0
    assert q == dist2(x, w)
    assert q == distance_to_apartment_bruteforce(x, frame, 4)


def test_distance_to_apartment_matches_bruteforce_randomly():
    rng = random.Random(31)
    p = 2
    frame = Frame.from_lines(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    for _ in range(60):
        x = rand_vertex(p, rng)
        q, w = distance_to_apartment(x, frame)
        assert dist2(x, w) == q
        assert q == distance_to_apartment_bruteforce(x, frame, 6)


def test_distance_to_apartment_isometry_instance():
    rng = random.Random(37)
    p = 3
    frame = Frame.from_lines(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    for _ in range(50):
        x = rand_vertex(p, rng)
        g = rand_sl3(rng)
        q1, _ = distance_to_apartment(x, frame)
        q2, _ = distance_to_apartment(x.apply(g), frame.apply(g))
        assert q1 == q2


def test_residue_counts():
    assert len(residue_lines(2)) == 7
    assert len(residue_chambers(2)) == 21
    assert len(residue_chambers(3)) == 52
    assert residue_opposite_chamber_count(2) == 8
    assert residue_opposite_chamber_count(3) == 27


def test_residue_projection_flag_examples():
    p = 5
    o = standard_vertex(p)
    c = residue_projection(o, Flag.standard())
    assert c.line == (1, 0, 0) and c.plane_normal == (0, 0, 1)
    d = residue_projection(o, Flag.reversed_standard())
    assert d.line == (0, 0, 1) and d.plane_normal == (1, 0, 0)
    assert residue_opposite(c, d)


def test_residue_projection_vertex_examples():
    p = 5
    o = standard_vertex(p)
    y = LatticeVertex.from_matrix(p, ((25, 0, 0), (0, 5, 0), (0, 0, 1)))
    c = residue_projection(o, y)
    # same germ as the flag of the corresponding diagonal direction
    assert c == residue_projection(o, Flag.reversed_standard())


def test_residue_projection_rejects_irregular():
    p = 3
    o = standard_vertex(p)
    y = LatticeVertex.from_matrix(p, ((3, 0, 0), (0, 3, 0), (0, 0, 1)))
    with pytest.raises(IrregularSegmentError):
        residue_projection(o, y)


def test_residue_projection_against_geodesic_step_oracle():
    rng = random.Random(41)
    p = 3
    o = standard_vertex(p)
    found = 0
    while found < 60:
        y = rand_vertex(p, rng)
        if not is_regular(vector_distance(o, y)):
            continue
        found += 1
        assert residue_projection(o, y) == residue_projection_oracle(o, y)


def test_residue_projection_equivariance():
    rng = random.Random(43)
    p = 3
    o = standard_vertex(p)
    for _ in range(40):
        y = rand_vertex(p, rng)
        if not is_regular(vector_distance(o, y)):
            continue
        g = rand_sl3(rng)
        before = residue_projection(o, y)
        after = residue_projection(o.apply(g), y.apply(g))
        # compare through the moved canonical data: recompute via the oracle
        assert after == residue_projection_oracle(o.apply(g), y.apply(g))
        assert before == residue_projection_oracle(o, y)


def test_germ_face_degeneration_patterns():
    p = 3
    o = standard_vertex(p)
    wall1 = LatticeVertex.from_matrix(p, ((3, 0, 0), (0, 3, 0), (0, 0, 1)))
    line, normal = germ_face(o, wall1)
    assert line is not None and normal is None
    wall2 = LatticeVertex.from_matrix(p, ((3, 0, 0), (0, 1, 0), (0, 0, 1)))
    line, normal = germ_face(o, wall2)
    assert line is None and normal is not None
