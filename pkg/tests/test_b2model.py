# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import math

import pytest
from conftest import gr

from matgen.b2model import (
    TangentPoint,
    XCoords,
    YPoint,
    b2_from_tangent,
    b2_to_x,
    circle_sphere_embed,
    f_inverse,
    f_map,
    friedland_reduction_holds,
    g_inverse,
    g_map,
    quadric_identity_holds,
    retract_to_core,
    tangent_from_b2,
    x_to_b2,
    z2_canonical,
)
from matgen.errors import InvalidPoint, NotOnSphere, NotUnitModulus, OnQuadric, UnsupportedBackend
from matgen.generation import friedland_generates, friedland_sides
from matgen.invariants import B2Coords, b2_coords, traceless_retract
from matgen.matrix import Mat2, MatTuple
from matgen.sampling import random_rational_tuple, random_tangent_point, random_tuple_array, tuple_from_array


def test_quadric_identity_is_symbolic():
    assert quadric_identity_holds()


def test_friedland_discriminant_reduces_to_the_quadric(rng):
    assert friedland_reduction_holds()
    for _ in range(50):
        t = random_rational_tuple(rng, 2)
        lhs, rhs = friedland_sides(t[0], t[1])
        assert lhs - rhs == gr(4) * b2_coords(traceless_retract(t)).discriminant()
    for arr in random_tuple_array(rng, 2, 50):
        t = tuple_from_array(arr)
        lhs, rhs = friedland_sides(t[0], t[1])
        disc = b2_coords(traceless_retract(t)).discriminant()
        assert abs(lhs - rhs - 4 * disc) <= 1e-10 * (1 + abs(lhs) + abs(rhs))


def test_traceless_pair_generates_off_the_quadric():
    on = MatTuple.of(Mat2(1, 0, 0, -1), Mat2(1, 1, 0, -1))
    assert b2_coords(on).discriminant() == 0
    assert not friedland_generates(*on)
    off = MatTuple.of(Mat2(1, 0, 0, -1), Mat2(0, 1, 1, 0))
    assert b2_coords(off).discriminant() == -4
    assert friedland_generates(*off)


def test_exact_coordinate_change_is_inverse_and_carries_the_quadric():
    c = B2Coords(gr(2), gr(3), gr(1))
    x = b2_to_x(c)
    assert x_to_b2(x) == c
    assert x.quadric() == c.discriminant() == gr(-5)


def test_exact_f_inverse():
    x = XCoords(gr(3), gr(4), gr(0))
    p = f_inverse(x)
    assert p.lam == gr(5)
    assert p.y == (gr("3/5"), gr("4/5"), gr(0))
    assert f_map(p) == x


def test_exact_f_inverse_rejects_quadric_and_irrational_roots():
    with pytest.raises(OnQuadric):
        f_inverse(XCoords(gr(1), gr(0, 1), gr(0)))
    with pytest.raises(UnsupportedBackend):
        f_inverse(XCoords(gr(1), gr(1), gr(0)))


def test_float_f_inverse_rejects_quadric():
    with pytest.raises(OnQuadric):
        f_inverse(XCoords(1, 1j, 0))
    with pytest.raises(OnQuadric):
        tangent_from_b2(B2Coords(0, 0, 0))


def test_seeded_round_trips(rng):
    for _ in range(500):
        tp = random_tangent_point(rng)
        p = g_map(tp)
        vnorm = math.sqrt(sum(c * c for c in tp.v))
        scale = max(1.0, abs(p.lam)) * (1.0 + p.y_norm2())
        assert abs(p.quadric_residual()) <= 1e-12 * (1 + vnorm**2)
        assert f_inverse(f_map(p)).distance(z2_canonical(p)) <= 1e-10 * scale
        assert g_inverse(p).distance(tp) <= 1e-10 * max(1.0, vnorm)
        # (lambda, y) and (-lambda, -y) have bit-identical images
        assert f_map(p.negate()) == f_map(p)


def test_z2_canonical_picks_positive_real_part():
    p = YPoint(-2 + 1j, (1, 0, 0))
    q = z2_canonical(p)
    assert q.lam == 2 - 1j
    assert q.y == (-1, 0, 0)
    assert z2_canonical(q) is q
    assert z2_canonical(YPoint(-1j, (0, 1, 0))).lam == 1j


def test_y_point_validation():
    with pytest.raises(InvalidPoint):
        YPoint(0, (1, 0, 0))
    with pytest.raises(InvalidPoint):
        YPoint(1, (1, 1, 0))
    with pytest.raises(InvalidPoint):
        YPoint(gr(1), (gr(1), gr(1), gr(0)))
    with pytest.raises(InvalidPoint):
        YPoint(1, (1, 0))
    # complex-bilinear, so (i, sqrt(2), 0) is on it
    YPoint(1, (1j, math.sqrt(2), 0))


def test_tangent_point_validation():
    with pytest.raises(InvalidPoint):
        TangentPoint(0, (1, 0, 0), (0, 1, 0))
    with pytest.raises(InvalidPoint):
        TangentPoint(1, (1, 1, 0), (0, 0, 1))
    with pytest.raises(InvalidPoint):
        TangentPoint(1, (1, 0, 0), (1, 0, 0))


def test_circle_sphere_embedding_and_retraction():
    tp = circle_sphere_embed(1j, (0.0, 0.6, 0.8))
    assert tp.v == (0.0, 0.0, 0.0)
    assert retract_to_core(tp) == (1j, (0.0, 0.6, 0.8))
    assert retract_to_core(TangentPoint(2j, (0, 0, 1), (1, 0, 0))) == (1j, (0.0, 0.0, 1.0))
    with pytest.raises(NotUnitModulus):
        circle_sphere_embed(2, (1, 0, 0))
    with pytest.raises(NotOnSphere):
        circle_sphere_embed(1j, (1, 1, 0))


def _negated(tp: TangentPoint) -> TangentPoint:
    return TangentPoint(-tp.lam, tuple(-c for c in tp.u), tuple(-c for c in tp.v))


def test_tangent_from_b2_inverts_up_to_sign():
    tp = TangentPoint(1 + 2j, (0.0, 0.6, 0.8), (1.0, 0.0, 0.0))
    back = tangent_from_b2(b2_from_tangent(tp))
    assert min(back.distance(tp), back.distance(_negated(tp))) <= 1e-9


def test_tangent_from_b2_accepts_exact_coordinates():
    back = tangent_from_b2(B2Coords(gr(2), gr(2), gr(0)))
    coords = b2_from_tangent(back)
    assert abs(coords.z1 - 2) <= 1e-12
    assert abs(coords.z2 - 2) <= 1e-12
    assert abs(coords.x) <= 1e-12
