# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import pytest
from conftest import gr
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import exact_matrices, exact_tuples

from matgen.errors import (
    InvalidParameter,
    NotTraceless,
    SingularConjugator,
    UnsupportedBackend,
    WrongArity,
)
from matgen.generation import StratumTag, classify
from matgen.invariants import (
    NON_GENERIC,
    B2Coords,
    b2_coords,
    compare_orbits,
    conjugate,
    find_conjugator,
    intertwiner_search,
    orbit_equivalent,
    realize_b2,
    semisimplify,
    sibirskii,
    traceless_retract,
)
from matgen.matrix import Mat2, MatTuple
from matgen.sampling import random_conjugator, random_tuple_array, tuple_from_array


def test_sibirskii_of_swap_pair(swap_pair):
    inv = sibirskii(swap_pair)
    assert inv.t1 == (0, 0)
    assert inv.t2 == (2, 2)
    assert inv.t11 == {(1, 2): 0}
    assert inv.t111 == {}
    assert len(sibirskii(MatTuple.of(*swap_pair, swap_pair[0])).as_vector()) == 3 + 3 + 3 + 1


coordinate = st.complex_numbers(min_magnitude=1e-3, max_magnitude=10, allow_nan=False, allow_infinity=False)
invertible = exact_matrices.filter(lambda g: bool(g.det()))


@settings(max_examples=50, deadline=None)
@given(exact_tuples(min_r=1, max_r=3), invertible)
def test_exact_invariants_are_conjugation_invariant(t, g):
    assert sibirskii(conjugate(t, g)).as_vector() == sibirskii(t).as_vector()


def test_float_invariants_are_conjugation_invariant(rng):
    for arr in random_tuple_array(rng, 4, 100):
        t = tuple_from_array(arr)
        moved = conjugate(t, random_conjugator(rng))
        assert sibirskii(moved).max_delta(sibirskii(t)) <= 1e-9


def test_conjugate_rejects_singular(swap_pair):
    with pytest.raises(SingularConjugator):
        conjugate(swap_pair, Mat2(1, 2, 2, 4))


def test_traceless_retract():
    t = MatTuple.of(Mat2(gr(1), gr(2), gr(3), gr(5)), Mat2(gr(0, 1), gr(0), gr(1), gr(1)))
    assert traceless_retract(t, 0) == t
    assert all(not m.trace() for m in traceless_retract(t, 1))
    half = traceless_retract(t, 0.5)
    assert half[0].trace() == gr(3)
    for bad in (-0.1, 1.5, 2):
        with pytest.raises(InvalidParameter):
            traceless_retract(t, bad)


def test_b2_coords(swap_pair):
    c = b2_coords(swap_pair)
    assert (c.z1, c.z2, c.x) == (2, 2, 0)
    assert not c.on_quadric()
    with pytest.raises(WrongArity):
        b2_coords(MatTuple.of(*swap_pair, swap_pair[0]))
    with pytest.raises(NotTraceless):
        b2_coords(MatTuple.of(Mat2.identity(), swap_pair[1]))


def test_realize_float_gives_swap_pair(swap_pair):
    assert realize_b2(B2Coords(2, 2, 0)) == swap_pair


@pytest.mark.parametrize(
    "coords",
    [
        (gr(2), gr(2), gr(0)),
        (gr(0), gr(0), gr(3)),
        (gr(0), gr(8), gr(1, 1)),
        (gr(1), gr(1), gr(0)),
        (gr(2, 0), gr(5, 3), gr(-1, 2)),
    ],
)
def test_realize_exact_round_trip(coords):
    c = B2Coords(*coords)
    t = realize_b2(c)
    assert (b2_coords(t).z1, b2_coords(t).z2, b2_coords(t).x) == coords
    assert (classify(t).tag is StratumTag.GENERATING) == (not c.on_quadric())


def test_realize_exact_unsupported():
    with pytest.raises(UnsupportedBackend):
        realize_b2(B2Coords(gr(3), gr(5), gr(1)))


@settings(max_examples=50, deadline=None)
@given(coordinate, coordinate, st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_realize_float_round_trip(z1, z2, x):
    back = b2_coords(realize_b2(B2Coords(z1, z2, x)), 1e-6)
    scale = 1 + abs(z1) + abs(z2) + abs(x)
    assert abs(back.z1 - z1) <= 1e-9 * scale
    assert abs(back.z2 - z2) <= 1e-9 * scale
    assert abs(back.x - x) <= 1e-9 * scale


def test_semisimplify_triangular(upper_triangular):
    ss = semisimplify(upper_triangular)
    expected = MatTuple.of(Mat2(1, 0, 0, 3), Mat2(4, 0, 0, -1), Mat2(2j, 0, 0, 1))
    assert ss.max_distance(expected) <= 1e-12
    assert all(m.b == 0 and m.c == 0 for m in ss)


def test_semisimplify_conjugated_triangular(upper_triangular, rng):
    moved = conjugate(upper_triangular, random_conjugator(rng))
    ss = semisimplify(moved)
    assert all(m.b == 0 and m.c == 0 for m in ss)
    assert sibirskii(ss).max_delta(sibirskii(upper_triangular)) <= 1e-9


def test_semisimplify_leaves_generating_and_rejects_exact(swap_pair, exact_swap_pair):
    assert semisimplify(swap_pair) is swap_pair
    with pytest.raises(UnsupportedBackend):
        semisimplify(exact_swap_pair)


def test_conjugator_recovered(swap_pair, rng):
    g = random_conjugator(rng)
    target = conjugate(swap_pair, g)
    found = intertwiner_search(swap_pair, target)
    assert found.kernel_dim == 1
    assert found.residual <= 1e-8
    assert conjugate(swap_pair, found.conjugator).max_distance(target) <= 1e-8
    assert abs(found.conjugator.det() - 1) <= 1e-9


def test_exact_conjugator_recovered(exact_swap_pair):
    g = Mat2(gr(1), gr(1), gr(0), gr(1))
    target = conjugate(exact_swap_pair, g)
    found = find_conjugator(exact_swap_pair, target)
    assert conjugate(exact_swap_pair, found) == target
    assert found.a == gr(1)


def test_self_intertwiners_are_scalars(swap_pair):
    assert intertwiner_search(swap_pair, swap_pair).kernel_dim == 1


def test_non_generic_kernel_flagged():
    s = MatTuple.of(Mat2(0, 1, 0, 0))
    t = MatTuple.of(Mat2.zero())
    found = intertwiner_search(s, t)
    assert found.conjugator is None
    assert found.kernel_dim == 2
    assert found.flags == (NON_GENERIC,)


def test_compare_orbits(swap_pair, upper_triangular, rng):
    cmp = compare_orbits(swap_pair, conjugate(swap_pair, random_conjugator(rng)))
    assert cmp.equivalent and cmp.conjugator is not None and cmp.residual <= 1e-8
    assert not orbit_equivalent(swap_pair, MatTuple.of(swap_pair[0], Mat2(0, 2, 1, 0)))
    diagonal = MatTuple.of(*(Mat2(m.a, 0, 0, m.d) for m in upper_triangular))
    cmp = compare_orbits(upper_triangular, diagonal)
    assert cmp.equivalent and cmp.conjugator is None


def test_exact_compare_needs_matching_kinds(exact_swap_pair):
    diagonal = MatTuple.of(Mat2(gr(1), gr(0), gr(0), gr(2)), Mat2(gr(3), gr(0), gr(0), gr(4)))
    with pytest.raises(UnsupportedBackend):
        compare_orbits(exact_swap_pair, diagonal)
    assert compare_orbits(diagonal, diagonal).equivalent
