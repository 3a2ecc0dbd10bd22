# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import numpy as np
import pytest
from conftest import gr
from hypothesis import given, settings
from strategies import exact_tuples

from matgen.errors import UnsupportedBackend, WrongArity
from matgen.generation import (
    StratumTag,
    Word,
    batch_shared_eigenline,
    batch_span_dims,
    classify,
    common_eigenline,
    friedland_generates,
    friedland_low_confidence,
    friedland_sides,
    generates_by_span,
    is_incident,
    pairwise_commuting,
)
from matgen.matrix import ALL_LINES, Mat2, MatTuple, ProjLine
from matgen.sampling import edge_family_tuple, random_tuple_array, tuple_from_array


def test_swap_pair_generates(swap_pair):
    span = generates_by_span(swap_pair)
    assert tuple(span) == (True, 4)
    assert [str(w) for w in span.words] == ["I", "A1", "A2", "A1A2"]
    assert span.rounds == 2
    assert common_eigenline(swap_pair) is None
    stratum = classify(swap_pair)
    assert stratum.tag is StratumTag.GENERATING
    assert stratum.witness == span.words


def test_swap_pair_exact(exact_swap_pair):
    assert classify(exact_swap_pair).tag is StratumTag.GENERATING
    assert friedland_generates(*exact_swap_pair)
    assert friedland_sides(*exact_swap_pair) == (gr(0), gr(16))


def test_scalar_tuple_commutes():
    t = MatTuple.of(Mat2(2, 0, 0, 2), Mat2(-1j, 0, 0, -1j))
    assert common_eigenline(t) is ALL_LINES
    assert classify(t).tag is StratumTag.COMMUTING
    assert classify(t).witness is None


def test_single_matrix_never_generates():
    t = MatTuple.of(Mat2(1, 2, 3, 4))
    assert generates_by_span(t).span_dim == 2
    assert classify(t).tag is StratumTag.COMMUTING


def test_upper_triangular_shares_first_basis_line(upper_triangular):
    span = generates_by_span(upper_triangular)
    assert not span.generates and span.span_dim == 3
    stratum = classify(upper_triangular)
    assert stratum.tag is StratumTag.EIGEN_SHARED
    assert stratum.witness == ProjLine.of(1, 0)
    assert is_incident(upper_triangular, ProjLine.of(1, 0))
    assert not is_incident(upper_triangular, ProjLine.of(0, 1))


def test_exact_eigen_shared_witness():
    t = MatTuple.of(Mat2(gr(1), gr(2), gr(0), gr(3)), Mat2(gr(4), gr(5), gr(0), gr(-1)))
    stratum = classify(t)
    assert stratum.tag is StratumTag.EIGEN_SHARED
    assert stratum.witness == ProjLine(gr(1), gr(0))


def test_exact_diagonal_commutes():
    t = MatTuple.of(Mat2(gr(1), gr(0), gr(0), gr(2)), Mat2(gr(0, 1), gr(0), gr(0), gr(5)))
    assert pairwise_commuting(t)
    assert classify(t).tag is StratumTag.COMMUTING


def test_common_eigenline_needs_float(exact_swap_pair):
    with pytest.raises(UnsupportedBackend):
        common_eigenline(exact_swap_pair)


def test_word_evaluate(swap_pair):
    assert Word((1, 2)).evaluate(swap_pair) == Mat2(0, 1, -1, 0)
    assert Word().evaluate(swap_pair) == Mat2.identity()
    with pytest.raises(WrongArity):
        Word((3,)).evaluate(swap_pair)


@settings(max_examples=60, deadline=None)
@given(exact_tuples(min_r=2, max_r=3))
def test_exact_classification_is_consistent(t):
    span = generates_by_span(t)
    stratum = classify(t)
    assert (stratum.tag is StratumTag.GENERATING) == span.generates
    if stratum.tag is StratumTag.EIGEN_SHARED:
        assert is_incident(t, stratum.witness)
        assert not pairwise_commuting(t)
    if t.r == 2:
        assert friedland_generates(t[0], t[1]) == span.generates


def test_burnside_agreement_on_seeded_samples(rng):
    for arr in random_tuple_array(rng, 3, 200):
        t = tuple_from_array(arr)
        assert generates_by_span(t).generates == (common_eigenline(t) is None)
    for kind in ("upper-triangular", "conjugated-triangular", "diagonal", "nilpotent", "scalar"):
        for _ in range(20):
            t = edge_family_tuple(rng, 3, kind)
            assert not generates_by_span(t).generates
            assert common_eigenline(t) is not None


def test_batch_helpers_match_scalar_path(rng):
    arr = random_tuple_array(rng, 2, 50)
    edge = np.stack([np.stack([m.to_array() for m in edge_family_tuple(rng, 2, "conjugated-triangular")])
                     for _ in range(10)])
    stack = np.concatenate([arr, edge])
    dims = batch_span_dims(stack)
    shared = batch_shared_eigenline(stack)
    for k, a in enumerate(stack):
        t = tuple_from_array(a)
        assert dims[k] == generates_by_span(t).span_dim
        assert shared[k] == (common_eigenline(t) is not None)
    assert np.all(dims[:50] == 4) and np.all(dims[50:] == 3)


SCALES = [1e-6, 1e-5, 1e-4, 1.0, 1e4, 1e5, 1e6]


@pytest.mark.parametrize("s", SCALES)
def test_classification_ignores_overall_scale(s, swap_pair, upper_triangular):
    scaled = swap_pair.map(lambda m: m.scale(s))
    assert tuple(generates_by_span(scaled)) == (True, 4)
    assert classify(scaled).tag is StratumTag.GENERATING
    tri = upper_triangular.map(lambda m: m.scale(s))
    assert generates_by_span(tri).span_dim == 3
    assert classify(tri).tag is StratumTag.EIGEN_SHARED
    stack = np.stack([np.stack([m.to_array() for m in t]) for t in (scaled, tri)])
    assert list(batch_span_dims(stack)) == [4, 3]


def test_classification_ignores_per_matrix_scale(swap_pair):
    t = MatTuple.of(swap_pair[0].scale(1e6), swap_pair[1].scale(1e-6))
    assert classify(t).tag is StratumTag.GENERATING
    stack = np.stack([m.to_array() for m in t])[None]
    assert batch_span_dims(stack)[0] == 4


def test_friedland_low_confidence_band(swap_pair):
    assert not friedland_low_confidence(*swap_pair)
    near = MatTuple.of(Mat2(1, 2, 0, 3), Mat2(4, 5, 1e-12, -1))
    assert friedland_low_confidence(*near)
    assert not friedland_low_confidence(*MatTuple.of(Mat2(1, 2, 0, 3), Mat2(4, 5, 1e-3, -1)))
