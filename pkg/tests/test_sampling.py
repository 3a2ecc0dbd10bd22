# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import numpy as np
import pytest
from hypothesis import given
from strategies import seeds

from matgen.config import BLOCK_SIZE, MAX_CONJUGATOR_COND, RATIONAL_DEN_BOUND
from matgen.errors import InvalidParameter
from matgen.generation import StratumTag, classify
from matgen.helpers import blocks
from matgen.sampling import (
    EDGE_FAMILIES,
    Distribution,
    edge_family_tuple,
    random_conjugator,
    random_sphere_point,
    random_tuple_array,
    sample_rng,
    sample_tuples,
    stream_id,
    tuple_from_array,
)
from matgen.scalar import Backend


@given(seeds)
def test_sample_stream_is_deterministic(seed):
    first = list(sample_tuples(2, 4, Distribution.GAUSSIAN, seed))
    assert first == list(sample_tuples(2, 4, Distribution.GAUSSIAN, seed))
    assert first[:2] == list(sample_tuples(2, 2, Distribution.GAUSSIAN, seed))


@pytest.mark.parametrize("dist", [Distribution.GAUSSIAN, Distribution.UNIT_DISC])
def test_sample_depends_only_on_its_index(dist):
    long = list(sample_tuples(3, 6, dist, 11))
    short = list(sample_tuples(3, 1, dist, 11))
    assert long[0] == short[0]
    assert long[0][2].d.imag == short[0][2].d.imag


def test_seeds_and_streams_differ():
    a = list(sample_tuples(3, 2, Distribution.GAUSSIAN, 1))
    assert a != list(sample_tuples(3, 2, Distribution.GAUSSIAN, 2))
    assert a != list(sample_tuples(3, 2, Distribution.GAUSSIAN, 1, stream="other"))
    assert stream_id("sample") == stream_id("sample")
    assert stream_id("sample") != stream_id("sample:gaussian:3")
    assert 0 <= stream_id("b2:roundtrip") < 2**32


def test_blocks_are_keyed_independently():
    n = BLOCK_SIZE + 3
    tail = list(sample_tuples(2, n, Distribution.UNIT_DISC, 9))[BLOCK_SIZE:]
    rng = sample_rng(9, stream_id("sample:unit-disc:2"), 1)
    assert tail == [tuple_from_array(a) for a in random_tuple_array(rng, 2, 3, Distribution.UNIT_DISC)]


def test_blocks_split():
    assert blocks(5, 2) == [(0, 0, 2), (1, 2, 2), (2, 4, 1)]
    assert blocks(0, 2) == []


def test_unit_disc_entries():
    for t in sample_tuples(2, 50, Distribution.UNIT_DISC, 3):
        assert all(abs(x) <= 1 for m in t for x in (m.a, m.b, m.c, m.d))


def test_rational_stream():
    tuples = list(sample_tuples(2, 20, Distribution.RATIONAL, 5))
    assert tuples == list(sample_tuples(2, 20, Distribution.RATIONAL, 5))
    for t in tuples:
        assert t.backend is Backend.EXACT
        for m in t:
            for x in (m.a, m.b, m.c, m.d):
                assert x.re.denominator <= RATIONAL_DEN_BOUND
                assert x.im.denominator <= RATIONAL_DEN_BOUND


def test_sample_arguments():
    with pytest.raises(InvalidParameter):
        list(sample_tuples(2, 0, Distribution.GAUSSIAN, 1))
    with pytest.raises(InvalidParameter):
        list(sample_tuples(0, 3, Distribution.GAUSSIAN, 1))


def test_distribution_parse():
    assert Distribution.parse("UNIT_DISC") is Distribution.UNIT_DISC
    assert Distribution.parse(" rational ") is Distribution.RATIONAL
    with pytest.raises(InvalidParameter):
        Distribution.parse("cauchy")


def test_random_conjugator_is_well_conditioned(rng):
    for _ in range(50):
        s = np.linalg.svd(random_conjugator(rng).to_array(), compute_uv=False)
        assert s[0] / s[1] <= MAX_CONJUGATOR_COND * (1 + 1e-12)


def test_random_sphere_point(rng):
    w = random_sphere_point(rng, 4)
    assert len(w) == 4
    assert abs(sum(abs(x) ** 2 for x in w) - 1) <= 1e-12


@pytest.mark.parametrize("kind", EDGE_FAMILIES)
def test_edge_families_never_generate(kind, rng):
    for r in (2, 4):
        assert classify(edge_family_tuple(rng, r, kind)).tag is not StratumTag.GENERATING


def test_unknown_edge_family(rng):
    with pytest.raises(InvalidParameter):
        edge_family_tuple(rng, 2, "generic")
