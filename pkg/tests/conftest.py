# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import json
import pathlib
from fractions import Fraction

import numpy as np
import pytest

from matgen.config import VerifySettings
from matgen.matrix import Mat2, MatTuple
from matgen.scalar import GaussianRational

ROOT = pathlib.Path(__file__).resolve().parent.parent


def gr(re, im=0) -> GaussianRational:
    return GaussianRational(Fraction(re), Fraction(im))


def load_schema(name: str) -> dict:
    return json.loads((ROOT / "schemas" / f"{name}.schema.json").read_text(encoding="utf-8"))


@pytest.fixture
def report_schema():
    return load_schema("report")


@pytest.fixture
def document_schema():
    return load_schema("tuple_document")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


@pytest.fixture
def swap_pair():
    """diag(1, -1) with the swap matrix: the basic generating pair."""
    return MatTuple.of(Mat2(1, 0, 0, -1), Mat2(0, 1, 1, 0))


@pytest.fixture
def exact_swap_pair():
    return MatTuple.of(Mat2(gr(1), gr(0), gr(0), gr(-1)), Mat2(gr(0), gr(1), gr(1), gr(0)))


@pytest.fixture
def upper_triangular():
    return MatTuple.of(Mat2(1, 2, 0, 3), Mat2(4, 5, 0, -1), Mat2(2j, 1, 0, 1))


@pytest.fixture
def small_settings():
    """Reduced counts so each suite finishes in seconds."""
    return VerifySettings(seed=7, r_min=2, r_max=3, burnside_r_max=3, rank_samples=3).with_samples(20)
