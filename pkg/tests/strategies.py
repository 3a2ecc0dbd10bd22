# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from matgen.matrix import Mat2, MatTuple
from matgen.scalar import GaussianRational

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussian_rationals = st.builds(GaussianRational, fractions, fractions)
nonzero_gaussian_rationals = gaussian_rationals.filter(bool)

complexes = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)

exact_matrices = st.builds(Mat2, gaussian_rationals, gaussian_rationals, gaussian_rationals, gaussian_rationals)
float_matrices = st.builds(Mat2, complexes, complexes, complexes, complexes)


def exact_tuples(min_r: int = 1, max_r: int = 4):
    return st.lists(exact_matrices, min_size=min_r, max_size=max_r).map(lambda ms: MatTuple(tuple(ms)))


def float_tuples(min_r: int = 1, max_r: int = 4):
    return st.lists(float_matrices, min_size=min_r, max_size=max_r).map(lambda ms: MatTuple(tuple(ms)))


seeds = st.integers(min_value=0, max_value=2**32 - 1)
