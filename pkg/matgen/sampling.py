# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Seeded random streams.

Every draw comes from a numpy Generator over the counter-based Philox bit
generator, keyed by (seed, stream, block). Blocks have a fixed size, so a
stream of n samples is the same however the blocks are scheduled.
"""

import enum
import math
from fractions import Fraction
from typing import Iterator

import numpy as np

from .b2model import TangentPoint, YPoint, g_map
from .config import BLOCK_SIZE, MAX_CONJUGATOR_COND, RATIONAL_DEN_BOUND, RATIONAL_NUM_BOUND
from .errors import InvalidParameter
from .helpers import blocks, sha256_digest
from .matrix import Mat2, MatTuple
from .scalar import GaussianRational


class Distribution(enum.Enum):
    GAUSSIAN = "gaussian"
    UNIT_DISC = "unit-disc"
    RATIONAL = "rational"

    @classmethod
    def parse(cls, label: str) -> "Distribution":
        key = (label or "").strip().lower().replace("_", "-")
        for d in cls:
            if d.value == key:
                return d
        raise InvalidParameter(
            f"unknown distribution {label!r}; use gaussian, unit-disc or rational"
        )


EDGE_FAMILIES = ("upper-triangular", "conjugated-triangular", "scalar", "diagonal", "nilpotent")


def stream_id(name: str) -> int:
    """Stable 32-bit id for a named stream."""
    return int(sha256_digest(name)[:8], 16)


def sample_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(ss))


def random_complex(rng: np.random.Generator, size, dist: Distribution = Distribution.GAUSSIAN):
    """Complex draws whose two real parts sit side by side in the stream.

    The leading axis of size is the sample index, so the first k samples of a
    draw of n are the draw of k.
    """
    shape = tuple(size) if isinstance(size, (tuple, list)) else (int(size),)
    if dist is Distribution.UNIT_DISC:
        u = rng.random(shape + (2,))
        return np.sqrt(u[..., 0]) * np.exp(2j * math.pi * u[..., 1])
    w = rng.standard_normal(shape + (2,))
    return w[..., 0] + 1j * w[..., 1]


def random_tuple_array(
    rng: np.random.Generator, r: int, count: int, dist: Distribution = Distribution.GAUSSIAN
) -> np.ndarray:
    """count FLOAT tuples as an array shaped (count, r, 2, 2)."""
    return random_complex(rng, (count, r, 2, 2), dist)


def tuple_from_array(arr) -> MatTuple:
    return MatTuple(tuple(Mat2.from_array(m) for m in arr))


def random_rational(rng: np.random.Generator) -> GaussianRational:
    nums = rng.integers(-RATIONAL_NUM_BOUND, RATIONAL_NUM_BOUND, size=2, endpoint=True)
    dens = rng.integers(1, RATIONAL_DEN_BOUND, size=2, endpoint=True)
    return GaussianRational(Fraction(int(nums[0]), int(dens[0])), Fraction(int(nums[1]), int(dens[1])))


def random_rational_tuple(rng: np.random.Generator, r: int) -> MatTuple:
    return MatTuple(tuple(Mat2(*(random_rational(rng) for _ in range(4))) for _ in range(r)))


def sample_tuples(
    r: int, n: int, dist: Distribution, seed: int, stream: str = "sample"
) -> Iterator[MatTuple]:
    """Deterministic stream of n tuples for (r, n, dist, seed)."""
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    if r < 1:
        raise InvalidParameter(f"r must be >= 1, got {r}")
    sid = stream_id(f"{stream}:{dist.value}:{r}")
    for idx, _, count in blocks(n, BLOCK_SIZE):
        rng = sample_rng(seed, sid, idx)
        if dist is Distribution.RATIONAL:
            for _ in range(count):
                yield random_rational_tuple(rng, r)
        else:
            for arr in random_tuple_array(rng, r, count, dist):
                yield tuple_from_array(arr)


def random_conjugator(rng: np.random.Generator, max_cond: float = MAX_CONJUGATOR_COND) -> Mat2:
    """Random invertible g with cond(g) <= max_cond and |g|, |g^-1| <= sqrt(max_cond)."""
    while True:
        g = random_complex(rng, (2, 2))
        s = np.linalg.svd(g, compute_uv=False)
        if s[1] > 0 and s[0] / s[1] <= max_cond:
            return Mat2.from_array(g / math.sqrt(s[0] * s[1]))


def random_unit_complex(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * math.pi * rng.random()))


def random_sphere_point(rng: np.random.Generator, m: int) -> tuple[complex, ...]:
    """Uniform point of the unit sphere in C^m."""
    w = random_complex(rng, m)
    w = w / np.linalg.norm(w)
    return tuple(complex(c) for c in w)


def random_unit_vector3(rng: np.random.Generator) -> tuple[float, float, float]:
    w = rng.standard_normal(3)
    w = w / np.linalg.norm(w)
    return (float(w[0]), float(w[1]), float(w[2]))


def random_tangent_point(
    rng: np.random.Generator, lam_range: tuple[float, float] = (1e-3, 1e3), v_max: float = 1e3
) -> TangentPoint:
    """|lambda| log-uniform in lam_range, u uniform on S^2, v = w - (w.u)u for Gaussian w."""
    modulus = 10 ** rng.uniform(math.log10(lam_range[0]), math.log10(lam_range[1]))
    lam = modulus * random_unit_complex(rng)
    u = np.array(random_unit_vector3(rng))
    w = rng.standard_normal(3) * 10 ** rng.uniform(-3, math.log10(v_max))
    v = w - np.dot(w, u) * u
    norm = float(np.linalg.norm(v))
    if norm > v_max:
        v = v * (v_max / norm)
    return TangentPoint(lam, tuple(u), tuple(v))


def random_y_point(rng: np.random.Generator) -> YPoint:
    return g_map(random_tangent_point(rng))


def edge_family_tuple(rng: np.random.Generator, r: int, kind: str) -> MatTuple:
    """A FLOAT tuple from one of the constructed non-generating families."""
    z = random_complex(rng, (r, 3))
    if kind == "upper-triangular":
        return MatTuple(tuple(Mat2(a, b, 0, d) for a, b, d in z))
    if kind == "conjugated-triangular":
        base = MatTuple(tuple(Mat2(a, b, 0, d) for a, b, d in z))
        g = random_conjugator(rng)
        g_inv = g.inverse()
        return base.map(lambda m: g @ m @ g_inv)
    if kind == "scalar":
        return MatTuple(tuple(Mat2(a, 0, 0, a) for a, _, _ in z))
    if kind == "diagonal":
        return MatTuple(tuple(Mat2(a, 0, 0, d) for a, _, d in z))
    if kind == "nilpotent":
        return MatTuple(tuple(Mat2(0, b, 0, 0) for _, b, _ in z))
    raise InvalidParameter(f"unknown edge family {kind!r}")
