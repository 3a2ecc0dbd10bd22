# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Scalar backends.

Two backends share one arithmetic surface:

- FLOAT: Python ``complex`` (a pair of binary64 values).
- EXACT: ``GaussianRational``, a pair of arbitrary-precision ``Fraction``.

Mixing the two in one operation raises BackendMismatch. Comparisons on the
FLOAT backend always take an explicit tolerance.
"""

import cmath
import enum
import math
from fractions import Fraction
from typing import Optional, Union

import regex as re  # type: ignore

from .errors import BackendMismatch, InvalidParameter

_rational_re = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


class Backend(enum.Enum):
    EXACT = "gaussian-rational"
    FLOAT = "float64"

    @classmethod
    def parse(cls, label: str) -> "Backend":
        for b in cls:
            if b.value == label or b.name.lower() == (label or "").strip().lower():
                return b
        raise InvalidParameter(
            f"unknown scalar backend {label!r}; use 'float64' or 'gaussian-rational'"
        )


def parse_fraction(text: str) -> Fraction:
    """Parse an exact 'p/q' or 'p' string."""
    m = _rational_re.match(text or "")
    if not m:
        raise InvalidParameter(f"not a rational 'p/q' string: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise InvalidParameter(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_fraction(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


class GaussianRational:
    """An exact complex number re + i*im with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re_part=0, im_part=0):
        self.re = Fraction(re_part)
        self.im = Fraction(im_part)

    @classmethod
    def parse(cls, re_text: str, im_text: str = "0") -> "GaussianRational":
        return cls(parse_fraction(re_text), parse_fraction(im_text))

    @staticmethod
    def _coerce(other) -> "GaussianRational":
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussianRational(other)
        if isinstance(other, (float, complex)):
            raise BackendMismatch(
                "cannot mix float64 and gaussian-rational scalars in one operation"
            )
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except BackendMismatch:
            return NotImplemented
        if o is NotImplemented:
            return o
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({format_fraction(self.re)}, {format_fraction(self.im)})"

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


Scalar = Union[complex, GaussianRational]

I_EXACT = GaussianRational(0, 1)


def backend_of(x) -> Backend:
    return Backend.EXACT if isinstance(x, GaussianRational) else Backend.FLOAT


def to_scalar(x, backend: Backend) -> Scalar:
    """Convert x into the given backend. Float to exact conversion is exact."""
    if backend is Backend.EXACT:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return GaussianRational(Fraction(x.real), Fraction(x.imag))
        return GaussianRational(Fraction(x))
    if isinstance(x, GaussianRational):
        return x.to_complex()
    return complex(x)


def imag_unit(backend: Backend) -> Scalar:
    return I_EXACT if backend is Backend.EXACT else 1j


def cabs(x) -> float:
    if isinstance(x, GaussianRational):
        return math.sqrt(float(x.abs2()))
    return abs(x)


def is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, GaussianRational):
        return not x
    return abs(x) <= tol


def principal_sqrt(z: complex) -> complex:
    """Principal square root: nonnegative real part, and nonnegative imaginary part when purely imaginary."""
    s = cmath.sqrt(complex(z))
    if s.real == 0.0 and s.imag < 0.0:
        s = -s
    if s.real < 0.0:
        s = -s
    return s + 0.0


def _fraction_sqrt(f: Fraction) -> Optional[Fraction]:
    if f < 0:
        return None
    n, d = f.numerator, f.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return Fraction(rn, rd)


def exact_sqrt(w: GaussianRational) -> Optional[GaussianRational]:
    """Principal square root inside Q(i), or None when it leaves the field."""
    if not w:
        return GaussianRational(0)
    u, v = w.re, w.im
    n = _fraction_sqrt(u * u + v * v)
    if n is None:
        return None
    alpha = _fraction_sqrt((n + u) / 2)
    if alpha is None:
        return None
    if alpha != 0:
        return GaussianRational(alpha, v / (2 * alpha))
    beta = _fraction_sqrt(-u)
    if beta is None:
        return None
    return GaussianRational(0, beta)
