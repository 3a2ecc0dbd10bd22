# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
The explicit model of the r = 2 generating quotient.

Coordinates (z1, z2, x) change linearly to (x1, x2, x3), in which the excluded
quadric becomes x1^2 + x2^2 + x3^2 = 0. The complement is covered by
f(lambda, y) = lambda * y on Y = {y . y = 1, lambda != 0}, two-to-one through
(lambda, y) ~ (-lambda, -y), and Y is parametrized by the tangent bundle of
the sphere through g(lambda, u, v) = (lambda, sqrt(1 + |v|^2) u + i v).
"""

import math
from dataclasses import dataclass

import sympy  # type: ignore

from .config import DEFAULT_TOL, UNIT_TOL, Y_QUADRIC_TOL
from .errors import InvalidPoint, NotOnSphere, NotUnitModulus, OnQuadric, UnsupportedBackend
from .invariants import B2Coords
from .scalar import (
    Backend,
    GaussianRational,
    Scalar,
    backend_of,
    cabs,
    exact_sqrt,
    imag_unit,
    principal_sqrt,
    to_scalar,
)

Vec3 = tuple[float, float, float]


def _coerce3(values, backend: Backend) -> tuple:
    vals = tuple(values)
    if len(vals) != 3:
        raise InvalidPoint(f"expected three coordinates, got {len(vals)}")
    return tuple(to_scalar(v, backend) for v in vals)


def _backend(*values) -> Backend:
    return Backend.EXACT if any(isinstance(v, GaussianRational) for v in values) else Backend.FLOAT


@dataclass(frozen=True)
class XCoords:
    x1: Scalar
    x2: Scalar
    x3: Scalar

    def __post_init__(self):
        backend = _backend(self.x1, self.x2, self.x3)
        for name, v in zip(("x1", "x2", "x3"), _coerce3((self.x1, self.x2, self.x3), backend)):
            object.__setattr__(self, name, v)

    @property
    def backend(self) -> Backend:
        return backend_of(self.x1)

    def as_tuple(self) -> tuple[Scalar, Scalar, Scalar]:
        return (self.x1, self.x2, self.x3)

    def quadric(self) -> Scalar:
        return self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3

    def distance(self, other: "XCoords") -> float:
        return max(cabs(a - b) for a, b in zip(self.as_tuple(), other.as_tuple()))


@dataclass(frozen=True)
class YPoint:
    """(lambda, y) with lambda != 0 and the complex-bilinear y . y = 1."""

    lam: Scalar
    y: tuple[Scalar, Scalar, Scalar]

    def __post_init__(self):
        backend = _backend(self.lam, *self.y)
        object.__setattr__(self, "lam", to_scalar(self.lam, backend))
        object.__setattr__(self, "y", _coerce3(self.y, backend))
        if not self.lam:
            raise InvalidPoint("lambda must be nonzero")
        residual = self.quadric_residual()
        if backend is Backend.EXACT:
            if residual:
                raise InvalidPoint("y . y != 1")
        elif abs(residual) > Y_QUADRIC_TOL * (1 + self.y_norm2()):
            raise InvalidPoint(f"y . y deviates from 1 by {abs(residual):.3e}")

    @property
    def backend(self) -> Backend:
        return backend_of(self.lam)

    def quadric_residual(self) -> Scalar:
        return sum((c * c for c in self.y), 0 * self.lam) - 1

    def y_norm2(self) -> float:
        return sum(cabs(c) ** 2 for c in self.y)

    def negate(self) -> "YPoint":
        return YPoint(-self.lam, tuple(-c for c in self.y))

    def distance(self, other: "YPoint") -> float:
        return max([cabs(self.lam - other.lam)] + [cabs(a - b) for a, b in zip(self.y, other.y)])


def _dot(a, b) -> float:
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class TangentPoint:
    """(lambda, u, v): lambda != 0, u a real unit 3-vector, v a real 3-vector with u . v = 0."""

    lam: complex
    u: Vec3
    v: Vec3

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "u", tuple(float(c) for c in self.u))
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        if len(self.u) != 3 or len(self.v) != 3:
            raise InvalidPoint("u and v must be 3-vectors")
        if self.lam == 0:
            raise InvalidPoint("lambda must be nonzero")
        if abs(_dot(self.u, self.u) - 1) > UNIT_TOL:
            raise InvalidPoint(f"|u| = {math.sqrt(_dot(self.u, self.u))!r} is not 1")
        vnorm = math.sqrt(_dot(self.v, self.v))
        if abs(_dot(self.u, self.v)) > UNIT_TOL * max(1.0, vnorm):
            raise InvalidPoint("v is not tangent to the sphere at u")

    def distance(self, other: "TangentPoint") -> float:
        return max(
            [abs(self.lam - other.lam)]
            + [abs(a - b) for a, b in zip(self.u, other.u)]
            + [abs(a - b) for a, b in zip(self.v, other.v)]
        )


def _x_from_b2(z1, z2, x, i):
    return x, (z1 - z2) / 2, (z1 + z2) / (2 * i)


def _b2_from_x(x1, x2, x3, i):
    return x2 + i * x3, -x2 + i * x3, x1


def b2_to_x(c: B2Coords) -> XCoords:
    return XCoords(*_x_from_b2(c.z1, c.z2, c.x, imag_unit(c.backend)))


def x_to_b2(x: XCoords) -> B2Coords:
    z1, z2, xx = _b2_from_x(x.x1, x.x2, x.x3, imag_unit(x.backend))
    return B2Coords(z1, z2, xx)


def quadric_identity_holds() -> bool:
    """Symbolic check that x^2 - z1 z2 = x1^2 + x2^2 + x3^2 under the coordinate change."""
    z1, z2, x = sympy.symbols("z1 z2 x")
    x1, x2, x3 = _x_from_b2(z1, z2, x, sympy.I)
    back = _b2_from_x(x1, x2, x3, sympy.I)
    forward = sympy.expand(x**2 - z1 * z2 - (x1**2 + x2**2 + x3**2)) == 0
    inverse = all(sympy.simplify(a - b) == 0 for a, b in zip(back, (z1, z2, x)))
    return forward and inverse


def friedland_reduction_holds() -> bool:
    """Symbolic check that the pair discriminant equals 4 (x^2 - z1 z2) of the traceless parts.

    With A0 = A - Tr(A)/2 I the two sides of the r = 2 non-generation equation
    are 4 Tr(A0 B0)^2 and 4 Tr(A0^2) Tr(B0^2); on traceless pairs A0 = A.
    """
    a = sympy.Matrix(2, 2, sympy.symbols("a0:4"))
    b = sympy.Matrix(2, 2, sympy.symbols("b0:4"))
    t1, t2 = a.trace(), b.trace()
    lhs = (2 * (a * b).trace() - t1 * t2) ** 2
    rhs = (2 * (a * a).trace() - t1**2) * (2 * (b * b).trace() - t2**2)
    eye = sympy.eye(2)
    a0, b0 = a - t1 / 2 * eye, b - t2 / 2 * eye
    z1, z2, x = (a0 * a0).trace(), (b0 * b0).trace(), (a0 * b0).trace()
    return sympy.expand(lhs - rhs - 4 * (x**2 - z1 * z2)) == 0


def f_map(p: YPoint) -> XCoords:
    return XCoords(*(p.lam * c for c in p.y))


def z2_canonical(p: YPoint) -> YPoint:
    """Representative of {p, -p} with Re(lambda) > 0, or Re = 0 and Im > 0."""
    lam = p.lam
    re, im = (lam.re, lam.im) if isinstance(lam, GaussianRational) else (lam.real, lam.imag)
    if re > 0 or (re == 0 and im > 0):
        return p
    return p.negate()


def f_inverse(x: XCoords, tol: float = DEFAULT_TOL) -> YPoint:
    q = x.quadric()
    if x.backend is Backend.EXACT:
        if not q:
            raise OnQuadric("point lies on x1^2 + x2^2 + x3^2 = 0")
        lam = exact_sqrt(q)
        if lam is None:
            raise UnsupportedBackend("square root of the quadric leaves the gaussian rationals")
    else:
        scale = max(1.0, sum(cabs(c) ** 2 for c in x.as_tuple()))
        if abs(q) <= tol * scale:
            raise OnQuadric(f"point lies on the excluded quadric (|q| = {abs(q):.3e})")
        lam = principal_sqrt(q)
    return z2_canonical(YPoint(lam, tuple(c / lam for c in x.as_tuple())))


def g_map(t: TangentPoint) -> YPoint:
    s = math.sqrt(1 + _dot(t.v, t.v))
    return YPoint(t.lam, tuple(complex(s * u, v) for u, v in zip(t.u, t.v)))


def g_inverse(p: YPoint) -> TangentPoint:
    if p.backend is Backend.EXACT:
        p = YPoint(p.lam.to_complex(), tuple(c.to_complex() for c in p.y))
    re = [c.real for c in p.y]
    v = tuple(c.imag for c in p.y)
    n = math.sqrt(_dot(re, re))
    u = tuple(c / n for c in re)
    # the constraint u . v = 0 holds only up to rounding; project it out
    uv = _dot(u, v)
    v = tuple(b - uv * a for a, b in zip(u, v))
    return TangentPoint(p.lam, u, v)


def circle_sphere_embed(lam: complex, u: Vec3) -> TangentPoint:
    if abs(abs(lam) - 1) > UNIT_TOL:
        raise NotUnitModulus(f"|lambda| = {abs(lam)!r} is not 1")
    if abs(_dot(u, u) - 1) > UNIT_TOL:
        raise NotOnSphere("u is not a unit vector")
    return TangentPoint(lam, u, (0.0, 0.0, 0.0))


def retract_to_core(t: TangentPoint) -> tuple[complex, Vec3]:
    return t.lam / abs(t.lam), t.u


def b2_from_tangent(t: TangentPoint) -> B2Coords:
    """The composite tangent model -> Y -> x coordinates -> (z1, z2, x)."""
    return x_to_b2(f_map(g_map(t)))


def tangent_from_b2(c: B2Coords, tol: float = DEFAULT_TOL) -> TangentPoint:
    """Inverse of b2_from_tangent up to (lambda, u, v) ~ (-lambda, -u, -v)."""
    return g_inverse(f_inverse(b2_to_x(c.to_float() if c.backend is Backend.EXACT else c), tol))
