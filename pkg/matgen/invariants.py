# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Trace invariants, the traceless retraction and the quotient by simultaneous
conjugation.

Two tuples lie over the same point of the quotient iff their semisimplified
forms have equal trace invariants; on generating tuples that point is a
single free orbit and an invertible intertwiner witnesses it.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .config import DEFAULT_TOL, KERNEL_SEARCH_LIMIT, RECONCILE_FACTOR
from .errors import (
    BackendMismatch,
    InconsistentClassification,
    InvalidParameter,
    NotTraceless,
    SingularConjugator,
    UnsupportedBackend,
    WrongArity,
)
from .generation import StratumTag, classify, common_eigenline
from .matrix import ALL_LINES, Mat2, MatTuple, exact_nullspace, mat_mul
from .scalar import (
    Backend,
    GaussianRational,
    Scalar,
    cabs,
    exact_sqrt,
    is_zero,
    principal_sqrt,
    to_scalar,
)

log = logging.getLogger("matgen")

NON_GENERIC = "NON_GENERIC"


@dataclass(frozen=True)
class SibInvariants:
    """Tr A_i, Tr A_i^2, Tr A_iA_j (i<j) and Tr A_iA_jA_l (i<j<l), 1-based keys."""

    r: int
    t1: tuple[Scalar, ...]
    t2: tuple[Scalar, ...]
    t11: dict[tuple[int, int], Scalar]
    t111: dict[tuple[int, int, int], Scalar]

    def families(self) -> dict[str, list[Scalar]]:
        return {
            "t1": list(self.t1),
            "t2": list(self.t2),
            "t11": [self.t11[k] for k in sorted(self.t11)],
            "t111": [self.t111[k] for k in sorted(self.t111)],
        }

    def as_vector(self) -> list[Scalar]:
        out: list[Scalar] = []
        for values in self.families().values():
            out.extend(values)
        return out

    def deltas(self, other: "SibInvariants") -> dict[str, float]:
        """Largest relative deviation |a-b| / max(1, |a|, |b|) per trace family."""
        if self.r != other.r:
            raise WrongArity(f"cannot compare invariants for r = {self.r} and r = {other.r}")
        out = {}
        mine, theirs = self.families(), other.families()
        for name in mine:
            worst = 0.0
            for a, b in zip(mine[name], theirs[name]):
                a, b = _as_float(a), _as_float(b)
                worst = max(worst, abs(a - b) / max(1.0, abs(a), abs(b)))
            out[name] = worst
        return out

    def max_delta(self, other: "SibInvariants") -> float:
        return max(self.deltas(other).values())


def _as_float(x) -> complex:
    return x.to_complex() if isinstance(x, GaussianRational) else complex(x)


def sibirskii(t: MatTuple) -> SibInvariants:
    mats = list(t)
    r = t.r
    t1 = tuple(m.trace() for m in mats)
    t2 = tuple(mat_mul(m, m).trace() for m in mats)
    t11 = {}
    for i, j in itertools.combinations(range(r), 2):
        t11[(i + 1, j + 1)] = mat_mul(mats[i], mats[j]).trace()
    t111 = {}
    for i, j, k in itertools.combinations(range(r), 3):
        t111[(i + 1, j + 1, k + 1)] = mat_mul(mat_mul(mats[i], mats[j]), mats[k]).trace()
    return SibInvariants(r, t1, t2, t11, t111)


def traceless_retract(t: MatTuple, s=1) -> MatTuple:
    """A_i - s * (Tr A_i / 2) * I; s = 0 is the identity and s = 1 lands in traceless tuples."""
    if isinstance(s, GaussianRational) or not 0 <= s <= 1:
        raise InvalidParameter(f"retraction parameter must lie in [0, 1], got {s!r}")
    backend = t.backend
    ss = to_scalar(Fraction(s) if backend is Backend.EXACT else s, backend)
    ident = Mat2.identity(backend)
    half = to_scalar(Fraction(1, 2), backend)
    return t.map(lambda m: m - ident.scale(ss * m.trace() * half))


@dataclass(frozen=True)
class B2Coords:
    """(z1, z2, x) = (Tr A1^2, Tr A2^2, Tr A1A2) of a traceless pair."""

    z1: Scalar
    z2: Scalar
    x: Scalar

    def __post_init__(self):
        exact = any(isinstance(v, GaussianRational) for v in (self.z1, self.z2, self.x))
        backend = Backend.EXACT if exact else Backend.FLOAT
        for name in ("z1", "z2", "x"):
            object.__setattr__(self, name, to_scalar(getattr(self, name), backend))

    @property
    def backend(self) -> Backend:
        return Backend.EXACT if isinstance(self.z1, GaussianRational) else Backend.FLOAT

    def discriminant(self) -> Scalar:
        return self.x * self.x - self.z1 * self.z2

    def on_quadric(self, tol: float = DEFAULT_TOL) -> bool:
        d = self.discriminant()
        if self.backend is Backend.EXACT:
            return not d
        scale = 1 + cabs(self.x) ** 2 + cabs(self.z1) * cabs(self.z2)
        return abs(d) <= tol * scale

    def to_float(self) -> "B2Coords":
        return B2Coords(_as_float(self.z1), _as_float(self.z2), _as_float(self.x))


def _is_traceless(m: Mat2, tol: float) -> bool:
    if m.backend is Backend.EXACT:
        return not m.trace()
    return abs(m.trace()) <= tol * max(1.0, m.norm())


def b2_coords(t: MatTuple, tol: float = DEFAULT_TOL) -> B2Coords:
    if t.r != 2:
        raise WrongArity(f"B2 coordinates need a pair, got r = {t.r}")
    for k, m in enumerate(t, start=1):
        if not _is_traceless(m, tol):
            raise NotTraceless(f"A{k} has trace {m.trace()!r}")
    a1, a2 = t[0], t[1]
    return B2Coords(mat_mul(a1, a1).trace(), mat_mul(a2, a2).trace(), mat_mul(a1, a2).trace())


def _diagonal_chart(z_other, x, root) -> tuple[Mat2, Mat2]:
    # A = diag(a, -a), B = [[d, 1], [c, -d]]
    d = x / (2 * root)
    c = z_other / 2 - d * d
    return Mat2(root, 0 * root, 0 * root, -root), Mat2(d, 1 + 0 * root, c, -d)


_COMPANION_STEPS = (
    (0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (2, 0), (-2, 0), (1, 1), (1, -1), (0, 2),
)


def _realize_exact(c: B2Coords) -> MatTuple:
    z1, z2, x = c.z1, c.z2, c.x
    zero = GaussianRational(0)
    if z1:
        a = exact_sqrt(z1 / 2)
        if a is not None:
            return MatTuple.of(*_diagonal_chart(z2, x, a))
    if z2:
        a = exact_sqrt(z2 / 2)
        if a is not None:
            b1, b2 = _diagonal_chart(z1, x, a)
            return MatTuple.of(b2, b1)
    if not z1 and not z2:
        return MatTuple.of(
            Mat2(zero, GaussianRational(1), zero, zero), Mat2(zero, zero, x, zero)
        )
    # A1 = [[0, 1], [z1/2, 0]], A2 = [[p, q], [x - z1 q / 2, -p]]
    for re_q, im_q in _COMPANION_STEPS[:KERNEL_SEARCH_LIMIT]:
        q = GaussianRational(re_q, im_q)
        p = exact_sqrt(z2 / 2 - q * x + z1 * q * q / 2)
        if p is None:
            continue
        s = x - z1 * q / 2
        return MatTuple.of(
            Mat2(zero, GaussianRational(1), z1 / 2, zero), Mat2(p, q, s, -p)
        )
    raise UnsupportedBackend(
        "no gaussian-rational pair found for these coordinates; use the float64 backend"
    )


def realize_b2(c: B2Coords) -> MatTuple:
    """A traceless pair whose B2 coordinates are c.

    FLOAT always succeeds. EXACT tries the diagonal charts, the nilpotent pair
    and a short companion search, and raises UnsupportedBackend when every
    chart needs a square root outside Q(i).
    """
    if c.backend is Backend.EXACT:
        return _realize_exact(c)
    z1, z2, x = c.z1, c.z2, c.x
    if z1 == 0 and z2 == 0:
        return MatTuple.of(Mat2(0, 1, 0, 0), Mat2(0, 0, x, 0))
    if abs(z1) >= abs(z2):
        return MatTuple.of(*_diagonal_chart(z2, x, principal_sqrt(z1 / 2)))
    b1, b2 = _diagonal_chart(z1, x, principal_sqrt(z2 / 2))
    return MatTuple.of(b2, b1)


def _check_conjugator(g: Mat2, tol: float) -> None:
    dt = g.det()
    if g.backend is Backend.EXACT:
        if not dt:
            raise SingularConjugator("conjugator has zero determinant")
    elif abs(dt) <= tol * g.norm() ** 2:
        raise SingularConjugator(f"conjugator is singular within tol (|det| = {abs(dt):.3e})")


def conjugate(t: MatTuple, g: Mat2, tol: float = DEFAULT_TOL) -> MatTuple:
    """(g A_1 g^-1, ..., g A_r g^-1)."""
    if g.backend is not t.backend:
        raise BackendMismatch("conjugator and tuple use different backends")
    _check_conjugator(g, tol)
    g_inv = g.inverse()
    return t.map(lambda m: mat_mul(mat_mul(g, m), g_inv))


def _unitary_from_column(v: np.ndarray) -> Mat2:
    v1, v2 = complex(v[0]), complex(v[1])
    return Mat2(v1, -v2.conjugate(), v2, v1.conjugate())


def semisimplify(t: MatTuple, tol: float = DEFAULT_TOL) -> MatTuple:
    """The diagonal tuple in the closure of the orbit of a non-generating t."""
    if t.backend is Backend.EXACT:
        raise UnsupportedBackend("semisimplify needs the float64 backend")
    stratum = classify(t, tol)
    if stratum.tag is StratumTag.GENERATING:
        return t
    if stratum.tag is StratumTag.EIGEN_SHARED:
        line = stratum.witness
    else:
        line = common_eigenline(t, tol)
        if line is None:
            line = common_eigenline(t, tol * RECONCILE_FACTOR)
        if line is None:
            raise InconsistentClassification("commuting tuple without a common eigenline")
    if line is ALL_LINES:
        return t.map(lambda m: Mat2(m.a, 0, 0, m.d))
    g = _unitary_from_column(line.unit_vector())
    gh = g.conjugate_transpose()
    out = []
    for k, m in enumerate(t, start=1):
        b = mat_mul(mat_mul(gh, m), g)
        if abs(b.c) > tol * RECONCILE_FACTOR * max(1.0, m.norm()):
            raise InconsistentClassification(
                f"A{k} is not triangular in the common eigenline basis (residual {abs(b.c):.3e})"
            )
        out.append(Mat2(b.a, 0, 0, b.d))
    return MatTuple(tuple(out))


@dataclass(frozen=True)
class ConjugatorResult:
    conjugator: Optional[Mat2]
    kernel_dim: int
    residual: float = 0.0
    flags: tuple[str, ...] = ()


def _intertwiner_rows(s: MatTuple, t: MatTuple) -> list[list[Scalar]]:
    # vec(G A) - vec(B G) for row-major vec(G) = (g11, g12, g21, g22)
    rows = []
    for a, b in zip(s, t):
        zero = 0 * a.a
        ar, br = a.rows(), b.rows()
        for k in range(2):
            for l in range(2):
                row = [zero] * 4
                for m in range(2):
                    row[2 * k + m] = row[2 * k + m] + ar[m][l]
                    row[2 * m + l] = row[2 * m + l] - br[k][m]
                rows.append(row)
    return rows


def _kernel_candidates(basis: list) -> list:
    cands = list(basis)
    for u, v in itertools.combinations(basis, 2):
        cands.append([x + y for x, y in zip(u, v)])
        cands.append([x - y for x, y in zip(u, v)])
    return cands[:KERNEL_SEARCH_LIMIT]


def intertwiner_search(s: MatTuple, t: MatTuple, tol: float = DEFAULT_TOL) -> ConjugatorResult:
    """Solve G s_i = t_i G and return an invertible solution when one is found."""
    if s.r != t.r:
        raise WrongArity(f"tuples have different lengths {s.r} and {t.r}")
    if s.backend is not t.backend:
        raise BackendMismatch("tuples use different backends")
    rows = _intertwiner_rows(s, t)
    if s.backend is Backend.EXACT:
        basis = exact_nullspace(rows, 4)
    else:
        arr = np.array(rows, dtype=complex)
        _, sv, vh = np.linalg.svd(arr)
        if sv[0] == 0:
            basis = [list(np.eye(4, dtype=complex)[k]) for k in range(4)]
        else:
            keep = [k for k in range(4) if k >= len(sv) or sv[k] <= tol * sv[0]]
            basis = [list(vh[k].conj()) for k in keep]
    kernel_dim = len(basis)
    if kernel_dim == 0:
        return ConjugatorResult(None, 0)
    for cand in _kernel_candidates(basis):
        g = Mat2(*cand)
        try:
            _check_conjugator(g, tol)
        except SingularConjugator:
            continue
        g = _normalize(g)
        moved = conjugate(s, g, tol)
        residual = moved.max_distance(t) / max(1.0, t.scale_norm())
        log.debug("[CHECK] intertwiner found, kernel dim %d, residual %.3e", kernel_dim, residual)
        return ConjugatorResult(g, kernel_dim, residual)
    flags = (NON_GENERIC,) if kernel_dim >= 2 else ()
    return ConjugatorResult(None, kernel_dim, flags=flags)


def _normalize(g: Mat2) -> Mat2:
    if g.backend is Backend.EXACT:
        lead = next(x for x in g.vec() if x)
        return g.scale(1 / lead)
    return g.scale(1 / principal_sqrt(g.det()))


def find_conjugator(s: MatTuple, t: MatTuple, tol: float = DEFAULT_TOL) -> Optional[Mat2]:
    return intertwiner_search(s, t, tol).conjugator


@dataclass(frozen=True)
class OrbitComparison:
    equivalent: bool
    deltas: dict[str, float]
    conjugator: Optional[Mat2] = None
    residual: Optional[float] = None
    flags: tuple[str, ...] = field(default=())


def _is_diagonal(t: MatTuple) -> bool:
    return all(is_zero(m.b) and is_zero(m.c) for m in t)


def compare_orbits(s: MatTuple, t: MatTuple, tol: float = DEFAULT_TOL) -> OrbitComparison:
    if s.r != t.r:
        raise WrongArity(f"tuples have different lengths {s.r} and {t.r}")
    if s.backend is not t.backend:
        raise BackendMismatch("tuples use different backends")
    gen_s = classify(s, tol).tag is StratumTag.GENERATING
    gen_t = classify(t, tol).tag is StratumTag.GENERATING
    if s.backend is Backend.EXACT:
        if not ((gen_s and gen_t) or (_is_diagonal(s) and _is_diagonal(t))):
            raise UnsupportedBackend(
                "exact orbit comparison needs both tuples generating or both diagonal"
            )
        inv_s, inv_t = sibirskii(s), sibirskii(t)
        equivalent = inv_s.as_vector() == inv_t.as_vector()
        deltas = inv_s.deltas(inv_t)
    else:
        inv_s, inv_t = sibirskii(semisimplify(s, tol)), sibirskii(semisimplify(t, tol))
        deltas = inv_s.deltas(inv_t)
        equivalent = max(deltas.values()) <= tol
    if equivalent and gen_s and gen_t:
        found = intertwiner_search(s, t, tol)
        return OrbitComparison(True, deltas, found.conjugator, found.residual, found.flags)
    return OrbitComparison(equivalent, deltas)


def orbit_equivalent(s: MatTuple, t: MatTuple, tol: float = DEFAULT_TOL) -> bool:
    return compare_orbits(s, t, tol).equivalent
