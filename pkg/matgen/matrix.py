# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Exact and approximate 2x2 complex linear algebra.

Mat2 and MatTuple are immutable and carry their scalar backend; every
operation here is pure. Eigenlines are FLOAT-only because eigenvalues of a
Gaussian-rational matrix may leave the field.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

import numpy as np

from .config import DEFAULT_TOL
from .errors import BackendMismatch, InvalidPoint, UnsupportedBackend, WrongArity
from .scalar import Backend, GaussianRational, Scalar, backend_of, cabs, is_zero, to_scalar

log = logging.getLogger("matgen")


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix [[a, b], [c, d]] over one scalar backend."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        exact = any(isinstance(x, GaussianRational) for x in entries)
        backend = Backend.EXACT if exact else Backend.FLOAT
        if exact and any(isinstance(x, (float, complex)) for x in entries):
            raise BackendMismatch("matrix mixes float64 and gaussian-rational entries")
        for name, x in zip("abcd", entries):
            object.__setattr__(self, name, to_scalar(x, backend))

    @classmethod
    def from_rows(cls, rows, backend: Backend = Backend.FLOAT) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(*(to_scalar(x, backend) for x in (a, b, c, d)))

    @classmethod
    def identity(cls, backend: Backend = Backend.FLOAT) -> "Mat2":
        return cls.from_rows([[1, 0], [0, 1]], backend)

    @classmethod
    def zero(cls, backend: Backend = Backend.FLOAT) -> "Mat2":
        return cls.from_rows([[0, 0], [0, 0]], backend)

    @classmethod
    def diag(cls, x, y, backend: Backend = Backend.FLOAT) -> "Mat2":
        return cls.from_rows([[x, 0], [0, y]], backend)

    @property
    def backend(self) -> Backend:
        return backend_of(self.a)

    def rows(self) -> list[list[Scalar]]:
        return [[self.a, self.b], [self.c, self.d]]

    def vec(self) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a, self.b, self.c, self.d)

    def __add__(self, other: "Mat2") -> "Mat2":
        _same_backend(self, other)
        return Mat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "Mat2") -> "Mat2":
        _same_backend(self, other)
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return mat_mul(self, other)

    def scale(self, s) -> "Mat2":
        return Mat2(s * self.a, s * self.b, s * self.c, s * self.d)

    def trace(self) -> Scalar:
        return self.a + self.d

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mat2":
        dt = self.det()
        if is_zero(dt):
            raise ZeroDivisionError("singular matrix has no inverse")
        return Mat2(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def conjugate_transpose(self) -> "Mat2":
        return Mat2(self.a.conjugate(), self.c.conjugate(), self.b.conjugate(), self.d.conjugate())

    def norm(self) -> float:
        """Frobenius norm as a float."""
        return math.hypot(*(cabs(x) for x in self.vec()))

    def is_scalar(self, tol: float = DEFAULT_TOL) -> bool:
        if self.backend is Backend.EXACT:
            return not self.b and not self.c and self.a == self.d
        bound = tol * self.norm()
        return max(abs(self.b), abs(self.c), abs(self.a - self.d)) <= bound

    def scalar_distance(self) -> float:
        """Absolute distance-like measure from the scalar matrices."""
        return max(cabs(self.b), cabs(self.c), cabs(self.a - self.d))

    def to_float(self) -> "Mat2":
        return Mat2.from_rows(self.rows(), Backend.FLOAT)

    def to_array(self) -> np.ndarray:
        return np.array([[complex(x) if not isinstance(x, GaussianRational) else x.to_complex()
                          for x in row] for row in self.rows()], dtype=complex)

    @classmethod
    def from_array(cls, arr) -> "Mat2":
        return cls(complex(arr[0][0]), complex(arr[0][1]), complex(arr[1][0]), complex(arr[1][1]))


@dataclass(frozen=True)
class MatTuple:
    """An ordered r-tuple (A_1, ..., A_r) of matrices sharing one backend."""

    matrices: tuple[Mat2, ...]

    def __post_init__(self):
        mats = tuple(self.matrices)
        object.__setattr__(self, "matrices", mats)
        if not mats:
            raise WrongArity("a matrix tuple needs r >= 1")
        backends = {m.backend for m in mats}
        if len(backends) > 1:
            raise BackendMismatch("tuple mixes float64 and gaussian-rational matrices")
        if len(mats) == 1:
            log.debug("r = 1 tuple constructed; generation is impossible for a single matrix")

    @classmethod
    def of(cls, *matrices: Mat2) -> "MatTuple":
        return cls(tuple(matrices))

    @property
    def r(self) -> int:
        return len(self.matrices)

    @property
    def backend(self) -> Backend:
        return self.matrices[0].backend

    def __iter__(self) -> Iterator[Mat2]:
        return iter(self.matrices)

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, i: int) -> Mat2:
        return self.matrices[i]

    def map(self, fn: Callable[[Mat2], Mat2]) -> "MatTuple":
        return MatTuple(tuple(fn(m) for m in self.matrices))

    def to_float(self) -> "MatTuple":
        return self.map(Mat2.to_float)

    def scale_norm(self) -> float:
        return max(m.norm() for m in self.matrices)

    def max_distance(self, other: "MatTuple") -> float:
        if self.r != other.r:
            raise WrongArity(f"tuples have different lengths {self.r} and {other.r}")
        return max((x - y).norm() for x, y in zip(self, other))


class _AllLines:
    """Sentinel: every line is an eigenline (scalar matrix or all-scalar tuple)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ALL_LINES"

    def __reduce__(self):
        return (_AllLines, ())


ALL_LINES = _AllLines()


@dataclass(frozen=True)
class ProjLine:
    """A point (p : q) of CP^1, stored in canonical form.

    Canonical form: scale so p = 1 when p dominates (|p| >= |q| on FLOAT,
    p != 0 on EXACT), otherwise so q = 1.
    """

    p: Scalar
    q: Scalar

    @classmethod
    def of(cls, p, q) -> "ProjLine":
        exact = isinstance(p, GaussianRational) or isinstance(q, GaussianRational)
        backend = Backend.EXACT if exact else Backend.FLOAT
        p, q = to_scalar(p, backend), to_scalar(q, backend)
        if is_zero(p) and is_zero(q):
            raise InvalidPoint("(0 : 0) is not a point of the projective line")
        if exact:
            if p:
                return cls(to_scalar(1, backend), q / p)
            return cls(to_scalar(0, backend), to_scalar(1, backend))
        if abs(p) >= abs(q):
            return cls(1 + 0j, q / p)
        return cls(p / q, 1 + 0j)

    @property
    def backend(self) -> Backend:
        return backend_of(self.p)

    def unit_vector(self) -> np.ndarray:
        v = np.array([_as_complex(self.p), _as_complex(self.q)])
        return v / np.linalg.norm(v)

    def apply(self, g: Mat2) -> "ProjLine":
        """The image line g . L."""
        return ProjLine.of(g.a * self.p + g.b * self.q, g.c * self.p + g.d * self.q)

    def distance(self, other: "ProjLine") -> float:
        """Sine of the angle between the two lines (0 when equal)."""
        u, v = self.unit_vector(), other.unit_vector()
        return float(abs(u[0] * v[1] - u[1] * v[0]))

    def sort_key(self) -> tuple:
        p, q = _as_complex(self.p), _as_complex(self.q)
        return (0 if p == 1 else 1, q.real, q.imag, p.real, p.imag)


def _as_complex(x) -> complex:
    return x.to_complex() if isinstance(x, GaussianRational) else complex(x)


def _same_backend(x: Mat2, y: Mat2) -> None:
    if x.backend is not y.backend:
        raise BackendMismatch(
            f"backend mismatch: {x.backend.value} and {y.backend.value}"
        )


def mat_mul(x: Mat2, y: Mat2) -> Mat2:
    _same_backend(x, y)
    return Mat2(
        x.a * y.a + x.b * y.c,
        x.a * y.b + x.b * y.d,
        x.c * y.a + x.d * y.c,
        x.c * y.b + x.d * y.d,
    )


def trace(x: Mat2) -> Scalar:
    return x.trace()


def det(x: Mat2) -> Scalar:
    return x.det()


def commutator(x: Mat2, y: Mat2) -> Mat2:
    return mat_mul(x, y) - mat_mul(y, x)


def cayley_hamilton_residual(m: Mat2) -> float:
    """Frobenius norm of M^2 - tr(M) M + det(M) I."""
    ident = Mat2.identity(m.backend)
    res = mat_mul(m, m) - m.scale(m.trace()) + ident.scale(m.det())
    return res.norm()


def _eigenvectors(p: complex, b: complex, c: complex, mu: complex) -> list[tuple[complex, complex]]:
    # null vectors of [[p, b], [c, -p]] - mu*I read off each nonzero row, larger row first
    rows = [(p - mu, b), (c, -p - mu)]
    rows.sort(key=lambda r: abs(r[0]) ** 2 + abs(r[1]) ** 2, reverse=True)
    return [(r[1], -r[0]) for r in rows if r[0] or r[1]]


def eigenlines(x: Mat2, tol: float = DEFAULT_TOL) -> Union[list[ProjLine], _AllLines]:
    """The one-dimensional eigenspaces of x, or ALL_LINES when x is scalar within tol.

    Every returned line has a unit representative u with |x u - lam u| <= tol |x|;
    a candidate that misses the bound is dropped.
    """
    if x.backend is Backend.EXACT:
        raise UnsupportedBackend("eigenlines needs the float64 backend")
    if x.is_scalar(tol):
        return ALL_LINES
    # eigenvalues of the traceless part stay accurate when x is close to scalar
    half = complex(x.a + x.d) / 2
    p = complex(x.a - x.d) / 2
    mu = complex(np.sqrt(p * p + complex(x.b) * complex(x.c)))
    arr = x.to_array()
    bound = tol * x.norm()
    lines: list[ProjLine] = []
    for m in ([mu] if mu == 0 else [mu, -mu]):
        lam = half + m
        best, best_residual = None, math.inf
        for v in _eigenvectors(p, complex(x.b), complex(x.c), m):
            line = ProjLine.of(*v)
            u = line.unit_vector()
            residual = float(np.linalg.norm(arr @ u - lam * u))
            if residual < best_residual:
                best, best_residual = line, residual
        if best is None:
            continue
        if best_residual > bound:
            log.debug("[CHECK] dropping eigenline with residual %.3e above tol*|x| = %.3e", best_residual, bound)
            continue
        if any(best.distance(other) <= tol for other in lines):
            continue
        lines.append(best)
    return sorted(lines, key=ProjLine.sort_key)


def _bareiss_rank(rows: list[list[Scalar]]) -> int:
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    rank = 0
    prev = GaussianRational(1)
    for col in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, n_rows):
            f = m[i][col]
            for j in range(col + 1, n_cols):
                m[i][j] = (p * m[i][j] - f * m[rank][j]) / prev
            m[i][col] = GaussianRational(0)
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def rank_of_span(vectors: Sequence[Sequence[Scalar]], tol: float = DEFAULT_TOL) -> int:
    """Dimension of the span of length-4 complex vectors.

    EXACT: fraction-free (Bareiss) elimination. FLOAT: singular values above
    tol times the largest one.
    """
    vecs = [tuple(v) for v in vectors]
    if not vecs:
        return 0
    for v in vecs:
        if len(v) != 4:
            raise WrongArity(f"span vectors must have length 4, got {len(v)}")
    backends = {backend_of(x) for v in vecs for x in v}
    if len(backends) > 1:
        raise BackendMismatch("span vectors mix backends")
    if backends == {Backend.EXACT}:
        return _bareiss_rank([list(v) for v in vecs])
    arr = np.array(vecs, dtype=complex)
    s = np.linalg.svd(arr, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def row_reduce(rows: list[list[Scalar]]) -> tuple[list[list[Scalar]], list[int]]:
    """Exact reduced row echelon form over Q(i); returns (rref, pivot columns)."""
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def exact_nullspace(rows: list[list[Scalar]], n_cols: int) -> list[list[Scalar]]:
    """Basis of the right kernel of an exact matrix."""
    zero, one = GaussianRational(0), GaussianRational(1)
    if not rows:
        return [[one if j == i else zero for j in range(n_cols)] for i in range(n_cols)]
    rref, pivots = row_reduce(rows)
    free = [j for j in range(n_cols) if j not in pivots]
    basis = []
    for f in free:
        v = [zero] * n_cols
        v[f] = one
        for i, pc in enumerate(pivots):
            v[pc] = -rref[i][f]
        basis.append(v)
    return basis
