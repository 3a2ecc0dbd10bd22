# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Generation tests and the stratification of non-generating tuples.

A tuple either generates the full matrix algebra (GENERATING), or shares a
common eigenline while some pair fails to commute (EIGEN_SHARED), or pairwise
commutes (COMMUTING). The span test and the common-eigenline test must agree;
disagreement beyond tolerance reconciliation raises InconsistentClassification.
"""

import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .config import DEFAULT_TOL, LOW_CONFIDENCE_BAND, RECONCILE_FACTOR
from .errors import InconsistentClassification, UnsupportedBackend, WrongArity
from .matrix import (
    ALL_LINES,
    Mat2,
    MatTuple,
    ProjLine,
    _AllLines,
    commutator,
    eigenlines,
    mat_mul,
    rank_of_span,
)
from .scalar import Backend, Scalar, cabs

log = logging.getLogger("matgen")


class StratumTag(enum.Enum):
    GENERATING = "GENERATING"
    EIGEN_SHARED = "EIGEN_SHARED"
    COMMUTING = "COMMUTING"


@dataclass(frozen=True)
class Word:
    """A product A_{i1} ... A_{ik} of tuple entries; indices are 1-based, () is I."""

    indices: tuple[int, ...] = ()

    def extend(self, i: int) -> "Word":
        return Word(self.indices + (i,))

    def evaluate(self, t: MatTuple) -> Mat2:
        m = Mat2.identity(t.backend)
        for i in self.indices:
            if not 1 <= i <= t.r:
                raise WrongArity(f"word index {i} outside 1..{t.r}")
            m = mat_mul(m, t[i - 1])
        return m

    def __str__(self):
        if not self.indices:
            return "I"
        return "".join(f"A{i}" for i in self.indices)


@dataclass(frozen=True)
class Stratum:
    """Classification of a tuple plus its witness.

    GENERATING: spanning words; EIGEN_SHARED: the common ProjLine (None when
    unavailable); COMMUTING: no witness.
    """

    tag: StratumTag
    witness: Union[tuple[Word, ...], ProjLine, None] = None


@dataclass(frozen=True)
class SpanResult:
    generates: bool
    span_dim: int
    words: tuple[Word, ...] = field(default=())
    rounds: int = 0

    def __iter__(self):
        return iter((self.generates, self.span_dim))


def _unit_generators(t: MatTuple) -> list[Mat2]:
    # rescaling an entry rescales every word containing it, so the span is unchanged
    if t.backend is Backend.EXACT:
        return list(t)
    out = []
    for m in t:
        n = m.norm()
        out.append(m.scale(1 / n) if n > 0 else m)
    return out


def generates_by_span(t: MatTuple, tol: float = DEFAULT_TOL) -> SpanResult:
    """Span closure of the unital algebra generated by t, by right multiplication.

    FLOAT entries are scaled to unit Frobenius norm first so the rank test does
    not depend on the overall size of the tuple.
    """
    gens = _unit_generators(t)
    basis: list[Word] = [Word()]
    mats: dict[Word, Mat2] = {Word(): Mat2.identity(t.backend)}
    vectors = [mats[Word()].vec()]
    frontier = [Word()]
    rounds = 0
    while frontier and len(basis) < 4:
        grown = []
        for w in frontier:
            for i in range(1, t.r + 1):
                cand = w.extend(i)
                m = mat_mul(mats[w], gens[i - 1])
                if rank_of_span(vectors + [m.vec()], tol) > len(vectors):
                    vectors.append(m.vec())
                    basis.append(cand)
                    mats[cand] = m
                    grown.append(cand)
                    if len(basis) == 4:
                        break
            if len(basis) == 4:
                break
        if grown:
            rounds += 1
        frontier = grown
    dim = len(basis)
    return SpanResult(dim == 4, dim, tuple(basis), rounds)


def _incidence_residual(m: Mat2, line: ProjLine) -> float:
    u = line.unit_vector()
    a = m.to_array()
    w = a @ u
    # component of A u orthogonal to u
    return float(np.linalg.norm(w - np.vdot(u, w) * u))


def is_incident(t: MatTuple, line: ProjLine, tol: float = DEFAULT_TOL) -> bool:
    """True iff line is an eigenline of every matrix of t."""
    if t.backend is Backend.EXACT and line.backend is Backend.EXACT:
        p, q = line.p, line.q
        for m in t:
            x = m.a * p + m.b * q
            y = m.c * p + m.d * q
            if x * q - y * p:
                return False
        return True
    return all(_incidence_residual(m, line) <= tol * m.norm() for m in t.to_float())


def common_eigenline(
    t: MatTuple, tol: float = DEFAULT_TOL
) -> Union[ProjLine, _AllLines, None]:
    """The first eigenline of the first non-scalar matrix shared by all of t."""
    if t.backend is Backend.EXACT:
        raise UnsupportedBackend("common_eigenline needs the float64 backend")
    base = next((m for m in t if not m.is_scalar(tol)), None)
    if base is None:
        return ALL_LINES
    lines = eigenlines(base, tol)
    if lines is ALL_LINES:
        return ALL_LINES
    for line in lines:
        if is_incident(t, line, tol):
            return line
    return None


def _commutes(x: Mat2, y: Mat2, tol: float) -> bool:
    c = commutator(x, y)
    if x.backend is Backend.EXACT:
        return c == Mat2.zero(Backend.EXACT)
    return c.norm() <= tol * x.norm() * y.norm()


def pairwise_commuting(t: MatTuple, tol: float = DEFAULT_TOL) -> bool:
    return all(_commutes(x, y, tol) for x, y in itertools.combinations(t, 2))


def _commutator_line(t: MatTuple, tol: float) -> Optional[ProjLine]:
    # in a triangular basis a nonzero commutator is nilpotent with image the shared line
    best = None
    for x, y in itertools.combinations(t, 2):
        c = commutator(x, y)
        if best is None or c.norm() > best.norm():
            best = c
    if best is None or best.norm() == 0:
        return None
    if abs(best.a) ** 2 + abs(best.c) ** 2 >= abs(best.b) ** 2 + abs(best.d) ** 2:
        return ProjLine.of(best.a, best.c)
    return ProjLine.of(best.b, best.d)


def _exact_shared_line(t: MatTuple) -> Optional[ProjLine]:
    for x, y in itertools.combinations(t, 2):
        c = commutator(x, y)
        if c.a or c.c:
            line = ProjLine.of(c.a, c.c)
        elif c.b or c.d:
            line = ProjLine.of(c.b, c.d)
        else:
            continue
        return line if is_incident(t, line) else None
    return None


def classify(t: MatTuple, tol: float = DEFAULT_TOL) -> Stratum:
    span = generates_by_span(t, tol)
    if span.generates:
        return Stratum(StratumTag.GENERATING, span.words)
    if pairwise_commuting(t, tol):
        return Stratum(StratumTag.COMMUTING)
    if t.backend is Backend.EXACT:
        line = _exact_shared_line(t)
        if line is None:
            raise InconsistentClassification(
                f"span dimension {span.span_dim} < 4 but no exact common eigenline exists"
            )
        return Stratum(StratumTag.EIGEN_SHARED, line)
    line = common_eigenline(t, tol)
    if line is None:
        loose = tol * RECONCILE_FACTOR
        log.debug("[CHECK] reconciling classification at tol %.1e", loose)
        line = common_eigenline(t, loose)
        if line is None:
            cand = _commutator_line(t, loose)
            if cand is not None and is_incident(t, cand, loose):
                line = cand
    if line is None or line is ALL_LINES:
        raise InconsistentClassification(
            f"span dimension {span.span_dim} < 4 but common eigenline test says "
            f"{'ALL_LINES' if line is ALL_LINES else 'NONE'} (tol {tol:g})"
        )
    return Stratum(StratumTag.EIGEN_SHARED, line)


def friedland_sides(a1: Mat2, a2: Mat2) -> tuple[Scalar, Scalar]:
    """Both sides of the r = 2 non-generation equation."""
    t1, t2 = a1.trace(), a2.trace()
    t12 = mat_mul(a1, a2).trace()
    s1 = mat_mul(a1, a1).trace()
    s2 = mat_mul(a2, a2).trace()
    lhs = (2 * t12 - t1 * t2) * (2 * t12 - t1 * t2)
    rhs = (2 * s1 - t1 * t1) * (2 * s2 - t2 * t2)
    return lhs, rhs


def friedland_generates(a1: Mat2, a2: Mat2, tol: float = DEFAULT_TOL) -> bool:
    lhs, rhs = friedland_sides(*_unit_generators(MatTuple.of(a1, a2)))
    if a1.backend is Backend.EXACT:
        return lhs != rhs
    return abs(lhs - rhs) > tol * (1 + abs(lhs) + abs(rhs))


def friedland_low_confidence(a1: Mat2, a2: Mat2, tol: float = DEFAULT_TOL) -> bool:
    """True when a FLOAT pair sits in the guard band around the degenerate locus."""
    if a1.backend is Backend.EXACT:
        return False
    lhs, rhs = friedland_sides(*_unit_generators(MatTuple.of(a1, a2)))
    return abs(lhs - rhs) <= LOW_CONFIDENCE_BAND * tol * (1 + cabs(lhs) + cabs(rhs))


def batch_span_dims(tuples: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Span dimensions for a stack of tuples shaped (n, r, 2, 2).

    Words of length <= 2 already span the generated algebra: once the length-1
    span stops growing the algebra is commutative.
    """
    arr = np.asarray(tuples, dtype=complex)
    n, r = arr.shape[0], arr.shape[1]
    norms = np.linalg.norm(arr.reshape(n, r, 4), axis=2)[..., None, None]
    arr = np.divide(arr, norms, out=np.zeros_like(arr), where=norms > 0)
    eye = np.broadcast_to(np.eye(2, dtype=complex), (n, 1, 2, 2))
    pairs = np.einsum("nikl,njlm->nijkm", arr, arr).reshape(n, r * r, 2, 2)
    words = np.concatenate([eye, arr, pairs], axis=1).reshape(n, 1 + r + r * r, 4)
    s = np.linalg.svd(words, compute_uv=False)
    top = s[:, :1]
    return np.count_nonzero(s > tol * top, axis=1)


def batch_shared_eigenline(tuples: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """For a stack shaped (n, r, 2, 2), whether an eigenline of A_1 is shared by every A_j.

    Samples whose A_1 is scalar within tol go through common_eigenline.
    """
    arr = np.asarray(tuples, dtype=complex)
    n, r = arr.shape[0], arr.shape[1]
    first = arr[:, 0]
    norms = np.linalg.norm(arr.reshape(n, r, 4), axis=2)
    off = np.max(
        np.abs(np.stack([first[:, 0, 1], first[:, 1, 0], first[:, 0, 0] - first[:, 1, 1]])), axis=0
    )
    scalar = off <= tol * norms[:, 0]
    _, vecs = np.linalg.eig(first)
    found = np.zeros(n, dtype=bool)
    for k in range(2):
        v = vecs[:, :, k]
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        w = np.einsum("nrij,nj->nri", arr, v)
        along = np.einsum("nj,nrj->nr", v.conj(), w)
        resid = np.linalg.norm(w - along[..., None] * v[:, None, :], axis=2)
        found |= np.all(resid <= tol * norms, axis=1)
    for idx in np.flatnonzero(scalar):
        t = MatTuple(tuple(Mat2.from_array(m) for m in arr[idx]))
        found[idx] = common_eigenline(t, tol) is not None
    return found
