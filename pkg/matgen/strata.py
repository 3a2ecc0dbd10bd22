# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Charts of the non-generating strata, numerical Jacobian ranks and the
comparison maps between spheres and generating tuples.

Charts are real maps R^n -> R^m evaluated in batches with numpy; complex
parameters are stored as interleaved (re, im) pairs.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import (
    DEFAULT_TOL,
    JACOBIAN_STEP,
    MARGIN_FACTOR,
    RANK_DROP_RATIO,
    RANK_KEEP_RATIO,
    RECONCILE_FACTOR,
    UNIT_TOL,
)
from .errors import (
    InconsistentClassification,
    InvalidParameter,
    LineOutsideChart,
    MarginViolation,
    NotOnSphere,
    NotUnitModulus,
    ScalarBase,
    WrongArity,
    WrongStratum,
)
from .generation import StratumTag, classify
from .matrix import Mat2, MatTuple, ProjLine, mat_mul
from .scalar import Backend, cabs, is_zero, to_scalar

log = logging.getLogger("matgen")


class ChartName(enum.Enum):
    T_CHART = "T_CHART"
    W_FIBER = "W_FIBER"
    INCIDENCE_FIBER = "INCIDENCE_FIBER"
    Q_CHART = "Q_CHART"
    J_MAP = "J_MAP"
    I_MAP = "I_MAP"
    SIBIRSKII_MAP = "SIBIRSKII_MAP"
    ORBIT_MAP = "ORBIT_MAP"


def _complex(params: np.ndarray) -> np.ndarray:
    """(N, 2k) interleaved reals -> (N, k) complex."""
    return params[:, 0::2] + 1j * params[:, 1::2]


def _real(values: np.ndarray) -> np.ndarray:
    """(N, ...) complex -> (N, m) interleaved reals."""
    flat = values.reshape(values.shape[0], -1)
    return np.stack([flat.real, flat.imag], axis=-1).reshape(flat.shape[0], -1)


def _upper(a, b, d) -> np.ndarray:
    out = np.zeros(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 1] = d
    return out


def _word_ratio(mats: np.ndarray) -> float:
    """sigma_4 / sigma_1 of the words I, A_i, A_iA_j; zero on non-generating tuples."""
    r = mats.shape[0]
    pairs = np.einsum("ikl,jlm->ijkm", mats, mats).reshape(r * r, 4)
    words = np.concatenate([np.eye(2, dtype=complex).reshape(1, 4), mats.reshape(r, 4), pairs])
    s = np.linalg.svd(words, compute_uv=False)
    return float(s[3] / s[0]) if len(s) >= 4 else 0.0


def _max_commutator(mats: np.ndarray) -> float:
    worst = 0.0
    for i in range(mats.shape[0]):
        for j in range(i + 1, mats.shape[0]):
            c = mats[i] @ mats[j] - mats[j] @ mats[i]
            worst = max(worst, float(np.linalg.norm(c)))
    return worst


@dataclass(frozen=True)
class ChartSpec:
    """A chart or comparison map with its expected real Jacobian rank.

    i is the slot of the base matrix for T_CHART; base is the generating
    tuple whose orbit ORBIT_MAP parametrizes.
    """

    name: ChartName
    r: int
    i: int = 1
    base: Optional[MatTuple] = field(default=None, compare=False)

    def __post_init__(self):
        if self.r < 2:
            raise InvalidParameter(f"charts need r >= 2, got {self.r}")
        if self.name is ChartName.T_CHART and not 1 <= self.i <= self.r:
            raise InvalidParameter(f"chart index {self.i} outside 1..{self.r}")
        if self.name is ChartName.ORBIT_MAP:
            if self.base is None or self.base.r != self.r:
                raise InvalidParameter("ORBIT_MAP needs a base tuple of length r")

    @property
    def label(self) -> str:
        if self.name is ChartName.T_CHART:
            return f"T_CHART_{self.i}"
        return self.name.value

    @property
    def expected_rank(self) -> int:
        r = self.r
        return {
            ChartName.T_CHART: 4 * r + 4,
            ChartName.W_FIBER: 6 * r,
            ChartName.INCIDENCE_FIBER: 6 * r + 2,
            ChartName.Q_CHART: 4 * r + 2,
            ChartName.J_MAP: 2 * (r - 1),
            ChartName.I_MAP: 2 * (2 * r - 3),
            ChartName.SIBIRSKII_MAP: 2 * (4 * r - 3),
            ChartName.ORBIT_MAP: 6,
        }[self.name]

    @property
    def domain_dim(self) -> int:
        r = self.r
        return {
            ChartName.T_CHART: 4 * r + 4,
            ChartName.W_FIBER: 6 * r,
            ChartName.INCIDENCE_FIBER: 6 * r + 2,
            ChartName.Q_CHART: 4 * r + 2,
            ChartName.J_MAP: 2 * (r - 1),
            ChartName.I_MAP: 4 * (r - 1),
            ChartName.SIBIRSKII_MAP: 8 * r,
            ChartName.ORBIT_MAP: 8,
        }[self.name]

    def evaluate(self, params) -> np.ndarray:
        return self.evaluate_batch(np.asarray(params, dtype=float)[None, :])[0]

    def evaluate_batch(self, params: np.ndarray) -> np.ndarray:
        p = np.asarray(params, dtype=float)
        if p.shape[1] != self.domain_dim:
            raise WrongArity(f"{self.label} takes {self.domain_dim} real parameters, got {p.shape[1]}")
        z = _complex(p)
        n, r = z.shape[0], self.r
        name = self.name
        if name is ChartName.T_CHART:
            base = z[:, :4].reshape(n, 2, 2)
            coeffs = z[:, 4:].reshape(n, r - 1, 2)
            eye = np.eye(2, dtype=complex)
            others = coeffs[:, :, 0, None, None] * base[:, None] + coeffs[:, :, 1, None, None] * eye
            mats = np.concatenate(
                [others[:, : self.i - 1], base[:, None], others[:, self.i - 1 :]], axis=1
            )
            return _real(mats)
        if name is ChartName.W_FIBER:
            t = z.reshape(n, r, 3)
            return _real(_upper(t[..., 0], t[..., 1], t[..., 2]))
        if name is ChartName.INCIDENCE_FIBER:
            w = z[:, 0]
            t = z[:, 1:].reshape(n, r, 3)
            tri = _upper(t[..., 0], t[..., 1], t[..., 2])
            g = np.zeros((n, 2, 2), dtype=complex)
            g[:, 0, 0] = g[:, 1, 1] = 1
            g[:, 1, 0] = w
            g_inv = g.copy()
            g_inv[:, 1, 0] = -w
            return _real(np.einsum("nab,nrbc,ncd->nrad", g, tri, g_inv))
        if name is ChartName.Q_CHART:
            base = _upper(z[:, 0], z[:, 1], z[:, 2])
            coeffs = z[:, 3:].reshape(n, r - 1, 2)
            eye = np.eye(2, dtype=complex)
            others = coeffs[:, :, 0, None, None] * base[:, None] + coeffs[:, :, 1, None, None] * eye
            return _real(np.concatenate([base[:, None], others], axis=1))
        if name is ChartName.J_MAP:
            return _real(_j_array(z))
        if name is ChartName.I_MAP:
            b, c = z[:, : r - 1], z[:, r - 1 :]
            b = b / np.linalg.norm(b, axis=1, keepdims=True)
            c = c / np.linalg.norm(c, axis=1, keepdims=True)
            return _real(_i_array(b, c))
        if name is ChartName.SIBIRSKII_MAP:
            return _real(_trace_coordinates(z.reshape(n, r, 2, 2)))
        # ORBIT_MAP: (I + X) t (I + X)^-1
        g = np.eye(2, dtype=complex) + z.reshape(n, 2, 2)
        base = np.stack([m.to_array() for m in self.base])
        return _real(np.einsum("nab,rbc,ncd->nrad", g, base, np.linalg.inv(g)))

    def jacobian(self, params, h: float = JACOBIAN_STEP) -> np.ndarray:
        """Real Jacobian (outputs by inputs) at params.

        I_MAP is linear in (b, c) before the projection onto the unit spheres,
        so its Jacobian is that linear part times the projection's derivative.
        Every other chart uses central differences with step h.
        """
        p = np.asarray(params, dtype=float)
        n = p.shape[0]
        if self.name is ChartName.I_MAP:
            k = self.r - 1
            basis = _complex(np.concatenate([np.zeros((1, n)), np.eye(n)]))
            flat = _real(_i_array(basis[:, :k], basis[:, k:]))
            linear = (flat[1:] - flat[0]).T
            proj = np.zeros((n, n))
            for part in (slice(0, 2 * k), slice(2 * k, n)):
                x = p[part]
                norm = np.linalg.norm(x)
                u = x / norm
                proj[part, part] = (np.eye(x.shape[0]) - np.outer(u, u)) / norm
            return linear @ proj
        steps = np.eye(n) * h
        values = self.evaluate_batch(np.concatenate([p + steps, p - steps]))
        return ((values[:n] - values[n:]) / (2 * h)).T

    def random_params(self, rng: np.random.Generator) -> np.ndarray:
        scale = 0.1 if self.name is ChartName.ORBIT_MAP else 1.0
        return scale * rng.standard_normal(self.domain_dim)

    def margin(self, params) -> float:
        """Distance-like measure from the chart's excluded locus."""
        p = np.asarray(params, dtype=float)
        z = p[0::2] + 1j * p[1::2]
        r = self.r
        name = self.name
        if name is ChartName.T_CHART:
            a, b, c, d = z[:4]
            return float(max(abs(b), abs(c), abs(a - d)))
        if name is ChartName.Q_CHART:
            a, b, d = z[:3]
            return float(max(abs(b), abs(a - d)))
        if name in (ChartName.W_FIBER, ChartName.INCIDENCE_FIBER):
            t = z[-3 * r :].reshape(r, 3)
            return _max_commutator(_upper(t[:, 0], t[:, 1], t[:, 2]))
        if name is ChartName.J_MAP:
            return math.inf
        if name is ChartName.I_MAP:
            return float(min(np.linalg.norm(z[: r - 1]), np.linalg.norm(z[r - 1 :])))
        if name is ChartName.SIBIRSKII_MAP:
            return _word_ratio(z.reshape(r, 2, 2))
        g = np.eye(2, dtype=complex) + z.reshape(2, 2)
        base = np.stack([m.to_array() for m in self.base])
        return min(float(abs(np.linalg.det(g))), _word_ratio(base))


def _j_array(b: np.ndarray) -> np.ndarray:
    n, k = b.shape
    out = np.zeros((n, k + 1, 2, 2), dtype=complex)
    out[:, :k, 0, 1] = b
    out[:, :k, 1, 0] = 1
    out[:, k, 0, 0] = 1
    out[:, k, 1, 1] = -1
    return out


def _i_array(b: np.ndarray, c: np.ndarray) -> np.ndarray:
    n, k = b.shape
    out = np.zeros((n, k + 1, 2, 2), dtype=complex)
    out[:, :k, 0, 1] = b
    out[:, :k, 1, 0] = c
    out[:, k, 0, 0] = 1
    out[:, k, 1, 1] = -1
    return out


def _trace_coordinates(mats: np.ndarray) -> np.ndarray:
    n, r = mats.shape[:2]
    cols = [np.einsum("nikk->ni", mats), np.einsum("nikl,nilk->ni", mats, mats)]
    for i in range(r):
        for j in range(i + 1, r):
            cols.append(np.einsum("nkl,nlk->n", mats[:, i], mats[:, j])[:, None])
    for i in range(r):
        for j in range(i + 1, r):
            prod = mats[:, i] @ mats[:, j]
            for k in range(j + 1, r):
                cols.append(np.einsum("nkl,nlk->n", prod, mats[:, k])[:, None])
    return np.concatenate(cols, axis=1)


@dataclass(frozen=True)
class RankEntry:
    observed_rank: int
    keep_ratio: float
    drop_ratio: Optional[float]
    margin: float
    passed: bool
    singular_values: tuple[float, ...] = ()


def numeric_jacobian_rank(
    chart: ChartSpec, sample, h: float = JACOBIAN_STEP
) -> RankEntry:
    """Jacobian of the chart at sample and its rank by the fixed gap rule."""
    params = np.asarray(sample, dtype=float)
    margin = chart.margin(params)
    if margin < MARGIN_FACTOR * h:
        raise MarginViolation(
            f"{chart.label} sample is {margin:.3e} from the excluded locus; need >= {MARGIN_FACTOR * h:.1e}"
        )
    jac = chart.jacobian(params, h)
    s = np.linalg.svd(jac, compute_uv=False)
    k = chart.expected_rank
    if s[0] == 0:
        return RankEntry(0, 0.0, None, margin, k == 0, tuple(float(x) for x in s))
    ratios = s / s[0]
    observed = int(np.count_nonzero(ratios > RANK_KEEP_RATIO))
    keep = float(ratios[k - 1]) if 0 < k <= len(s) else 0.0
    drop = float(ratios[k]) if k < len(s) else None
    passed = observed == k and keep > RANK_KEEP_RATIO and (drop is None or drop < RANK_DROP_RATIO)
    return RankEntry(observed, keep, drop, margin, passed, tuple(float(x) for x in s))


@dataclass
class RankReport:
    chart: ChartSpec
    sample_count: int = 0
    observed_ranks: set = field(default_factory=set)
    min_keep_ratio: float = math.inf
    max_drop_ratio: float = 0.0
    max_singular_value: float = 0.0
    failures: int = 0

    def add(self, entry: RankEntry) -> None:
        self.sample_count += 1
        self.observed_ranks.add(entry.observed_rank)
        self.min_keep_ratio = min(self.min_keep_ratio, entry.keep_ratio)
        if entry.drop_ratio is not None:
            self.max_drop_ratio = max(self.max_drop_ratio, entry.drop_ratio)
        if entry.singular_values:
            self.max_singular_value = max(self.max_singular_value, entry.singular_values[0])
        if not entry.passed:
            self.failures += 1

    @property
    def observed_rank(self) -> Optional[int]:
        return next(iter(self.observed_ranks)) if len(self.observed_ranks) == 1 else None

    @property
    def passed(self) -> bool:
        return self.sample_count > 0 and self.failures == 0

    def to_json(self) -> dict:
        return {
            "chart": self.chart.label,
            "r": self.chart.r,
            "expected_rank": self.chart.expected_rank,
            "observed_rank": self.observed_rank,
            "sample_count": self.sample_count,
            "singular_values": {
                "max_sigma1": self.max_singular_value,
                "min_keep_ratio": self.min_keep_ratio if self.sample_count else None,
                "max_drop_ratio": self.max_drop_ratio,
            },
            "failures": self.failures,
            "pass": self.passed,
        }


def sample_chart(
    name: ChartName, r: int, rng: np.random.Generator, i: int = 1, h: float = JACOBIAN_STEP,
    attempts: int = 100,
) -> tuple[ChartSpec, np.ndarray]:
    """A chart with a random parameter point at least MARGIN_FACTOR * h from its excluded locus."""
    for _ in range(attempts):
        base = None
        if name is ChartName.ORBIT_MAP:
            arr = rng.standard_normal((r, 2, 2)) + 1j * rng.standard_normal((r, 2, 2))
            base = MatTuple(tuple(Mat2.from_array(m) for m in arr))
        spec = ChartSpec(name, r, i, base)
        params = spec.random_params(rng)
        if spec.margin(params) >= MARGIN_FACTOR * h:
            return spec, params
    raise MarginViolation(f"no {name.value} sample away from the excluded locus in {attempts} draws")


def t_chart(i: int, base: Mat2, coeffs: Sequence[tuple], r: int, tol: float = DEFAULT_TOL) -> MatTuple:
    """base in slot i (1-based) and a_k * base + b_k * I in the other slots."""
    if not 1 <= i <= r:
        raise InvalidParameter(f"chart index {i} outside 1..{r}")
    if len(coeffs) != r - 1:
        raise WrongArity(f"need {r - 1} coefficient pairs, got {len(coeffs)}")
    if base.is_scalar(tol):
        raise ScalarBase("chart base matrix is scalar")
    backend = base.backend
    ident = Mat2.identity(backend)
    others = [
        base.scale(to_scalar(a, backend)) + ident.scale(to_scalar(b, backend)) for a, b in coeffs
    ]
    return MatTuple(tuple(others[: i - 1] + [base] + others[i - 1 :]))


def _chart_conjugator(line: ProjLine, chart: int, tol: float) -> Mat2:
    p, q = line.p, line.q
    backend = line.backend
    one, zero = to_scalar(1, backend), to_scalar(0, backend)
    if chart == 0:
        if is_zero(p, tol):
            raise LineOutsideChart("common eigenline is (0 : 1), outside chart 0")
        return Mat2(one, zero, q / p, one)
    if chart == 1:
        if is_zero(q, tol):
            raise LineOutsideChart("common eigenline is (1 : 0), outside chart 1")
        return Mat2(p / q, one, one, zero)
    raise InvalidParameter(f"chart must be 0 or 1, got {chart}")


def p_trivialize(t: MatTuple, chart: int, tol: float = DEFAULT_TOL) -> tuple[ProjLine, MatTuple]:
    """(p(t), g^-1 t g) where g is the chart's conjugator carrying (1 : 0) to p(t)."""
    stratum = classify(t, tol)
    if stratum.tag is not StratumTag.EIGEN_SHARED:
        raise WrongStratum(f"p is defined on EIGEN_SHARED tuples, got {stratum.tag.value}")
    line = stratum.witness
    g = _chart_conjugator(line, chart, tol)
    g_inv = g.inverse()
    fiber = t.map(lambda m: mat_mul(mat_mul(g_inv, m), g))
    for k, m in enumerate(fiber, start=1):
        if cabs(m.c) > tol * RECONCILE_FACTOR * max(1.0, t[k - 1].norm()):
            raise InconsistentClassification(f"fiber matrix A{k} is not upper triangular")
    return line, fiber


def _check_unit(lam) -> None:
    if abs(cabs(lam) - 1) > UNIT_TOL:
        raise NotUnitModulus(f"|lambda| = {cabs(lam)!r} is not 1")


def s1_act(lam, t: MatTuple) -> MatTuple:
    """b -> conj(lambda) b, c -> lambda c on every matrix."""
    _check_unit(lam)
    lam = to_scalar(lam, t.backend)
    bar = lam.conjugate()
    return t.map(lambda m: Mat2(m.a, bar * m.b, lam * m.c, m.d))


def s1_pair_act(lam, b: Sequence, c: Sequence) -> tuple[tuple, tuple]:
    """lambda . (b, c) = (conj(lambda) b, lambda c)."""
    _check_unit(lam)
    bar = lam.conjugate()
    return tuple(bar * x for x in b), tuple(lam * x for x in c)


def _check_sphere(v: Sequence, label: str) -> None:
    if not v:
        raise WrongArity(f"{label} is empty")
    norm = math.sqrt(sum(cabs(x) ** 2 for x in v))
    if abs(norm - 1) > UNIT_TOL:
        raise NotOnSphere(f"|{label}| = {norm!r} is not 1")


def _last_diagonal(backend: Backend) -> Mat2:
    return Mat2.diag(1, -1, backend)


def i_map(b: Sequence, c: Sequence) -> MatTuple:
    """([[0, b_k], [c_k, 0]])_k followed by diag(1, -1)."""
    _check_sphere(b, "b")
    _check_sphere(c, "c")
    if len(b) != len(c):
        raise WrongArity(f"b and c have different lengths {len(b)} and {len(c)}")
    mats = [Mat2(0, x, y, 0) for x, y in zip(b, c)]
    return MatTuple(tuple(mats + [_last_diagonal(mats[0].backend)]))


def tau_map(t: MatTuple) -> MatTuple:
    """[[a, b], [c, d]] -> [[-d, c], [b, -a]]."""
    return t.map(lambda m: Mat2(-m.d, m.c, m.b, -m.a))


def sigma_map(b: Sequence, c: Sequence) -> tuple[tuple, tuple]:
    """(b, c) -> (conj(c), conj(b))."""
    _check_sphere(b, "b")
    _check_sphere(c, "c")
    return tuple(x.conjugate() for x in c), tuple(x.conjugate() for x in b)


def j_map(b: Sequence) -> MatTuple:
    """([[0, b_k], [1, 0]])_k followed by diag(1, -1)."""
    if not b:
        raise WrongArity("j needs at least one coordinate")
    mats = [Mat2(0, x, 1, 0) for x in b]
    return MatTuple(tuple(mats + [_last_diagonal(mats[0].backend)]))
