# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Verification suites.

Each suite is a list of checks; each check runs over fixed-size blocks of
samples drawn from Philox streams keyed by (seed, check, r, block). Blocks may
run in a process pool, and partial results are merged in block order, so a
report depends only on the settings and the seed.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .b2model import (
    TangentPoint,
    YPoint,
    b2_from_tangent,
    b2_to_x,
    circle_sphere_embed,
    f_inverse,
    f_map,
    friedland_reduction_holds,
    g_inverse,
    g_map,
    quadric_identity_holds,
    retract_to_core,
    x_to_b2,
    z2_canonical,
)
from .config import BLOCK_SIZE, RECONCILE_FACTOR, SUITE_NAMES, VerifySettings
from .errors import ConfigError, MatgenError
from .generation import (
    StratumTag,
    batch_shared_eigenline,
    batch_span_dims,
    classify,
    common_eigenline,
    friedland_generates,
    friedland_sides,
    generates_by_span,
)
from .helpers import blocks, now
from .invariants import (
    B2Coords,
    b2_coords,
    conjugate,
    intertwiner_search,
    realize_b2,
    semisimplify,
    sibirskii,
    traceless_retract,
)
from .matrix import Mat2, MatTuple, ProjLine
from .sampling import (
    EDGE_FAMILIES,
    edge_family_tuple,
    random_complex,
    random_conjugator,
    random_rational,
    random_rational_tuple,
    random_sphere_point,
    random_tangent_point,
    random_tuple_array,
    random_unit_complex,
    random_unit_vector3,
    sample_rng,
    stream_id,
    tuple_from_array,
)
from .scalar import Backend, GaussianRational
from .strata import (
    ChartName,
    _i_array,
    _j_array,
    i_map,
    j_map,
    numeric_jacobian_rank,
    p_trivialize,
    s1_act,
    s1_pair_act,
    sample_chart,
    sigma_map,
    t_chart,
    tau_map,
)

log = logging.getLogger("matgen")

MAX_EXAMPLES = 5
CROSS_CHECK = 64
EXACT_MAP_TOL = 1e-12
ROUNDTRIP_TOL = 1e-10
CONJUGATOR_TOL = 1e-8


@dataclass
class Partial:
    """Running totals for one check; merged across blocks in block order."""

    count: int = 0
    failures: int = 0
    worst: float = 0.0
    examples: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def record(self, index: int, ok: bool, residual: float = 0.0) -> None:
        self.count += 1
        if residual != residual:
            residual = math.inf
        self.worst = max(self.worst, float(residual))
        if not ok:
            self.failures += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append(int(index))

    def merge(self, other: "Partial") -> None:
        self.count += other.count
        self.failures += other.failures
        self.worst = max(self.worst, other.worst)
        room = MAX_EXAMPLES - len(self.examples)
        self.examples.extend(other.examples[:room])
        for key, value in other.stats.items():
            if key not in self.stats:
                self.stats[key] = value
            elif key.startswith("min_"):
                self.stats[key] = min(self.stats[key], value)
            elif key.startswith("max_"):
                self.stats[key] = max(self.stats[key], value)
            elif isinstance(value, list):
                self.stats[key] = sorted(set(self.stats[key]) | set(value))
            elif key.endswith("_count"):
                self.stats[key] += value


@dataclass
class CheckResult:
    name: str
    r: Optional[int]
    count: int
    failures: int
    worst_residual: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "r": self.r,
            "count": self.count,
            "failures": self.failures,
            "worst_residual": self.worst_residual if math.isfinite(self.worst_residual) else None,
            "pass": self.passed,
            "details": self.details,
        }


@dataclass
class SuiteReport:
    name: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


# A check body receives (settings, r, arg, rng, start, count) and returns a Partial.
CheckFn = Callable[..., Partial]


@dataclass(frozen=True)
class CheckDef:
    name: str
    suite: str
    fn: CheckFn
    samples: Optional[str]
    r_mode: str = "all"
    fixed: int = 1


def _tuples(rng, r: int, count: int) -> list[MatTuple]:
    return [tuple_from_array(a) for a in random_tuple_array(rng, r, count)]


def _tuple_distance(s: MatTuple, t: MatTuple) -> float:
    return s.max_distance(t) / max(1.0, t.scale_norm())


# ---- equivalences ----


def _check_burnside_random(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    arr = random_tuple_array(rng, r, count)
    dims = batch_span_dims(arr, settings.tol)
    shared = batch_shared_eigenline(arr, settings.tol)
    for k in range(count):
        part.record(start + k, bool(dims[k] == 4) != bool(shared[k]))
    for k in range(min(count, CROSS_CHECK) if start == 0 else 0):
        t = tuple_from_array(arr[k])
        span = generates_by_span(t, settings.tol)
        line = common_eigenline(t, settings.tol)
        agree = span.generates == (line is None) and span.span_dim == int(dims[k])
        part.record(start + k, agree)
    part.stats["non_generating_count"] = int(np.count_nonzero(dims < 4))
    return part


def _check_burnside_edge(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    expected = {
        "upper-triangular": StratumTag.EIGEN_SHARED,
        "conjugated-triangular": StratumTag.EIGEN_SHARED,
        "scalar": StratumTag.COMMUTING,
        "diagonal": StratumTag.COMMUTING,
        "nilpotent": StratumTag.COMMUTING,
    }
    for k in range(count):
        kind = EDGE_FAMILIES[(start + k) % len(EDGE_FAMILIES)]
        t = edge_family_tuple(rng, r, kind)
        try:
            span = generates_by_span(t, settings.tol)
            line = common_eigenline(t, settings.tol)
            tag = classify(t, settings.tol).tag
        except MatgenError:
            part.record(start + k, False)
            continue
        part.record(start + k, not span.generates and line is not None and tag is expected[kind])
    return part


def _random_exact_invertible(rng) -> Mat2:
    while True:
        g = Mat2(*(random_rational(rng) for _ in range(4)))
        if g.det():
            return g


def _curated_pair(rng, k: int) -> MatTuple:
    a = [random_rational(rng) for _ in range(6)]
    zero = GaussianRational(0)
    tri = MatTuple.of(Mat2(a[0], a[1], zero, a[2]), Mat2(a[3], a[4], zero, a[5]))
    if k % 3 == 1:
        tri = MatTuple.of(tri[0], tri[0].scale(a[3]) + Mat2.identity(Backend.EXACT).scale(a[4]))
    pair = conjugate(tri, _random_exact_invertible(rng))
    if k % 3 == 2:
        eps = GaussianRational(Fraction(1, 10 ** (1 + k % 7)))
        pair = MatTuple.of(pair[0], pair[1] + Mat2(zero, zero, eps, zero))
    return pair


def _check_friedland(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    curated = 0
    for k in range(count):
        t = random_rational_tuple(rng, 2)
        part.record(start + k, friedland_generates(t[0], t[1]) == generates_by_span(t).generates)
        if (start + k) % 10 == 0:
            c = _curated_pair(rng, (start + k) // 10)
            part.record(start + k, friedland_generates(c[0], c[1]) == generates_by_span(c).generates)
            curated += 1
    part.stats["curated_count"] = curated
    return part


def _check_conjugation_invariance(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k, t in enumerate(_tuples(rng, r, count)):
        g = random_conjugator(rng)
        delta = sibirskii(conjugate(t, g, settings.tol)).max_delta(sibirskii(t))
        part.record(start + k, delta <= settings.tol, delta)
    return part


def _mixed_tuple(rng, r: int, k: int) -> MatTuple:
    kinds = ("generating",) + EDGE_FAMILIES
    kind = kinds[k % len(kinds)]
    if kind == "generating":
        return _tuples(rng, r, 1)[0]
    return edge_family_tuple(rng, r, kind)


def _check_conjugation_tags(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t = _mixed_tuple(rng, r, start + k)
        g = random_conjugator(rng)
        try:
            before = classify(t, settings.tol)
            after = classify(conjugate(t, g, settings.tol), settings.tol)
            permuted = classify(MatTuple(tuple(reversed(t.matrices))), settings.tol)
        except MatgenError:
            part.record(start + k, False)
            continue
        ok = before.tag is after.tag and before.tag is permuted.tag
        residual = 0.0
        if ok and before.tag is StratumTag.EIGEN_SHARED:
            residual = before.witness.apply(g).distance(after.witness)
            ok = residual <= settings.tol
        part.record(start + k, ok, residual)
    return part


def _check_semisimplify(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    kinds = ("conjugated-triangular", "upper-triangular", "diagonal", "nilpotent", "scalar")
    for k in range(count):
        t = edge_family_tuple(rng, r, kinds[(start + k) % len(kinds)])
        try:
            ss = semisimplify(t, settings.tol)
        except MatgenError:
            part.record(start + k, False)
            continue
        diagonal = all(m.b == 0 and m.c == 0 for m in ss)
        delta = sibirskii(ss).max_delta(sibirskii(t))
        part.record(start + k, diagonal and delta <= settings.tol, delta)
    return part


def _check_orbit_separation(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t, s = _tuples(rng, r, 2)
        g = random_conjugator(rng)
        same = intertwiner_search(t, conjugate(t, g, settings.tol), settings.tol)
        ok = same.conjugator is not None and same.kernel_dim == 1 and same.residual <= CONJUGATOR_TOL
        part.record(start + k, ok, same.residual)
        other = intertwiner_search(t, s, settings.tol)
        part.record(start + k, other.conjugator is None and other.kernel_dim == 0)
    return part


def _check_freeness(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k, t in enumerate(_tuples(rng, r, count)):
        part.record(start + k, intertwiner_search(t, t, settings.tol).kernel_dim == 1)
    return part


def _check_retraction(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t = _mixed_tuple(rng, r, start + k)
        try:
            tag = classify(t, settings.tol).tag
            steps = (0.0, 0.5, 1.0, float(rng.random()))
            ok = all(classify(traceless_retract(t, s), settings.tol).tag is tag for s in steps)
            traceless = all(abs(m.trace()) <= settings.tol * max(1.0, m.norm())
                            for m in traceless_retract(t, 1.0))
        except MatgenError:
            part.record(start + k, False)
            continue
        part.record(start + k, ok and traceless)
    return part


# ---- maps ----


def _sphere_pairs(rng, r: int, count: int) -> list[tuple[tuple, tuple]]:
    return [(random_sphere_point(rng, r - 1), random_sphere_point(rng, r - 1)) for _ in range(count)]


def _check_i_generating(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    pairs = _sphere_pairs(rng, r, count)
    b = np.array([p[0] for p in pairs])
    c = np.array([p[1] for p in pairs])
    dims = batch_span_dims(_i_array(b, c), settings.tol)
    for k in range(count):
        part.record(start + k, dims[k] == 4)
    if start == 0 and pairs:
        part.record(0, classify(i_map(*pairs[0]), settings.tol).tag is StratumTag.GENERATING)
    return part


def _check_i_equivariance(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k, (b, c) in enumerate(_sphere_pairs(rng, r, count)):
        lam = random_unit_complex(rng)
        lb, lc = s1_pair_act(lam, b, c)
        moved = s1_act(lam, i_map(b, c))
        image = i_map(lb, lc)
        part.record(start + k, moved == image, _tuple_distance(moved, image))
    return part


def _check_tau_swap(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k, (b, c) in enumerate(_sphere_pairs(rng, r, count)):
        lhs, rhs = tau_map(i_map(b, c)), i_map(c, b)
        part.record(start + k, lhs == rhs, _tuple_distance(lhs, rhs))
    return part


def _check_tau_properties(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    w = Mat2(0, -1, 1, 0)
    for k in range(count):
        t = _mixed_tuple(rng, r, start + k)
        twice = tau_map(tau_map(t))
        via_conj = conjugate(t, w).map(lambda m: -m)
        residual = _tuple_distance(tau_map(t), via_conj)
        try:
            same_tag = classify(tau_map(t), settings.tol).tag is classify(t, settings.tol).tag
        except MatgenError:
            same_tag = False
        part.record(start + k, twice == t and residual <= EXACT_MAP_TOL and same_tag, residual)
    return part


def _check_sigma(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k, (b, c) in enumerate(_sphere_pairs(rng, r, count)):
        lam = random_unit_complex(rng)
        involution = sigma_map(*sigma_map(b, c)) == (tuple(b), tuple(c))
        lhs = sigma_map(*s1_pair_act(lam, b, c))
        rhs = s1_pair_act(lam, *sigma_map(b, c))
        residual = max(abs(x - y) for u, v in zip(lhs, rhs) for x, y in zip(u, v))
        part.record(start + k, involution and residual <= EXACT_MAP_TOL, residual)
    return part


def _check_s1_conjugation(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k, t in enumerate(_tuples(rng, r, count)):
        lam = random_unit_complex(rng)
        residual = _tuple_distance(s1_act(lam, t), conjugate(t, Mat2.diag(1, lam)))
        part.record(start + k, residual <= EXACT_MAP_TOL, residual)
    return part


def _check_j_preimage(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    if start == 0:
        grid = (0, 1, -1, 1j, -1j, 1e-3, 2 + 3j)
        size = len(grid)
        for k in range(size ** min(r - 1, 2)):
            b = [grid[(k // size ** m) % size] if m < 2 else grid[k % size] for m in range(r - 1)]
            stratum = classify(j_map(b), settings.tol)
            if any(x != 0 for x in b):
                ok = stratum.tag is StratumTag.GENERATING
            else:
                ok = (
                    stratum.tag is StratumTag.EIGEN_SHARED
                    and stratum.witness.distance(ProjLine.of(0, 1)) <= settings.tol
                )
            part.record(k, ok)
    b = random_complex(rng, (count, r - 1))
    dims = batch_span_dims(_j_array(b), settings.tol)
    for k in range(count):
        part.record(start + k, dims[k] == 4)
    return part


def _check_p_equivariance(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t = edge_family_tuple(rng, r, "upper-triangular")
        g = random_conjugator(rng)
        try:
            line, fiber = p_trivialize(t, 0, settings.tol)
            moved = conjugate(t, g, settings.tol)
            moved_line = classify(moved, settings.tol).witness
            chart = 0 if abs(moved_line.p) >= abs(moved_line.q) else 1
            image, _ = p_trivialize(moved, chart, settings.tol)
        except MatgenError:
            part.record(start + k, False)
            continue
        residual = line.apply(g).distance(image)
        drift = _tuple_distance(fiber, t)
        ok = residual <= settings.tol and drift <= settings.tol * RECONCILE_FACTOR
        part.record(start + k, ok, residual)
    return part


def _check_f_z2(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        p = g_map(random_tangent_point(rng))
        part.record(start + k, f_map(p.negate()) == f_map(p))
    return part


def _check_g_odd(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t = random_tangent_point(rng)
        neg = TangentPoint(-t.lam, tuple(-x for x in t.u), tuple(-x for x in t.v))
        lhs, rhs = g_map(neg), g_map(t).negate()
        part.record(start + k, lhs == rhs, lhs.distance(rhs))
    return part


# ---- b2 ----


def _check_quadric_identity(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    part.record(0, quadric_identity_holds())
    return part


def _check_friedland_reduction(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    if start == 0:
        part.record(0, friedland_reduction_holds())
    for k in range(count):
        t = random_rational_tuple(rng, 2)
        lhs, rhs = friedland_sides(t[0], t[1])
        c = b2_coords(traceless_retract(t))
        part.record(start + k, lhs - rhs == GaussianRational(4) * c.discriminant())
    return part


def _random_coords(rng) -> B2Coords:
    z = random_complex(rng, 3)
    return B2Coords(complex(z[0]), complex(z[1]), complex(z[2]))


def _check_x_roundtrip(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        c = _random_coords(rng)
        x = b2_to_x(c)
        back = x_to_b2(x)
        residual = max(abs(back.z1 - c.z1), abs(back.z2 - c.z2), abs(back.x - c.x))
        identity = abs(x.quadric() - c.discriminant()) / (1 + abs(c.discriminant()))
        part.record(start + k, residual <= EXACT_MAP_TOL and identity <= EXACT_MAP_TOL,
                    max(residual, identity))
    return part


def _y_scale(p: YPoint) -> float:
    # f^-1 loses about |y|^2 ulps through the cancellation in y . y = 1
    return max(1.0, abs(p.lam)) * (1.0 + p.y_norm2())


def _check_f_roundtrip(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        p = g_map(random_tangent_point(rng))
        back = f_inverse(f_map(p), settings.tol)
        residual = back.distance(z2_canonical(p)) / _y_scale(p)
        part.record(start + k, residual <= ROUNDTRIP_TOL, residual)
    return part


def _check_g_roundtrip(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t = random_tangent_point(rng)
        p = g_map(t)
        back = g_inverse(p)
        vnorm2 = sum(x * x for x in t.v)
        residual = back.distance(t) / max(1.0, math.sqrt(vnorm2))
        quadric = abs(p.quadric_residual()) / (1 + vnorm2)
        re2 = sum(c.real ** 2 for c in p.y)
        im2 = sum(c.imag ** 2 for c in p.y)
        split = abs(re2 - im2 - 1) / (1 + vnorm2)
        ok = residual <= ROUNDTRIP_TOL and quadric <= EXACT_MAP_TOL and split <= EXACT_MAP_TOL
        part.record(start + k, ok, residual)
        part.stats["max_quadric_residual"] = max(part.stats.get("max_quadric_residual", 0.0), quadric)
    return part


def _check_core_retraction(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        lam = random_unit_complex(rng)
        u = random_unit_vector3(rng)
        back_lam, back_u = retract_to_core(circle_sphere_embed(lam, u))
        residual = max([abs(back_lam - lam)] + [abs(a - b) for a, b in zip(back_u, u)])
        part.record(start + k, residual <= EXACT_MAP_TOL, residual)
    return part


def _check_chain_generating(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t = random_tangent_point(rng, lam_range=(0.1, 10.0), v_max=10.0)
        c = b2_from_tangent(t)
        try:
            tag = classify(realize_b2(c), settings.tol).tag
        except MatgenError:
            part.record(start + k, False)
            continue
        part.record(start + k, not c.on_quadric(settings.tol) and tag is StratumTag.GENERATING)
    return part


def _check_realize_float(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        c = _random_coords(rng)
        back = b2_coords(realize_b2(c), settings.tol)
        residual = max(abs(back.z1 - c.z1), abs(back.z2 - c.z2), abs(back.x - c.x))
        part.record(start + k, residual <= ROUNDTRIP_TOL, residual)
    return part


def _exact_coords(rng, k: int) -> B2Coords:
    a, b, x = random_rational(rng), random_rational(rng), random_rational(rng)
    a, b = a or GaussianRational(1), b or GaussianRational(1)
    if k % 4 == 1:
        # on the quadric: x^2 = z1 z2
        return B2Coords(2 * a * a, 2 * b * b, 2 * a * b)
    if k % 4 == 2:
        return B2Coords(GaussianRational(0), GaussianRational(0), x)
    if k % 4 == 3:
        return B2Coords(GaussianRational(0), 2 * b * b, x)
    return B2Coords(2 * a * a, random_rational(rng), x)


def _check_realize_exact(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        c = _exact_coords(rng, start + k)
        t = realize_b2(c)
        back = b2_coords(t)
        roundtrip = (back.z1, back.z2, back.x) == (c.z1, c.z2, c.x)
        generating = classify(t).tag is StratumTag.GENERATING
        part.record(start + k, roundtrip and generating == (not c.on_quadric()))
    return part


# ---- montecarlo ----


def _check_codimension(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    arr = random_tuple_array(rng, r, count)
    dims = batch_span_dims(arr, settings.tol)
    for k in range(count):
        part.record(start + k, dims[k] == 4)
    for k in range(min(count, CROSS_CHECK) if start == 0 else 0):
        tag = classify(tuple_from_array(arr[k]), settings.tol).tag
        part.record(start + k, tag is StratumTag.GENERATING)
    return part


def _check_t_chart(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        z = random_complex(rng, 4 + 2 * (r - 1))
        base = Mat2(*(complex(v) for v in z[:4]))
        coeffs = [(complex(z[4 + 2 * m]), complex(z[5 + 2 * m])) for m in range(r - 1)]
        i = 1 + (start + k) % r
        tag = classify(t_chart(i, base, coeffs, r, settings.tol), settings.tol).tag
        part.record(start + k, tag is not StratumTag.GENERATING)
    return part


def _check_w_perturbation(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    for k in range(count):
        t = edge_family_tuple(rng, r, "upper-triangular")
        bump = edge_family_tuple(rng, r, "upper-triangular")
        g = random_conjugator(rng)
        moved = conjugate(MatTuple(tuple(a + b.scale(1e-3) for a, b in zip(t, bump))), g)
        try:
            tag = classify(moved, settings.tol).tag
        except MatgenError:
            part.record(start + k, False)
            continue
        part.record(start + k, tag is not StratumTag.GENERATING)
    return part


# ---- ranks ----


def _check_rank(settings, r, arg, rng, start, count) -> Partial:
    part = Partial()
    name = ChartName(arg[0])
    i = arg[1]
    observed = set()
    min_keep, max_drop, max_sigma = math.inf, 0.0, 0.0
    spec = None
    for k in range(count):
        try:
            spec, params = sample_chart(name, r, rng, i, settings.jacobian_step)
            entry = numeric_jacobian_rank(spec, params, settings.jacobian_step)
        except MatgenError:
            part.record(start + k, False)
            continue
        observed.add(entry.observed_rank)
        min_keep = min(min_keep, entry.keep_ratio)
        if entry.drop_ratio is not None:
            max_drop = max(max_drop, entry.drop_ratio)
        max_sigma = max(max_sigma, entry.singular_values[0] if entry.singular_values else 0.0)
        part.record(start + k, entry.passed, entry.drop_ratio or 0.0)
    part.stats.update(
        {
            "expected_rank": spec.expected_rank if spec else None,
            "observed_ranks": sorted(observed),
            "min_keep_ratio": min_keep,
            "max_drop_ratio": max_drop,
            "max_sigma1": max_sigma,
        }
    )
    return part


_RANK_CHARTS = (
    ChartName.T_CHART,
    ChartName.W_FIBER,
    ChartName.INCIDENCE_FIBER,
    ChartName.Q_CHART,
    ChartName.J_MAP,
    ChartName.I_MAP,
    ChartName.SIBIRSKII_MAP,
    ChartName.ORBIT_MAP,
)

CHECKS: tuple[CheckDef, ...] = (
    CheckDef("rank", "ranks", _check_rank, "rank_samples"),
    CheckDef("burnside_random", "equivalences", _check_burnside_random, "burnside_samples", "burnside"),
    CheckDef("burnside_edge_families", "equivalences", _check_burnside_edge, "edge_samples", "burnside"),
    CheckDef("friedland_exact", "equivalences", _check_friedland, "friedland_samples", "two"),
    CheckDef("sibirskii_conjugation_invariance", "equivalences", _check_conjugation_invariance,
             "conjugation_samples"),
    CheckDef("classification_conjugation_permutation", "equivalences", _check_conjugation_tags,
             "edge_samples"),
    CheckDef("semisimplify_invariants", "equivalences", _check_semisimplify, "semisimplify_samples"),
    CheckDef("orbit_separation", "equivalences", _check_orbit_separation, "orbit_samples"),
    CheckDef("freeness", "equivalences", _check_freeness, "freeness_samples"),
    CheckDef("retraction_preserves_tag", "equivalences", _check_retraction, "retraction_samples"),
    CheckDef("i_generating", "maps", _check_i_generating, "maps_samples"),
    CheckDef("i_equivariance", "maps", _check_i_equivariance, "maps_samples"),
    CheckDef("tau_i_swap", "maps", _check_tau_swap, "maps_samples"),
    CheckDef("tau_properties", "maps", _check_tau_properties, "edge_samples"),
    CheckDef("sigma_involution_equivariance", "maps", _check_sigma, "maps_samples"),
    CheckDef("s1_conjugation", "maps", _check_s1_conjugation, "maps_samples"),
    CheckDef("j_preimage", "maps", _check_j_preimage, "maps_samples"),
    CheckDef("p_equivariance", "maps", _check_p_equivariance, "edge_samples"),
    CheckDef("f_z2_equivariance", "maps", _check_f_z2, "maps_samples", "none"),
    CheckDef("g_odd", "maps", _check_g_odd, "maps_samples", "none"),
    CheckDef("quadric_identity", "b2", _check_quadric_identity, None, "none"),
    CheckDef("friedland_reduction", "b2", _check_friedland_reduction, "edge_samples", "none"),
    CheckDef("x_coordinates_roundtrip", "b2", _check_x_roundtrip, "b2_samples", "none"),
    CheckDef("f_roundtrip", "b2", _check_f_roundtrip, "b2_samples", "none"),
    CheckDef("g_roundtrip", "b2", _check_g_roundtrip, "b2_samples", "none"),
    CheckDef("core_retraction", "b2", _check_core_retraction, "retraction_samples", "none"),
    CheckDef("chain_generating", "b2", _check_chain_generating, "edge_samples", "none"),
    CheckDef("realize_float_roundtrip", "b2", _check_realize_float, "b2_samples", "none"),
    CheckDef("realize_exact_roundtrip", "b2", _check_realize_exact, "edge_samples", "none"),
    CheckDef("codimension", "montecarlo", _check_codimension, "montecarlo_samples", "two"),
    CheckDef("t_chart_non_generating", "montecarlo", _check_t_chart, "montecarlo_chart_samples"),
    CheckDef("w_perturbation_non_generating", "montecarlo", _check_w_perturbation,
             "montecarlo_chart_samples"),
)

_CHECK_INDEX = {(c.suite, c.name): c for c in CHECKS}


def _r_values(check: CheckDef, settings: VerifySettings) -> list[Optional[int]]:
    if check.r_mode == "none":
        return [None]
    if check.r_mode == "two":
        return [2]
    top = settings.r_max
    if check.r_mode == "burnside":
        top = min(top, settings.burnside_r_max)
    return list(range(settings.r_min, top + 1))


def _args(check: CheckDef, r: Optional[int]) -> list:
    if check.name != "rank":
        return [None]
    out = []
    for name in _RANK_CHARTS:
        if name is ChartName.T_CHART:
            out.extend((name.value, i) for i in range(1, r + 1))
        else:
            out.append((name.value, 1))
    return out


def _label(check: CheckDef, arg) -> str:
    if arg is None:
        return check.name
    name, i = arg
    return f"rank:T_CHART_{i}" if name == ChartName.T_CHART.value else f"rank:{name}"


def _run_task(task) -> Partial:
    suite, name, r, arg, block, start, count, settings = task
    check = _CHECK_INDEX[(suite, name)]
    stream = stream_id(f"{suite}:{_label(check, arg)}:{r}")
    rng = sample_rng(settings.seed, stream, block)
    # r-free checks still get an r for the shared helpers
    return check.fn(settings, r if r is not None else 2, arg, rng, start, count)


def _plan(suite: str, settings: VerifySettings) -> list[tuple]:
    groups = []
    for check in CHECKS:
        if check.suite != suite:
            continue
        total = check.fixed if check.samples is None else getattr(settings, check.samples)
        for r in _r_values(check, settings):
            for arg in _args(check, r):
                tasks = [
                    (suite, check.name, r, arg, idx, start, count, settings)
                    for idx, start, count in blocks(total, BLOCK_SIZE)
                ]
                groups.append((check, r, arg, tasks))
    return groups


def run_suite(name: str, settings: VerifySettings, executor=None) -> SuiteReport:
    """Run one suite; results do not depend on the executor or worker count."""
    suite = name.lower()
    if suite not in SUITE_NAMES:
        raise ConfigError(f"unknown suite {name!r}; use one of {', '.join(SUITE_NAMES)}")
    settings.validate()
    started = now()
    log.info("[SUITE] %s: starting (seed %d, r %d..%d)", suite, settings.seed, settings.r_min,
             settings.r_max)
    groups = _plan(suite, settings)
    flat = [task for _, _, _, tasks in groups for task in tasks]
    if executor is not None:
        partials = list(executor.map(_run_task, flat))
    else:
        partials = [_run_task(task) for task in flat]
    report = SuiteReport(suite)
    pos = 0
    for check, r, arg, tasks in groups:
        merged = Partial()
        for part in partials[pos : pos + len(tasks)]:
            merged.merge(part)
        pos += len(tasks)
        details = dict(merged.stats)
        if merged.examples:
            details["failing_samples"] = merged.examples
        result = CheckResult(
            _label(check, arg), r, merged.count, merged.failures, merged.worst,
            merged.failures == 0, details,
        )
        report.checks.append(result)
        log.debug("[CHECK] %s r=%s: %d/%d failed, worst %.3e", result.name, r, result.failures,
                  result.count, result.worst_residual)
    failed = sum(1 for c in report.checks if not c.passed)
    log.info("[SUITE] %s: %d check(s), %d failed, %.1fs", suite, len(report.checks), failed,
             now() - started)
    return report


def run_suites(names: list[str], settings: VerifySettings) -> list[SuiteReport]:
    if settings.threads > 1:
        with ProcessPoolExecutor(max_workers=settings.threads) as pool:
            return [run_suite(n, settings, pool) for n in names]
    return [run_suite(n, settings) for n in names]
