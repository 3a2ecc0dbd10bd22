# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""Single-shot query commands: check, invariants, semisimplify, orbit-eq, realize, b2."""

import argparse
import logging
import sys

import regex  # type: ignore

from .b2model import (
    b2_to_x,
    f_inverse,
    f_map,
    g_inverse,
    g_map,
    tangent_from_b2,
    z2_canonical,
)
from .config import BLOCK_SIZE, DEFAULT_TOL
from .documents import (
    TupleDocument,
    b2_to_json,
    build_report,
    dump_report,
    invariants_to_json,
    line_to_json,
    stratum_to_json,
)
from .errors import InconsistentClassification, InvalidParameter
from .generation import (
    StratumTag,
    classify,
    common_eigenline,
    friedland_generates,
    friedland_low_confidence,
    friedland_sides,
    generates_by_span,
)
from .helpers import blocks, read_input
from .invariants import B2Coords, b2_coords, compare_orbits, realize_b2, semisimplify, sibirskii
from .matrix import ALL_LINES, MatTuple, cayley_hamilton_residual
from .sampling import random_tangent_point, sample_rng, stream_id
from .scalar import Backend, GaussianRational, cabs, parse_fraction

log = logging.getLogger("matgen")

LOW_CONFIDENCE = "LOW_CONFIDENCE"
ROUNDTRIP_LIMIT = 1e-10

_exact_value_re = regex.compile(r"^\s*([^,\s]+)\s*(?:,\s*([^,\s]+)\s*)?$")


def _tol(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("tolerance must lie in (0, 1)")
    return value


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")
    sys.stdout.flush()


def _read_document(path: str) -> TupleDocument:
    source = "<stdin>" if path == "-" else path
    return TupleDocument.parse(read_input(path), source)


def parse_value(text: str, backend: Backend):
    """A scalar from the command line: 'p/q' or 'p/q,p/q' (exact), a Python complex literal (float)."""
    if backend is Backend.EXACT:
        m = _exact_value_re.match(text or "")
        if not m:
            raise InvalidParameter(f"exact values are 'p/q' or 'p/q,p/q', got {text!r}")
        return GaussianRational(parse_fraction(m.group(1)), parse_fraction(m.group(2) or "0"))
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise InvalidParameter(f"not a complex number: {text!r}")


def _eigenline_status(t: MatTuple, stratum, tol: float) -> dict:
    if t.backend is Backend.FLOAT:
        line = common_eigenline(t, tol)
    elif stratum.tag is StratumTag.GENERATING:
        line = None
    elif stratum.tag is StratumTag.EIGEN_SHARED:
        line = stratum.witness
    elif all(m.is_scalar() for m in t):
        line = ALL_LINES
    else:
        # commuting non-scalar exact tuples share a line that may leave Q(i)
        return {"status": "EXISTS", "line": None}
    if line is None:
        return {"status": "NONE", "line": None}
    if line is ALL_LINES:
        return {"status": "ALL_LINES", "line": None}
    return {"status": "LINE", "line": line_to_json(line)}


def cmd_check(args) -> int:
    doc = _read_document(args.file)
    t, tol = doc.mats, args.tol
    span = generates_by_span(t, tol)
    stratum = classify(t, tol)
    flags = []
    results = {
        "r": t.r,
        "scalar": t.backend.value,
        "generates": span.generates,
        "span_dim": span.span_dim,
        "stratum": stratum_to_json(stratum),
        "common_eigenline": _eigenline_status(t, stratum, tol),
    }
    residuals = {"cayley_hamilton": max(cayley_hamilton_residual(m) for m in t)}
    if t.r == 1:
        flags.append("SINGLE_MATRIX")
    if t.r == 2:
        lhs, rhs = friedland_sides(t[0], t[1])
        verdict = friedland_generates(t[0], t[1], tol)
        low = friedland_low_confidence(t[0], t[1], tol)
        if low:
            flags.append(LOW_CONFIDENCE)
        if verdict != span.generates and not low:
            raise InconsistentClassification(
                f"two-matrix criterion says generates={verdict}, span test says {span.generates}"
            )
        results["friedland"] = {"generates": verdict, "lhs": lhs, "rhs": rhs}
        residuals["friedland"] = cabs(lhs - rhs)
    log.info("[CHECK] r=%d %s, span dim %d", t.r, stratum.tag.value, span.span_dim)
    _emit(dump_report(build_report("check", {"tuple": doc.to_json(), "tol": tol}, results, residuals, flags)))
    return 0


def _traceless_pair(t: MatTuple, tol: float) -> bool:
    if t.r != 2:
        return False
    if t.backend is Backend.EXACT:
        return all(not m.trace() for m in t)
    return all(abs(m.trace()) <= tol * max(1.0, m.norm()) for m in t)


def cmd_invariants(args) -> int:
    doc = _read_document(args.file)
    t = doc.mats
    results = {"invariants": invariants_to_json(sibirskii(t))}
    if _traceless_pair(t, args.tol):
        coords = b2_coords(t, args.tol)
        results["b2"] = b2_to_json(coords)
        results["b2"]["on_quadric"] = coords.on_quadric(args.tol)
    _emit(dump_report(build_report("invariants", {"tuple": doc.to_json()}, results)))
    return 0


def cmd_semisimplify(args) -> int:
    doc = _read_document(args.file)
    _emit(TupleDocument(semisimplify(doc.mats, args.tol)).dumps())
    return 0


def cmd_orbit_eq(args) -> int:
    first, second = _read_document(args.file_a), _read_document(args.file_b)
    cmp = compare_orbits(first.mats, second.mats, args.tol)
    results = {"equivalent": cmp.equivalent, "deltas": cmp.deltas, "conjugator": cmp.conjugator}
    residuals = {"conjugator": cmp.residual} if cmp.residual is not None else {}
    inputs = {"a": first.to_json(), "b": second.to_json(), "tol": args.tol}
    log.info("[CHECK] orbit comparison: %s", "equivalent" if cmp.equivalent else "distinct")
    _emit(dump_report(build_report("orbit-eq", inputs, results, residuals, cmp.flags)))
    return 0


def _coords_from_args(args) -> B2Coords:
    backend = Backend.parse(args.backend)
    return B2Coords(
        parse_value(args.z1, backend), parse_value(args.z2, backend), parse_value(args.x, backend)
    )


def cmd_realize(args) -> int:
    _emit(TupleDocument(realize_b2(_coords_from_args(args))).dumps())
    return 0


def b2_roundtrip(seed: int, n: int, tol: float = DEFAULT_TOL) -> dict:
    """Worst residuals of the model maps over n seeded tangent points."""
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    worst = {"f_roundtrip": 0.0, "g_roundtrip": 0.0, "y_quadric": 0.0}
    z2_exact = True
    sid = stream_id("b2:roundtrip")
    for idx, _, count in blocks(n, BLOCK_SIZE):
        rng = sample_rng(seed, sid, idx)
        for _ in range(count):
            tp = random_tangent_point(rng)
            p = g_map(tp)
            vnorm2 = sum(c * c for c in tp.v)
            scale = max(1.0, abs(p.lam)) * (1.0 + p.y_norm2())
            back = f_inverse(f_map(p), tol)
            worst["f_roundtrip"] = max(worst["f_roundtrip"], back.distance(z2_canonical(p)) / scale)
            worst["g_roundtrip"] = max(
                worst["g_roundtrip"], g_inverse(p).distance(tp) / max(1.0, vnorm2 ** 0.5)
            )
            worst["y_quadric"] = max(worst["y_quadric"], abs(p.quadric_residual()) / (1 + vnorm2))
            z2_exact = z2_exact and f_map(p.negate()) == f_map(p)
    return {"samples": n, "max_residuals": worst, "z2_equivariance_exact": z2_exact}


def cmd_b2(args) -> int:
    if args.roundtrip:
        if args.seed is None:
            raise InvalidParameter("--roundtrip needs --seed")
        results = b2_roundtrip(args.seed, args.n, args.tol)
        worst = results["max_residuals"]
        passed = (
            worst["f_roundtrip"] <= ROUNDTRIP_LIMIT
            and worst["g_roundtrip"] <= ROUNDTRIP_LIMIT
            and worst["y_quadric"] <= 1e-12
            and results["z2_equivariance_exact"]
        )
        results["pass"] = passed
        log.info("[SAMPLE] b2 round trip over %d point(s): %s", args.n, "pass" if passed else "FAIL")
        inputs = {"n": args.n, "tol": args.tol}
        _emit(dump_report(build_report("b2", inputs, results, worst, seed=args.seed)))
        return 0 if passed else 1
    if args.z1 is None or args.z2 is None or args.x is None:
        raise InvalidParameter("b2 needs --roundtrip or all of --z1, --z2, --x")
    coords = _coords_from_args(args)
    tp = tangent_from_b2(coords, args.tol)
    results = {
        "coords": b2_to_json(coords),
        "x_coords": list(b2_to_x(coords).as_tuple()),
        "tangent": {"lambda": tp.lam, "u": list(tp.u), "v": list(tp.v)},
    }
    _emit(dump_report(build_report("b2", {"coords": b2_to_json(coords)}, results)))
    return 0


def register_query_commands(subparsers) -> None:
    p = subparsers.add_parser("check", help="Generation test, eigenline status and stratum of a tuple")
    p.add_argument("file", help="tuple document, or - for stdin")
    p.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    p.set_defaults(handler=cmd_check)

    p = subparsers.add_parser("invariants", help="Trace invariants (and B2 coordinates for traceless pairs)")
    p.add_argument("file")
    p.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    p.set_defaults(handler=cmd_invariants)

    p = subparsers.add_parser("semisimplify", help="Diagonal representative of a non-generating tuple")
    p.add_argument("file")
    p.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    p.set_defaults(handler=cmd_semisimplify)

    p = subparsers.add_parser("orbit-eq", help="Compare the conjugation orbits of two tuples")
    p.add_argument("file_a", metavar="fileA")
    p.add_argument("file_b", metavar="fileB")
    p.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    p.set_defaults(handler=cmd_orbit_eq)

    p = subparsers.add_parser("realize", help="A traceless pair with the given (z1, z2, x)")
    p.add_argument("--z1", required=True)
    p.add_argument("--z2", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--backend", default=Backend.FLOAT.value, choices=[b.value for b in Backend])
    p.set_defaults(handler=cmd_realize)

    p = subparsers.add_parser("b2", help="Tangent-model coordinates of a point, or seeded round trips")
    p.add_argument("--roundtrip", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--z1")
    p.add_argument("--z2")
    p.add_argument("--x")
    p.add_argument("--backend", default=Backend.FLOAT.value, choices=[b.value for b in Backend])
    p.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    p.set_defaults(handler=cmd_b2)
