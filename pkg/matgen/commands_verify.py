# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""Seeded batch commands: verify and sample."""

import collections
import contextlib
import logging
import sys
from dataclasses import asdict, replace

from .config import DEFAULT_TOL, SUITE_NAMES, VerifySettings, load_settings_file
from .documents import TupleDocument, build_report, dump_report
from .errors import DocumentError
from .generation import StratumTag, classify
from .helpers import now
from .sampling import Distribution, sample_tuples
from .suites import run_suites

log = logging.getLogger("matgen")


def settings_from_args(args) -> VerifySettings:
    """File values first, then flags; unset flags leave the file or default value."""
    settings = VerifySettings()
    if args.config:
        settings = load_settings_file(args.config, settings)
    if args.samples is not None:
        settings = settings.with_samples(args.samples)
    overrides = {
        name: getattr(args, name)
        for name in ("r_min", "r_max", "threads", "tol")
        if getattr(args, name) is not None
    }
    return replace(settings, seed=args.seed, **overrides).validate()


def cmd_verify(args) -> int:
    settings = settings_from_args(args)
    names = list(SUITE_NAMES) if args.suite == "all" else [args.suite]
    reports = run_suites(names, settings)
    passed = all(r.passed for r in reports)
    inputs = asdict(settings)
    # worker count changes wall time only, so it stays out of the digest
    inputs.pop("threads")
    inputs["suites"] = names
    failing = [f"{r.name}:{c.name}" for r in reports for c in r.checks if not c.passed]
    results = {"pass": passed, "suites": [r.to_json() for r in reports], "failing": failing}
    _write(dump_report(build_report("verify", inputs, results, seed=settings.seed)))
    if not passed:
        log.error("[SUITE] %d failing check(s): %s", len(failing), ", ".join(failing[:10]))
    return 0 if passed else 1


def _write(text: str, stream=None) -> None:
    out = stream or sys.stdout
    out.write(text + "\n")
    out.flush()


@contextlib.contextmanager
def _open_output(path: str):
    if path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"cannot write {path}: {e}") from e
    with fh:
        yield fh


def cmd_sample(args) -> int:
    dist = Distribution.parse(args.dist)
    started = now()
    counts = collections.Counter()
    try:
        with _open_output(args.out) as out:
            for t in sample_tuples(args.r, args.n, dist, args.seed):
                out.write(TupleDocument(t).dumps() + "\n")
                counts[classify(t, args.tol).tag.value] += 1
    except OSError as e:
        raise DocumentError(f"cannot write {args.out}: {e}") from e
    frequencies = {tag.value: counts.get(tag.value, 0) for tag in StratumTag}
    results = {"documents": args.n, "strata": frequencies, "out": args.out}
    inputs = {"r": args.r, "n": args.n, "dist": dist.value, "tol": args.tol}
    report = dump_report(build_report("sample", inputs, results, seed=args.seed))
    # with documents on stdout the summary goes to stderr
    _write(report, sys.stderr if args.out == "-" else sys.stdout)
    log.info("[SAMPLE] %d tuple(s) r=%d %s in %.1fs", args.n, args.r, dist.value, now() - started)
    return 0


def register_verify_commands(subparsers) -> None:
    p = subparsers.add_parser("verify", help="Run verification suites and print a report")
    p.add_argument("--suite", default="all", choices=list(SUITE_NAMES) + ["all"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--r-min", dest="r_min", type=int)
    p.add_argument("--r-max", dest="r_max", type=int)
    p.add_argument("--samples", type=int, help="override every sampled-check count")
    p.add_argument("--threads", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--config", help="JSONC file of suite settings")
    p.set_defaults(handler=cmd_verify)

    p = subparsers.add_parser("sample", help="Write seeded random tuple documents as NDJSON")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", default=Distribution.GAUSSIAN.value,
                   choices=[d.value for d in Distribution])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-", help="output path, or - for stdout")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(handler=cmd_sample)
