# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
JSON codecs for tuple documents and reports.

FLOAT entries are [re, im] number pairs; EXACT entries are
{"re": "p/q", "im": "p/q"} objects so no float ever touches a rational.
Canonical documents are compact with sorted keys, which makes
parse-then-serialize the identity on them.
"""

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional, Union

from . import SCHEMA_VERSION, __version__
from .errors import DocumentError, InputError, WrongArity
from .generation import Stratum, Word
from .helpers import sha256_digest, utc_timestamp
from .invariants import B2Coords, SibInvariants
from .matrix import Mat2, MatTuple, ProjLine, _AllLines
from .scalar import Backend, GaussianRational, Scalar, format_fraction

_FLOAT_TYPES = (int, float)


def encode_scalar(x: Scalar):
    if isinstance(x, GaussianRational):
        return {"re": format_fraction(x.re), "im": format_fraction(x.im)}
    x = complex(x)
    return [x.real, x.imag]


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, _FLOAT_TYPES):
        raise DocumentError(f"{where}: expected a number, got {v!r}")
    f = float(v)
    if not math.isfinite(f):
        raise DocumentError(f"{where}: non-finite number")
    return f


def decode_scalar(v, backend: Backend, where: str = "entry") -> Scalar:
    if backend is Backend.FLOAT:
        if not isinstance(v, list) or len(v) != 2:
            raise DocumentError(f"{where}: float64 entries are [re, im] pairs, got {v!r}")
        return complex(_number(v[0], where), _number(v[1], where))
    if not isinstance(v, dict) or set(v) - {"re", "im"} or "re" not in v:
        raise DocumentError(f'{where}: gaussian-rational entries are {{"re": "p/q", "im": "p/q"}}')
    re_text, im_text = v["re"], v.get("im", "0")
    if not isinstance(re_text, str) or not isinstance(im_text, str):
        raise DocumentError(f"{where}: rational parts must be strings")
    try:
        return GaussianRational.parse(re_text, im_text)
    except InputError as e:
        raise DocumentError(f"{where}: {e}") from e


def _reject_constant(name: str):
    raise DocumentError(f"non-finite number {name} is not allowed")


def loads(text: str, source: str = "<input>"):
    """json.loads with position-bearing DocumentError messages."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from e


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True)
class TupleDocument:
    """A MatTuple with its declared backend, as read from or written to JSON."""

    mats: MatTuple

    @property
    def backend(self) -> Backend:
        return self.mats.backend

    @property
    def r(self) -> int:
        return self.mats.r

    @classmethod
    def from_json(cls, obj) -> "TupleDocument":
        if not isinstance(obj, dict):
            raise DocumentError("a tuple document is a JSON object")
        missing = {"scalar", "r", "matrices"} - set(obj)
        if missing:
            raise DocumentError(f"missing field(s): {', '.join(sorted(missing))}")
        extra = set(obj) - {"scalar", "r", "matrices"}
        if extra:
            raise DocumentError(f"unknown field(s): {', '.join(sorted(extra))}")
        try:
            backend = Backend.parse(obj["scalar"])
        except InputError as e:
            raise DocumentError(str(e)) from e
        r, mats = obj["r"], obj["matrices"]
        if isinstance(r, bool) or not isinstance(r, int) or r < 1:
            raise DocumentError(f"r must be a positive integer, got {r!r}")
        if not isinstance(mats, list):
            raise DocumentError("matrices must be a list")
        if len(mats) != r:
            raise WrongArity(f"document declares r = {r} but lists {len(mats)} matrices")
        out = []
        for k, m in enumerate(mats, start=1):
            square = isinstance(m, list) and len(m) == 2
            if not (square and all(isinstance(row, list) and len(row) == 2 for row in m)):
                raise DocumentError(f"matrix {k} is not a 2x2 array")
            entries = [
                decode_scalar(m[i][j], backend, f"matrix {k} entry ({i + 1},{j + 1})")
                for i in range(2)
                for j in range(2)
            ]
            out.append(Mat2(*entries))
        return cls(MatTuple(tuple(out)))

    @classmethod
    def parse(cls, text: str, source: str = "<input>") -> "TupleDocument":
        return cls.from_json(loads(text, source))

    def to_json(self) -> dict:
        return {
            "scalar": self.backend.value,
            "r": self.r,
            "matrices": [[[encode_scalar(x) for x in row] for row in m.rows()] for m in self.mats],
        }

    def dumps(self) -> str:
        return canonical_dumps(self.to_json())


def line_to_json(line: Union[ProjLine, _AllLines, None]):
    if line is None:
        return None
    if isinstance(line, _AllLines):
        return "ALL_LINES"
    return [encode_scalar(line.p), encode_scalar(line.q)]


def stratum_to_json(s: Stratum) -> dict:
    witness = s.witness
    if isinstance(witness, tuple):
        encoded = [str(w) for w in witness if isinstance(w, Word)]
    else:
        encoded = line_to_json(witness)
    return {"tag": s.tag.value, "witness": encoded}


def invariants_to_json(inv: SibInvariants) -> dict:
    return {
        "r": inv.r,
        "t1": [encode_scalar(x) for x in inv.t1],
        "t2": [encode_scalar(x) for x in inv.t2],
        "t11": {f"{i},{j}": encode_scalar(v) for (i, j), v in sorted(inv.t11.items())},
        "t111": {
            f"{i},{j},{k}": encode_scalar(v) for (i, j, k), v in sorted(inv.t111.items())
        },
    }


def b2_to_json(c: B2Coords) -> dict:
    return {"z1": encode_scalar(c.z1), "z2": encode_scalar(c.z2), "x": encode_scalar(c.x)}


def json_safe(obj):
    """Plain JSON values: non-finite floats become null, scalars are encoded."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [json_safe(v) for v in items]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (complex, GaussianRational)):
        return encode_scalar(obj)
    if isinstance(obj, Mat2):
        return [[encode_scalar(x) for x in row] for row in obj.rows()]
    if isinstance(obj, MatTuple):
        return TupleDocument(obj).to_json()
    if hasattr(obj, "item"):
        return json_safe(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_report(
    command: str,
    inputs,
    results: dict,
    residuals: Optional[dict] = None,
    flags=(),
    seed: Optional[int] = None,
) -> dict:
    """A schema-versioned report; only the timestamp varies between identical runs."""
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "inputs_digest": sha256_digest(canonical_dumps(json_safe(inputs))),
        "results": json_safe(results),
        "residuals": json_safe(residuals or {}),
        "flags": sorted(set(flags)),
        "seed": seed,
        "timestamp": utc_timestamp(),
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
