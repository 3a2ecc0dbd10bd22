# This software is licensed under NNCL v1.4 see LICENSE.md for more info
import json
import math

import jsonschema  # type: ignore
import numpy as np
import pytest
from conftest import gr

from matgen.documents import (
    TupleDocument,
    build_report,
    canonical_dumps,
    decode_scalar,
    dump_report,
    encode_scalar,
    invariants_to_json,
    json_safe,
    line_to_json,
    loads,
)
from matgen.errors import DocumentError, WrongArity
from matgen.generation import StratumTag
from matgen.invariants import sibirskii
from matgen.matrix import ALL_LINES, ProjLine
from matgen.scalar import Backend

SWAP_TEXT = """{
  "scalar": "float64",
  "r": 2,
  "matrices": [
    [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
    [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
  ]
}"""


def test_parse_float_document(swap_pair, document_schema):
    doc = TupleDocument.parse(SWAP_TEXT)
    assert doc.backend is Backend.FLOAT
    assert doc.r == 2
    assert doc.mats == swap_pair
    jsonschema.validate(doc.to_json(), document_schema)


def test_canonical_text_is_stable(swap_pair, exact_swap_pair, document_schema):
    for t in (swap_pair, exact_swap_pair):
        text = TupleDocument(t).dumps()
        assert TupleDocument.parse(text).dumps() == text
        assert "\n" not in text and ": " not in text
        jsonschema.validate(json.loads(text), document_schema)


def test_exact_entries_keep_rationals():
    text = (
        '{"matrices":[[[{"im":"-1/3","re":"2/4"},{"re":"0"}],[{"re":"0"},{"im":"1","re":"1"}]]],'
        '"r":1,"scalar":"gaussian-rational"}'
    )
    doc = TupleDocument.parse(text)
    m = doc.mats[0]
    assert m.a == gr("1/2", "-1/3")
    assert m.d == gr(1, 1)
    assert encode_scalar(m.a) == {"re": "1/2", "im": "-1/3"}


@pytest.mark.parametrize(
    "text",
    [
        "[]",
        '{"scalar": "float64", "r": 1}',
        '{"scalar": "float64", "r": 1, "matrices": [], "extra": 1}',
        '{"scalar": "float32", "r": 1, "matrices": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}',
        '{"scalar": "float64", "r": 0, "matrices": []}',
        '{"scalar": "float64", "r": true, "matrices": []}',
        '{"scalar": "float64", "r": 1, "matrices": [[[[1,0],[0,0]]]]}',
        '{"scalar": "float64", "r": 1, "matrices": [[[[1,0],[0,0]],[[0,0],[1]]]]}',
        '{"scalar": "float64", "r": 1, "matrices": [[[[1,0],[0,0]],[[0,0],[NaN,0]]]]}',
        '{"scalar": "float64", "r": 1, "matrices": [[[[1,0],[0,0]],[[0,0],[true,0]]]]}',
        '{"scalar": "gaussian-rational", "r": 1, "matrices": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}',
        '{"scalar": "gaussian-rational", "r": 1, "matrices": [[[{"re":"1/0"},{"re":"0"}],[{"re":"0"},{"re":"1"}]]]}',
    ],
)
def test_malformed_documents(text):
    with pytest.raises(DocumentError):
        TupleDocument.parse(text)


def test_arity_mismatch_is_its_own_error():
    with pytest.raises(WrongArity) as e:
        TupleDocument.parse('{"scalar": "float64", "r": 2, "matrices": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}')
    assert e.value.exit_code == 2


def test_syntax_errors_carry_position():
    with pytest.raises(DocumentError, match=r"doc\.json: line 3 column"):
        loads('{\n  "scalar": "float64",\n  "r": ,\n}', "doc.json")


def test_decode_scalar():
    assert decode_scalar([1, -2.5], Backend.FLOAT) == 1 - 2.5j
    assert decode_scalar({"re": "3"}, Backend.EXACT) == gr(3)
    with pytest.raises(DocumentError):
        decode_scalar({"re": 3}, Backend.EXACT)
    with pytest.raises(DocumentError):
        decode_scalar({"re": "1", "phase": "0"}, Backend.EXACT)


def test_line_encoding():
    assert line_to_json(None) is None
    assert line_to_json(ALL_LINES) == "ALL_LINES"
    assert line_to_json(ProjLine.of(2, 1)) == [[1.0, 0.0], [0.5, 0.0]]


def test_invariant_keys(swap_pair):
    inv = invariants_to_json(sibirskii(swap_pair))
    assert inv["t11"] == {"1,2": [0.0, 0.0]}
    assert inv["t2"] == [[2.0, 0.0], [2.0, 0.0]]


def test_json_safe():
    value = {
        "inf": math.inf,
        "tags": {"b", "a"},
        "z": 1j,
        "tag": StratumTag.COMMUTING,
        "np": np.float64(0.25),
        "count": np.int64(3),
        1: (True, None),
    }
    assert json_safe(value) == {
        "inf": None, "tags": ["a", "b"], "z": [0.0, 1.0], "tag": "COMMUTING", "np": 0.25,
        "count": 3, "1": [True, None],
    }
    with pytest.raises(TypeError):
        json_safe(object())


def test_report_is_schema_valid_and_digest_stable(report_schema):
    inputs = {"tol": 1e-9, "tuple": {"r": 1}}
    a = build_report("check", inputs, {"ok": 1j}, {"x": 0.5}, ["B", "A", "B"])
    b = build_report("check", dict(reversed(list(inputs.items()))), {"ok": 1j})
    assert a["inputs_digest"] == b["inputs_digest"]
    assert a["flags"] == ["A", "B"]
    assert a["seed"] is None
    jsonschema.validate(json.loads(dump_report(a)), report_schema)
    assert canonical_dumps({"b": 1, "a": [1.5]}) == '{"a":[1.5],"b":1}'
