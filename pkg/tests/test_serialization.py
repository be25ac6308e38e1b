import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toeplitz_positivity import ComplexCanonicalMap, QuadraticWeight, Status, map_positivity
from toeplitz_positivity.errors import DimensionMismatch, InvalidInput
from toeplitz_positivity.serialization import (
    canonical_json,
    parse_complex,
    parse_matrix,
    parse_symbol_exponent,
    parse_weight,
    to_jsonable,
)


def test_parse_complex_forms():
    assert parse_complex(2) == 2
    assert parse_complex([1.5, -2]) == 1.5 - 2j
    for bad in (True, "1", [1, 2, 3], [1, None], float("nan")):
        with pytest.raises(InvalidInput):
            parse_complex(bad)


def test_parse_matrix_and_weights():
    M = parse_matrix([[1, [0, 1]], [0, 2]])
    assert M.dtype == complex and M[0, 1] == 1j
    with pytest.raises(InvalidInput):
        parse_matrix([[1, 2], [3]])
    with pytest.raises(InvalidInput):
        parse_matrix([])
    with pytest.raises(DimensionMismatch):
        parse_weight({"A": [[0]], "L": [[1, 0], [0, 1]]})
    with pytest.raises(InvalidInput):
        parse_weight({"A": [[0]]})
    with pytest.raises(DimensionMismatch):
        parse_symbol_exponent({"Q1": [[0]], "Q2": [[1, 0], [0, 1]], "Q3": [[0]]})
    phi = parse_weight({"A": [[[0.1, 0.2]]], "L": [[2]]})
    assert phi.allclose(QuadraticWeight(np.array([[0.1 + 0.2j]]), np.array([[2.0]])))


def test_to_jsonable_types():
    out = to_jsonable({"b": np.bool_(True), "s": Status.NOT_POSITIVE, "z": 1 - 2j, "a": np.arange(2), "i": np.int64(3)})
    assert out == {"b": True, "s": "NotPositive", "z": [1.0, -2.0], "a": [0, 1], "i": 3}
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_verdict_round_trip():
    v = map_positivity(ComplexCanonicalMap.diagonal([0.6]), QuadraticWeight.model(1), QuadraticWeight.model(1))
    text = canonical_json(to_jsonable({"verdict": v}))
    doc = json.loads(text)
    assert doc["verdict"]["status"] == "NotPositive" and doc["verdict"]["min_eigenvalue"] < 0
    assert canonical_json(doc) == text


def test_canonical_json_normalizes():
    assert canonical_json({"b": -0.0, "a": float("inf")}) == canonical_json({"a": None, "b": 0.0})
    assert json.loads(canonical_json({"x": 0.1})) == {"x": 0.1}


finite = st.floats(allow_nan=False, allow_infinity=False)
values = st.recursive(
    st.none() | st.booleans() | st.integers(-(10**6), 10**6) | finite | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=4), inner, max_size=4),
    max_leaves=20,
)


@given(values)
def test_canonical_json_round_trip(obj):
    text = canonical_json(obj)
    assert canonical_json(json.loads(text)) == text
