import json

import pytest

from padic_dga.dga import DegreeWindow, build_test_dga_C, tensor_acyclic_pair
from padic_dga.errors import AxiomError, ParseError
from padic_dga.serialize import parse_dga, parse_free_presentation, serialize_dga

W = DegreeWindow(-18, 16)


def test_round_trip_is_canonical_identity():
    C = build_test_dga_C(3, 4, W)
    text = serialize_dga(C)
    C2 = parse_dga(text)
    assert serialize_dga(C2) == text
    assert C2.labels(4) == ("x",)
    assert C2.diff_matrix(4).data.tolist() == [[3]]


def test_round_trip_perturbed_with_clips():
    T = tensor_acyclic_pair(build_test_dga_C(3, 4, W), 6)
    text = serialize_dga(T)
    T2 = parse_dga(text)
    assert serialize_dga(T2) == text
    assert T2.clipped == T.clipped


def test_provenance_comments_ignored():
    C = build_test_dga_C(3, 4, W)
    text = serialize_dga(C, provenance=["seed=1", "note"])
    assert text.startswith("# seed=1\n# note\n")
    assert serialize_dga(parse_dga(text)) == serialize_dga(C)


def test_malformed_text_rejected():
    with pytest.raises(ParseError):
        parse_dga("{not json")
    with pytest.raises(ParseError):
        parse_dga(json.dumps({"prime": 3}))


def test_wrong_prime_precision_rejected():
    C = build_test_dga_C(3, 4, W)
    text = serialize_dga(C)
    with pytest.raises(ParseError, match="prime"):
        parse_dga(text, expected_p=5)
    with pytest.raises(ParseError, match="precision"):
        parse_dga(text, expected_N=3)


def test_d_squared_fault_rejected_naming_degree():
    C = build_test_dga_C(3, 4, W)
    doc = json.loads(serialize_dga(C))
    # corrupt: make d(x^2) = e x (valuation 0) so d∘d != 0 cannot hide,
    # and Leibniz breaks; parse must reject
    for entry in doc["differential"]:
        if entry["degree"] == 8:
            entry["matrix"] = [[1]]
    with pytest.raises(AxiomError):
        parse_dga(json.dumps(doc))


def test_shape_mismatch_rejected():
    C = build_test_dga_C(3, 4, W)
    doc = json.loads(serialize_dga(C))
    doc["differential"][0]["matrix"] = [[1, 2]]
    with pytest.raises(ParseError, match="shape"):
        parse_dga(json.dumps(doc))


def test_empty_basis_file_is_trivial_dga():
    doc = {
        "prime": 3, "precision": 2,
        "window": {"min": -2, "max": 2},
        "basis": [{"degree": 0, "labels": ["1"]}],
        "differential": [],
        "product": [{"deg_a": 0, "idx_a": 0, "deg_b": 0, "idx_b": 0,
                     "result": [{"idx": 0, "coeff": 1}]}],
        "unit": {"degree": 0, "idx": 0},
    }
    A = parse_dga(json.dumps(doc))
    assert A.dim(0) == 1 and sum(A.dim(n) for n in A.basis) == 1


def test_free_presentation_shorthand():
    doc = {
        "generators": [
            {"name": "e", "degree": 3},
            {"name": "x", "degree": 4, "invertible": True},
        ],
        "differentials": [{"name": "x", "expression": "3*e"}],
    }
    A = parse_free_presentation(json.dumps(doc), 3, 4, W)
    assert A.labels(4) == ("x",)
    assert A.diff_matrix(4).data.tolist() == [[3]]
