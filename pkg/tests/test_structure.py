import numpy as np
import pytest

from demonic.counterexamples import gen_sn
from demonic.errors import FormatError
from demonic.structure import (
    FinStructure,
    adjoin_identity,
    parse_structure,
    serialize_structure,
    validate,
)

ONE = FinStructure(("a",), np.array([[True]]), np.array([[0]]))


def two(leq_pairs, comp_flat):
    leq = np.zeros((2, 2), dtype=bool)
    for a, b in leq_pairs:
        leq[a, b] = True
    comp = np.array(comp_flat).reshape(2, 2)
    return FinStructure(("a", "b"), leq, comp)


def test_validate_gen_sn():
    assert validate(gen_sn(2)).is_valid


def test_validate_antisymmetry_witness():
    s = two([(0, 0), (1, 1), (0, 1), (1, 0)], [0, 0, 0, 0])
    d = validate(s)
    assert d.status == "not_partial_order"
    assert d.detail == "antisymmetry"
    assert d.witness == ("a", "b")


def test_validate_reflexivity_and_transitivity():
    s = two([(0, 0)], [0, 0, 0, 0])
    d = validate(s)
    assert (d.status, d.detail, d.witness) == ("not_partial_order", "reflexivity", ("b", "b"))
    leq = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]], dtype=bool)
    s3 = FinStructure(("a", "b", "c"), leq, np.zeros((3, 3), dtype=int))
    d = validate(s3)
    assert (d.status, d.detail, d.witness) == ("not_partial_order", "transitivity", ("a", "b", "c"))


def test_validate_associativity_witness():
    # a*a=b, a*b=a, b*_=b: (a*a)*a = b*a = b, a*(a*a) = a*b = a
    s = two([(0, 0), (1, 1)], [1, 0, 1, 1])
    d = validate(s)
    assert (d.status, d.detail, d.witness) == ("not_associative", "associativity", ("a", "a", "a"))


def test_adjoin_identity_one_element():
    sp = adjoin_identity(ONE)
    assert sp.elements == ("a", "e")
    assert sp.leq.tolist() == [[True, False], [False, True]]
    assert sp.comp.tolist() == [[0, 0], [0, 1]]


def test_adjoin_identity_gen_sn_size():
    for n in (0, 1, 2):
        s = gen_sn(n)
        assert adjoin_identity(s).size == 3 + 3 * (1 + 2**n) + 1


def test_adjoin_identity_laws(corpus_le2):
    for s in corpus_le2:
        sp = adjoin_identity(s)
        assert validate(sp).is_valid
        e = sp.size - 1
        for x in range(sp.size):
            assert sp.comp[e, x] == x and sp.comp[x, e] == x
        for x in range(s.size):
            assert not sp.leq[x, e] and not sp.leq[e, x]
        assert sp.leq[e, e]
        assert np.array_equal(sp.leq[: s.size, : s.size], s.leq)
        assert np.array_equal(sp.comp[: s.size, : s.size], s.comp)


def test_adjoin_identity_fresh_name():
    s = FinStructure(("e",), np.array([[True]]), np.array([[0]]))
    sp = adjoin_identity(s)
    assert sp.elements == ("e", "e_")


def test_serialize_parse_round_trip(sn2):
    text = serialize_structure(sn2)
    again = parse_structure(text)
    assert again == sn2
    assert serialize_structure(again) == text


def test_parse_one_element_fixture(tmp_path):
    text = serialize_structure(ONE)
    s = parse_structure(text)
    assert s.size == 1 and s.elements == ("a",)


def test_parse_empty_structure():
    s = parse_structure('{"elements": [], "leq": [], "comp": {}}')
    assert s.size == 0
    assert validate(s).is_valid


def test_parse_errors():
    with pytest.raises(FormatError):
        parse_structure('{"elements": ["a"], "leq": [["a","zz"]], "comp": {"a": {"a": "a"}}}')
    with pytest.raises(FormatError):
        parse_structure('{"elements": ["a","b"], "leq": [], "comp": {"a": {"a": "a"}}}')
    with pytest.raises(FormatError):
        parse_structure('{"elements": ["a","a"], "leq": [], "comp": {}}')
    with pytest.raises(FormatError):
        parse_structure("not json")
    with pytest.raises(FormatError):
        parse_structure('{"elements": ["a"], "leq": []}')


def test_construction_invariants():
    with pytest.raises(FormatError):
        FinStructure(("a", ""), np.eye(2, dtype=bool), np.zeros((2, 2), dtype=int))
    with pytest.raises(FormatError):
        FinStructure(("a",), np.eye(1, dtype=bool), np.array([[4]]))
    with pytest.raises(FormatError):
        FinStructure(("a",), np.eye(2, dtype=bool), np.array([[0]]))
