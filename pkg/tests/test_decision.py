import json

import numpy as np
import pytest

from demonic.counterexamples import gen_sn
from demonic.decision import (
    InvalidStructure,
    NotRepresentable,
    Representable,
    certificate_to_json,
    check_sigma,
    decide,
    load_certificate,
    min_sigma_stage,
)
from demonic.errors import CertificateError
from demonic.predicates import check_derivation, compute_fixpoint
from demonic.relcore import Relation
from demonic.repbuilder import Representation, verify
from demonic.structure import FinStructure

ONE = FinStructure(("a",), np.array([[True]]), np.array([[0]]))


def test_one_element_representable():
    cert = decide(ONE)
    assert isinstance(cert, Representable)
    assert cert.representation.base_size <= 8
    assert verify(ONE, cert.representation).passed


def test_check_sigma_examples(sn2):
    f = compute_fixpoint(ONE)
    assert check_sigma(ONE, f) is None
    assert min_sigma_stage(ONE, f) is None
    f2 = compute_fixpoint(sn2)
    viol = check_sigma(sn2, f2)
    assert viol is not None
    a, b = viol
    assert sn2.elements[a] == "a0b" and sn2.elements[b] == "a1c"
    assert min_sigma_stage(sn2, f2) == 3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gen_sn_not_representable(n):
    s = gen_sn(n)
    cert = decide(s)
    assert isinstance(cert, NotRepresentable)
    big_n = 1 + 2**n
    assert s.elements[cert.a].endswith("b")
    assert s.elements[cert.b].endswith("c")
    assert n <= cert.min_violated_stage <= n + 1
    assert check_derivation(s, cert.black_derivation)
    assert check_derivation(s, cert.tri_derivation)
    # witness pair follows the family pattern a_ib vs a_{i+1}c
    i = int(s.elements[cert.a][1:-1])
    assert s.elements[cert.b] == f"a{(i + 1) % big_n}c"


def test_corpus_refutations_carry_replayable_witnesses(corpus3):
    seen = 0
    for s in corpus3:
        if seen >= 40:
            break
        try:
            cert = decide(s)
        except RuntimeError:
            continue
        if isinstance(cert, NotRepresentable):
            seen += 1
            assert check_derivation(s, cert.black_derivation)
            assert check_derivation(s, cert.tri_derivation)
            assert not s.leq[cert.a, cert.b]
    assert seen == 40


def test_invalid_structure():
    leq = np.array([[1, 1], [1, 1]], dtype=bool)
    s = FinStructure(("a", "b"), leq, np.zeros((2, 2), dtype=int))
    cert = decide(s)
    assert isinstance(cert, InvalidStructure)
    assert cert.diagnostics.detail == "antisymmetry"


def test_certificate_round_trip_not_representable(sn2):
    cert = decide(sn2)
    text = certificate_to_json(sn2, cert)
    s2, cert2 = load_certificate(text)
    assert s2 == sn2
    assert isinstance(cert2, NotRepresentable)
    assert (cert2.a, cert2.b) == (cert.a, cert.b)
    assert cert2.min_violated_stage == cert.min_violated_stage


def test_certificate_round_trip_representable():
    cert = decide(ONE)
    text = certificate_to_json(ONE, cert)
    s2, cert2 = load_certificate(text)
    assert isinstance(cert2, Representable)
    assert cert2.representation.base_size == cert.representation.base_size


def test_certificate_round_trip_invalid():
    leq = np.array([[1, 1], [1, 1]], dtype=bool)
    s = FinStructure(("a", "b"), leq, np.zeros((2, 2), dtype=int))
    text = certificate_to_json(s, decide(s))
    _, cert2 = load_certificate(text)
    assert isinstance(cert2, InvalidStructure)


def test_tampered_certificates_rejected(sn2):
    cert = decide(sn2)
    obj = json.loads(certificate_to_json(sn2, cert))
    bad = dict(obj)
    bad["witness"] = {"a": "a0b", "b": "a0c"}  # ordered pair: not a violation
    with pytest.raises(CertificateError):
        load_certificate(json.dumps(bad))
    bad2 = json.loads(certificate_to_json(sn2, cert))
    bad2["black_derivation"]["clause"] = "geq"
    with pytest.raises(CertificateError):
        load_certificate(json.dumps(bad2))


# The four size-3 structures on which the pinned construction fails: the
# axiom schema holds, yet the built map misses refinement pairs (its
# correctness argument needs a closure property the predicates lack; see the
# derivation-stage suite).  Each is genuinely representable: exhaustive
# search produced the base-4 witnesses below, so the decision procedure must
# not call them non-representable either.  decide() surfaces the internal
# verification failure.
CONSTRUCTION_GAPS = [
    (
        [[1, 0, 0], [0, 1, 0], [1, 1, 1]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 2]],
        {
            "a": [(0, 0), (0, 2), (1, 0), (1, 2)],
            "b": [(0, 0), (0, 2), (1, 0), (1, 3)],
            "c": [(0, 0), (1, 0), (2, 2), (3, 2)],
        },
    ),
    (
        [[1, 0, 0], [0, 1, 0], [1, 1, 1]],
        [[0, 0, 0], [0, 0, 0], [2, 2, 2]],
        {
            "a": [(0, 0), (1, 1), (2, 0), (2, 1), (3, 0)],
            "b": [(0, 0), (1, 1), (2, 1), (2, 3), (3, 0)],
            "c": [(0, 0), (1, 1), (2, 1), (3, 0)],
        },
    ),
    (
        [[1, 0, 0], [1, 1, 0], [1, 1, 1]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 2]],
        {
            "a": [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)],
            "b": [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1)],
            "c": [(0, 0), (1, 0), (1, 1), (1, 2), (2, 0)],
        },
    ),
    (
        [[1, 0, 0], [1, 1, 0], [1, 1, 1]],
        [[0, 0, 0], [0, 0, 0], [2, 2, 2]],
        {
            "a": [(0, 0), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)],
            "b": [(0, 0), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1)],
            "c": [(0, 0), (1, 0), (1, 1), (1, 2), (2, 0)],
        },
    ),
]


def gap_structure(leq, comp):
    return FinStructure(("a", "b", "c"), np.array(leq, dtype=bool), np.array(comp))


@pytest.mark.parametrize("case", range(len(CONSTRUCTION_GAPS)))
def test_construction_gap_structures(case):
    leq, comp, witness = CONSTRUCTION_GAPS[case]
    s = gap_structure(leq, comp)
    f = compute_fixpoint(s)
    assert check_sigma(s, f) is None  # schema holds
    rep = Representation(
        structure=s,
        base_size=4,
        points=None,
        rels={k: Relation.from_pairs(4, v) for k, v in witness.items()},
    )
    assert verify(s, rep).passed  # representable, by independent witness
    with pytest.raises(RuntimeError):
        decide(s)  # pinned construction cannot certify it
