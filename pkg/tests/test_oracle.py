import numpy as np
import pytest

from demonic import relcore
from demonic.counterexamples import gen_sn
from demonic.errors import PreconditionError, ResourceCapError
from demonic.oracle import brute_force_represent, law_suite
from demonic.relcore import Relation
from demonic.repbuilder import verify
from demonic.structure import FinStructure

ONE = FinStructure(("a",), np.array([[True]]), np.array([[0]]))
EMPTY = FinStructure((), np.zeros((0, 0), dtype=bool), np.zeros((0, 0), dtype=int))


def test_one_element_found_at_base_one():
    rep = brute_force_represent(ONE, 3)
    assert rep is not None
    assert rep.base_size == 1
    # first assignment in pair-count order passing verify: the empty relation
    # satisfies every law for a single idempotent element
    assert rep.rels["a"] == Relation.empty(1)
    assert verify(ONE, rep).passed


def test_empty_structure():
    rep = brute_force_represent(EMPTY, 3)
    assert rep is not None and rep.base_size == 0 and rep.rels == {}


def test_two_element_chain_searchable():
    leq = np.array([[1, 1], [0, 1]], dtype=bool)
    comp = np.array([[0, 0], [0, 1]])
    s = FinStructure(("a", "b"), leq, comp)
    rep = brute_force_represent(s, 3)
    assert rep is not None
    assert verify(s, rep).passed


def test_gen_sn2_exhausted_at_base_two():
    rep = brute_force_represent(gen_sn(2), 2, size_cap=18)
    assert rep is None


def test_caps():
    with pytest.raises(ResourceCapError):
        brute_force_represent(gen_sn(2), 2)  # default size cap is 3
    with pytest.raises(ResourceCapError):
        brute_force_represent(ONE, 5)  # default base cap is 3
    bad = FinStructure(
        ("a", "b"), np.array([[1, 1], [1, 1]], dtype=bool), np.zeros((2, 2), dtype=int)
    )
    with pytest.raises(PreconditionError):
        brute_force_represent(bad, 2)


def test_law_suite_clean():
    report = law_suite(seed=1, trials=200, max_base=6)
    assert report.passed
    assert report.checks > 0


def test_law_suite_empty():
    report = law_suite(seed=1, trials=0)
    assert report.passed and report.checks == 0 and report.trials == 0


def test_law_suite_deterministic():
    r1 = law_suite(seed=42, trials=100)
    r2 = law_suite(seed=42, trials=100)
    assert r1 == r2


def test_law_suite_flags_planted_bug():
    # demonic composition silently swapped for plain composition
    report = law_suite(seed=3, trials=200, ops={"demonic_compose": relcore.compose})
    assert not report.passed
    assert any(v.law == "demonic-compose-definition" for v in report.violations)


def test_law_suite_flags_broken_join():
    def bad_join(r, s):
        return relcore.Relation(r.base_size, r.bits | s.bits)  # forgot the restriction

    report = law_suite(seed=3, trials=300, ops={"demonic_join": bad_join})
    assert not report.passed
    laws = {v.law for v in report.violations}
    assert "join-definition" in laws or "join-upper-bound" in laws


def test_report_serialization():
    report = law_suite(seed=5, trials=20)
    obj = report.to_obj()
    assert obj["passed"] is True and obj["trials"] == 20
