import json
import random

import pytest

from demonic.errors import DimensionError, FormatError
from demonic.relcore import (
    PointSet,
    Relation,
    compose,
    demonic_compose,
    demonic_join,
    demonic_meet,
    demonic_refines,
    dom,
    parse_relation,
    relation_to_json,
    restrict,
    saturate_infinity,
)


def rel(n, *pairs):
    return Relation.from_pairs(n, pairs)


def test_compose_examples():
    assert compose(rel(3, (0, 1)), rel(3, (1, 2))) == rel(3, (0, 2))
    assert compose(Relation.empty(3), rel(3, (0, 1), (2, 2))) == Relation.empty(3)
    assert compose(rel(3, (0, 1), (0, 2)), rel(3, (1, 1), (2, 0))) == rel(3, (0, 1), (0, 0))


def test_dom_examples():
    assert dom(Relation.empty(2)) == PointSet(2, 0)
    assert dom(rel(3, (0, 1), (0, 2))).members() == [0]
    assert dom(rel(3, (0, 1), (2, 2))).members() == [0, 2]


def test_restrict_examples():
    assert restrict(rel(2, (0, 1), (1, 0)), PointSet.from_points(2, [0])) == rel(2, (0, 1))
    r = rel(3, (0, 1), (1, 0), (2, 2))
    assert restrict(r, PointSet.full(3)) == r
    assert restrict(rel(2, (0, 1), (1, 0), (1, 1)), PointSet.from_points(2, [1])) == rel(
        2, (1, 0), (1, 1)
    )


def test_refines_examples():
    for r in (Relation.empty(3), rel(3, (0, 1)), Relation.full(3)):
        assert demonic_refines(r, Relation.empty(3))
    assert demonic_refines(rel(3, (0, 1), (1, 0)), rel(3, (0, 1), (0, 2)))
    assert not demonic_refines(rel(3, (0, 1)), rel(3, (1, 1)))


def test_demonic_compose_examples():
    assert demonic_compose(rel(3, (0, 1)), rel(3, (1, 2))) == rel(3, (0, 2))
    assert demonic_compose(rel(3, (0, 1), (0, 2)), rel(3, (1, 1))) == Relation.empty(3)
    assert demonic_compose(rel(3, (0, 1), (2, 0)), Relation.empty(3)) == Relation.empty(3)


def test_demonic_join_examples():
    r = rel(3, (0, 1), (1, 2))
    assert demonic_join(r, r) == r
    assert demonic_join(rel(3, (0, 1)), rel(3, (1, 2))) == Relation.empty(3)
    assert demonic_join(rel(3, (0, 1), (1, 1)), rel(3, (0, 2))) == rel(3, (0, 1), (0, 2))


def test_demonic_meet_examples():
    r = rel(3, (0, 1), (2, 0))
    assert demonic_meet(r, r) == r
    assert demonic_meet(rel(3, (0, 1)), rel(3, (1, 2))) == rel(3, (0, 1), (1, 2))
    assert demonic_meet(rel(3, (0, 1)), rel(3, (0, 2))) == Relation.empty(3)


def test_saturate_examples():
    assert saturate_infinity(Relation.empty(2)) == Relation.empty(3)
    assert saturate_infinity(rel(2, (0, 1))) == rel(3, (0, 1), (0, 2))
    assert saturate_infinity(rel(1, (0, 0))) == rel(2, (0, 0), (0, 1))


def test_saturate_appends_sink_even_for_empty_domain_rows():
    r = saturate_infinity(rel(3, (1, 0)))
    assert r.base_size == 4
    assert r.pairs() == [(1, 0), (1, 3)]


def test_dimension_errors():
    with pytest.raises(DimensionError):
        compose(rel(2, (0, 1)), rel(3, (0, 1)))
    with pytest.raises(DimensionError):
        demonic_refines(rel(2, (0, 1)), rel(3, (0, 1)))
    with pytest.raises(DimensionError):
        restrict(rel(2, (0, 1)), PointSet.from_points(3, [0]))


def test_relation_invariants():
    with pytest.raises(ValueError):
        Relation.from_pairs(2, [(0, 2)])
    with pytest.raises(ValueError):
        Relation(2, 1 << 4)
    assert rel(2, (0, 1)) == rel(2, (0, 1))
    assert rel(2, (0, 1)) != rel(2, (1, 0))


def test_json_round_trip_and_sorting():
    r = rel(3, (2, 1), (0, 2), (0, 1))
    text = relation_to_json(r)
    assert json.loads(text)["pairs"] == [[0, 1], [0, 2], [2, 1]]
    assert parse_relation(text) == r
    with pytest.raises(FormatError):
        parse_relation('{"base": 2, "pairs": [[0, 5]]}')
    with pytest.raises(FormatError):
        parse_relation('{"base": 2}')


# Frozen regression cases: found by seeded random search (seed 12345, first
# hits); composition is not monotone for refinement on either side, so the
# suite must never assert monotonicity.
def test_left_monotonicity_fails_frozen():
    r = rel(3, (0, 1), (0, 2), (2, 2))
    s = rel(3, (2, 2))
    t = rel(3, (0, 0), (0, 2), (1, 0), (1, 2))
    assert demonic_refines(r, s)
    assert not demonic_refines(compose(t, r), compose(t, s))


def test_right_monotonicity_fails_frozen():
    r = rel(3, (1, 0), (2, 1))
    s = rel(3, (2, 1), (2, 2))
    t = rel(3, (0, 1), (2, 0))
    assert demonic_refines(r, s)
    assert not demonic_refines(compose(r, t), compose(s, t))


def test_refinement_partial_order_randomized():
    rng = random.Random(99)
    for _ in range(300):
        k = rng.randint(1, 5)
        a = Relation(k, rng.getrandbits(k * k) & rng.getrandbits(k * k))
        b = Relation(k, rng.getrandbits(k * k) & rng.getrandbits(k * k))
        assert demonic_refines(a, a)
        if demonic_refines(a, b) and demonic_refines(b, a):
            assert a == b
        j = demonic_join(a, b)
        assert demonic_refines(a, j) and demonic_refines(b, j)
        assert demonic_refines(a, b) == (demonic_join(a, b) == b)


def test_meet_glb_on_saturated_randomized():
    rng = random.Random(7)
    for _ in range(200):
        k = rng.randint(1, 4)
        a = saturate_infinity(Relation(k, rng.getrandbits(k * k)))
        b = saturate_infinity(Relation(k, rng.getrandbits(k * k)))
        m = demonic_meet(a, b)
        assert demonic_refines(m, a) and demonic_refines(m, b)
        t = saturate_infinity(Relation(k, rng.getrandbits(k * k) & rng.getrandbits(k * k)))
        if demonic_refines(t, a) and demonic_refines(t, b):
            assert demonic_refines(t, m)
