"""Calculus of binary relations over a finite base.

A relation over base size n is stored as an n*n bitmask: bit x*n + y is set
iff the pair (x, y) is in the relation.  All operators are pure; values are
immutable and freely shareable.

Angelic operators: compose (;), dom, restrict.  Demonic operators: the
refinement predicate (demonic_refines), demonic composition (*), demonic
join, demonic meet, and the infinity-saturation that makes meets greatest
lower bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FormatError

__all__ = [
    "PointSet",
    "Relation",
    "compose",
    "dom",
    "restrict",
    "demonic_refines",
    "demonic_compose",
    "demonic_join",
    "demonic_meet",
    "saturate_infinity",
    "parse_relation",
    "relation_from_obj",
    "relation_to_json",
    "relation_to_obj",
]


@dataclass(frozen=True)
class Relation:
    """Immutable binary relation over base points 0..base_size-1."""

    base_size: int
    bits: int

    def __post_init__(self):
        n = self.base_size
        if n < 0:
            raise ValueError("base_size must be nonnegative")
        if self.bits < 0 or self.bits >> (n * n):
            raise ValueError("relation bits out of range for base size")

    @staticmethod
    def from_pairs(base_size: int, pairs) -> Relation:
        bits = 0
        for x, y in pairs:
            if not (0 <= x < base_size and 0 <= y < base_size):
                raise ValueError(f"pair ({x}, {y}) out of range for base {base_size}")
            bits |= 1 << (x * base_size + y)
        return Relation(base_size, bits)

    @staticmethod
    def empty(base_size: int) -> Relation:
        return Relation(base_size, 0)

    @staticmethod
    def identity(base_size: int) -> Relation:
        bits = 0
        for x in range(base_size):
            bits |= 1 << (x * base_size + x)
        return Relation(base_size, bits)

    @staticmethod
    def full(base_size: int) -> Relation:
        return Relation(base_size, (1 << (base_size * base_size)) - 1)

    @staticmethod
    def from_matrix(matrix) -> Relation:
        arr = np.asarray(matrix, dtype=bool)
        n = arr.shape[0]
        if arr.shape != (n, n):
            raise ValueError("relation matrix must be square")
        bits = 0
        for x, y in zip(*np.nonzero(arr)):
            bits |= 1 << (int(x) * n + int(y))
        return Relation(n, bits)

    def has(self, x: int, y: int) -> bool:
        n = self.base_size
        if not (0 <= x < n and 0 <= y < n):
            raise IndexError(f"point pair ({x}, {y}) out of range for base {n}")
        return bool((self.bits >> (x * n + y)) & 1)

    def pairs(self) -> list[tuple[int, int]]:
        """All pairs, sorted lexicographically."""
        n = self.base_size
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            i = low.bit_length() - 1
            out.append((i // n, i % n))
            bits ^= low
        return out

    def row(self, x: int) -> int:
        """Successor set of x as an n-bit mask."""
        n = self.base_size
        return (self.bits >> (x * n)) & ((1 << n) - 1)

    def to_matrix(self) -> np.ndarray:
        n = self.base_size
        out = np.zeros((n, n), dtype=bool)
        for x, y in self.pairs():
            out[x, y] = True
        return out

    def __repr__(self):
        return f"Relation({self.base_size}, {self.pairs()!r})"


@dataclass(frozen=True)
class PointSet:
    """Immutable subset of the base points 0..base_size-1."""

    base_size: int
    bits: int

    def __post_init__(self):
        if self.base_size < 0:
            raise ValueError("base_size must be nonnegative")
        if self.bits < 0 or self.bits >> self.base_size:
            raise ValueError("point set bits out of range for base size")

    @staticmethod
    def from_points(base_size: int, points) -> PointSet:
        bits = 0
        for x in points:
            if not (0 <= x < base_size):
                raise ValueError(f"point {x} out of range for base {base_size}")
            bits |= 1 << x
        return PointSet(base_size, bits)

    @staticmethod
    def full(base_size: int) -> PointSet:
        return PointSet(base_size, (1 << base_size) - 1)

    def members(self) -> list[int]:
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.base_size and bool((self.bits >> x) & 1)

    def __repr__(self):
        return f"PointSet({self.base_size}, {self.members()!r})"


def _check_same_base(r: Relation, s: Relation) -> int:
    if r.base_size != s.base_size:
        raise DimensionError(
            f"base sizes differ: {r.base_size} vs {s.base_size}"
        )
    return r.base_size


def _row_mask_from_sources(n: int, source_bits: int) -> int:
    """Mask selecting every pair whose source lies in source_bits."""
    full_row = (1 << n) - 1
    mask = 0
    bits = source_bits
    while bits:
        low = bits & -bits
        x = low.bit_length() - 1
        mask |= full_row << (x * n)
        bits ^= low
    return mask


def compose(r: Relation, s: Relation) -> Relation:
    """Relational composition: (x, y) iff some z has (x, z) in r and (z, y) in s."""
    n = _check_same_base(r, s)
    s_rows = [s.row(z) for z in range(n)]
    bits = 0
    for x in range(n):
        row = r.row(x)
        acc = 0
        while row:
            low = row & -row
            acc |= s_rows[low.bit_length() - 1]
            row ^= low
        bits |= acc << (x * n)
    return Relation(n, bits)


def dom(r: Relation) -> PointSet:
    """Set of points with at least one outgoing pair."""
    n = r.base_size
    bits = 0
    for x in range(n):
        if r.row(x):
            bits |= 1 << x
    return PointSet(n, bits)


def restrict(r: Relation, d: PointSet) -> Relation:
    """Keep exactly the pairs of r whose source lies in d."""
    if r.base_size != d.base_size:
        raise DimensionError(
            f"base sizes differ: {r.base_size} vs {d.base_size}"
        )
    n = r.base_size
    return Relation(n, r.bits & _row_mask_from_sources(n, d.bits))


def demonic_refines(r: Relation, s: Relation) -> bool:
    """r is refined by s: dom(s) is within dom(r) and r agrees with s there.

    The empty relation is the greatest element; the refinement order is the
    total-correctness order on nondeterministic programs.
    """
    n = _check_same_base(r, s)
    dom_r = dom(r).bits
    dom_s = dom(s).bits
    if dom_s & ~dom_r:
        return False
    restricted = r.bits & _row_mask_from_sources(n, dom_s)
    return not (restricted & ~s.bits)


def demonic_compose(r: Relation, s: Relation) -> Relation:
    """Composition keeping only sources all of whose r-successors can continue in s."""
    n = _check_same_base(r, s)
    dom_s = dom(s).bits
    good = 0
    for x in range(n):
        row = r.row(x)
        if row and not (row & ~dom_s):
            good |= 1 << x
    return restrict(compose(r, s), PointSet(n, good))


def demonic_join(r: Relation, s: Relation) -> Relation:
    """Union restricted to the common domain: the least upper bound for refinement."""
    n = _check_same_base(r, s)
    common = dom(r).bits & dom(s).bits
    return Relation(n, (r.bits | s.bits) & _row_mask_from_sources(n, common))


def demonic_meet(r: Relation, s: Relation) -> Relation:
    """Three-clause meet: r outside dom(s), the intersection, s outside dom(r).

    On arbitrary inputs this is just the formula; it is a greatest lower
    bound when both arguments are infinity-saturated.
    """
    n = _check_same_base(r, s)
    not_dom_s = ~dom(s).bits & ((1 << n) - 1)
    not_dom_r = ~dom(r).bits & ((1 << n) - 1)
    bits = (
        (r.bits & _row_mask_from_sources(n, not_dom_s))
        | (r.bits & s.bits)
        | (s.bits & _row_mask_from_sources(n, not_dom_r))
    )
    return Relation(n, bits)


def saturate_infinity(r: Relation) -> Relation:
    """Append a sink point reachable from every domain point.

    The new point is always index base_size, even when dom(r) is empty, so
    saturated families stay base-aligned.  The sink has no outgoing pairs.
    """
    n = r.base_size
    m = n + 1
    bits = 0
    for x in range(n):
        row = r.row(x)
        if row:
            row |= 1 << n
        bits |= row << (x * m)
    return Relation(m, bits)


def relation_to_obj(r: Relation) -> dict:
    return {"base": r.base_size, "pairs": [[x, y] for x, y in r.pairs()]}


def relation_to_json(r: Relation) -> str:
    return json.dumps(relation_to_obj(r), separators=(", ", ": "))


def relation_from_obj(obj) -> Relation:
    if not isinstance(obj, dict) or set(obj) != {"base", "pairs"}:
        raise FormatError('relation object must have exactly the keys "base" and "pairs"')
    base = obj["base"]
    if not isinstance(base, int) or base < 0:
        raise FormatError('"base" must be a nonnegative integer')
    pairs = obj["pairs"]
    if not isinstance(pairs, list):
        raise FormatError('"pairs" must be a list of [x, y] pairs')
    bits = 0
    for p in pairs:
        if (
            not isinstance(p, list)
            or len(p) != 2
            or not all(isinstance(v, int) for v in p)
        ):
            raise FormatError(f"bad pair entry: {p!r}")
        x, y = p
        if not (0 <= x < base and 0 <= y < base):
            raise FormatError(f"pair ({x}, {y}) out of range for base {base}")
        bits |= 1 << (x * base + y)
    return Relation(base, bits)


def parse_relation(text: str) -> Relation:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return relation_from_obj(obj)
