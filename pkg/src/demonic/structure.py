"""Finite abstract (order, composition) structures.

A FinStructure holds named elements, an order matrix and a total composition
table.  Construction checks well-formedness only; whether the order is a
partial order and the composition associative is the job of validate().
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError

__all__ = [
    "Diagnostics",
    "FinStructure",
    "VALID",
    "adjoin_identity",
    "parse_structure",
    "serialize_structure",
    "structure_from_obj",
    "structure_to_obj",
    "validate",
]


@dataclass(frozen=True, eq=False)
class FinStructure:
    """Elements with an order matrix leq[a, b] and composition table comp[a, b]."""

    elements: tuple[str, ...]
    leq: np.ndarray
    comp: np.ndarray
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        m = len(elements)
        if any(not isinstance(e, str) or not e for e in elements):
            raise FormatError("element names must be nonempty strings")
        if len(set(elements)) != m:
            raise FormatError("element names must be unique")
        leq = np.ascontiguousarray(np.asarray(self.leq, dtype=bool))
        comp = np.ascontiguousarray(np.asarray(self.comp, dtype=np.intp))
        if leq.shape != (m, m):
            raise FormatError(f"leq matrix must be {m}x{m}")
        if comp.shape != (m, m):
            raise FormatError(f"comp table must be {m}x{m}")
        if m and (comp.min() < 0 or comp.max() >= m):
            raise FormatError("comp entries must be valid element indices")
        leq.setflags(write=False)
        comp.setflags(write=False)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "leq", leq)
        object.__setattr__(self, "comp", comp)
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(elements)})

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise FormatError(f"unknown element name: {name!r}") from None

    def __eq__(self, other):
        return (
            isinstance(other, FinStructure)
            and self.elements == other.elements
            and np.array_equal(self.leq, other.leq)
            and np.array_equal(self.comp, other.comp)
        )

    def __hash__(self):
        return hash((self.elements, self.leq.tobytes(), self.comp.tobytes()))

    def __repr__(self):
        return f"FinStructure({list(self.elements)!r}, size={self.size})"


@dataclass(frozen=True)
class Diagnostics:
    """Outcome of validate: status plus the first offending pair or triple."""

    status: str  # "valid" | "not_partial_order" | "not_associative"
    witness: tuple[str, ...] | None = None
    detail: str = ""

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"


VALID = Diagnostics("valid")


def validate(s: FinStructure) -> Diagnostics:
    """Check partial order then associativity, in a fixed row-major scan order.

    Scan order: reflexivity, antisymmetry, transitivity, associativity.  The
    first failure found wins, so diagnostics are deterministic.
    """
    m = s.size
    leq = s.leq
    comp = s.comp
    names = s.elements
    for a in range(m):
        if not leq[a, a]:
            return Diagnostics("not_partial_order", (names[a], names[a]), "reflexivity")
    for a in range(m):
        for b in range(m):
            if a != b and leq[a, b] and leq[b, a]:
                return Diagnostics("not_partial_order", (names[a], names[b]), "antisymmetry")
    for a in range(m):
        for b in range(m):
            if not leq[a, b]:
                continue
            for c in range(m):
                if leq[b, c] and not leq[a, c]:
                    return Diagnostics(
                        "not_partial_order", (names[a], names[b], names[c]), "transitivity"
                    )
    for a in range(m):
        for b in range(m):
            ab = comp[a, b]
            for c in range(m):
                if comp[ab, c] != comp[a, comp[b, c]]:
                    return Diagnostics(
                        "not_associative", (names[a], names[b], names[c]), "associativity"
                    )
    return VALID


def _fresh_identity_name(elements: tuple[str, ...]) -> str:
    name = "e"
    while name in elements:
        name += "_"
    return name


def adjoin_identity(s: FinStructure) -> FinStructure:
    """Extend with one fresh two-sided identity, order-incomparable to the rest.

    Callers apply this exactly once per decision; it is deliberately not
    idempotent.
    """
    m = s.size
    name = _fresh_identity_name(s.elements)
    leq = np.zeros((m + 1, m + 1), dtype=bool)
    leq[:m, :m] = s.leq
    leq[m, m] = True
    comp = np.zeros((m + 1, m + 1), dtype=np.intp)
    comp[:m, :m] = s.comp
    comp[m, :] = np.arange(m + 1)
    comp[:, m] = np.arange(m + 1)
    return FinStructure(s.elements + (name,), leq, comp)


def structure_to_obj(s: FinStructure) -> dict:
    names = s.elements
    leq_pairs = [
        [names[a], names[b]]
        for a in range(s.size)
        for b in range(s.size)
        if s.leq[a, b]
    ]
    comp = {
        names[a]: {names[b]: names[s.comp[a, b]] for b in range(s.size)}
        for a in range(s.size)
    }
    return {"elements": list(names), "leq": leq_pairs, "comp": comp}


def serialize_structure(s: FinStructure) -> str:
    return json.dumps(structure_to_obj(s), indent=2) + "\n"


def structure_from_obj(obj) -> FinStructure:
    if not isinstance(obj, dict) or set(obj) != {"elements", "leq", "comp"}:
        raise FormatError(
            'structure object must have exactly the keys "elements", "leq" and "comp"'
        )
    elements = obj["elements"]
    if not isinstance(elements, list) or any(
        not isinstance(e, str) or not e for e in elements
    ):
        raise FormatError('"elements" must be a list of nonempty strings')
    if len(set(elements)) != len(elements):
        raise FormatError("duplicate element names")
    index = {e: i for i, e in enumerate(elements)}
    m = len(elements)

    def resolve(name, where):
        if not isinstance(name, str) or name not in index:
            raise FormatError(f"unknown element name in {where}: {name!r}")
        return index[name]

    leq = np.zeros((m, m), dtype=bool)
    if not isinstance(obj["leq"], list):
        raise FormatError('"leq" must be a list of [a, b] pairs')
    for p in obj["leq"]:
        if not isinstance(p, list) or len(p) != 2:
            raise FormatError(f'bad "leq" entry: {p!r}')
        leq[resolve(p[0], "leq"), resolve(p[1], "leq")] = True

    comp = np.zeros((m, m), dtype=np.intp)
    table = obj["comp"]
    if not isinstance(table, dict) or set(table) != set(elements):
        raise FormatError('"comp" must map every element to a full row')
    for a_name, row in table.items():
        a = index[a_name]
        if not isinstance(row, dict) or set(row) != set(elements):
            raise FormatError(f'"comp" row for {a_name!r} must cover every element')
        for b_name, c_name in row.items():
            comp[a, index[b_name]] = resolve(c_name, f"comp[{a_name!r}]")
    return FinStructure(tuple(elements), leq, comp)


def parse_structure(text: str) -> FinStructure:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return structure_from_obj(obj)
