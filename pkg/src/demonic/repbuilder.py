"""Explicit representation over the three-part base, and representation checking.

The base for a structure with a fresh identity adjoined consists of initial
points (d, s) for every derivable domain-inclusion fact d before s, one
following point per element and one branch point per element.  Each element a
is mapped to the relation holding (x, y) iff

  I.   y is not an initial point;
  II.  if x is a branch point then so is y;
  III. delta(x) is domain-included in a composed with delta(y);
  IV.  if x is initial-or-following and y is following, the label of x is
       restricted-included (at superscript delta(x)) in a composed with the
       label of y.

verify() checks any claimed element-to-relation map directly against the
structure: order iff refinement, compositions match, and the map is
injective.  Injectivity already follows from the first check plus
antisymmetry; it is re-checked as defense in depth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FormatError, PreconditionError
from .predicates import PredicateFixpoint, compute_fixpoint, sigma_violation
from .relcore import Relation, compose, demonic_refines
from .structure import FinStructure, adjoin_identity, validate

__all__ = [
    "BasePoint",
    "Representation",
    "VerifyReport",
    "build_base",
    "represent",
    "verify",
    "export_dot",
    "representation_to_obj",
    "representation_to_json",
    "parse_representation",
]


@dataclass(frozen=True)
class BasePoint:
    """One base point: kind is "initial", "following" or "branch".

    d is the minimal-domain label (delta), s the edge label (lambda; None on
    branch points).  Following points have d == s by construction.
    """

    kind: str
    d: int
    s: int | None

    def __post_init__(self):
        if self.kind not in ("initial", "following", "branch"):
            raise ValueError(f"unknown base point kind: {self.kind!r}")
        if (self.s is None) != (self.kind == "branch"):
            raise ValueError("label s must be present exactly when kind is not branch")
        if self.kind == "following" and self.d != self.s:
            raise ValueError("following points carry d == s")


@dataclass(frozen=True, eq=False)
class Representation:
    """Element-to-relation map over a finite base.

    points carries base metadata when the representation was built by
    represent(); search-produced representations have points=None and only a
    base size.  rels maps the original structure's element names; the map
    over the identity-adjoined structure (used by soundness property tests)
    is kept in rels_full and not exported.
    """

    structure: FinStructure
    base_size: int
    points: tuple[BasePoint, ...] | None
    rels: dict
    sprime: FinStructure | None = None
    rels_full: dict | None = None


def build_base(sp: FinStructure, f: PredicateFixpoint) -> list[BasePoint]:
    """Base points in fixed order: initial pairs row-major, then following, then branch."""
    m = sp.size
    black = f.black
    pts = []
    for d in range(m):
        for s in range(m):
            if black[d, s]:
                pts.append(BasePoint("initial", d, s))
    for s in range(m):
        pts.append(BasePoint("following", s, s))
    for d in range(m):
        pts.append(BasePoint("branch", d, None))
    return pts


def _theta_relation(
    sp: FinStructure,
    f: PredicateFixpoint,
    points: list[BasePoint],
    a: int,
) -> Relation:
    nx = len(points)
    delta = np.array([p.d for p in points], dtype=np.intp)
    lam = np.array([p.s if p.s is not None else 0 for p in points], dtype=np.intp)
    kinds = np.array(
        [{"initial": 0, "following": 1, "branch": 2}[p.kind] for p in points],
        dtype=np.intp,
    )
    is_init = kinds == 0
    is_fol = kinds == 1
    is_branch = kinds == 2

    comp_a_delta = sp.comp[a, delta]  # a composed with delta(y), per y
    comp_a_lam = sp.comp[a, lam]

    ok = np.broadcast_to(~is_init[None, :], (nx, nx)).copy()  # condition I
    ok &= ~is_branch[:, None] | is_branch[None, :]  # condition II
    ok &= f.black[delta[:, None], comp_a_delta[None, :]]  # condition III
    mask_iv = (is_init | is_fol)[:, None] & is_fol[None, :]
    val_iv = f.tri[delta[:, None], lam[:, None], comp_a_lam[None, :]]
    ok &= ~mask_iv | val_iv  # condition IV
    return Relation.from_matrix(ok)


def _represent_checked_fixpoints(s: FinStructure, engine=None) -> Representation:
    sp = adjoin_identity(s)
    fp = compute_fixpoint(sp, engine=engine)
    points = build_base(sp, fp)
    rels_full = {
        sp.elements[a]: _theta_relation(sp, fp, points, a) for a in range(sp.size)
    }
    rels = {name: rels_full[name] for name in s.elements}
    return Representation(
        structure=s,
        base_size=len(points),
        points=tuple(points),
        rels=rels,
        sprime=sp,
        rels_full=rels_full,
    )


def represent(s: FinStructure, engine=None) -> Representation:
    """Build the explicit representation of a valid structure satisfying the axiom schema.

    The construction runs over the identity-adjoined structure and is then
    restricted to the original elements; the base is unchanged by the
    restriction.
    """
    diag = validate(s)
    if not diag.is_valid:
        raise PreconditionError(
            f"structure is not valid: {diag.status} at {diag.witness}", diag
        )
    f = compute_fixpoint(s, engine=engine)
    viol = sigma_violation(f)
    if viol is not None:
        a, b = viol
        raise PreconditionError(
            "axiom schema fails: "
            f"({s.elements[b]} before {s.elements[a]}, restricted inclusion holds, "
            f"yet not {s.elements[a]} <= {s.elements[b]})",
            viol,
        )
    return _represent_checked_fixpoints(s, engine=engine)


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of verify: passed flag plus every failing pair with its law."""

    passed: bool
    failures: tuple  # entries (law, a, b, detail)

    def to_obj(self) -> dict:
        return {
            "passed": self.passed,
            "failures": [
                {"law": law, "a": a, "b": b, "detail": detail}
                for (law, a, b, detail) in self.failures
            ],
        }


def verify(s: FinStructure, r: Representation) -> VerifyReport:
    """Check order-iff-refinement, composition homomorphism, and injectivity."""
    names = s.elements
    for name in names:
        if name not in r.rels:
            raise FormatError(f"representation does not cover element {name!r}")
    for name, rel in r.rels.items():
        if rel.base_size != r.base_size:
            raise DimensionError(
                f"relation for {name!r} lives over base {rel.base_size}, "
                f"expected {r.base_size}"
            )
    failures = []
    m = s.size
    for a in range(m):
        ra = r.rels[names[a]]
        for b in range(m):
            rb = r.rels[names[b]]
            leq_ab = bool(s.leq[a, b])
            ref_ab = demonic_refines(ra, rb)
            if leq_ab != ref_ab:
                side = "order-without-refinement" if leq_ab else "refinement-without-order"
                failures.append(("refinement", names[a], names[b], side))
            want = r.rels[names[s.comp[a, b]]]
            got = compose(ra, rb)
            if got != want:
                failures.append(
                    ("composition", names[a], names[b], f"product should be {names[s.comp[a, b]]}")
                )
    for a in range(m):
        for b in range(a + 1, m):
            if r.rels[names[a]] == r.rels[names[b]]:
                failures.append(("injectivity", names[a], names[b], "equal relations"))
    return VerifyReport(not failures, tuple(failures))


def _point_to_obj(sp: FinStructure, p: BasePoint) -> dict:
    if p.kind == "initial":
        return {"kind": "initial", "d": sp.elements[p.d], "s": sp.elements[p.s]}
    if p.kind == "following":
        return {"kind": "following", "s": sp.elements[p.s]}
    return {"kind": "branch", "d": sp.elements[p.d]}


def representation_to_obj(r: Representation) -> dict:
    if r.points is not None:
        if r.sprime is None:
            raise ValueError("point metadata requires the identity-adjoined structure")
        base = [_point_to_obj(r.sprime, p) for p in r.points]
    else:
        base = r.base_size
    rels = {
        name: [[x, y] for x, y in r.rels[name].pairs()] for name in r.structure.elements
    }
    return {"base": base, "rels": rels}


def representation_to_json(r: Representation) -> str:
    return json.dumps(representation_to_obj(r), indent=2) + "\n"


def _point_from_obj(sp: FinStructure, obj) -> BasePoint:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FormatError(f"bad base point entry: {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "initial":
            return BasePoint("initial", sp.index(obj["d"]), sp.index(obj["s"]))
        if kind == "following":
            s = sp.index(obj["s"])
            return BasePoint("following", s, s)
        if kind == "branch":
            return BasePoint("branch", sp.index(obj["d"]), None)
    except KeyError as exc:
        raise FormatError(f"base point entry missing field: {exc}") from None
    raise FormatError(f"unknown base point kind: {kind!r}")


def parse_representation(text: str, s: FinStructure) -> Representation:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or set(obj) != {"base", "rels"}:
        raise FormatError('representation object must have exactly the keys "base" and "rels"')
    base = obj["base"]
    sprime = None
    points = None
    if isinstance(base, int):
        if base < 0:
            raise FormatError('"base" must be nonnegative')
        base_size = base
    elif isinstance(base, list):
        sprime = adjoin_identity(s)
        points = tuple(_point_from_obj(sprime, p) for p in base)
        base_size = len(points)
    else:
        raise FormatError('"base" must be an integer or a list of point objects')
    rels_obj = obj["rels"]
    if not isinstance(rels_obj, dict):
        raise FormatError('"rels" must map element names to pair lists')
    rels = {}
    for name, pairs in rels_obj.items():
        s.index(name)  # raises FormatError on unknown names
        if not isinstance(pairs, list):
            raise FormatError(f"relation for {name!r} must be a pair list")
        try:
            rels[name] = Relation.from_pairs(base_size, [tuple(p) for p in pairs])
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad relation for {name!r}: {exc}") from None
    return Representation(
        structure=s, base_size=base_size, points=points, rels=rels, sprime=sprime
    )


def export_dot(r: Representation) -> str:
    """Deterministic graph rendering: labeled base points, one edge set per element."""
    if r.points is None or r.sprime is None:
        raise FormatError("representation carries no base point metadata to render")
    sp = r.sprime
    lines = ["digraph representation {", "  rankdir=LR;"]
    for i, p in enumerate(r.points):
        if p.kind == "initial":
            label = f"initial d={sp.elements[p.d]} s={sp.elements[p.s]}"
        elif p.kind == "following":
            label = f"following s={sp.elements[p.s]}"
        else:
            label = f"branch d={sp.elements[p.d]}"
        lines.append(f'  n{i} [label="{label}"];')
    for name in r.structure.elements:
        for x, y in r.rels[name].pairs():
            lines.append(f'  n{x} -> n{y} [label="{name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
