"""Stabilized derivation predicates with stage indices and replayable derivations.

compute_fixpoint drives one of two interchangeable engines over a structure's
tables: a compiled bitset kernel (built from _fixpoint_c.pyx) or the numpy
fallback.  Both implement the same synchronous stage semantics, so stage
matrices are engine-independent; tests compare them bit for bit against the
naive reference in _reference.py.

Derivations are reconstructed on demand from the stage matrices instead of
being stored during the fixpoint: a fact first seen at stage n must be
producible by some clause from facts of stage <= n-1, so a bounded backward
search suffices.  Storing parents for every cube cell would dominate memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fixpoint_py
from .config import kernel_preference, mem_cap_bytes
from .errors import DerivationError, ResourceCapError
from .structure import FinStructure

try:
    from . import _fixpoint_c
except ImportError:  # pure-Python install
    _fixpoint_c = None

HAVE_COMPILED = _fixpoint_c is not None

__all__ = [
    "HAVE_COMPILED",
    "BlackFact",
    "TriFact",
    "Derivation",
    "PredicateFixpoint",
    "compute_fixpoint",
    "holds_black",
    "holds_tri",
    "stage_black",
    "stage_tri",
    "explain",
    "check_derivation",
    "derivation_to_obj",
    "derivation_from_obj",
    "sigma_violation",
    "sigma_min_violated_stage",
]


@dataclass(frozen=True)
class BlackFact:
    """Domain-inclusion fact: dom of a is forced inside dom of b."""

    a: int
    b: int


@dataclass(frozen=True)
class TriFact:
    """Restricted-inclusion fact: a, cut to dom of s, is forced inside b."""

    s: int
    a: int
    b: int


Fact = BlackFact | TriFact


@dataclass(frozen=True, eq=False)
class PredicateFixpoint:
    """Stabilized predicate matrices plus first-derivation stages.

    black[a, b] is true iff black_stage[a, b] >= 0, same for the tri cube
    (indexed superscript, a, b); stages are -1 for facts that never appear.
    """

    structure: FinStructure
    black: np.ndarray
    tri: np.ndarray
    black_stage: np.ndarray
    tri_stage: np.ndarray
    last_stage: int
    engine: str

    def __post_init__(self):
        for arr in (self.black, self.tri, self.black_stage, self.tri_stage):
            arr.setflags(write=False)

    def _check(self, *idx):
        m = self.structure.size
        for i in idx:
            if not (0 <= i < m):
                raise IndexError(f"element index {i} out of range for size {m}")

    def holds_black(self, a: int, b: int) -> bool:
        self._check(a, b)
        return bool(self.black[a, b])

    def holds_tri(self, s: int, a: int, b: int) -> bool:
        self._check(s, a, b)
        return bool(self.tri[s, a, b])

    def stage_black(self, a: int, b: int) -> int | None:
        self._check(a, b)
        st = int(self.black_stage[a, b])
        return None if st < 0 else st

    def stage_tri(self, s: int, a: int, b: int) -> int | None:
        self._check(s, a, b)
        st = int(self.tri_stage[s, a, b])
        return None if st < 0 else st


def holds_black(f: PredicateFixpoint, a: int, b: int) -> bool:
    return f.holds_black(a, b)


def holds_tri(f: PredicateFixpoint, s: int, a: int, b: int) -> bool:
    return f.holds_tri(s, a, b)


def stage_black(f: PredicateFixpoint, a: int, b: int) -> int | None:
    return f.stage_black(a, b)


def stage_tri(f: PredicateFixpoint, s: int, a: int, b: int) -> int | None:
    return f.stage_tri(s, a, b)


def compute_fixpoint(
    s: FinStructure,
    engine: str | None = None,
    mem_mb: int | None = None,
) -> PredicateFixpoint:
    """Run the staged fixpoint to stabilization.

    The caller is responsible for validity of the structure; the engine only
    needs total tables.  engine is "compiled", "python" or "auto" (default:
    DEMONIC_KERNEL, else auto).
    """
    pref = kernel_preference(engine)
    if pref == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernel requested but not built")
    use_compiled = HAVE_COMPILED if pref == "auto" else pref == "compiled"

    m = s.size
    cap = mem_cap_bytes(mem_mb)
    need = (
        _fixpoint_c.estimate_bytes(m) if use_compiled else _fixpoint_py.estimate_bytes(m)
    )
    if need > cap:
        raise ResourceCapError(
            f"fixpoint on {m} elements needs ~{need // 2**20} MiB "
            f"(cube is m^3), over the {cap // 2**20} MiB cap"
        )
    if use_compiled:
        leq = np.ascontiguousarray(s.leq, dtype=np.uint8)
        comp = np.ascontiguousarray(s.comp, dtype=np.int32)
        black, tri, bstage, tstage, last = _fixpoint_c.fixpoint_packed(leq, comp)
        name = "compiled"
    else:
        black, tri, bstage, tstage, last = _fixpoint_py.fixpoint_numpy(s.leq, s.comp)
        name = "python"
    return PredicateFixpoint(s, black, tri, bstage, tstage, last, name)


def sigma_violation(f: PredicateFixpoint) -> tuple[int, int] | None:
    """Lexicographically first pair (a, b) falsifying the axiom schema, if any.

    A pair violates the schema when b is domain-included in a and a is
    restricted-included in b at superscript b, yet a <= b fails in the
    structure.
    """
    m = f.structure.size
    if m == 0:
        return None
    premise = f.black.T.copy()  # [a,b] = black[b,a]
    for b in range(m):
        premise[:, b] &= f.tri[b, :, b]
    bad = premise & ~f.structure.leq
    if not bad.any():
        return None
    flat = int(np.argmax(bad))  # row-major first True
    return flat // m, flat % m


def sigma_min_violated_stage(f: PredicateFixpoint) -> int | None:
    """Least stage n at which the schema instance already fails, if any.

    Per violating pair the premise first holds at the max of its two fact
    stages; the schema stage is the min of that over all violating pairs.
    """
    m = f.structure.size
    best = None
    for a in range(m):
        for b in range(m):
            if f.structure.leq[a, b] or not (f.black[b, a] and f.tri[b, a, b]):
                continue
            stage = max(int(f.black_stage[b, a]), int(f.tri_stage[b, a, b]))
            if best is None or stage < best:
                best = stage
    return best


# --- derivations -----------------------------------------------------------
#
# Clause names, in the fixed order used for tie-breaking:
#   black: geq | geq-comp        (stage 0)
#          from-tri | trans | left-factor
#   tri:   leq-eq                (stage 0)
#          tri-trans | factor-pair | weaken
#
# explain() picks, per fact, the derivation minimizing (child stages sorted
# descending, clause order, witness tuple); every valid candidate's worst
# child sits at exactly stage n-1, so the first tie-break is on the other
# child.


@dataclass(frozen=True)
class Derivation:
    fact: Fact
    stage: int
    clause: str
    witness: tuple[int, ...]
    children: tuple["Derivation", ...]

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def explain(f: PredicateFixpoint, fact: Fact) -> Derivation:
    """Reconstruct a minimal-stage derivation for a fact that holds in f."""
    memo: dict[Fact, Derivation] = {}
    return _explain(f, fact, memo)


def _explain(f: PredicateFixpoint, fact: Fact, memo) -> Derivation:
    got = memo.get(fact)
    if got is not None:
        return got
    if isinstance(fact, BlackFact):
        d = _explain_black(f, fact, memo)
    elif isinstance(fact, TriFact):
        d = _explain_tri(f, fact, memo)
    else:
        raise TypeError(f"not a fact: {fact!r}")
    memo[fact] = d
    return d


def _fact_stage(f: PredicateFixpoint, fact: Fact) -> int:
    if isinstance(fact, BlackFact):
        st = f.stage_black(fact.a, fact.b)
    else:
        st = f.stage_tri(fact.s, fact.a, fact.b)
    if st is None:
        raise DerivationError(f"fact does not hold: {fact}")
    return st


def _explain_black(f: PredicateFixpoint, fact: BlackFact, memo) -> Derivation:
    s = f.structure
    m = s.size
    leq = s.leq
    comp = s.comp
    a, b = fact.a, fact.b
    n = _fact_stage(f, fact)
    if n == 0:
        if leq[b, a]:
            return Derivation(fact, 0, "geq", (), ())
        for c in range(m):
            if leq[comp[b, c], a]:
                return Derivation(fact, 0, "geq-comp", (c,), ())
        raise DerivationError(f"stage-0 bookkeeping broken for {fact}")

    # Every valid candidate's worst child is at exactly n-1 (a lower worst
    # stage would contradict minimality of n), so single-child clauses beat
    # two-child ones and the remaining ties go to clause order, then to the
    # lexicographically least witness.
    limit = n - 1
    ts = f.tri_stage
    bs = f.black_stage

    if 0 <= int(ts[a, a, b]) <= limit:
        child = _explain(f, TriFact(a, a, b), memo)
        return Derivation(fact, n, "from-tri", (), (child,))

    for d in range(m):
        for fx in range(m):
            if comp[d, fx] != a:
                continue
            for fy in range(m):
                if comp[d, fy] == b and 0 <= int(bs[fx, fy]) <= limit:
                    child = _explain(f, BlackFact(fx, fy), memo)
                    return Derivation(fact, n, "left-factor", (d, fx, fy), (child,))

    best = None  # (other-child stage, witness c)
    for c in range(m):
        s1, s2 = int(bs[a, c]), int(bs[c, b])
        if 0 <= s1 <= limit and 0 <= s2 <= limit:
            lo = min(s1, s2)
            if best is None or lo < best[0]:
                best = (lo, c)
                if lo == 0:
                    break
    if best is not None:
        c = best[1]
        children = (
            _explain(f, BlackFact(a, c), memo),
            _explain(f, BlackFact(c, b), memo),
        )
        return Derivation(fact, n, "trans", (c,), children)
    raise DerivationError(f"no clause rederives {fact} at stage {n}")


def _explain_tri(f: PredicateFixpoint, fact: TriFact, memo) -> Derivation:
    s = f.structure
    m = s.size
    leq = s.leq
    comp = s.comp
    sx, a, b = fact.s, fact.a, fact.b
    n = _fact_stage(f, fact)
    if n == 0:
        if sx == b and leq[a, b]:
            return Derivation(fact, 0, "leq-eq", (), ())
        raise DerivationError(f"stage-0 bookkeeping broken for {fact}")

    # All three step clauses have two children, so the candidate key reduces
    # to (other-child stage, clause order, witness); the worst child is
    # pinned at n-1 as in the black case.
    limit = n - 1
    ts = f.tri_stage
    bs = f.black_stage
    best = None  # (lo, clause_idx, witness, child facts)

    for c in range(m):
        s1, s2 = int(ts[sx, a, c]), int(ts[sx, c, b])
        if 0 <= s1 <= limit and 0 <= s2 <= limit:
            lo = min(s1, s2)
            if best is None or lo < best[0]:
                best = (lo, 0, (c,), (TriFact(sx, a, c), TriFact(sx, c, b)))
                if lo == 0:
                    break

    if best is None or best[0] > 0:
        for c in range(m):
            for d in range(m):
                if comp[c, d] != a:
                    continue
                for cp in range(m):
                    s1 = int(ts[sx, c, cp])
                    if not (0 <= s1 <= limit):
                        continue
                    for dp in range(m):
                        if comp[cp, dp] != b:
                            continue
                        s2 = int(ts[d, d, dp])
                        if not (0 <= s2 <= limit):
                            continue
                        lo = min(s1, s2)
                        wit = (c, cp, d, dp)
                        key = (lo, 1, wit)
                        if best is None or key < (best[0], best[1], best[2]):
                            best = (lo, 1, wit, (TriFact(sx, c, cp), TriFact(d, d, dp)))

    if best is None or best[0] > 0:
        for sp in range(m):
            s1, s2 = int(ts[sp, a, b]), int(bs[sx, sp])
            if 0 <= s1 <= limit and 0 <= s2 <= limit:
                lo = min(s1, s2)
                if best is None or (lo, 2, (sp,)) < (best[0], best[1], best[2]):
                    best = (lo, 2, (sp,), (TriFact(sp, a, b), BlackFact(sx, sp)))
                    if lo == 0:
                        break

    if best is None:
        raise DerivationError(f"no clause rederives {fact} at stage {n}")
    clause = ("tri-trans", "factor-pair", "weaken")[best[1]]
    children = tuple(_explain(f, cf, memo) for cf in best[3])
    return Derivation(fact, n, clause, best[2], children)


def check_derivation(s: FinStructure, d: Derivation) -> bool:
    """Replay a derivation against the bare structure tables.

    Checks, per node: the clause's side conditions on leq/comp, that the
    children carry exactly the facts the clause consumes, that child stages
    are strictly below the node's, and that leaves are stage-0 base clauses.
    Raises DerivationError on any mismatch.
    """
    leq = s.leq
    comp = s.comp

    def fail(msg):
        raise DerivationError(f"replay failed at {d_node.fact}: {msg}")

    def expect_children(node, facts):
        got = tuple(c.fact for c in node.children)
        if got != tuple(facts):
            fail(f"clause {node.clause} expects children {facts}, got {got}")
        for c in node.children:
            if c.stage >= node.stage:
                fail(f"child stage {c.stage} not below {node.stage}")

    stack = [d]
    while stack:
        d_node = stack.pop()
        fact = d_node.fact
        cl = d_node.clause
        w = d_node.witness
        if isinstance(fact, BlackFact):
            a, b = fact.a, fact.b
            if cl == "geq":
                if d_node.stage != 0 or d_node.children or not leq[b, a]:
                    fail("base order clause does not apply")
            elif cl == "geq-comp":
                if d_node.stage != 0 or d_node.children:
                    fail("base clause must be a stage-0 leaf")
                if len(w) != 1 or not leq[comp[b, w[0]], a]:
                    fail("base composition clause does not apply")
            elif cl == "from-tri":
                expect_children(d_node, (TriFact(a, a, b),))
            elif cl == "trans":
                if len(w) != 1:
                    fail("trans needs one witness")
                expect_children(d_node, (BlackFact(a, w[0]), BlackFact(w[0], b)))
            elif cl == "left-factor":
                if len(w) != 3:
                    fail("left-factor needs witnesses (d, f, f')")
                dw, fx, fy = w
                if comp[dw, fx] != a or comp[dw, fy] != b:
                    fail("left-factor products do not match the fact")
                expect_children(d_node, (BlackFact(fx, fy),))
            else:
                fail(f"unknown clause {cl!r}")
        elif isinstance(fact, TriFact):
            sx, a, b = fact.s, fact.a, fact.b
            if cl == "leq-eq":
                if d_node.stage != 0 or d_node.children:
                    fail("base clause must be a stage-0 leaf")
                if sx != b or not leq[a, b]:
                    fail("base restricted-inclusion clause does not apply")
            elif cl == "tri-trans":
                if len(w) != 1:
                    fail("tri-trans needs one witness")
                expect_children(d_node, (TriFact(sx, a, w[0]), TriFact(sx, w[0], b)))
            elif cl == "factor-pair":
                if len(w) != 4:
                    fail("factor-pair needs witnesses (c, c', d, d')")
                c, cp, dw, dp = w
                if comp[c, dw] != a or comp[cp, dp] != b:
                    fail("factor-pair products do not match the fact")
                expect_children(d_node, (TriFact(sx, c, cp), TriFact(dw, dw, dp)))
            elif cl == "weaken":
                if len(w) != 1:
                    fail("weaken needs one witness")
                expect_children(d_node, (TriFact(w[0], a, b), BlackFact(sx, w[0])))
            else:
                fail(f"unknown clause {cl!r}")
        else:
            fail(f"unknown fact type {fact!r}")
        stack.extend(d_node.children)
    return True


def _fact_to_obj(s: FinStructure, fact: Fact) -> dict:
    names = s.elements
    if isinstance(fact, BlackFact):
        return {"kind": "black", "a": names[fact.a], "b": names[fact.b]}
    return {"kind": "tri", "s": names[fact.s], "a": names[fact.a], "b": names[fact.b]}


def _fact_from_obj(s: FinStructure, obj) -> Fact:
    kind = obj.get("kind")
    if kind == "black":
        return BlackFact(s.index(obj["a"]), s.index(obj["b"]))
    if kind == "tri":
        return TriFact(s.index(obj["s"]), s.index(obj["a"]), s.index(obj["b"]))
    raise DerivationError(f"unknown fact kind: {kind!r}")


def derivation_to_obj(s: FinStructure, d: Derivation) -> dict:
    return {
        "fact": _fact_to_obj(s, d.fact),
        "stage": d.stage,
        "clause": d.clause,
        "witness": [s.elements[i] for i in d.witness],
        "children": [derivation_to_obj(s, c) for c in d.children],
    }


def derivation_from_obj(s: FinStructure, obj) -> Derivation:
    try:
        fact = _fact_from_obj(s, obj["fact"])
        stage = int(obj["stage"])
        clause = str(obj["clause"])
        witness = tuple(s.index(w) for w in obj["witness"])
        children = tuple(derivation_from_obj(s, c) for c in obj["children"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DerivationError(f"malformed derivation object: {exc}") from None
    return Derivation(fact, stage, clause, witness, children)


def format_derivation(s: FinStructure, d: Derivation, indent: int = 0) -> str:
    """Indented text rendering, one fact per line."""
    names = s.elements
    fact = d.fact
    if isinstance(fact, BlackFact):
        head = f"{names[fact.a]} <* {names[fact.b]}"
    else:
        head = f"{names[fact.a]} <|[{names[fact.s]}] {names[fact.b]}"
    wit = ""
    if d.witness:
        wit = " " + ", ".join(names[i] for i in d.witness)
    lines = [f"{'  ' * indent}{head} @ {d.stage}  [{d.clause}{wit}]"]
    for c in d.children:
        lines.append(format_derivation(s, c, indent + 1))
    return "\n".join(lines)
