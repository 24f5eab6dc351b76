"""Independent ground truth: exhaustive representation search and law testing.

The search works on raw bitmask relations with its own operator
implementations, so it shares no code path with the production calculus; the
law suite likewise re-evaluates every operator definition by brute
quantifiers.  A found representation is proof of representability; an
exhausted search is not proof of the opposite (the constructive base bound
far exceeds the searched sizes).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import relcore
from .errors import PreconditionError, ResourceCapError
from .relcore import Relation
from .repbuilder import Representation, verify
from .structure import FinStructure, validate

__all__ = [
    "brute_force_represent",
    "law_suite",
    "LawReport",
    "LawViolation",
    "DEFAULT_SIZE_CAP",
    "DEFAULT_BASE_CAP",
]

DEFAULT_SIZE_CAP = 3
DEFAULT_BASE_CAP = 3


# --- independent mask operators --------------------------------------------


def _mask_dom(k: int, m: int) -> int:
    out = 0
    row = (1 << k) - 1
    for x in range(k):
        if (m >> (x * k)) & row:
            out |= 1 << x
    return out


def _mask_compose(k: int, m1: int, m2: int) -> int:
    row = (1 << k) - 1
    out = 0
    for x in range(k):
        r1 = (m1 >> (x * k)) & row
        acc = 0
        z = 0
        while r1:
            if r1 & 1:
                acc |= (m2 >> (z * k)) & row
            r1 >>= 1
            z += 1
        out |= acc << (x * k)
    return out


def _mask_refines(k: int, m1: int, m2: int) -> bool:
    dom1 = _mask_dom(k, m1)
    dom2 = _mask_dom(k, m2)
    if dom2 & ~dom1:
        return False
    row = (1 << k) - 1
    for x in range(k):
        if (dom2 >> x) & 1:
            if ((m1 >> (x * k)) & row) & ~((m2 >> (x * k)) & row):
                return False
    return True


_TABLE_CACHE: dict = {}

# Full operator tables are precomputed once per base size up to this point;
# 2^(k*k) masks squared stays small only through k = 3.
_TABLE_LIMIT = 3


def _build_tables(k: int):
    count = 1 << (k * k)
    bits = np.arange(count, dtype=np.uint32)
    mats = ((bits[:, None] >> np.arange(k * k, dtype=np.uint32)[None, :]) & 1).astype(
        bool
    ).reshape(count, k, k)
    prod = (
        np.einsum(
            "aij,bjl->abil", mats.astype(np.float32), mats.astype(np.float32)
        )
        > 0
    )
    weights = (1 << np.arange(k * k, dtype=np.int64)).reshape(k, k)
    compose_tab = np.tensordot(prod.astype(np.int64), weights, axes=([2, 3], [0, 1]))
    doms = mats.any(axis=2)
    dom_ok = ~(doms[None, :, :] & ~doms[:, None, :]).any(axis=2)
    restr = mats[:, None, :, :] & doms[None, :, :, None]
    inc_ok = ~(restr & ~mats[None, :, :, :]).any(axis=(2, 3))
    refines_tab = dom_ok & inc_ok
    return compose_tab, refines_tab


class _MaskOps:
    """Mask operators for one base size: exact tables for small k, memo beyond."""

    def __init__(self, k: int):
        self.k = k
        if k <= _TABLE_LIMIT:
            if k not in _TABLE_CACHE:
                _TABLE_CACHE[k] = _build_tables(k)
            self._compose_tab, self._refines_tab = _TABLE_CACHE[k]
        else:
            self._compose_tab = None
            self._compose: dict = {}
            self._refines: dict = {}

    def compose(self, m1: int, m2: int) -> int:
        if self._compose_tab is not None:
            return int(self._compose_tab[m1, m2])
        key = (m1, m2)
        got = self._compose.get(key)
        if got is None:
            got = self._compose[key] = _mask_compose(self.k, m1, m2)
        return got

    def refines(self, m1: int, m2: int) -> bool:
        if self._compose_tab is not None:
            return bool(self._refines_tab[m1, m2])
        key = (m1, m2)
        got = self._refines.get(key)
        if got is None:
            got = self._refines[key] = _mask_refines(self.k, m1, m2)
        return got


def _candidate_masks(k: int) -> list[int]:
    """All relations over base k, by increasing pair count then pair-list order."""

    def key(mask: int):
        pairs = []
        b = mask
        while b:
            low = b & -b
            i = low.bit_length() - 1
            pairs.append((i // k, i % k))
            b ^= low
        return (len(pairs), tuple(pairs))

    return sorted(range(1 << (k * k)), key=key)


def _heights(s: FinStructure) -> list[int]:
    """Length of the longest strictly descending chain below each element."""
    m = s.size
    below = [[b for b in range(m) if b != a and s.leq[b, a]] for a in range(m)]
    height = [None] * m

    def get(a):
        if height[a] is None:
            height[a] = 1 + max((get(b) for b in below[a]), default=-1)
        return height[a]

    for a in range(m):
        get(a)
    return height


def brute_force_represent(
    s: FinStructure,
    max_base: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    base_cap: int = DEFAULT_BASE_CAP,
) -> Representation | None:
    """Depth-first search for a concrete representation over bases 1..max_base.

    Elements are assigned in order of ascending order-height; candidate
    relations are tried by increasing pair count.  Partial assignments are
    pruned on the order-iff-refinement law and on composition constraints
    (products of assigned elements force the relation of the result element).
    The first complete assignment passing verify() is returned; None means
    the search space is exhausted, which is not a non-representability proof.
    """
    if s.size > size_cap:
        raise ResourceCapError(
            f"structure has {s.size} elements, over the search cap {size_cap}"
        )
    if max_base > base_cap:
        raise ResourceCapError(f"max_base {max_base} exceeds the cap {base_cap}")
    diag = validate(s)
    if not diag.is_valid:
        raise PreconditionError(f"structure is not valid: {diag.status}", diag)
    if s.size == 0:
        return Representation(structure=s, base_size=0, points=None, rels={})
    heights = _heights(s)
    order = sorted(range(s.size), key=lambda a: (heights[a], a))
    for k in range(1, max_base + 1):
        rep = _search_base(s, k, order)
        if rep is not None:
            return rep
    return None


def _search_base(s: FinStructure, k: int, order: list[int]) -> Representation | None:
    m = s.size
    leq = s.leq
    comp = s.comp
    ops = _MaskOps(k)
    candidates = _candidate_masks(k)
    assigned: dict[int, int] = {}
    forced: dict[int, int] = {}

    def pairwise_ok(x: int, mask: int) -> bool:
        for y, my in assigned.items():
            if bool(leq[x, y]) != ops.refines(mask, my):
                return False
            if bool(leq[y, x]) != ops.refines(my, mask):
                return False
        return True

    def composition_ok(x: int) -> tuple[bool, list[int]]:
        added = []
        pairs = [(x, x)]
        for y in assigned:
            if y != x:
                pairs.append((x, y))
                pairs.append((y, x))
        for u, v in pairs:
            w = int(comp[u, v])
            req = ops.compose(assigned[u], assigned[v])
            if w in assigned:
                if assigned[w] != req:
                    return False, added
            elif w in forced:
                if forced[w] != req:
                    return False, added
            else:
                forced[w] = req
                added.append(w)
        return True, added

    def backtrack(i: int):
        if i == m:
            rels = {s.elements[a]: Relation(k, assigned[a]) for a in range(m)}
            rep = Representation(structure=s, base_size=k, points=None, rels=rels)
            if verify(s, rep).passed:
                return rep
            return None
        x = order[i]
        cands = (forced[x],) if x in forced else candidates
        for mask in cands:
            if not pairwise_ok(x, mask):
                continue
            assigned[x] = mask
            ok, added = composition_ok(x)
            if ok:
                rep = backtrack(i + 1)
                if rep is not None:
                    return rep
            for w in added:
                del forced[w]
            del assigned[x]
        return None

    return backtrack(0)


# --- randomized law suite ---------------------------------------------------


@dataclass(frozen=True)
class LawViolation:
    law: str
    base: int
    relations: tuple

    def to_obj(self) -> dict:
        return {
            "law": self.law,
            "base": self.base,
            "relations": [[list(p) for p in rel] for rel in self.relations],
        }


@dataclass(frozen=True)
class LawReport:
    seed: int
    trials: int
    checks: int
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_obj(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "checks": self.checks,
            "passed": self.passed,
            "violations": [v.to_obj() for v in self.violations],
        }


def _default_ops() -> dict:
    return {
        "compose": relcore.compose,
        "demonic_compose": relcore.demonic_compose,
        "demonic_join": relcore.demonic_join,
        "demonic_meet": relcore.demonic_meet,
        "demonic_refines": relcore.demonic_refines,
        "saturate": relcore.saturate_infinity,
    }


def _random_relation(rng: random.Random, k: int) -> Relation:
    bits = rng.getrandbits(k * k) if k else 0
    mode = rng.randrange(3)
    for _ in range(mode):  # thin out: sparse relations hit domain edge cases
        bits &= rng.getrandbits(k * k) if k else 0
    return Relation(k, bits)


def _naive_compose(r: Relation, s: Relation) -> set:
    n = r.base_size
    return {
        (x, y)
        for x in range(n)
        for y in range(n)
        if any(r.has(x, z) and s.has(z, y) for z in range(n))
    }


def _naive_dom(r: Relation) -> set:
    return {x for x, _ in r.pairs()}


def _naive_refines(r: Relation, s: Relation) -> bool:
    dom_r, dom_s = _naive_dom(r), _naive_dom(s)
    if not dom_s <= dom_r:
        return False
    return all((x, y) in set(s.pairs()) for x, y in r.pairs() if x in dom_s)


def _naive_demonic_compose(r: Relation, s: Relation) -> set:
    n = r.base_size
    dom_s = _naive_dom(s)
    good = {
        x for x in range(n) if all(not r.has(x, z) or z in dom_s for z in range(n))
    }
    return {(x, y) for (x, y) in _naive_compose(r, s) if x in good}


def _naive_join(r: Relation, s: Relation) -> set:
    common = _naive_dom(r) & _naive_dom(s)
    return {(x, y) for (x, y) in r.pairs() + s.pairs() if x in common}


def _naive_meet(r: Relation, s: Relation) -> set:
    dom_r, dom_s = _naive_dom(r), _naive_dom(s)
    out = {(x, y) for (x, y) in r.pairs() if x not in dom_s}
    out |= set(r.pairs()) & set(s.pairs())
    out |= {(x, y) for (x, y) in s.pairs() if x not in dom_r}
    return out


def law_suite(
    seed: int, trials: int, max_base: int = 6, ops: dict | None = None
) -> LawReport:
    """Seeded randomized law checks; reports every counterexample verbatim.

    Covers associativity of both compositions, the partial-order laws of
    refinement, the least-upper-bound and recovery laws of the join, the
    greatest-lower-bound law of the meet on saturated inputs, the emptiness
    law, and definitional cross-checks of every operator against naive
    quantifier evaluation.
    """
    table = dict(_default_ops())
    if ops:
        table.update(ops)
    comp = table["compose"]
    dcomp = table["demonic_compose"]
    join = table["demonic_join"]
    meet = table["demonic_meet"]
    refines = table["demonic_refines"]
    saturate = table["saturate"]

    rng = random.Random(seed)
    violations = []
    checks = 0

    def note(law, base, *rels):
        violations.append(
            LawViolation(law, base, tuple(tuple(r.pairs()) for r in rels))
        )

    for _ in range(trials):
        k = rng.randint(1, max_base)
        r = _random_relation(rng, k)
        s = _random_relation(rng, k)
        t = _random_relation(rng, k)
        empty = Relation.empty(k)

        checks += 1
        if comp(comp(r, s), t) != comp(r, comp(s, t)):
            note("compose-associativity", k, r, s, t)
        checks += 1
        if dcomp(dcomp(r, s), t) != dcomp(r, dcomp(s, t)):
            note("demonic-compose-associativity", k, r, s, t)

        checks += 1
        if not refines(r, r):
            note("refines-reflexive", k, r)
        checks += 1
        if refines(r, s) and refines(s, r) and r != s:
            note("refines-antisymmetric", k, r, s)
        checks += 1
        if refines(r, s) and refines(s, t) and not refines(r, t):
            note("refines-transitive", k, r, s, t)
        # non-vacuous transitivity: joins build an ascending chain
        chain_b = join(r, s)
        chain_c = join(chain_b, t)
        checks += 1
        if not (refines(r, chain_b) and refines(chain_b, chain_c) and refines(r, chain_c)):
            note("refines-transitive-chain", k, r, s, t)

        j = join(r, s)
        checks += 1
        if not (refines(r, j) and refines(s, j)):
            note("join-upper-bound", k, r, s)
        checks += 1
        for upper in (j, join(j, t), empty, t):
            if refines(r, upper) and refines(s, upper) and not refines(j, upper):
                note("join-least", k, r, s, upper)
                break
        checks += 1
        if refines(r, s) != (join(r, s) == s):
            note("join-recovery", k, r, s)
        checks += 1
        if join(r, j) != j:
            note("join-recovery-constructed", k, r, j)

        checks += 1
        if not refines(r, empty):
            note("empty-greatest", k, r)

        rs = saturate(r)
        ss = saturate(s)
        mt = meet(rs, ss)
        checks += 1
        if not (refines(mt, rs) and refines(mt, ss)):
            note("meet-lower-bound", k, rs, ss)
        checks += 1
        lower_cands = [mt, meet(mt, saturate(t)), saturate(t)]
        lower_cands.append(_random_relation(rng, k + 1))
        for low in lower_cands:
            if refines(low, rs) and refines(low, ss) and not refines(low, mt):
                note("meet-greatest", k, rs, ss, low)
                break

        # definitional cross-checks against quantifier evaluation
        checks += 1
        if set(comp(r, s).pairs()) != _naive_compose(r, s):
            note("compose-definition", k, r, s)
        checks += 1
        if set(dcomp(r, s).pairs()) != _naive_demonic_compose(r, s):
            note("demonic-compose-definition", k, r, s)
        checks += 1
        if set(join(r, s).pairs()) != _naive_join(r, s):
            note("join-definition", k, r, s)
        checks += 1
        if set(meet(r, s).pairs()) != _naive_meet(r, s):
            note("meet-definition", k, r, s)
        checks += 1
        if refines(r, s) != _naive_refines(r, s):
            note("refines-definition", k, r, s)

    return LawReport(seed, trials, checks, tuple(violations))
