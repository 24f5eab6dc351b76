"""Structure generators: the staged counterexample family and small-structure corpus.

The family member at level n has 3 + 3N elements for N = 1 + 2^n: a top
element "0", two generators "b" and "c", and a cycle of triples a_i, a_ib,
a_ic with composition a_i*b = a_ib, a_i*c = a_ic and everything else 0.
Its order is the reflexive closure of s <= 0, a_{i+1}b <= a_i <= a_{i+1}c
and a_ib <= a_ic, indices modulo N.
"""

from __future__ import annotations

from itertools import permutations, product
from typing import Iterator

import numpy as np

from .config import mem_cap_bytes
from .errors import ResourceCapError
from .structure import FinStructure

__all__ = ["gen_sn", "enumerate_small", "ENUMERATION_SIZE_CAP"]

ENUMERATION_SIZE_CAP = 3

# Element names for enumerated structures; the cap keeps this ample.
_ENUM_NAMES = ("a", "b", "c", "d")


def gen_sn(n: int, mem_mb: int | None = None) -> FinStructure:
    """Construct family member n; element count is 3 + 3*(1 + 2**n)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    big_n = 1 + 2**n
    m = 3 + 3 * big_n
    # Order and composition tables: one byte plus one word per cell.
    need = m * m * 9
    cap = mem_cap_bytes(mem_mb)
    if need > cap:
        raise ResourceCapError(
            f"structure of size {m} needs ~{need // 2**20} MiB of tables, "
            f"over the {cap // 2**20} MiB cap"
        )
    names = ["0", "b", "c"]
    for i in range(big_n):
        names += [f"a{i}", f"a{i}b", f"a{i}c"]
    idx = {e: i for i, e in enumerate(names)}

    comp = np.zeros((m, m), dtype=np.intp)  # all products default to "0"
    for i in range(big_n):
        comp[idx[f"a{i}"], idx["b"]] = idx[f"a{i}b"]
        comp[idx[f"a{i}"], idx["c"]] = idx[f"a{i}c"]

    leq = np.eye(m, dtype=bool)
    leq[:, idx["0"]] = True
    for i in range(big_n):
        j = (i + 1) % big_n
        leq[idx[f"a{j}b"], idx[f"a{i}"]] = True
        leq[idx[f"a{i}"], idx[f"a{j}c"]] = True
        leq[idx[f"a{i}b"], idx[f"a{i}c"]] = True
    return FinStructure(tuple(names), leq, comp)


def _posets(m: int) -> list[np.ndarray]:
    """All labeled partial orders on m points (reflexive matrices filtered)."""
    if m == 0:
        return [np.zeros((0, 0), dtype=bool)]
    cells = [(a, b) for a in range(m) for b in range(m) if a != b]
    out = []
    for choice in product((False, True), repeat=len(cells)):
        leq = np.eye(m, dtype=bool)
        for (a, b), v in zip(cells, choice):
            leq[a, b] = v
        if _is_partial_order(leq):
            out.append(leq)
    return out


def _is_partial_order(leq: np.ndarray) -> bool:
    m = leq.shape[0]
    for a in range(m):
        for b in range(m):
            if a != b and leq[a, b] and leq[b, a]:
                return False
    for a in range(m):
        for b in range(m):
            if leq[a, b]:
                for c in range(m):
                    if leq[b, c] and not leq[a, c]:
                        return False
    return True


def _assoc_tables(m: int) -> list[np.ndarray]:
    """All associative total composition tables on m points."""
    if m == 0:
        return [np.zeros((0, 0), dtype=np.intp)]
    out = []
    for flat in product(range(m), repeat=m * m):
        comp = np.array(flat, dtype=np.intp).reshape(m, m)
        if _is_associative(comp):
            out.append(comp)
    return out


def _is_associative(comp: np.ndarray) -> bool:
    m = comp.shape[0]
    for a in range(m):
        for b in range(m):
            ab = comp[a, b]
            for c in range(m):
                if comp[ab, c] != comp[a, comp[b, c]]:
                    return False
    return True


def _encoding(leq: np.ndarray, comp: np.ndarray, perm: tuple[int, ...]) -> tuple:
    """Flat encoding of the structure relabeled by perm (new index of old i is perm[i])."""
    m = leq.shape[0]
    inv = [0] * m
    for old, new in enumerate(perm):
        inv[new] = old
    leq_bits = tuple(
        bool(leq[inv[a], inv[b]]) for a in range(m) for b in range(m)
    )
    comp_vals = tuple(
        perm[comp[inv[a], inv[b]]] for a in range(m) for b in range(m)
    )
    return leq_bits + comp_vals


def _is_canonical(leq: np.ndarray, comp: np.ndarray) -> bool:
    m = leq.shape[0]
    own = _encoding(leq, comp, tuple(range(m)))
    return all(
        own <= _encoding(leq, comp, perm) for perm in permutations(range(m))
    )


def enumerate_small(max_size: int, dedupe: bool = False) -> Iterator[FinStructure]:
    """Yield every valid labeled structure of size 0..max_size.

    With dedupe, only the lexicographically minimal representative of each
    isomorphism class is yielded (exact: all permutations are tried).
    Exhaustive enumeration is capped at size 3; beyond that the table space
    is out of desk-scale reach.
    """
    if max_size < 0:
        raise ValueError("max_size must be nonnegative")
    if max_size > ENUMERATION_SIZE_CAP:
        raise ResourceCapError(
            f"exhaustive enumeration is capped at size {ENUMERATION_SIZE_CAP}"
        )
    for m in range(max_size + 1):
        names = _ENUM_NAMES[:m]
        tables = _assoc_tables(m)
        for leq in _posets(m):
            for comp in tables:
                if dedupe and not _is_canonical(leq, comp):
                    continue
                yield FinStructure(names, leq, comp)
