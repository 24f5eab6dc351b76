"""Naive per-stage reference evaluator for the derivation predicates.

Unlike the production engines, each round rebuilds the full stage-(r) sets
from scratch by evaluating every clause over the stage-(r-1) sets, exactly
following the recursive definitions.  Intended for cross-checking on small
structures; quadratic-to-quintic loops throughout.
"""

from __future__ import annotations

import numpy as np

from .structure import FinStructure

__all__ = ["fixpoint_reference"]


def _stage0(m, leq, comp):
    black = set()
    for a in range(m):
        for b in range(m):
            if leq[b][a] or any(leq[comp[b][c]][a] for c in range(m)):
                black.add((a, b))
    tri = set()
    for s in range(m):
        for a in range(m):
            if leq[a][s]:
                tri.add((s, a, s))
    return black, tri


def _next_black(m, comp, black, tri):
    out = set()
    for (s, a, b) in tri:
        if s == a:
            out.add((a, b))
    succ = {}
    for (a, c) in black:
        succ.setdefault(a, set()).add(c)
    for (a, c) in black:
        for b in succ.get(c, ()):
            out.add((a, b))
    for d in range(m):
        for f in range(m):
            a = comp[d][f]
            for f2 in succ.get(f, ()):
                out.add((a, comp[d][f2]))
    return out


def _next_tri(m, comp, black, tri):
    out = set()
    succ = {}
    for (s, a, c) in tri:
        succ.setdefault((s, a), set()).add(c)
    for (s, a, c) in tri:
        for b in succ.get((s, c), ()):
            out.add((s, a, b))
    diag = [(d, d2) for (d, dd, d2) in tri if d == dd]
    for (s, c, c2) in tri:
        for (d, d2) in diag:
            out.add((s, comp[c][d], comp[c2][d2]))
    bsucc = {}
    for (s, s2) in black:
        bsucc.setdefault(s, set()).add(s2)
    for (s2, a, b) in tri:
        for s in range(m):
            if s2 in bsucc.get(s, ()):
                out.add((s, a, b))
    return out


def fixpoint_reference(s: FinStructure):
    """Return (black, tri, black_stage, tri_stage, last_stage) as numpy arrays."""
    m = s.size
    leq = s.leq.tolist()
    comp = s.comp.tolist()
    black, tri = _stage0(m, leq, comp)
    black_when = {fact: 0 for fact in black}
    tri_when = {fact: 0 for fact in tri}
    r = 0
    while True:
        r += 1
        nb = _next_black(m, comp, black, tri)
        nt = _next_tri(m, comp, black, tri)
        # The recursion is inflationary: transitivity and superscript
        # weakening applied to reflexive facts regenerate every old fact.
        assert black <= nb and tri <= nt
        if nb == black and nt == tri:
            break
        for fact in nb - black:
            black_when[fact] = r
        for fact in nt - tri:
            tri_when[fact] = r
        black, tri = nb, nt

    black_arr = np.zeros((m, m), dtype=bool)
    black_stage = np.full((m, m), -1, dtype=np.int16)
    for (a, b), when in black_when.items():
        black_arr[a, b] = True
        black_stage[a, b] = when
    tri_arr = np.zeros((m, m, m), dtype=bool)
    tri_stage = np.full((m, m, m), -1, dtype=np.int16)
    for (sx, a, b), when in tri_when.items():
        tri_arr[sx, a, b] = True
        tri_stage[sx, a, b] = when
    last = int(max(black_stage.max(initial=0), tri_stage.max(initial=0), 0))
    return black_arr, tri_arr, black_stage, tri_stage, last
