"""Vectorized fixpoint engine for the staged derivation predicates.

Stage semantics: round r derives exactly the facts obtainable by one
application of each recursive clause over the stage r-1 facts (synchronous
update; both predicate families advance together).  Stage matrices record
the first round at which each fact appears, -1 for never.

Clause recap over a structure with order leq and composition table comp,
writing B for the domain-inclusion predicate and T[s] for the restricted
inclusion predicate at superscript s:

  stage 0:   B[a,b]    iff  b <= a  or  comp[b,c] <= a for some c
             T[s,a,b]  iff  a <= b and s == b
  step:      B[a,b]    iff  T[a,a,b]
                        or  B[a,c] and B[c,b]
                        or  a == comp[d,f], B[f,f'], b == comp[d,f']
             T[s,a,b]  iff  T[s,a,c] and T[s,c,b]
                        or  a == comp[c,d], T[s,c,c'], T[d,d,d'], b == comp[c',d']
                        or  T[s',a,b] and B[s,s']
"""

from __future__ import annotations

import numpy as np

_EINSUM_PATHS: dict[int, list] = {}

# Conservative per-call peak for the numpy engine, in bytes per m**3.
MEM_FACTOR = 20


def estimate_bytes(m: int) -> int:
    return MEM_FACTOR * m**3 + 4 * m**2 + 2**16


def _clause2_path(m: int, ts, wf, ef):
    path = _EINSUM_PATHS.get(m)
    if path is None:
        path = np.einsum_path("cx,dy,cda,xyb->ab", ts, wf, ef, ef, optimize="greedy")[0]
        _EINSUM_PATHS[m] = path
    return path


def fixpoint_numpy(leq: np.ndarray, comp: np.ndarray):
    """Return (black, tri, black_stage, tri_stage, last_stage)."""
    m = leq.shape[0]
    if m == 0:
        return (
            np.zeros((0, 0), dtype=bool),
            np.zeros((0, 0, 0), dtype=bool),
            np.full((0, 0), -1, dtype=np.int16),
            np.full((0, 0, 0), -1, dtype=np.int16),
            0,
        )

    black = leq.T.copy()
    black |= leq[comp, :].any(axis=1).T  # [b,c,a]: comp[b,c] <= a, any c
    tri = np.zeros((m, m, m), dtype=bool)
    for s in range(m):
        tri[s, :, s] = leq[:, s]
    black_stage = np.where(black, 0, -1).astype(np.int16)
    tri_stage = np.where(tri, 0, -1).astype(np.int16)

    # One-hot composition tensor: ef[c,d,a] = 1 iff comp[c,d] == a.
    ef = np.zeros((m, m, m), dtype=np.float32)
    cc, dd = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    ef[cc, dd, comp] = 1.0

    diag = np.arange(m)
    rounds = 0
    while True:
        rounds += 1
        if rounds > 32000:  # int16 stage cells; unreachable for sane inputs
            raise RuntimeError("fixpoint failed to stabilize within stage bounds")
        bf = black.astype(np.float32)
        tf = tri.astype(np.float32)
        w = tri[diag, diag, :]  # w[d,d'] = T[d,d,d']
        wf = w.astype(np.float32)

        new_black = black | w
        new_black |= (bf @ bf) > 0.0
        new_black |= np.einsum("dfa,fg,dgb->ab", ef, bf, ef, optimize=True) > 0.0

        new_tri = tri | (np.matmul(tf, tf) > 0.0)
        new_tri |= np.tensordot(bf, tf, axes=([1], [0])) > 0.0
        path = _clause2_path(m, tf[0], wf, ef)
        for s in range(m):
            grown = np.einsum("cx,dy,cda,xyb->ab", tf[s], wf, ef, ef, optimize=path)
            new_tri[s] |= grown > 0.0

        changed_b = new_black & ~black
        changed_t = new_tri & ~tri
        if not changed_b.any() and not changed_t.any():
            break
        black_stage[changed_b] = rounds
        tri_stage[changed_t] = rounds
        black = new_black
        tri = new_tri

    last = int(max(black_stage.max(initial=0), tri_stage.max(initial=0), 0))
    return black, tri, black_stage, tri_stage, last
