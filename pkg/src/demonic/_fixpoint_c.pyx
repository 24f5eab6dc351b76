# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixpoint kernel over packed 64-bit bitset rows.

Same synchronous stage semantics as _fixpoint_py.fixpoint_numpy; the two
engines must agree bit for bit on predicate and stage matrices.  Rows of the
predicate matrices are packed little-endian: bit b of word w covers column
w*64 + b.
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memcpy, memset

cnp.import_array()

cdef extern from *:
    """
    static inline int ctz64(unsigned long long x) { return __builtin_ctzll(x); }
    """
    int ctz64(unsigned long long x) nogil


# Peak allocation estimate in bytes: three packed cubes (current, next,
# product-row cache) at m^3/8 each, the int16 stage cube, the unpacked
# boolean cube handed back to Python, and slack.
def estimate_bytes(m):
    return (3 * m**3) // 8 + 2 * m**3 + m**3 + 8 * m**2 + 2**16


def fixpoint_packed(cnp.uint8_t[:, ::1] leq, cnp.int32_t[:, ::1] comp):
    """Return (black, tri, black_stage, tri_stage, last_stage)."""
    cdef Py_ssize_t m = leq.shape[0]
    black_arr = np.zeros((m, m), dtype=np.uint8)
    tri_arr = np.zeros((m, m, m), dtype=np.uint8)
    bstage_arr = np.full((m, m), -1, dtype=np.int16)
    tstage_arr = np.full((m, m, m), -1, dtype=np.int16)
    if m == 0:
        return black_arr.astype(bool), tri_arr.astype(bool), bstage_arr, tstage_arr, 0

    cdef Py_ssize_t words = (m + 63) >> 6
    b_cur_arr = np.zeros((m, words), dtype=np.uint64)
    b_new_arr = np.zeros((m, words), dtype=np.uint64)
    t_cur_arr = np.zeros((m, m, words), dtype=np.uint64)
    t_new_arr = np.zeros((m, m, words), dtype=np.uint64)
    rm_arr = np.zeros((m, m, words), dtype=np.uint64)

    cdef cnp.uint64_t[:, ::1] b_cur = b_cur_arr
    cdef cnp.uint64_t[:, ::1] b_new = b_new_arr
    cdef cnp.uint64_t[:, :, ::1] t_cur = t_cur_arr
    cdef cnp.uint64_t[:, :, ::1] t_new = t_new_arr
    cdef cnp.uint64_t[:, :, ::1] rm = rm_arr
    cdef cnp.int16_t[:, ::1] bstage = bstage_arr
    cdef cnp.int16_t[:, :, ::1] tstage = tstage_arr
    cdef cnp.uint8_t[:, ::1] black = black_arr
    cdef cnp.uint8_t[:, :, ::1] tri = tri_arr

    cdef Py_ssize_t a, b, c, cp, d, dp, f, s, sp, w, tgt
    cdef cnp.uint64_t word, diff
    cdef int bit, rounds = 0, changed = 1, last = 0
    cdef int ok

    with nogil:
        # stage 0: B[a,b] iff b <= a or comp[b,c] <= a for some c
        for a in range(m):
            for b in range(m):
                ok = leq[b, a]
                if not ok:
                    for c in range(m):
                        if leq[comp[b, c], a]:
                            ok = 1
                            break
                if ok:
                    b_cur[a, b >> 6] |= (<cnp.uint64_t>1) << (b & 63)
                    bstage[a, b] = 0
        # stage 0: T[s,a,s] iff a <= s
        for s in range(m):
            for a in range(m):
                if leq[a, s]:
                    t_cur[s, a, s >> 6] |= (<cnp.uint64_t>1) << (s & 63)
                    tstage[s, a, s] = 0

        while changed:
            changed = 0
            rounds += 1
            memcpy(&b_new[0, 0], &b_cur[0, 0], m * words * 8)
            memcpy(&t_new[0, 0, 0], &t_cur[0, 0, 0], m * m * words * 8)

            # black from-tri: row over b is the diagonal plane row T[a,a]
            for a in range(m):
                for w in range(words):
                    b_new[a, w] |= t_cur[a, a, w]
            # black transitivity
            for a in range(m):
                for w in range(words):
                    word = b_cur[a, w]
                    while word:
                        c = (w << 6) + ctz64(word)
                        word &= word - 1
                        for dp in range(words):
                            b_new[a, dp] |= b_cur[c, dp]
            # black left-factor: comp[d,f] gains comp[d,f'] for every f' above f
            for d in range(m):
                for f in range(m):
                    a = comp[d, f]
                    for w in range(words):
                        word = b_cur[f, w]
                        while word:
                            b = comp[d, (w << 6) + ctz64(word)]
                            word &= word - 1
                            b_new[a, b >> 6] |= (<cnp.uint64_t>1) << (b & 63)

            # product-row cache: rm[d,c'] = { comp[c',d'] : T[d,d,d'] }
            memset(&rm[0, 0, 0], 0, m * m * words * 8)
            for d in range(m):
                for w in range(words):
                    word = t_cur[d, d, w]
                    while word:
                        dp = (w << 6) + ctz64(word)
                        word &= word - 1
                        for cp in range(m):
                            b = comp[cp, dp]
                            rm[d, cp, b >> 6] |= (<cnp.uint64_t>1) << (b & 63)

            for s in range(m):
                # tri transitivity within the plane
                for a in range(m):
                    for w in range(words):
                        word = t_cur[s, a, w]
                        while word:
                            c = (w << 6) + ctz64(word)
                            word &= word - 1
                            for dp in range(words):
                                t_new[s, a, dp] |= t_cur[s, c, dp]
                # tri factor-pair via the product-row cache
                for c in range(m):
                    for w in range(words):
                        word = t_cur[s, c, w]
                        while word:
                            cp = (w << 6) + ctz64(word)
                            word &= word - 1
                            for d in range(m):
                                tgt = comp[c, d]
                                for dp in range(words):
                                    t_new[s, tgt, dp] |= rm[d, cp, dp]
                # tri superscript weakening: inherit planes of everything above s
                for w in range(words):
                    word = b_cur[s, w]
                    while word:
                        sp = (w << 6) + ctz64(word)
                        word &= word - 1
                        if sp != s:
                            for a in range(m):
                                for dp in range(words):
                                    t_new[s, a, dp] |= t_cur[sp, a, dp]

            # stage bookkeeping
            for a in range(m):
                for w in range(words):
                    diff = b_new[a, w] & ~b_cur[a, w]
                    while diff:
                        b = (w << 6) + ctz64(diff)
                        diff &= diff - 1
                        bstage[a, b] = <cnp.int16_t>rounds
                        changed = 1
            for s in range(m):
                for a in range(m):
                    for w in range(words):
                        diff = t_new[s, a, w] & ~t_cur[s, a, w]
                        while diff:
                            b = (w << 6) + ctz64(diff)
                            diff &= diff - 1
                            tstage[s, a, b] = <cnp.int16_t>rounds
                            changed = 1
            if changed:
                last = rounds
                memcpy(&b_cur[0, 0], &b_new[0, 0], m * words * 8)
                memcpy(&t_cur[0, 0, 0], &t_new[0, 0, 0], m * m * words * 8)
            if rounds > 32000:
                break

        for a in range(m):
            for b in range(m):
                if bstage[a, b] >= 0:
                    black[a, b] = 1
        for s in range(m):
            for a in range(m):
                for b in range(m):
                    if tstage[s, a, b] >= 0:
                        tri[s, a, b] = 1

    if rounds > 32000:
        raise RuntimeError("fixpoint failed to stabilize within stage bounds")
    return black_arr.astype(bool), tri_arr.astype(bool), bstage_arr, tstage_arr, last
