"""Pure-numpy fallback for the membership dynamic program.

Per-string numpy would drown in call overhead, so this path is vectorized
across a *batch* of equal-length strings: the table is ``M[A, i, j, s]`` with
the string axis last, and every rule check is one boolean vector operation.
Single-string queries run as a batch of one.
"""

from __future__ import annotations

import numpy as np

# Cap on bytes held by one batch table; larger inputs are chunked.
_TABLE_BYTES = 32 << 20


def _membership_chunk(W, nt_count, rule_lhs, rule_kind, term_off, term_len,
                      conj_off, conj_cnt, cu_off, cu_len, c_body, cv_off,
                      cv_len, pool):
    count, n = W.shape
    num_rules = rule_lhs.shape[0]
    M = np.zeros((nt_count, n + 1, n + 1, count), dtype=np.bool_)
    # Same-span references exist only through conjuncts with empty terminal
    # parts; without them every span settles in a single pass.
    needs_fixpoint = bool(np.any(cu_len + cv_len == 0)) if c_body.size else False
    for length in range(n + 1):
        for i in range(n - length + 1):
            j = i + length
            rerun = True
            while rerun:
                changed = False
                for r in range(num_rules):
                    cell = M[rule_lhs[r], i, j]
                    if cell.all():
                        continue
                    if rule_kind[r] == 0:
                        if term_len[r] != length:
                            continue
                        off = term_off[r]
                        sat = (W[:, i:j] == pool[off:off + length]).all(axis=1)
                    else:
                        sat = np.ones(count, dtype=np.bool_)
                        for c in range(conj_off[r], conj_off[r] + conj_cnt[r]):
                            ul = int(cu_len[c])
                            vl = int(cv_len[c])
                            if ul + vl > length:
                                sat = np.zeros(count, dtype=np.bool_)
                                break
                            if ul:
                                uo = int(cu_off[c])
                                sat &= (W[:, i:i + ul] == pool[uo:uo + ul]).all(axis=1)
                            if vl:
                                vo = int(cv_off[c])
                                sat &= (W[:, j - vl:j] == pool[vo:vo + vl]).all(axis=1)
                            sat &= M[c_body[c], i + ul, j - vl]
                            if not sat.any():
                                break
                    fresh = sat & ~cell
                    if fresh.any():
                        cell |= fresh
                        changed = True
                rerun = changed and needs_fixpoint
    return M


def membership_table(w, nt_count, *arrays):
    M = _membership_chunk(w.reshape(1, -1), nt_count, *arrays)
    return M[:, :, :, 0]


def recognize_batch(W, start, nt_count, *arrays):
    count, n = W.shape
    out = np.zeros(count, dtype=np.bool_)
    chunk = max(1, _TABLE_BYTES // (nt_count * (n + 1) * (n + 1) or 1))
    for lo in range(0, count, chunk):
        hi = min(count, lo + chunk)
        M = _membership_chunk(W[lo:hi], nt_count, *arrays)
        out[lo:hi] = M[start, 0, n]
    return out
