"""numba implementation of the membership dynamic program.

``membership_table`` fills the boolean relation ``M[A, i, j]`` ("w[i:j) is
derivable from nonterminal A") by increasing span length.  Conjuncts whose
terminal parts are both empty reference the *same* span, so each span is
iterated to a fixpoint (at most one pass per nonterminal).  The batch entry
point reuses one table buffer across all strings of a batch.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _fill(M, w, n, rule_lhs, rule_kind, term_off, term_len, conj_off,
          conj_cnt, cu_off, cu_len, c_body, cv_off, cv_len, pool):
    num_rules = rule_lhs.shape[0]
    # Re-passes over a span only matter when some conjunct references the
    # same span it sits on, i.e. has empty terminal parts on both sides.
    needs_fixpoint = False
    for c in range(c_body.shape[0]):
        if cu_len[c] + cv_len[c] == 0:
            needs_fixpoint = True
            break
    for length in range(n + 1):
        for i in range(n - length + 1):
            j = i + length
            rerun = True
            while rerun:
                changed = False
                for r in range(num_rules):
                    lhs = rule_lhs[r]
                    if M[lhs, i, j]:
                        continue
                    if rule_kind[r] == 0:
                        if term_len[r] != length:
                            continue
                        off = term_off[r]
                        ok = True
                        for p in range(length):
                            if pool[off + p] != w[i + p]:
                                ok = False
                                break
                    else:
                        ok = True
                        c_end = conj_off[r] + conj_cnt[r]
                        for c in range(conj_off[r], c_end):
                            ul = cu_len[c]
                            vl = cv_len[c]
                            if ul + vl > length:
                                ok = False
                                break
                            uo = cu_off[c]
                            for p in range(ul):
                                if pool[uo + p] != w[i + p]:
                                    ok = False
                                    break
                            if not ok:
                                break
                            vo = cv_off[c]
                            for p in range(vl):
                                if pool[vo + p] != w[j - vl + p]:
                                    ok = False
                                    break
                            if not ok:
                                break
                            if not M[c_body[c], i + ul, j - vl]:
                                ok = False
                                break
                    if ok:
                        M[lhs, i, j] = True
                        changed = True
                rerun = changed and needs_fixpoint


@njit(cache=True)
def membership_table(w, nt_count, rule_lhs, rule_kind, term_off, term_len,
                     conj_off, conj_cnt, cu_off, cu_len, c_body, cv_off,
                     cv_len, pool):
    n = w.shape[0]
    M = np.zeros((nt_count, n + 1, n + 1), dtype=np.bool_)
    _fill(M, w, n, rule_lhs, rule_kind, term_off, term_len, conj_off,
          conj_cnt, cu_off, cu_len, c_body, cv_off, cv_len, pool)
    return M


@njit(cache=True)
def recognize_batch(W, start, nt_count, rule_lhs, rule_kind, term_off,
                    term_len, conj_off, conj_cnt, cu_off, cu_len, c_body,
                    cv_off, cv_len, pool):
    count, n = W.shape
    out = np.zeros(count, dtype=np.bool_)
    M = np.zeros((nt_count, n + 1, n + 1), dtype=np.bool_)
    for s in range(count):
        M[:] = False
        _fill(M, W[s], n, rule_lhs, rule_kind, term_off, term_len, conj_off,
              conj_cnt, cu_off, cu_len, c_body, cv_off, cv_len, pool)
        out[s] = M[start, 0, n]
    return out
