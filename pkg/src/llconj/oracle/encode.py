"""Integer encoding of grammars and strings for the membership kernels.

Rules are flattened into parallel int32 arrays so the hot dynamic-programming
loop can run under numba or as batched numpy without touching Python objects.
Encodings are cached per (grammar, alphabet): grammars are immutable and the
kernels only read the arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..grammar import Grammar


@dataclass(eq=False)
class EncodedGrammar:
    grammar: Grammar
    alphabet: tuple[str, ...]
    sym_index: dict[str, int]
    nt_names: tuple[str, ...]
    nt_index: dict[str, int]
    start: int
    rule_lhs: np.ndarray       # (R,) lhs nonterminal id
    rule_kind: np.ndarray      # (R,) 0 = terminal rule, 1 = conjunctive rule
    term_off: np.ndarray       # (R,) offset of the terminal body in `pool`
    term_len: np.ndarray       # (R,)
    conj_off: np.ndarray       # (R,) first conjunct index
    conj_cnt: np.ndarray       # (R,) number of conjuncts
    cu_off: np.ndarray         # per conjunct: left terminal part in `pool`
    cu_len: np.ndarray
    c_body: np.ndarray         # per conjunct: nonterminal id
    cv_off: np.ndarray         # per conjunct: right terminal part in `pool`
    cv_len: np.ndarray
    pool: np.ndarray           # flat terminal-id pool


def encode_grammar(g: Grammar, alphabet: tuple[str, ...] | None = None) -> EncodedGrammar:
    """Encode ``g`` over its own alphabet, or over a caller-supplied superset
    (used when comparing grammars with different alphabets)."""
    if alphabet is None:
        alphabet = tuple(sorted(g.alphabet))
    return _encode(g, alphabet)


@lru_cache(maxsize=128)
def _encode(g: Grammar, alphabet: tuple[str, ...]) -> EncodedGrammar:
    sym_index = {ch: i for i, ch in enumerate(alphabet)}
    missing = g.alphabet - set(alphabet)
    if missing:
        raise ValueError(f"alphabet override is missing {sorted(missing)!r}")
    nt_names = tuple(sorted(g.nonterminals))
    nt_index = {nt: i for i, nt in enumerate(nt_names)}

    pool: list[int] = []

    def intern(s: str) -> tuple[int, int]:
        off = len(pool)
        pool.extend(sym_index[ch] for ch in s)
        return off, len(s)

    rule_lhs, rule_kind = [], []
    term_off, term_len = [], []
    conj_off, conj_cnt = [], []
    cu_off, cu_len, c_body, cv_off, cv_len = [], [], [], [], []

    for rule in g.rules:
        rule_lhs.append(nt_index[rule.lhs])
        if rule.is_terminal:
            rule_kind.append(0)
            off, ln = intern(rule.terminal_body)
            term_off.append(off)
            term_len.append(ln)
            conj_off.append(len(c_body))
            conj_cnt.append(0)
        else:
            rule_kind.append(1)
            term_off.append(0)
            term_len.append(0)
            conj_off.append(len(c_body))
            conj_cnt.append(len(rule.conjuncts))
            for c in rule.conjuncts:
                uo, ul = intern(c.u)
                vo, vl = intern(c.v)
                cu_off.append(uo)
                cu_len.append(ul)
                c_body.append(nt_index[c.body])
                cv_off.append(vo)
                cv_len.append(vl)

    as32 = lambda xs: np.asarray(xs, dtype=np.int32)
    return EncodedGrammar(
        grammar=g,
        alphabet=alphabet,
        sym_index=sym_index,
        nt_names=nt_names,
        nt_index=nt_index,
        start=nt_index[g.start],
        rule_lhs=as32(rule_lhs),
        rule_kind=as32(rule_kind),
        term_off=as32(term_off),
        term_len=as32(term_len),
        conj_off=as32(conj_off),
        conj_cnt=as32(conj_cnt),
        cu_off=as32(cu_off),
        cu_len=as32(cu_len),
        c_body=as32(c_body),
        cv_off=as32(cv_off),
        cv_len=as32(cv_len),
        pool=as32(pool),
    )


def encode_string(enc: EncodedGrammar, w: str) -> np.ndarray:
    out = np.empty(len(w), dtype=np.int32)
    for i, ch in enumerate(w):
        sym = enc.sym_index.get(ch)
        if sym is None:
            raise ValueError(f"character {ch!r} is outside the alphabet")
        out[i] = sym
    return out


def kernel_args(enc: EncodedGrammar) -> tuple:
    """The positional array bundle shared by both kernel implementations."""
    return (
        enc.rule_lhs,
        enc.rule_kind,
        enc.term_off,
        enc.term_len,
        enc.conj_off,
        enc.conj_cnt,
        enc.cu_off,
        enc.cu_len,
        enc.c_body,
        enc.cv_off,
        enc.cv_len,
        enc.pool,
    )
