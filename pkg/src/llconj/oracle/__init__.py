"""Brute-force recognizer, parse-tree builder and language enumerator.

This module is the ground truth the rest of the package is tested against.
Membership is decided by dynamic programming over all substrings (``M[A, i,
j]`` = "w[i:j) is derivable from A"), computed by increasing span length with
a per-span fixpoint for conjuncts whose terminal parts are empty.  The hot
kernel has a numba and a batched-numpy implementation (see ``backend``); tree
construction and enumeration happen in Python on top of the finished table,
since they only ever run on member strings.
"""

from __future__ import annotations

import itertools
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..grammar import Grammar, ParseTree, Rule, TreeNode
from .backend import active_backend, membership_array, recognize_batch
from .encode import encode_grammar, encode_string

DEFAULT_TREE_CAP = 10_000

__all__ = [
    "MembershipTable",
    "TreeOverflowError",
    "membership",
    "recognize",
    "recognize_many",
    "build_tree",
    "enumerate_trees",
    "enumerate_language",
    "sorted_members",
    "compare_languages",
    "active_backend",
]


class TreeOverflowError(RuntimeError):
    """More parse trees than the enumeration budget (possibly infinitely many)."""

    def __init__(self, cap: int, found: int | None = None):
        self.cap = cap
        self.found = found
        detail = "unboundedly many" if found is None else f"at least {found}"
        super().__init__(f"string has {detail} parse trees (cap {cap})")


@dataclass
class MembershipTable:
    """Boolean relation ``M(A, i, j)`` over one input string."""

    grammar: Grammar
    input: str
    _nt_index: dict[str, int]
    _table: np.ndarray

    def get(self, nonterminal: str, i: int, j: int) -> bool:
        return bool(self._table[self._nt_index[nonterminal], i, j])


def _validate_input(g: Grammar, w: str) -> None:
    for ch in w:
        if ch not in g.alphabet:
            raise ValueError(f"character {ch!r} is outside the alphabet")


def membership(g: Grammar, w: str, backend: str | None = None) -> MembershipTable:
    _validate_input(g, w)
    enc = encode_grammar(g)
    table = membership_array(enc, encode_string(enc, w), backend)
    return MembershipTable(g, w, dict(enc.nt_index), table)


def recognize(g: Grammar, w: str, backend: str | None = None) -> bool:
    return membership(g, w, backend).get(g.start, 0, len(w))


def recognize_many(g: Grammar, strings: Sequence[str], backend: str | None = None) -> list[bool]:
    """Batch recognition; strings are grouped by length for the kernels."""
    enc = encode_grammar(g)
    out = [False] * len(strings)
    by_len: dict[int, list[int]] = {}
    for idx, w in enumerate(strings):
        _validate_input(g, w)
        by_len.setdefault(len(w), []).append(idx)
    for n, indices in by_len.items():
        W = np.empty((len(indices), n), dtype=np.int32)
        for row, idx in enumerate(indices):
            W[row] = encode_string(enc, strings[idx])
        verdicts = recognize_batch(enc, W, backend)
        for row, idx in enumerate(indices):
            out[idx] = bool(verdicts[row])
    return out


def _strings_of_length(alphabet: tuple[str, ...], n: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    ids = list(itertools.product(range(len(alphabet)), repeat=n))
    W = np.array(ids, dtype=np.int32).reshape(len(ids), n)
    return W, ids


def enumerate_language(g: Grammar, max_len: int, backend: str | None = None) -> set[str]:
    """All member strings of length at most ``max_len``, by exhaustive
    iteration over the alphabet's strings in length order."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    enc = encode_grammar(g)
    alphabet = enc.alphabet
    members: set[str] = set()
    for n in range(max_len + 1):
        W, ids = _strings_of_length(alphabet, n)
        verdicts = recognize_batch(enc, W, backend)
        for row in np.flatnonzero(verdicts):
            members.add("".join(alphabet[s] for s in ids[row]))
    return members


def sorted_members(g: Grammar, max_len: int, backend: str | None = None) -> list[str]:
    return sorted(enumerate_language(g, max_len, backend), key=lambda w: (len(w), w))


def compare_languages(
    g1: Grammar, g2: Grammar, max_len: int, backend: str | None = None
) -> str | None:
    """First string (shortest, then lexicographic over the union alphabet) on
    which the two grammars disagree, or None when they agree up to ``max_len``."""
    alphabet = tuple(sorted(g1.alphabet | g2.alphabet))
    enc1 = encode_grammar(g1, alphabet)
    enc2 = encode_grammar(g2, alphabet)
    for n in range(max_len + 1):
        W, ids = _strings_of_length(alphabet, n)
        v1 = recognize_batch(enc1, W, backend)
        v2 = recognize_batch(enc2, W, backend)
        disagree = np.flatnonzero(v1 != v2)
        if disagree.size:
            row = int(disagree[0])
            return "".join(alphabet[s] for s in ids[row])
    return None


# ---------------------------------------------------------------------------
# Parse-tree construction and enumeration


@contextmanager
def _recursion_headroom(extra: int = 20_000):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, extra))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


class _TreeWorkspace:
    """Shared state for tree construction over one membership table."""

    def __init__(self, g: Grammar, w: str, table: MembershipTable):
        self.g = g
        self.w = w
        self.table = table
        self._satisfied_cache: dict[tuple[str, int, int], list[Rule]] = {}
        self._order_cache: dict[tuple[int, int], dict[str, int]] = {}

    def holds(self, nt: str, i: int, j: int) -> bool:
        return self.table.get(nt, i, j)

    def rule_applies(self, rule: Rule, i: int, j: int) -> bool:
        w = self.w
        if rule.is_terminal:
            return w[i:j] == rule.terminal_body
        for c in rule.conjuncts:
            lo = i + len(c.u)
            hi = j - len(c.v)
            if lo > hi:
                return False
            if w[i:lo] != c.u or w[hi:j] != c.v:
                return False
            if not self.holds(c.body, lo, hi):
                return False
        return True

    def applicable_rules(self, nt: str, i: int, j: int) -> list[Rule]:
        key = (nt, i, j)
        cached = self._satisfied_cache.get(key)
        if cached is None:
            cached = [r for r in self.g.rules_for(nt) if self.rule_applies(r, i, j)]
            self._satisfied_cache[key] = cached
        return cached

    def span_order(self, i: int, j: int) -> dict[str, int]:
        """Replay the per-span fixpoint and record the order in which each
        nonterminal first became derivable on this span.  Same-span conjunct
        references resolved against entries set strictly earlier are exactly
        the derivations that ground the table, so this order witnesses a
        finite tree for every true entry."""
        cached = self._order_cache.get((i, j))
        if cached is not None:
            return cached
        order: dict[str, int] = {}
        w = self.w
        counter = 0
        changed = True
        while changed:
            changed = False
            for rule in self.g.rules:
                if rule.lhs in order or not self.holds(rule.lhs, i, j):
                    continue
                if rule.is_terminal:
                    ok = w[i:j] == rule.terminal_body
                else:
                    ok = True
                    for c in rule.conjuncts:
                        lo = i + len(c.u)
                        hi = j - len(c.v)
                        if lo > hi or w[i:lo] != c.u or w[hi:j] != c.v:
                            ok = False
                            break
                        if (lo, hi) == (i, j):
                            if c.body not in order:
                                ok = False
                                break
                        elif not self.holds(c.body, lo, hi):
                            ok = False
                            break
                if ok:
                    order[rule.lhs] = counter
                    counter += 1
                    changed = True
        self._order_cache[(i, j)] = order
        return order

    def grounded_rule(self, nt: str, i: int, j: int) -> Rule:
        """Lowest-id applicable rule whose same-span references were derived
        strictly earlier; guarantees a finite tree even when rules cycle
        through the same span."""
        order = self.span_order(i, j)
        own = order[nt]
        for rule in self.applicable_rules(nt, i, j):
            ok = True
            if not rule.is_terminal:
                for c in rule.conjuncts:
                    if c.u == "" and c.v == "" and order.get(c.body, own) >= own:
                        ok = False
                        break
            if ok:
                return rule
        raise AssertionError("membership table entry has no grounded rule")


def build_tree(g: Grammar, w: str, backend: str | None = None) -> ParseTree | None:
    """Deterministic parse tree for a member string (lowest rule id at each
    node among the well-founded choices), or None for a non-member."""
    table = membership(g, w, backend)
    if not table.get(g.start, 0, len(w)):
        return None
    ws = _TreeWorkspace(g, w, table)
    memo: dict[tuple[str, int, int], TreeNode] = {}

    def node(nt: str, i: int, j: int) -> TreeNode:
        key = (nt, i, j)
        got = memo.get(key)
        if got is not None:
            return got
        rule = ws.grounded_rule(nt, i, j)
        if rule.is_terminal:
            built = TreeNode(nt, i, j, rule.id, ())
        else:
            children = tuple(
                node(c.body, i + len(c.u), j - len(c.v)) for c in rule.conjuncts
            )
            built = TreeNode(nt, i, j, rule.id, children)
        memo[key] = built
        return built

    with _recursion_headroom():
        return ParseTree(node(g.start, 0, len(w)))


def _reachable_entries(ws: _TreeWorkspace, root: tuple[str, int, int]) -> set[tuple[str, int, int]]:
    seen: set[tuple[str, int, int]] = set()
    stack = [root]
    while stack:
        entry = stack.pop()
        if entry in seen:
            continue
        seen.add(entry)
        nt, i, j = entry
        for rule in ws.applicable_rules(nt, i, j):
            for c in rule.conjuncts:
                if c.body is not None:
                    stack.append((c.body, i + len(c.u), j - len(c.v)))
    return seen


def _has_same_span_cycle(ws: _TreeWorkspace, reachable: set[tuple[str, int, int]]) -> bool:
    """Detect a cycle among same-span rule choices: such a cycle can be pumped
    inside a valid tree, so the number of distinct trees is infinite."""
    edges: dict[tuple[str, int, int], list[tuple[str, int, int]]] = {}
    for entry in reachable:
        nt, i, j = entry
        outs = []
        for rule in ws.applicable_rules(nt, i, j):
            for c in rule.conjuncts:
                if c.body is not None and c.u == "" and c.v == "":
                    outs.append((c.body, i, j))
        edges[entry] = outs
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {entry: WHITE for entry in reachable}
    for origin in reachable:
        if color[origin] != WHITE:
            continue
        stack: list[tuple[tuple[str, int, int], int]] = [(origin, 0)]
        color[origin] = GRAY
        while stack:
            entry, pos = stack[-1]
            outs = edges[entry]
            if pos == len(outs):
                color[entry] = BLACK
                stack.pop()
                continue
            stack[-1] = (entry, pos + 1)
            nxt = outs[pos]
            if color[nxt] == GRAY:
                return True
            if color[nxt] == WHITE:
                color[nxt] = GRAY
                stack.append((nxt, 0))
    return False


def enumerate_trees(
    g: Grammar, w: str, cap: int = DEFAULT_TREE_CAP, backend: str | None = None
) -> list[ParseTree]:
    """All structurally distinct parse trees of ``w`` (every consistent rule
    choice at every node), or raise :class:`TreeOverflowError` past ``cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    table = membership(g, w, backend)
    root = (g.start, 0, len(w))
    if not table.get(*root):
        return []
    ws = _TreeWorkspace(g, w, table)
    reachable = _reachable_entries(ws, root)
    if _has_same_span_cycle(ws, reachable):
        raise TreeOverflowError(cap)

    counts: dict[tuple[str, int, int], int] = {}

    def count(entry: tuple[str, int, int]) -> int:
        got = counts.get(entry)
        if got is not None:
            return got
        nt, i, j = entry
        total = 0
        for rule in ws.applicable_rules(nt, i, j):
            combo = 1
            for c in rule.conjuncts:
                if c.body is None:
                    continue
                combo *= count((c.body, i + len(c.u), j - len(c.v)))
                if combo == 0:
                    break
            total += combo
        counts[entry] = total
        return total

    with _recursion_headroom():
        total = count(root)
        if total > cap:
            raise TreeOverflowError(cap, found=total)

        variants: dict[tuple[str, int, int], list[TreeNode]] = {}

        def build(entry: tuple[str, int, int]) -> list[TreeNode]:
            got = variants.get(entry)
            if got is not None:
                return got
            nt, i, j = entry
            out: list[TreeNode] = []
            for rule in ws.applicable_rules(nt, i, j):
                if rule.is_terminal:
                    out.append(TreeNode(nt, i, j, rule.id, ()))
                    continue
                child_lists = [
                    build((c.body, i + len(c.u), j - len(c.v))) for c in rule.conjuncts
                ]
                for combo in itertools.product(*child_lists):
                    out.append(TreeNode(nt, i, j, rule.id, combo))
            variants[entry] = out
            return out

        return [ParseTree(node) for node in build(root)]
