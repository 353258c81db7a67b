"""Data model and textual format for linear conjunctive grammars.

A linear conjunctive grammar works over single-character terminals and named
nonterminals.  Every rule is either a conjunction of one or more conjuncts of
the shape ``u B v`` (terminal string, one nonterminal, terminal string), or a
plain terminal rule ``A -> y``.  A string satisfies a conjunctive rule when it
can be split according to *every* conjunct simultaneously; the language of a
nonterminal is the union over its rules.

Parse trees for such grammars are DAGs: a node applying a conjunctive rule has
one child group per conjunct and all groups span the same input interval, so
the shared leaves are represented here simply by equal spans.

The text format is line oriented (``#`` starts a comment):

    k = 1
    alphabet = a b c
    start = S
    S -> A & C
    A -> a A | D

Header lines declare the lookahead ``k``, the terminal alphabet (space
separated single characters) and the start nonterminal.  Rule lines list
``|``-separated alternatives of ``&``-separated conjuncts; a conjunct is a
whitespace-separated run of terminals with at most one nonterminal, and the
keyword ``eps`` alone denotes the empty terminal rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

EPS = "eps"

# Characters that would collide with the file format's own separators.
RESERVED_CHARS = frozenset("|&#")


class GrammarFormatError(ValueError):
    """Raised for malformed grammar or table documents."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Conjunct:
    """One component ``u body v`` of a rule; ``body is None`` means a bare
    terminal string ``u`` (only legal as the sole conjunct of a rule)."""

    u: str
    body: str | None
    v: str

    def __post_init__(self):
        if self.body is None and self.v:
            raise ValueError("a bare terminal conjunct cannot carry a right part")

    @property
    def is_left_recursive(self) -> bool:
        return self.body is not None and self.u == ""

    def text(self) -> str:
        tokens = list(self.u)
        if self.body is not None:
            tokens.append(self.body)
            tokens.extend(self.v)
        return " ".join(tokens) if tokens else EPS


@dataclass(frozen=True)
class Rule:
    lhs: str
    conjuncts: tuple[Conjunct, ...]
    id: int

    def __post_init__(self):
        if not self.conjuncts:
            raise ValueError(f"rule for {self.lhs} has no conjuncts")
        if any(c.body is None for c in self.conjuncts) and len(self.conjuncts) != 1:
            raise ValueError(
                f"rule for {self.lhs} mixes a bare terminal conjunct into a conjunction"
            )

    @property
    def is_terminal(self) -> bool:
        return self.conjuncts[0].body is None

    @property
    def terminal_body(self) -> str:
        if not self.is_terminal:
            raise ValueError(f"rule {self.id} is not a terminal rule")
        return self.conjuncts[0].u

    def text(self) -> str:
        return f"{self.lhs} -> " + " & ".join(c.text() for c in self.conjuncts)


@dataclass(frozen=True)
class Grammar:
    alphabet: frozenset[str]
    nonterminals: frozenset[str]
    rules: tuple[Rule, ...]
    start: str
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("lookahead k must be positive")
        if self.start not in self.nonterminals:
            raise ValueError(f"start symbol {self.start!r} is not a nonterminal")
        for t in self.alphabet:
            if len(t) != 1:
                raise ValueError(f"terminal {t!r} is not a single character")
        for idx, rule in enumerate(self.rules):
            if rule.id != idx:
                raise ValueError(f"rule id {rule.id} does not match position {idx}")
            if rule.lhs not in self.nonterminals:
                raise ValueError(f"rule {idx}: unknown nonterminal {rule.lhs!r}")
            for c in rule.conjuncts:
                for ch in c.u + c.v:
                    if ch not in self.alphabet:
                        raise ValueError(f"rule {idx}: terminal {ch!r} not in alphabet")
                if c.body is not None and c.body not in self.nonterminals:
                    raise ValueError(f"rule {idx}: unknown nonterminal {c.body!r}")

    @cached_property
    def _rules_by_lhs(self) -> dict[str, tuple[Rule, ...]]:
        by: dict[str, list[Rule]] = {nt: [] for nt in self.nonterminals}
        for rule in self.rules:
            by[rule.lhs].append(rule)
        return {nt: tuple(rs) for nt, rs in by.items()}

    def rules_for(self, nonterminal: str) -> tuple[Rule, ...]:
        return self._rules_by_lhs.get(nonterminal, ())


def make_grammar(
    alphabet: Iterable[str],
    rules: Iterable[tuple[str, tuple[Conjunct, ...]]],
    start: str,
    k: int,
    extra_nonterminals: Iterable[str] = (),
) -> Grammar:
    """Build a grammar, numbering the rules in the given order and deriving
    the nonterminal set from rule heads, conjunct bodies and *extra* names."""
    numbered = tuple(Rule(lhs, conjs, i) for i, (lhs, conjs) in enumerate(rules))
    nts = set(extra_nonterminals) | {start}
    for rule in numbered:
        nts.add(rule.lhs)
        for c in rule.conjuncts:
            if c.body is not None:
                nts.add(c.body)
    return Grammar(frozenset(alphabet), frozenset(nts), numbered, start, k)


# ---------------------------------------------------------------------------
# Text format


_HEADER_RE = re.compile(r"^\s*(k|alphabet|start)\s*=\s*(.*?)\s*$")


def _tokens(text: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", text)]


def parse_grammar(text: str) -> Grammar:
    """Parse a grammar document; raises :class:`GrammarFormatError` with a
    line/column position for malformed input or undeclared symbols."""
    k: int | None = None
    alphabet: list[str] = []
    alphabet_declared = False
    start: str | None = None
    seen_headers: set[str] = set()
    # Rules are collected as raw tokens first: classifying a token as terminal
    # versus nonterminal needs the full alphabet and the set of rule heads.
    raw_rules: list[tuple[str, list[list[tuple[str, int]]], int]] = []

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        if not line.strip():
            continue
        if "->" in line:
            lhs_part, rhs_part = line.split("->", 1)
            lhs_tokens = _tokens(lhs_part)
            if len(lhs_tokens) != 1:
                raise GrammarFormatError("rule must have a single left-hand symbol", line_no, 1)
            lhs, lhs_col = lhs_tokens[0]
            if lhs == EPS or any(ch in RESERVED_CHARS for ch in lhs):
                raise GrammarFormatError(f"illegal nonterminal name {lhs!r}", line_no, lhs_col)
            offset = len(lhs_part) + 2
            alts: list[list[tuple[str, int]]] = [[]]
            for tok, col in _tokens(rhs_part):
                if tok == "|":
                    alts.append([])
                else:
                    alts[-1].append((tok, offset + col))
            for alt in alts:
                if not alt:
                    raise GrammarFormatError("empty alternative", line_no, offset)
                raw_rules.append((lhs, [alt], line_no))
            continue
        header = _HEADER_RE.match(line)
        if header is None:
            raise GrammarFormatError(f"cannot parse line {raw_line.strip()!r}", line_no, 1)
        key, value = header.group(1), header.group(2)
        if key in seen_headers:
            raise GrammarFormatError(f"duplicate {key!r} directive", line_no, 1)
        seen_headers.add(key)
        if key == "k":
            if not value.isdigit() or int(value) < 1:
                raise GrammarFormatError("k must be a positive integer", line_no, 1)
            k = int(value)
        elif key == "alphabet":
            alphabet_declared = True
            for tok, col in _tokens(value):
                if len(tok) != 1:
                    raise GrammarFormatError(f"terminal {tok!r} is not a single character", line_no, col)
                if tok in RESERVED_CHARS:
                    raise GrammarFormatError(f"terminal {tok!r} is reserved", line_no, col)
                if tok in alphabet:
                    raise GrammarFormatError(f"terminal {tok!r} declared twice", line_no, col)
                alphabet.append(tok)
        else:
            toks = _tokens(value)
            if len(toks) != 1:
                raise GrammarFormatError("start must name a single nonterminal", line_no, 1)
            start = toks[0][0]

    if k is None:
        raise GrammarFormatError("missing 'k =' directive")
    if start is None:
        raise GrammarFormatError("missing 'start =' directive")

    heads = {lhs for lhs, _, _ in raw_rules}
    if not alphabet_declared:
        # Infer the alphabet: single-character rule tokens that name no rule.
        inferred: list[str] = []
        for _, alts, _ in raw_rules:
            for alt in alts:
                for tok, _ in alt:
                    if len(tok) == 1 and tok not in heads and tok not in RESERVED_CHARS:
                        if tok not in inferred:
                            inferred.append(tok)
        alphabet = sorted(inferred)
    clash = heads & set(alphabet)
    if clash:
        raise GrammarFormatError(f"{sorted(clash)[0]!r} is declared both terminal and nonterminal")
    if start not in heads:
        raise GrammarFormatError(f"start symbol {start!r} has no rules")

    alpha_set = set(alphabet)
    rule_specs: list[tuple[str, tuple[Conjunct, ...]]] = []
    for lhs, alts, line_no in raw_rules:
        for alt in alts:
            conjunct_groups: list[list[tuple[str, int]]] = [[]]
            for tok, col in alt:
                if tok == "&":
                    conjunct_groups.append([])
                else:
                    conjunct_groups[-1].append((tok, col))
            conjuncts: list[Conjunct] = []
            for group in conjunct_groups:
                if not group:
                    raise GrammarFormatError("empty conjunct", line_no, 1)
                conjuncts.append(_parse_conjunct(group, alpha_set, heads, line_no))
            if len(conjuncts) > 1 and any(c.body is None for c in conjuncts):
                raise GrammarFormatError(
                    "a conjunction may not contain a bare terminal conjunct", line_no, 1
                )
            rule_specs.append((lhs, tuple(conjuncts)))

    return make_grammar(alphabet, rule_specs, start, k)


def _parse_conjunct(
    group: list[tuple[str, int]],
    alphabet: set[str],
    heads: set[str],
    line_no: int,
) -> Conjunct:
    if len(group) == 1 and group[0][0] == EPS:
        return Conjunct("", None, "")
    u, v = "", ""
    body: str | None = None
    for tok, col in group:
        if tok == EPS:
            raise GrammarFormatError("'eps' may only stand alone", line_no, col)
        if any(ch in RESERVED_CHARS for ch in tok):
            raise GrammarFormatError(f"illegal symbol {tok!r}", line_no, col)
        if len(tok) == 1 and tok in alphabet:
            if body is None:
                u += tok
            else:
                v += tok
        else:
            if tok not in heads:
                raise GrammarFormatError(f"undeclared symbol {tok!r}", line_no, col)
            if body is not None:
                raise GrammarFormatError("conjunct has more than one nonterminal", line_no, col)
            body = tok
    if body is None:
        return Conjunct(u, None, "")
    return Conjunct(u, body, v)


def grammar_to_text(g: Grammar) -> str:
    lines = [f"k = {g.k}", "alphabet = " + " ".join(sorted(g.alphabet)), f"start = {g.start}"]
    lines.extend(rule.text() for rule in g.rules)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Structural checks


def is_aligned(g: Grammar) -> tuple[bool, list[int]]:
    """Check that every conjunctive rule starts each conjunct with one shared
    terminal; returns the verdict plus the ids of the offending rules."""
    offenders = []
    for rule in g.rules:
        if rule.is_terminal:
            continue
        firsts = {c.u[:1] for c in rule.conjuncts}
        if any(len(c.u) != 1 for c in rule.conjuncts) or len(firsts) != 1:
            offenders.append(rule.id)
    return (not offenders, offenders)


def is_left_recursive(rule: Rule) -> tuple[bool, list[int]]:
    """A rule is left-recursive when some conjunct starts with its nonterminal."""
    indices = [i for i, c in enumerate(rule.conjuncts) if c.is_left_recursive]
    return (bool(indices), indices)


def first_k(s: str, j: int) -> str:
    """Prefix of ``s`` of length ``min(j, len(s))``."""
    if j < 0:
        raise ValueError("prefix length must be non-negative")
    return s[:j]


# ---------------------------------------------------------------------------
# Parse trees


@dataclass(frozen=True)
class TreeNode:
    """A rule application covering ``w[start:end)``.  ``children`` holds one
    node per conjunct (the conjunct's nonterminal child); terminal-rule nodes
    have no children.  Equal spans stand in for shared leaves."""

    label: str
    start: int
    end: int
    rule_id: int
    children: tuple["TreeNode", ...]


@dataclass(frozen=True)
class ParseTree:
    root: TreeNode


@dataclass(frozen=True)
class FollowContext:
    """A subtree together with the input that remains to its right."""

    node: TreeNode
    follow: str


def iter_nodes(tree: ParseTree) -> Iterator[TreeNode]:
    """All distinct nodes of the DAG, in preorder, each yielded once."""
    seen: set[int] = set()
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(reversed(node.children))


def follow_contexts(tree: ParseTree, w: str) -> list[FollowContext]:
    return [FollowContext(node, w[node.end:]) for node in iter_nodes(tree)]


def check_tree(g: Grammar, w: str, tree: ParseTree) -> bool:
    """Verify a parse tree against the input string: spans, rule ids, rule
    left-hand sides, conjunct terminal segments and child placement."""
    root = tree.root
    if (root.start, root.end) != (0, len(w)):
        return False
    for node in iter_nodes(tree):
        if not (0 <= node.start <= node.end <= len(w)):
            return False
        if not (0 <= node.rule_id < len(g.rules)):
            return False
        rule = g.rules[node.rule_id]
        if rule.lhs != node.label:
            return False
        if rule.is_terminal:
            if node.children:
                return False
            if w[node.start:node.end] != rule.terminal_body:
                return False
            continue
        if len(node.children) != len(rule.conjuncts):
            return False
        for conjunct, child in zip(rule.conjuncts, node.children):
            lo = node.start + len(conjunct.u)
            hi = node.end - len(conjunct.v)
            if lo > hi:
                return False
            if (child.start, child.end) != (lo, hi) or child.label != conjunct.body:
                return False
            if w[node.start:lo] != conjunct.u or w[hi:node.end] != conjunct.v:
                return False
    return True
