"""Lookahead tables: bounded inference, validation, lookup and persistence.

A lookahead-k table is a partial map ``(nonterminal, window) -> rule id``
where the window is the next ``k`` input characters starting at the first
position a subtree covers (shorter only when the input ends inside it).  A
grammar admits such a table exactly when every subtree's applied rule is
forced by its window.

There is no known closed-form decision procedure for these grammars, so
``infer_table`` enumerates every parse tree of every member string up to a
length bound and accumulates the witnessed (nonterminal, window) -> rule
pairs.  The result is a sub-table of any true table: raising the bound can
only add entries or expose a conflict, never change an existing entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import oracle
from .grammar import EPS, Conjunct, Grammar, GrammarFormatError, iter_nodes

DEFAULT_TREE_CAP = oracle.DEFAULT_TREE_CAP


@dataclass(frozen=True)
class LLTable:
    """Partial map from (nonterminal, lookahead window) to rule id.  Windows
    shorter than ``k`` occur only where the window runs into end of input."""

    k: int
    entries: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("lookahead k must be positive")
        for (_, x) in self.entries:
            if len(x) > self.k:
                raise ValueError(f"lookahead {x!r} longer than k={self.k}")

    def sorted_items(self) -> list[tuple[tuple[str, str], int]]:
        return sorted(self.entries.items())


@dataclass(frozen=True)
class Witness:
    """A member string plus the start position of the subtree it exhibits."""

    string: str
    pos: int


@dataclass(frozen=True)
class TableConflict:
    """Evidence that a table cannot exist / does not describe the grammar.

    ``kind`` is ``"conflict"`` (two rules witnessed at one window during
    inference), ``"mismatch"`` (a tree applies a rule other than the table
    entry) or ``"undefined"`` (a witnessed window has no table entry).
    """

    nonterminal: str
    lookahead: str
    rule1: int | None
    rule2: int
    witness1: Witness | None
    witness2: Witness
    kind: str = "conflict"

    def describe(self, g: Grammar) -> str:
        x = self.lookahead or EPS
        if self.kind == "conflict":
            return (
                f"conflict at ({self.nonterminal}, {x}): "
                f"rule [{self.rule1}] {g.rules[self.rule1].text()} on "
                f"{self.witness1.string!r}@{self.witness1.pos} vs "
                f"rule [{self.rule2}] {g.rules[self.rule2].text()} on "
                f"{self.witness2.string!r}@{self.witness2.pos}"
            )
        if self.kind == "undefined":
            return (
                f"undefined entry ({self.nonterminal}, {x}) needed by rule "
                f"[{self.rule2}] on {self.witness2.string!r}@{self.witness2.pos}"
            )
        return (
            f"table maps ({self.nonterminal}, {x}) to rule [{self.rule1}] but "
            f"{self.witness2.string!r}@{self.witness2.pos} applies rule [{self.rule2}]"
        )


def lookup(t: LLTable, nonterminal: str, x: str) -> int | None:
    if len(x) > t.k:
        raise ValueError(f"lookahead {x!r} longer than k={t.k}")
    return t.entries.get((nonterminal, x))


def _walk_windows(g: Grammar, k: int, max_len: int, cap: int):
    """Yield (window key, rule id, witness) for every subtree of every parse
    tree of every member string up to ``max_len``, in deterministic order."""
    for w in oracle.sorted_members(g, max_len):
        for tree in oracle.enumerate_trees(g, w, cap):
            for node in iter_nodes(tree):
                x = w[node.start:node.start + k]
                yield (node.label, x), node.rule_id, Witness(w, node.start)


def infer_table(g: Grammar, k: int, max_len: int, cap: int = DEFAULT_TREE_CAP) -> LLTable | TableConflict:
    """Accumulate the witnessed table at lookahead ``k`` over all member
    strings up to ``max_len``; returns the first conflict (by sorted
    nonterminal/window) if one window forces two different rules."""
    if k < 1:
        raise ValueError("lookahead k must be positive")
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    entries: dict[tuple[str, str], int] = {}
    witnesses: dict[tuple[str, str, int], Witness] = {}
    conflicts: dict[tuple[str, str], int] = {}
    for key, rule_id, witness in _walk_windows(g, k, max_len, cap):
        witnesses.setdefault((key[0], key[1], rule_id), witness)
        seen = entries.setdefault(key, rule_id)
        if seen != rule_id and key not in conflicts:
            conflicts[key] = rule_id
    if conflicts:
        key = min(conflicts)
        nt, x = key
        r1 = entries[key]
        r2 = conflicts[key]
        return TableConflict(nt, x, r1, r2, witnesses[(nt, x, r1)], witnesses[(nt, x, r2)])
    return LLTable(k, entries)


def validate_table(
    g: Grammar, t: LLTable, max_len: int, cap: int = DEFAULT_TREE_CAP
) -> TableConflict | None:
    """Check every subtree of every member string up to ``max_len`` against
    the table; returns None when all applied rules match defined entries,
    otherwise the first discrepancy."""
    for key, rule_id, witness in _walk_windows(g, t.k, max_len, cap):
        expected = t.entries.get(key)
        if expected is None:
            return TableConflict(key[0], key[1], None, rule_id, None, witness, kind="undefined")
        if expected != rule_id:
            return TableConflict(key[0], key[1], expected, rule_id, None, witness, kind="mismatch")
    return None


# ---------------------------------------------------------------------------
# Persistence: one header line, then one line per defined cell.


def store_table(t: LLTable, g: Grammar) -> str:
    lines = [f"k = {t.k}"]
    for (nt, x), rule_id in t.sorted_items():
        lines.append(f"{nt} | {x or EPS} | {g.rules[rule_id].text()}")
    return "\n".join(lines) + "\n"


def load_table(text: str, g: Grammar) -> LLTable:
    """Parse a stored table back against its grammar; rule text is matched
    structurally to recover rule ids."""
    rule_ids: dict[tuple[str, tuple[Conjunct, ...]], int] = {
        (r.lhs, r.conjuncts): r.id for r in g.rules
    }
    k: int | None = None
    entries: dict[tuple[str, str], int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if k is None:
            if not line.startswith("k") or "=" not in line:
                raise GrammarFormatError("table must start with a 'k = <int>' line", line_no)
            value = line.split("=", 1)[1].strip()
            if not value.isdigit() or int(value) < 1:
                raise GrammarFormatError("k must be a positive integer", line_no)
            k = int(value)
            continue
        parts = [p.strip() for p in line.split("|", 2)]
        if len(parts) != 3:
            raise GrammarFormatError("expected '<NT> | <lookahead> | <rule>'", line_no)
        nt, x_text, rule_text = parts
        if nt not in g.nonterminals:
            raise GrammarFormatError(f"unknown nonterminal {nt!r}", line_no)
        x = "" if x_text == EPS else x_text
        if len(x) > k:
            raise GrammarFormatError(f"lookahead {x_text!r} longer than k={k}", line_no)
        for ch in x:
            if ch not in g.alphabet:
                raise GrammarFormatError(f"lookahead character {ch!r} not in alphabet", line_no)
        rule_id = rule_ids.get(_parse_rule_text(rule_text, g, line_no))
        if rule_id is None:
            raise GrammarFormatError(f"rule {rule_text!r} is not in the grammar", line_no)
        if g.rules[rule_id].lhs != nt:
            raise GrammarFormatError(f"entry nonterminal {nt!r} does not match the rule head", line_no)
        if (nt, x) in entries:
            raise GrammarFormatError(f"duplicate entry ({nt}, {x_text})", line_no)
        entries[(nt, x)] = rule_id
    if k is None:
        raise GrammarFormatError("empty table document")
    return LLTable(k, entries)


def _parse_rule_text(text: str, g: Grammar, line_no: int) -> tuple[str, tuple[Conjunct, ...]]:
    if "->" not in text:
        raise GrammarFormatError(f"cannot parse rule {text!r}", line_no)
    lhs_part, rhs = text.split("->", 1)
    lhs = lhs_part.strip()
    conjuncts: list[Conjunct] = []
    for part in rhs.split("&"):
        tokens = part.split()
        if not tokens:
            raise GrammarFormatError(f"empty conjunct in rule {text!r}", line_no)
        if tokens == [EPS]:
            conjuncts.append(Conjunct("", None, ""))
            continue
        u, v = "", ""
        body: str | None = None
        for tok in tokens:
            if len(tok) == 1 and tok in g.alphabet:
                if body is None:
                    u += tok
                else:
                    v += tok
            elif tok in g.nonterminals and body is None:
                body = tok
            else:
                raise GrammarFormatError(f"cannot parse rule token {tok!r}", line_no)
        conjuncts.append(Conjunct(u, body, v) if body else Conjunct(u, None, ""))
    return lhs, tuple(conjuncts)
