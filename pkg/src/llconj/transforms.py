"""Lookahead-reduction transformations down to an aligned LL(1) grammar.

Four constructions compose into the pipeline:

1. ``eliminate_left_recursion`` - replaces every rule reachable through
   chains of leading-nonterminal conjuncts by direct rules.  All nodes on
   such a chain start at the same input position, so one lookahead window
   drives the whole chain deterministically through the table; the chain's
   conjunct tails accumulate to the right of whatever the chain bottoms
   out in.
2. ``align`` - factors every conjunct down to ``<terminal> <nonterminal>
   <tail>`` by introducing fresh nonterminals for the overlong middles.
3. ``eliminate_short_rules`` - switches to suffix-carrying nonterminals
   ``A__u`` (meaning: the strings of ``A`` with ``u`` appended) so that no
   terminal rule shorter than ``k - 1`` can ever sit in front of pending
   input.
4. ``reduce_to_ll1`` - switches to buffer-carrying nonterminals ``u__A``
   (meaning: the strings of ``A`` with the already-read prefix ``u``
   removed).  Rules either extend the buffer one symbol at a time, replay
   a table-selected rule once the buffer holds ``k - 1`` symbols, or close
   out a nonterminal whose buffer is the entire remaining input.

Step 4 emits conjuncts that start with a nonterminal again, so the pipeline
re-runs steps 1-2 at lookahead 1 and re-infers the final table.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from . import oracle
from .grammar import Conjunct, Grammar, first_k, is_aligned, is_left_recursive, iter_nodes, make_grammar
from .table import LLTable, TableConflict, infer_table

DEFAULT_TREE_CAP = oracle.DEFAULT_TREE_CAP


class TransformError(RuntimeError):
    """A transformation precondition or construction step failed."""


class ChainCycleError(TransformError):
    """A left chain revisited a nonterminal under one lookahead window; no
    finite parse tree realizes such a chain, so the table must be stale or
    wider than the grammar."""

    def __init__(self, nonterminal: str, lookahead: str, cycle: tuple[str, ...]):
        self.nonterminal = nonterminal
        self.lookahead = lookahead
        self.cycle = cycle
        super().__init__(
            f"left-chain cycle from ({nonterminal}, {lookahead or 'eps'}): "
            + " -> ".join(cycle)
        )


class ChainLookupError(TransformError):
    """A chain ran into a nonterminal with no table entry at its window
    (the table was inferred at too small a bound)."""

    def __init__(self, nonterminal: str, lookahead: str, missing: str):
        self.nonterminal = nonterminal
        self.lookahead = lookahead
        self.missing = missing
        super().__init__(
            f"chain from ({nonterminal}, {lookahead or 'eps'}) reaches {missing} "
            "which has no table entry at that window"
        )


class ShortRuleResidueError(TransformError):
    """A buffered rule met a terminal body shorter than the buffer; the input
    grammar still contains short rules."""


class UnsatisfiableRuleWarning(UserWarning):
    """A conjunctive rule whose conjuncts start with different terminals can
    match nothing and is dropped."""


@dataclass(frozen=True)
class ChainFrame:
    """One node of a left chain: the nonterminal reached and the terminal
    tail accumulated to its right (deepest conjunct's tail first)."""

    nonterminal: str
    tail: str


@dataclass(frozen=True)
class SuffixedNonterminal:
    """``A__u``: derives exactly the strings of ``A`` with ``u`` appended."""

    base: str
    suffix: str

    @property
    def name(self) -> str:
        return f"{self.base}__{self.suffix or 'eps'}"


@dataclass(frozen=True)
class BufferedNonterminal:
    """``u__A``: stands for ``A`` after the parser has already read the
    prefix ``u`` of its content."""

    buffer: str
    base: str

    @property
    def name(self) -> str:
        return f"{self.buffer or 'eps'}__{self.base}"


# ---------------------------------------------------------------------------
# Stage 1: left-recursion elimination


def eliminate_left_recursion(g: Grammar, t: LLTable) -> Grammar:
    """Rebuild every (nonterminal, window) table entry as a direct rule by
    closing over its left chains.

    From a frame ``(B, tail)`` the table-selected rule at the shared window
    contributes: each leading-nonterminal conjunct ``C t`` pushes a deeper
    frame ``(C, t + tail)``; each conjunct ``u C v`` with nonempty ``u`` is
    emitted as ``u C (v + tail)``; a bare terminal body ``y`` pins the whole
    content to ``y + tail``, making the emitted rule a plain terminal rule
    (any such conjunct determines the same string, so the first found wins).
    """
    emitted: list[tuple[str, tuple[Conjunct, ...]]] = []
    seen_rules: set[tuple[str, tuple[Conjunct, ...]]] = set()

    for (origin, x), _ in sorted(t.entries.items()):
        conjuncts: list[Conjunct] = []
        terminal_body: str | None = None

        def explore(frame: ChainFrame, path: tuple[str, ...]) -> None:
            nonlocal terminal_body
            rule_id = t.entries.get((frame.nonterminal, x))
            if rule_id is None:
                raise ChainLookupError(origin, x, frame.nonterminal)
            rule = g.rules[rule_id]
            if rule.is_terminal:
                if terminal_body is None:
                    terminal_body = rule.terminal_body + frame.tail
                return
            for c in rule.conjuncts:
                if c.is_left_recursive:
                    if c.body in path:
                        raise ChainCycleError(origin, x, path + (c.body,))
                    explore(ChainFrame(c.body, c.v + frame.tail), path + (c.body,))
                else:
                    conjuncts.append(Conjunct(c.u, c.body, c.v + frame.tail))

        explore(ChainFrame(origin, ""), (origin,))
        if terminal_body is not None:
            new_conjuncts: tuple[Conjunct, ...] = (Conjunct(terminal_body, None, ""),)
        else:
            deduped: list[Conjunct] = []
            for c in conjuncts:
                if c not in deduped:
                    deduped.append(c)
            if not deduped:
                raise TransformError(f"({origin}, {x or 'eps'}) produced no conjuncts")
            new_conjuncts = tuple(deduped)
        key = (origin, new_conjuncts)
        if key not in seen_rules:
            seen_rules.add(key)
            emitted.append(key)

    return make_grammar(
        g.alphabet, emitted, g.start, g.k, extra_nonterminals=g.nonterminals
    )


# ---------------------------------------------------------------------------
# Stage 2: alignment


def align(g: Grammar) -> Grammar:
    """Factor every conjunct to a single leading terminal by introducing
    fresh single-rule nonterminals for the overlong middles.  Conjunctive
    rules whose conjuncts start with different terminals can match nothing
    and are dropped with a warning.  Requires a grammar without
    left-recursive rules."""
    for rule in g.rules:
        if is_left_recursive(rule)[0]:
            raise TransformError(f"rule [{rule.id}] {rule.text()} is left-recursive")

    names = set(g.nonterminals)
    fresh_for: dict[tuple[str, str, str], str] = {}
    out: list[tuple[str, tuple[Conjunct, ...]]] = []
    queue: list[tuple[str, tuple[Conjunct, ...]]] = [
        (r.lhs, r.conjuncts) for r in g.rules
    ]

    def fresh_name(lhs: str) -> str:
        counter = 0
        while f"{lhs}_f{counter}" in names:
            counter += 1
        name = f"{lhs}_f{counter}"
        names.add(name)
        return name

    pos = 0
    while pos < len(queue):
        lhs, conjuncts = queue[pos]
        pos += 1
        if conjuncts[0].body is None:
            out.append((lhs, conjuncts))
            continue
        factored: list[Conjunct] = []
        for c in conjuncts:
            if len(c.u) <= 1:
                factored.append(c)
                continue
            middle = (c.u[1:], c.body, c.v)
            name = fresh_for.get(middle)
            if name is None:
                name = fresh_name(lhs)
                fresh_for[middle] = name
                queue.append((name, (Conjunct(*middle),)))
            factored.append(Conjunct(c.u[0], name, ""))
        firsts = {c.u for c in factored}
        if len(firsts) != 1:
            warnings.warn(
                f"dropping rule {lhs} -> "
                + " & ".join(c.text() for c in conjuncts)
                + ": conjunct leading terminals differ, the conjunction matches nothing",
                UnsatisfiableRuleWarning,
                stacklevel=2,
            )
            continue
        out.append((lhs, tuple(factored)))

    return make_grammar(g.alphabet, out, g.start, g.k, extra_nonterminals=names)


# ---------------------------------------------------------------------------
# Stage 3: short-rule elimination


def eliminate_short_rules(g: Grammar, k: int) -> Grammar:
    """Move every conjunct tail longer than ``k - 1`` out of the way by
    switching to suffix-carrying nonterminals.

    ``A__u`` (``|u| <= k - 1``) derives the strings of ``A`` with ``u``
    appended: terminal rules become ``A__u -> y u``; a conjunct ``a B v``
    becomes ``a B__s t`` where ``s`` is the first ``k - 1`` characters of
    ``v + u`` and ``t`` the remainder.  Only nonterminals reachable from the
    new start ``S__eps`` are emitted."""
    ok, offenders = is_aligned(g)
    if not ok:
        raise TransformError(f"grammar is not aligned (rules {offenders})")
    if k < 1:
        raise ValueError("lookahead k must be positive")

    start = SuffixedNonterminal(g.start, "")
    agenda: list[SuffixedNonterminal] = [start]
    seen = {start}
    out: list[tuple[str, tuple[Conjunct, ...]]] = []
    while agenda:
        current = agenda.pop(0)
        for rule in g.rules_for(current.base):
            if rule.is_terminal:
                out.append(
                    (current.name, (Conjunct(rule.terminal_body + current.suffix, None, ""),))
                )
                continue
            conjuncts = []
            for c in rule.conjuncts:
                carried = c.v + current.suffix
                s = first_k(carried, k - 1)
                child = SuffixedNonterminal(c.body, s)
                if child not in seen:
                    seen.add(child)
                    agenda.append(child)
                conjuncts.append(Conjunct(c.u, child.name, carried[len(s):]))
            out.append((current.name, tuple(conjuncts)))

    return make_grammar(g.alphabet, out, start.name, k)


# ---------------------------------------------------------------------------
# Stage 4: reduction to lookahead 1


def reduce_to_ll1(g: Grammar, t: LLTable) -> Grammar:
    """Delay every rule choice until a buffer of ``k - 1`` already-read
    symbols plus one lookahead symbol determines it.

    Three rule groups over buffer-carrying nonterminals ``u__A``:

    * buffer fill (``|u| < k - 1``): ``u__A -> b ub__A`` for each terminal
      ``b`` that can extend ``u`` towards some table window of ``A``;
    * replay (``|u| = k - 1``): for each table entry at ``(A, u + b)``,
      re-emit the selected rule with the consumed prefix ``u`` removed - a
      terminal body ``u x`` shrinks to ``x``, and a conjunctive rule drops
      its leading terminal (already part of ``u``), its conjunct
      nonterminals continuing with the rest of the buffer;
    * close-out (``|u| < k - 1`` and a table entry at exactly ``(A, u)``):
      ``u__A -> eps``, for inputs that end inside the buffer.

    At ``k = 1`` the buffer is always empty and the replay group keeps each
    rule's leading terminal, which makes the construction a plain renaming.
    Only nonterminals reachable from ``eps__S`` with at least one usable
    window are emitted.
    """
    ok, offenders = is_aligned(g)
    if not ok:
        raise TransformError(f"grammar is not aligned (rules {offenders})")
    k = t.k
    alphabet = sorted(g.alphabet)
    windows: dict[str, list[str]] = {}
    for (nt, x) in t.entries:
        windows.setdefault(nt, []).append(x)

    def has_window_extending(nt: str, prefix: str) -> bool:
        return any(x.startswith(prefix) for x in windows.get(nt, ()))

    start = BufferedNonterminal("", g.start)
    agenda = [start]
    seen = {start}
    out: list[tuple[str, tuple[Conjunct, ...]]] = []
    emitted: set[tuple[str, tuple[Conjunct, ...]]] = set()

    def visit(child: BufferedNonterminal) -> str:
        if child not in seen:
            seen.add(child)
            agenda.append(child)
        return child.name

    while agenda:
        current = agenda.pop(0)
        u, base = current.buffer, current.base
        rules_here: list[tuple[Conjunct, ...]] = []
        if len(u) < k - 1:
            for b in alphabet:
                if has_window_extending(base, u + b):
                    child = visit(BufferedNonterminal(u + b, base))
                    rules_here.append((Conjunct(b, child, ""),))
            if (base, u) in t.entries:
                rules_here.append((Conjunct("", None, ""),))
        else:
            for b in [*alphabet, ""]:
                rule_id = t.entries.get((base, u + b))
                if rule_id is None:
                    continue
                rule = g.rules[rule_id]
                if rule.is_terminal:
                    y = rule.terminal_body
                    if not y.startswith(u):
                        raise ShortRuleResidueError(
                            f"table entry ({base}, {(u + b) or 'eps'}) selects terminal rule "
                            f"[{rule.id}] with body {y!r} shorter than the buffer {u!r}; "
                            "the grammar still contains short rules"
                        )
                    rules_here.append((Conjunct(y[len(u):], None, ""),))
                    continue
                leading = rule.conjuncts[0].u
                if k == 1:
                    rules_here.append(
                        tuple(
                            Conjunct(c.u, visit(BufferedNonterminal("", c.body)), c.v)
                            for c in rule.conjuncts
                        )
                    )
                    continue
                if not u.startswith(leading):
                    continue
                rest = u[1:]
                rules_here.append(
                    tuple(
                        Conjunct("", visit(BufferedNonterminal(rest, c.body)), c.v)
                        for c in rule.conjuncts
                    )
                )
        for conjuncts in rules_here:
            key = (current.name, conjuncts)
            if key not in emitted:
                emitted.add(key)
                out.append(key)

    return make_grammar(g.alphabet, out, start.name, 1)


# ---------------------------------------------------------------------------
# Pipeline


@dataclass(frozen=True)
class PipelineStage:
    name: str
    lookahead: int
    grammar: Grammar
    table: LLTable | None = None


@dataclass(frozen=True)
class PipelineResult:
    stages: tuple[PipelineStage, ...]
    infer_bound: int
    tree_cap: int

    @property
    def grammar(self) -> Grammar:
        return self.stages[-1].grammar

    @property
    def table(self) -> LLTable:
        return self.stages[-1].table

    def stage(self, name: str) -> PipelineStage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def manifest(self) -> dict:
        return {
            "infer_bound": self.infer_bound,
            "tree_cap": self.tree_cap,
            "stages": [
                {
                    "name": s.name,
                    "lookahead": s.lookahead,
                    "nonterminals": len(s.grammar.nonterminals),
                    "rules": len(s.grammar.rules),
                    "table_entries": len(s.table.entries) if s.table else None,
                }
                for s in self.stages
            ],
        }


class PipelineError(TransformError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: TableConflict | Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")

    def describe(self, g: Grammar) -> str:
        if isinstance(self.cause, TableConflict):
            return f"stage {self.stage!r}: {self.cause.describe(g)}"
        return f"stage {self.stage!r}: {self.cause}"


def _infer_or_raise(stage: str, g: Grammar, k: int, bound: int, cap: int) -> LLTable:
    result = infer_table(g, k, bound, cap)
    if isinstance(result, TableConflict):
        raise PipelineError(stage, result)
    return result


def pipeline(
    g: Grammar,
    k: int | None = None,
    infer_bound: int | None = None,
    cap: int = DEFAULT_TREE_CAP,
) -> PipelineResult:
    """Run the full reduction: infer a lookahead-``k`` table, eliminate left
    recursion, align, eliminate short rules (re-inferring the table for the
    renamed grammar), reduce to lookahead 1, then eliminate the left
    recursion that reduction reintroduces, re-align, and infer the final
    lookahead-1 table."""
    k = g.k if k is None else k
    bound = 2 * k + 8 if infer_bound is None else infer_bound
    stages: list[PipelineStage] = []

    t0 = _infer_or_raise("infer", g, k, bound, cap)
    stages.append(PipelineStage("input", k, g, t0))

    g1 = eliminate_left_recursion(g, t0)
    stages.append(PipelineStage("noleftrec", k, g1))

    g2 = align(g1)
    stages.append(PipelineStage("aligned", k, g2))

    g3 = eliminate_short_rules(g2, k)
    t3 = _infer_or_raise("noshort", g3, k, bound, cap)
    stages.append(PipelineStage("noshort", k, g3, t3))

    g4 = reduce_to_ll1(g3, t3)
    t4 = _infer_or_raise("ll1", g4, 1, bound, cap)
    stages.append(PipelineStage("ll1", 1, g4, t4))

    g5 = eliminate_left_recursion(g4, t4)
    stages.append(PipelineStage("ll1-noleftrec", 1, g5))

    g6 = align(g5)
    t6 = _infer_or_raise("ll1-aligned", g6, 1, bound, cap)
    stages.append(PipelineStage("ll1-aligned", 1, g6, t6))

    return PipelineResult(tuple(stages), bound, cap)


CLI_STAGES = {
    "noleftrec": "noleftrec",
    "aligned": "aligned",
    "noshort": "noshort",
    "ll1": "ll1",
    "full": "ll1-aligned",
}


# ---------------------------------------------------------------------------
# Short-rule scan (used by checks and the acceptance suite)


@dataclass(frozen=True)
class ShortRuleUse:
    """A terminal rule shorter than ``k - 1`` applied where input follows."""

    string: str
    rule_id: int
    start: int
    end: int
    follow: str


def short_rule_uses(
    g: Grammar, k: int, max_len: int, cap: int = DEFAULT_TREE_CAP
) -> list[ShortRuleUse]:
    """Scan every parse tree of every member string up to ``max_len`` for a
    terminal rule with body shorter than ``k - 1`` followed by pending input."""
    found = []
    for w in oracle.sorted_members(g, max_len):
        for tree in oracle.enumerate_trees(g, w, cap):
            for node in iter_nodes(tree):
                rule = g.rules[node.rule_id]
                if not rule.is_terminal:
                    continue
                follow = w[node.end:]
                if len(rule.terminal_body) < k - 1 and follow:
                    found.append(ShortRuleUse(w, rule.id, node.start, node.end, follow))
    return found
