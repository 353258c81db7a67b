"""Linear-time recognizer for aligned LL(1) linear conjunctive grammars.

The parser keeps a *stack set*: pending obligations ``(A, tail)`` asserting
that the unread input is a string of ``A`` followed by the already-verified
``tail`` at the input's end.  Tails are stored by length only - every tail's
absolute position is fixed at the input's end the moment its conjunct is
spawned, so the auxiliary state is at most one (nonterminal id, integer)
pair per nonterminal: constant count, logarithmic bits.

One step reads one input symbol and rewrites every pending conjunct through
the lookahead-1 table: a terminal rule must exactly bridge the gap between
the read position and the conjunct's tail, discharging it; a conjunctive
rule spawns one obligation per conjunct after verifying each conjunct's tail
characters in place.  A run over ``w`` takes exactly ``len(w) + 1`` steps
(the last one reads nothing and may only apply empty rules) and accepts when
the stack set finishes empty.

On member strings the stack set provably never holds two tails for one
nonterminal; on non-members such a collision certifies rejection, and
rejecting immediately keeps the size bound unconditional.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .grammar import EPS, Grammar, ParseTree, iter_nodes
from .table import LLTable

REASONS = (
    "no table entry",
    "terminal mismatch",
    "length mismatch",
    "tail mismatch",
    "tail conflict",
    "nonempty final set",
)


@dataclass(frozen=True, order=True)
class StackConjunct:
    """A pending obligation: the unread input must be a string of
    ``nonterminal`` followed by the ``tail_len`` verified end characters."""

    nonterminal: str
    tail_len: int


@dataclass(frozen=True)
class Configuration:
    conjuncts: frozenset[StackConjunct]
    pos: int

    def sorted_conjuncts(self) -> tuple[StackConjunct, ...]:
        return tuple(sorted(self.conjuncts))


@dataclass(frozen=True)
class TraceStep:
    index: int
    symbol: str  # "" at the final, symbol-less step
    stack: tuple[StackConjunct, ...]


@dataclass(frozen=True)
class Trace:
    initial: tuple[StackConjunct, ...]
    steps: tuple[TraceStep, ...]
    accepted: bool
    reason: str | None

    def stack_sets(self) -> list[set[StackConjunct]]:
        """Stack sets indexed by input position: entry ``i`` is the set after
        ``i`` symbols were consumed (the last entry follows the final step)."""
        return [set(self.initial)] + [set(s.stack) for s in self.steps]


@dataclass
class RunStats:
    """Work and space accounting for one run."""

    steps: int = 0
    conjunct_ops: int = 0
    max_stack: int = 0
    max_tail: int = 0

    def note_stack(self, conjuncts: frozenset[StackConjunct]) -> None:
        self.max_stack = max(self.max_stack, len(conjuncts))
        for c in conjuncts:
            self.max_tail = max(self.max_tail, c.tail_len)


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    reason: str | None
    reject_step: int | None
    steps: int
    stats: RunStats
    trace: Trace | None


class StepReject(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


def init(g: Grammar, w: str) -> Configuration:
    for ch in w:
        if ch not in g.alphabet:
            raise ValueError(f"input character {ch!r} is outside the alphabet")
    return Configuration(frozenset({StackConjunct(g.start, 0)}), 0)


def step(
    config: Configuration,
    g: Grammar,
    t1: LLTable,
    w: str,
    stats: RunStats | None = None,
) -> Configuration:
    """One parser step; raises :class:`StepReject` when the configuration has
    no successor.  ``pos`` advances by one except at the final step."""
    n = len(w)
    pos = config.pos
    if pos > n:
        raise ValueError("stepped past the end-of-input step")
    a = w[pos] if pos < n else ""
    spawned: set[StackConjunct] = set()
    for conjunct in config.sorted_conjuncts():
        if stats is not None:
            stats.conjunct_ops += 1
        rule_id = t1.entries.get((conjunct.nonterminal, a))
        if rule_id is None:
            raise StepReject("no table entry")
        rule = g.rules[rule_id]
        tail = conjunct.tail_len
        if rule.is_terminal:
            y = rule.terminal_body
            if pos + len(y) + tail != n:
                raise StepReject("length mismatch")
            if w[pos:pos + len(y)] != y:
                raise StepReject("terminal mismatch")
            continue  # obligation discharged
        if rule.conjuncts[0].u != a:
            raise StepReject("terminal mismatch")
        for c in rule.conjuncts:
            v_end = n - tail
            v_start = v_end - len(c.v)
            if v_start < 0 or w[v_start:v_end] != c.v:
                raise StepReject("tail mismatch")
            spawned.add(StackConjunct(c.body, tail + len(c.v)))
            if stats is not None:
                stats.conjunct_ops += 1
    by_nt: dict[str, int] = {}
    for c in spawned:
        other = by_nt.setdefault(c.nonterminal, c.tail_len)
        if other != c.tail_len:
            raise StepReject("tail conflict")
    return Configuration(frozenset(spawned), min(pos + 1, n))


def run(
    g: Grammar,
    t1: LLTable,
    w: str,
    emit_trace: bool = False,
) -> RunResult:
    """Run the parser for exactly ``len(w) + 1`` steps or until rejection."""
    config = init(g, w)
    stats = RunStats()
    stats.note_stack(config.conjuncts)
    initial = config.sorted_conjuncts()
    steps: list[TraceStep] = []
    accepted = False
    reason: str | None = None
    reject_step: int | None = None
    for index in range(len(w) + 1):
        symbol = w[index] if index < len(w) else ""
        try:
            config = step(config, g, t1, w, stats)
        except StepReject as rejection:
            reason = rejection.reason
            reject_step = index
            stats.steps = index + 1
            break
        stats.steps = index + 1
        stats.note_stack(config.conjuncts)
        if emit_trace:
            steps.append(TraceStep(index, symbol, config.sorted_conjuncts()))
    else:
        if config.conjuncts:
            reason = "nonempty final set"
            reject_step = len(w)
        else:
            accepted = True
    trace = Trace(initial, tuple(steps), accepted, reason) if emit_trace else None
    return RunResult(accepted, reason, reject_step, stats.steps, stats, trace)


def format_trace(trace: Trace) -> str:
    lines = []
    for s in trace.steps:
        stack = ",".join(f"({c.nonterminal},{c.tail_len})" for c in s.stack)
        lines.append(f"step={s.index} read={s.symbol or EPS} Z={{{stack}}}")
    lines.append(f"verdict={'accept' if trace.accepted else 'reject'} reason={trace.reason or '-'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Trace <-> parse-tree correspondence


def tree_stack_sets(tree: ParseTree, w: str) -> list[set[StackConjunct]]:
    """The stack set the tree predicts at each position: after ``i`` consumed
    symbols the pending obligations are exactly the subtrees starting at
    ``i``, each paired with the length of the input to its right."""
    n = len(w)
    sets: list[set[StackConjunct]] = [set() for _ in range(n + 2)]
    for node in iter_nodes(tree):
        if node.start <= n:
            sets[node.start].add(StackConjunct(node.label, n - node.end))
    sets[n + 1] = set()
    return sets


def trace_tree_discrepancy(trace: Trace, tree: ParseTree, w: str) -> str | None:
    """First position where the parser's stack set and the tree's predicted
    set differ, described, or None when they agree everywhere."""
    parser_sets = trace.stack_sets()
    predicted = tree_stack_sets(tree, w)
    for i in range(len(w) + 1):
        got = parser_sets[i] if i < len(parser_sets) else set()
        want = predicted[i]
        if got != want:
            return (
                f"position {i}: parser holds {sorted(got)} but the tree "
                f"predicts {sorted(want)}"
            )
    if len(parser_sets) > len(w) + 1 and parser_sets[len(w) + 1]:
        return "final stack set is not empty"
    return None


def check_correspondence(g: Grammar, t1: LLTable, w: str) -> bool:
    """Verify, for a member string, that the run's stack set at every step
    equals the set of parse-tree subtrees starting at that position (with
    tails measured to the input's end)."""
    tree = oracle.build_tree(g, w)
    if tree is None:
        raise ValueError(f"{w!r} is not a member string")
    result = run(g, t1, w, emit_trace=True)
    if not result.accepted:
        return False
    return trace_tree_discrepancy(result.trace, tree, w) is None
