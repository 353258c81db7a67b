import dataclasses

import pytest

from llconj.oracle import build_tree, sorted_members
from llconj.parser import (
    Configuration,
    StackConjunct,
    check_correspondence,
    format_trace,
    init,
    run,
    step,
    trace_tree_discrepancy,
    tree_stack_sets,
)


@pytest.fixture(scope="module")
def ex1_runtime(pipelines):
    g, result = pipelines["anbncn"]
    return g, result.grammar, result.table


def test_init(ex1_runtime):
    _, gp, _ = ex1_runtime
    config = init(gp, "abc")
    assert config.pos == 0
    assert config.conjuncts == frozenset({StackConjunct(gp.start, 0)})
    assert init(gp, "").conjuncts == frozenset({StackConjunct(gp.start, 0)})
    with pytest.raises(ValueError, match="outside the alphabet"):
        init(gp, "xyz")


def test_first_step_spawns_both_conjuncts(ex1_runtime):
    _, gp, tp = ex1_runtime
    config = step(init(gp, "abc"), gp, tp, "abc")
    assert config.pos == 1
    tails = sorted(c.tail_len for c in config.conjuncts)
    assert tails == [0, 1]  # the two conjunct tails are eps and "c"


def test_idle_mode_advances_position(ex1_runtime):
    _, gp, tp = ex1_runtime
    config = Configuration(frozenset(), 1)
    out = step(config, gp, tp, "abc")
    assert out.conjuncts == frozenset() and out.pos == 2


def test_final_step_applies_empty_rules(ex1_runtime):
    _, gp, tp = ex1_runtime
    w = "abc"
    config = init(gp, w)
    for _ in range(len(w)):
        config = step(config, gp, tp, w)
    assert config.pos == len(w)
    final = step(config, gp, tp, w)
    assert final.conjuncts == frozenset()


def test_run_accepts_members_in_exact_steps(ex1_runtime):
    _, gp, tp = ex1_runtime
    for w in ("", "abc", "aabbcc", "aaabbbccc"):
        result = run(gp, tp, w)
        assert result.accepted and result.steps == len(w) + 1


def test_run_rejects_non_members(ex1_runtime):
    _, gp, tp = ex1_runtime
    for w in ("aabbc", "abcabc", "b", "ccbbaa"):
        result = run(gp, tp, w)
        assert not result.accepted
        assert result.reason is not None and result.reject_step is not None


def test_run_reports_no_table_entry(ex1_runtime):
    _, gp, tp = ex1_runtime
    result = run(gp, tp, "ccc")
    assert not result.accepted and result.reason == "no table entry"


def test_trace_format_is_deterministic(ex1_runtime):
    _, gp, tp = ex1_runtime
    first = run(gp, tp, "aabbcc", emit_trace=True)
    second = run(gp, tp, "aabbcc", emit_trace=True)
    assert format_trace(first.trace) == format_trace(second.trace)
    lines = format_trace(first.trace).splitlines()
    assert len(lines) == len("aabbcc") + 1 + 1  # one per step plus the verdict
    assert lines[0].startswith("step=0 read=a Z={")
    assert lines[-1] == "verdict=accept reason=-"


def test_trace_of_reject_names_reason(ex1_runtime):
    _, gp, tp = ex1_runtime
    result = run(gp, tp, "ab", emit_trace=True)
    assert not result.accepted
    assert format_trace(result.trace).splitlines()[-1].startswith("verdict=reject reason=")


def test_stack_set_never_exceeds_nonterminal_count(ex1_runtime):
    _, gp, tp = ex1_runtime
    for w in sorted_members(gp, 9):
        result = run(gp, tp, w)
        assert result.accepted
        assert result.stats.max_stack <= len(gp.nonterminals)
        assert result.stats.max_tail <= len(w)


def test_correspondence_on_members(ex1_runtime):
    _, gp, tp = ex1_runtime
    assert check_correspondence(gp, tp, "abc")
    assert check_correspondence(gp, tp, "")
    assert check_correspondence(gp, tp, "aabbcc")


def test_correspondence_rejects_corrupted_trace(ex1_runtime):
    _, gp, tp = ex1_runtime
    w = "abc"
    result = run(gp, tp, w, emit_trace=True)
    tree = build_tree(gp, w)
    assert trace_tree_discrepancy(result.trace, tree, w) is None
    # corrupt one step's stack snapshot
    steps = list(result.trace.steps)
    victim = steps[1]
    steps[1] = dataclasses.replace(victim, stack=())
    corrupted = dataclasses.replace(result.trace, steps=tuple(steps))
    found = trace_tree_discrepancy(corrupted, tree, w)
    assert found is not None and "position 2" in found


def test_correspondence_requires_member(ex1_runtime):
    _, gp, tp = ex1_runtime
    with pytest.raises(ValueError, match="not a member"):
        check_correspondence(gp, tp, "ba")


def test_tree_stack_sets_equal_run_stack_sets(ex1_runtime):
    _, gp, tp = ex1_runtime
    w = "abc"
    sets = tree_stack_sets(build_tree(gp, w), w)
    assert sets[0] == {StackConjunct(gp.start, 0)}
    result = run(gp, tp, w, emit_trace=True)
    assert result.trace.stack_sets()[: len(w) + 1] == sets[: len(w) + 1]


def test_tail_conflict_is_rejected():
    # Hand-built grammar + table where one step spawns A with two tails that
    # both verify in place ("abb" ends in b and in bb).
    from llconj.grammar import parse_grammar
    from llconj.table import LLTable

    g = parse_grammar(
        "k = 1\nalphabet = a b\nstart = S\nS -> a A b & a A b b\nA -> eps\n"
    )
    t = LLTable(1, {("S", "a"): 0, ("A", ""): 1, ("A", "b"): 1})
    result = run(g, t, "abb")
    assert not result.accepted and result.reason == "tail conflict"


def test_tail_mismatch_is_rejected():
    from llconj.grammar import parse_grammar
    from llconj.table import LLTable

    g = parse_grammar("k = 1\nalphabet = a b c\nstart = S\nS -> a A b\nA -> eps\n")
    t = LLTable(1, {("S", "a"): 0, ("A", ""): 1})
    result = run(g, t, "abc")
    assert not result.accepted and result.reason == "tail mismatch"


def test_runs_are_pure(ex1_runtime):
    _, gp, tp = ex1_runtime
    w = "aabbcc"
    before = run(gp, tp, w, emit_trace=True)
    run(gp, tp, "aabbc")
    after = run(gp, tp, w, emit_trace=True)
    assert before.trace == after.trace


def test_parser_agrees_with_oracle_on_whole_corpus(pipelines):
    import itertools

    from llconj.oracle import enumerate_language

    for stem, (_, result) in pipelines.items():
        grammar, table = result.grammar, result.table
        members = enumerate_language(grammar, 8)
        for n in range(9):
            for tup in itertools.product(sorted(grammar.alphabet), repeat=n):
                w = "".join(tup)
                assert run(grammar, table, w).accepted == (w in members), (stem, w)
