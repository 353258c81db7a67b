import pytest

from conftest import EX1_TABLE_CELLS, EX1_UNDEFINED_CELLS

from llconj.grammar import GrammarFormatError, parse_grammar
from llconj.table import (
    LLTable,
    TableConflict,
    infer_table,
    load_table,
    lookup,
    store_table,
    validate_table,
)

NON_LL1 = "k = 1\nalphabet = a\nstart = S\nS -> a A | a B\nA -> eps\nB -> eps\n"


def test_infer_reproduces_reference_table(ex1, ex1_table):
    assert ex1_table.k == 1
    assert dict(ex1_table.entries) == EX1_TABLE_CELLS
    for cell in EX1_UNDEFINED_CELLS:
        assert cell not in ex1_table.entries


def test_infer_conflict():
    g = parse_grammar(NON_LL1)
    conflict = infer_table(g, 1, 3)
    assert isinstance(conflict, TableConflict)
    assert (conflict.nonterminal, conflict.lookahead) == ("S", "a")
    assert {conflict.rule1, conflict.rule2} == {0, 1}
    assert conflict.witness1.string == "a" and conflict.witness2.string == "a"


def test_infer_at_bound_zero(ex1):
    t = infer_table(ex1, 1, 0)
    assert sorted(t.entries) == [("A", ""), ("B", ""), ("C", ""), ("D", ""), ("S", "")]


def test_infer_monotone_refinement(ex1):
    t3 = infer_table(ex1, 1, 3)
    t9 = infer_table(ex1, 1, 9)
    assert set(t3.entries.items()) <= set(t9.entries.items())


def test_infer_determinism(ex1):
    a = infer_table(ex1, 1, 9)
    b = infer_table(ex1, 1, 9)
    assert a == b


def test_lookup(ex1, ex1_table):
    assert ex1.rules[lookup(ex1_table, "B", "b")].text() == "B -> b B"
    assert lookup(ex1_table, "S", "b") is None
    with pytest.raises(ValueError):
        lookup(ex1_table, "S", "ab")


def test_validate_accepts_inferred(ex1, ex1_table):
    assert validate_table(ex1, ex1_table, 9) is None


def test_validate_detects_rewired_entry(ex1, ex1_table):
    rewired = LLTable(1, {**ex1_table.entries, ("A", "a"): 2})
    conflict = validate_table(ex1, rewired, 9)
    assert conflict is not None and conflict.kind == "mismatch"
    assert (conflict.nonterminal, conflict.lookahead) == ("A", "a")
    assert conflict.witness2.string == "abc" and conflict.rule2 == 1


def test_validate_reports_undefined_entries(ex1):
    conflict = validate_table(ex1, LLTable(1, {}), 3)
    assert conflict is not None and conflict.kind == "undefined"


def test_store_load_roundtrip(ex1, ex1_table):
    doc = store_table(ex1_table, ex1)
    assert doc.splitlines()[0] == "k = 1"
    assert len(doc.strip().splitlines()) == 1 + 14
    assert load_table(doc, ex1) == ex1_table
    # lookup is identical after the roundtrip
    loaded = load_table(doc, ex1)
    for nt in sorted(ex1.nonterminals):
        for x in ["", "a", "b", "c"]:
            assert lookup(loaded, nt, x) == lookup(ex1_table, nt, x)


def test_store_empty_table(ex1):
    doc = store_table(LLTable(1, {}), ex1)
    assert doc == "k = 1\n"
    assert load_table(doc, ex1) == LLTable(1, {})


def test_load_rejects_duplicates(ex1):
    doc = "k = 1\nS | a | S -> A & C\nS | a | S -> A & C\n"
    with pytest.raises(GrammarFormatError, match="duplicate"):
        load_table(doc, ex1)


def test_load_rejects_unknown_rule(ex1):
    doc = "k = 1\nS | a | S -> a S\n"
    with pytest.raises(GrammarFormatError, match="not in the grammar"):
        load_table(doc, ex1)


def test_load_reports_line_numbers(ex1):
    doc = "k = 1\nS | a | S -> A & C\nnot a line\n"
    with pytest.raises(GrammarFormatError) as err:
        load_table(doc, ex1)
    assert err.value.line == 3


def test_short_windows_only_at_end_of_input(corpus):
    g, k, bound = corpus["anbncn_pos"]
    t = infer_table(g, k, bound)
    assert isinstance(t, LLTable)
    members = ["abc", "aabbcc", "aaabbbccc"]
    for (nt, x), _ in t.sorted_items():
        if len(x) < t.k:
            # the window ran into the end of some member string
            assert any(w.endswith(x) for w in members), (nt, x)


def test_inference_coherence_across_corpus(corpus):
    for stem, (g, k, bound) in corpus.items():
        t = infer_table(g, k, bound)
        assert isinstance(t, LLTable), (stem, t)
        assert validate_table(g, t, min(bound, 8)) is None, stem
