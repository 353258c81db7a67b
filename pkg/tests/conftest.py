import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from llconj.grammar import parse_grammar  # noqa: E402
from llconj.table import LLTable, infer_table  # noqa: E402
from llconj.transforms import pipeline  # noqa: E402

GRAMMAR_DIR = ROOT / "grammars"

# (file stem, lookahead, inference bound).  Bounds cover every member string
# the tests drive through the parsers (length <= 10).
CORPUS = [
    ("anbncn", 1, 10),
    ("anbn", 1, 10),
    ("anbncn_pos", 2, 10),
    ("triple_prefix", 3, 14),
]


def load_grammar(stem: str):
    return parse_grammar((GRAMMAR_DIR / f"{stem}.grammar").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def ex1():
    return load_grammar("anbncn")


@pytest.fixture(scope="session")
def ex1_table(ex1):
    t = infer_table(ex1, 1, 9)
    assert isinstance(t, LLTable)
    return t


@pytest.fixture(scope="session")
def corpus():
    return {stem: (load_grammar(stem), k, bound) for stem, k, bound in CORPUS}


@pytest.fixture(scope="session")
def pipelines(corpus):
    """Pipeline results for the whole corpus, computed once per session."""
    return {
        stem: (g, pipeline(g, k, bound))
        for stem, (g, k, bound) in corpus.items()
    }


# The lookahead-1 table of the first corpus grammar, frozen cell for cell.
EX1_TABLE_CELLS = {
    ("S", ""): 0, ("S", "a"): 0,
    ("A", ""): 2, ("A", "a"): 1, ("A", "b"): 2,
    ("D", ""): 4, ("D", "b"): 3, ("D", "c"): 4,
    ("C", ""): 6, ("C", "a"): 5, ("C", "b"): 6,
    ("B", ""): 8, ("B", "b"): 7, ("B", "c"): 8,
}

EX1_UNDEFINED_CELLS = {("S", "b"), ("S", "c"), ("A", "c"), ("D", "a"), ("C", "c"), ("B", "a")}
