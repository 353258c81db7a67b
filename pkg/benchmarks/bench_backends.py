#!/usr/bin/env python3
"""Benchmark the two membership-kernel backends on bulk recognition.

Runs the brute-force recognizer over every string of the grammar's alphabet
up to a length bound, once per backend, and reports throughput.  The same
workload dominates table inference and language diffing, so the numbers here
are what the acceptance-scale runs feel.

Usage:
    python benchmarks/bench_backends.py [--max-len 10] [--grammar PATH]
    python benchmarks/bench_backends.py --pipelined   # bench the LL(1) output
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from llconj.grammar import parse_grammar  # noqa: E402
from llconj.oracle import enumerate_language, membership, sorted_members  # noqa: E402
from llconj.oracle.backend import active_backend  # noqa: E402
from llconj.transforms import pipeline  # noqa: E402

DEFAULT_GRAMMAR = ROOT / "grammars" / "anbncn.grammar"


def bench_bulk(g, max_len: int, backend: str, repeats: int) -> tuple[float, int]:
    total_strings = sum(len(g.alphabet) ** n for n in range(max_len + 1))
    best = float("inf")
    members = 0
    for _ in range(repeats):
        started = time.perf_counter()
        members = len(enumerate_language(g, max_len, backend=backend))
        best = min(best, time.perf_counter() - started)
    return total_strings / best, members


def bench_single(g, w: str, backend: str, calls: int = 200) -> float:
    """Latency of one full membership table (what tree building and table
    inference issue per string)."""
    membership(g, w, backend=backend)  # warm-up
    started = time.perf_counter()
    for _ in range(calls):
        membership(g, w, backend=backend)
    return (time.perf_counter() - started) / calls


def main() -> int:
    cli = argparse.ArgumentParser(description=__doc__)
    cli.add_argument("--grammar", default=str(DEFAULT_GRAMMAR))
    cli.add_argument("--max-len", type=int, default=10)
    cli.add_argument("--repeats", type=int, default=3)
    cli.add_argument("--pipelined", action="store_true",
                     help="benchmark the grammar's aligned LL(1) pipeline output instead")
    args = cli.parse_args()

    g = parse_grammar(Path(args.grammar).read_text(encoding="utf-8"))
    if args.pipelined:
        g = pipeline(g).grammar
    total = sum(len(g.alphabet) ** n for n in range(args.max_len + 1))
    print(f"grammar: {args.grammar}{' (pipelined)' if args.pipelined else ''}")
    print(f"workload: {total} strings up to length {args.max_len}, "
          f"{len(g.nonterminals)} nonterminals, {len(g.rules)} rules")
    print(f"default backend would be: {active_backend()}")

    probe = max(sorted_members(g, args.max_len), key=len, default="")
    bulk: dict[str, float] = {}
    single: dict[str, float] = {}
    for backend in ("numpy", "numba"):
        try:
            started = time.perf_counter()
            enumerate_language(g, min(3, args.max_len), backend=backend)  # warm-up / JIT
            warm = time.perf_counter() - started
            rate, members = bench_bulk(g, args.max_len, backend, args.repeats)
            latency = bench_single(g, probe, backend)
        except RuntimeError as e:
            print(f"{backend:>6}: unavailable ({e})")
            continue
        bulk[backend] = rate
        single[backend] = latency
        print(f"{backend:>6}: bulk {rate:10.0f} strings/s   "
              f"single table {latency * 1e6:9.1f} us   "
              f"(warm-up {warm:.2f}s, {members} members)")
    if len(bulk) == 2:
        print(f"numba vs numpy: bulk {bulk['numba'] / bulk['numpy']:.2f}x, "
              f"single-table latency {single['numpy'] / single['numba']:.0f}x lower")
    return 0


if __name__ == "__main__":
    sys.exit(main())
