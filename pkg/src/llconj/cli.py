"""Command-line front end.

Exit codes are uniform across commands: 0 accept/equal/ok, 1 reject/unequal,
2 usage or format error, 3 table conflict or transformation error.

Commands:

* ``check``       - structural report: alignment, left-recursive rules and,
                    given ``--k``/``--max-len``, a bounded short-rule scan.
* ``infer-table`` - infer a lookahead table over member strings up to a bound.
* ``transform``   - run the reduction pipeline up to a named stage.
* ``parse``       - run the stack-set parser (single string or stdin batch).
* ``oracle``      - brute-force queries: recognize / language / tree / trees.
* ``diff``        - exhaustive language comparison of two grammars.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import oracle, parser as runtime, table as tables, transforms
from .grammar import (
    EPS,
    Grammar,
    GrammarFormatError,
    grammar_to_text,
    is_aligned,
    is_left_recursive,
    parse_grammar,
)

OK, REJECT, USAGE, CONFLICT = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_grammar(path: str) -> Grammar:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}", USAGE)
    try:
        return parse_grammar(text)
    except GrammarFormatError as e:
        raise CliError(f"{path}: {e}", USAGE)


def _load_table(path: str, g: Grammar) -> tables.LLTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}", USAGE)
    try:
        return tables.load_table(text, g)
    except GrammarFormatError as e:
        raise CliError(f"{path}: {e}", USAGE)


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _default_bound(k: int) -> int:
    return 2 * k + 8


def cmd_check(args) -> int:
    g = _load_grammar(args.grammar)
    aligned, offenders = is_aligned(g)
    print(f"aligned: {'yes' if aligned else 'no'}")
    if not aligned:
        print("  offending rules: " + ", ".join(f"[{i}] {g.rules[i].text()}" for i in offenders))
    recursive = [r for r in g.rules if is_left_recursive(r)[0]]
    print(f"left-recursive rules: {len(recursive)}")
    for r in recursive:
        indices = is_left_recursive(r)[1]
        print(f"  [{r.id}] {r.text()} (conjuncts {indices})")
    if args.k is not None:
        max_len = args.max_len if args.max_len is not None else _default_bound(args.k)
        uses = transforms.short_rule_uses(g, args.k, max_len, args.cap)
        print(f"short rules (k={args.k}, max-len={max_len}): {len(uses) or 'none'}")
        for use in uses:
            print(
                f"  [{use.rule_id}] {g.rules[use.rule_id].text()} covers "
                f"{use.string[use.start:use.end]!r} in {use.string!r} followed by {use.follow!r}"
            )
    return OK


def cmd_infer_table(args) -> int:
    g = _load_grammar(args.grammar)
    k = args.k if args.k is not None else g.k
    max_len = args.max_len if args.max_len is not None else _default_bound(k)
    result = tables.infer_table(g, k, max_len, args.cap)
    if isinstance(result, tables.TableConflict):
        print(result.describe(g), file=sys.stderr)
        return CONFLICT
    _write(args.output, tables.store_table(result, g))
    return OK


def cmd_transform(args) -> int:
    g = _load_grammar(args.grammar)
    k = args.k if args.k is not None else g.k
    bound = args.infer_bound if args.infer_bound is not None else _default_bound(k)
    if args.stage == "full" and args.output is None:
        raise CliError("stage 'full' writes several files; pass -o OUTDIR", USAGE)
    try:
        result = transforms.pipeline(g, k, bound, args.cap)
    except transforms.PipelineError as e:
        print(e.describe(g), file=sys.stderr)
        return CONFLICT
    except transforms.TransformError as e:
        print(str(e), file=sys.stderr)
        return CONFLICT
    last = transforms.CLI_STAGES[args.stage]
    names = [s.name for s in result.stages]
    keep = result.stages[: names.index(last) + 1]
    if args.output is None:
        sys.stdout.write(grammar_to_text(keep[-1].grammar))
        return OK
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for idx, stage in enumerate(keep):
        (outdir / f"{idx:02d}_{stage.name}.grammar").write_text(
            grammar_to_text(stage.grammar), encoding="utf-8"
        )
    manifest = result.manifest()
    manifest["stages"] = manifest["stages"][: len(keep)]
    manifest["requested_stage"] = args.stage
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if args.stage == "full":
        (outdir / "final.grammar").write_text(grammar_to_text(result.grammar), encoding="utf-8")
        (outdir / "final.table").write_text(
            tables.store_table(result.table, result.grammar), encoding="utf-8"
        )
    return OK


def cmd_parse(args) -> int:
    g = _load_grammar(args.grammar)
    t = _load_table(args.table, g)
    if t.k != 1:
        raise CliError(f"parsing needs a lookahead-1 table, got k={t.k}", USAGE)
    aligned, offenders = is_aligned(g)
    if not aligned:
        raise CliError(f"grammar is not aligned (rules {offenders})", USAGE)
    if args.stdin:
        if args.input is not None:
            raise CliError("give either an input string or --stdin, not both", USAGE)
        if args.trace:
            raise CliError("--trace works only with a single input string", USAGE)
        worst = OK
        for line in sys.stdin:
            w = line.rstrip("\n")
            try:
                result = runtime.run(g, t, w)
            except ValueError as e:
                raise CliError(str(e), USAGE)
            print(("accept" if result.accepted else "reject") + "\t" + w)
            if not result.accepted:
                worst = REJECT
        return worst
    if args.input is None:
        raise CliError("missing input string (or use --stdin)", USAGE)
    try:
        result = runtime.run(g, t, args.input, emit_trace=args.trace is not None)
    except ValueError as e:
        raise CliError(str(e), USAGE)
    if args.trace:
        _write(args.trace, runtime.format_trace(result.trace))
    if result.accepted:
        print("accept")
        return OK
    print(f"reject (step {result.reject_step}: {result.reason})")
    return REJECT


def _print_tree(g: Grammar, node, indent: int = 0) -> None:
    print("  " * indent + f"{node.label} [{node.start},{node.end}) rule=[{node.rule_id}] {g.rules[node.rule_id].text()}")
    for child in node.children:
        _print_tree(g, child, indent + 1)


def cmd_oracle(args) -> int:
    g = _load_grammar(args.grammar)
    try:
        if args.query == "recognize":
            verdict = oracle.recognize(g, args.input)
            print("member" if verdict else "non-member")
            return OK if verdict else REJECT
        if args.query == "language":
            max_len = args.max_len if args.max_len is not None else _default_bound(g.k)
            for w in oracle.sorted_members(g, max_len):
                print(w or EPS)
            return OK
        if args.query == "tree":
            tree = oracle.build_tree(g, args.input)
            if tree is None:
                print("non-member: no parse tree", file=sys.stderr)
                return REJECT
            _print_tree(g, tree.root)
            return OK
        if args.query == "trees":
            try:
                found = oracle.enumerate_trees(g, args.input, args.cap)
            except oracle.TreeOverflowError as e:
                print(str(e), file=sys.stderr)
                return CONFLICT
            print(f"{len(found)} tree(s)")
            for idx, tree in enumerate(found):
                print(f"-- tree {idx} --")
                _print_tree(g, tree.root)
            return OK
    except ValueError as e:
        raise CliError(str(e), USAGE)
    raise CliError(f"unknown oracle query {args.query!r}", USAGE)


def cmd_diff(args) -> int:
    g1 = _load_grammar(args.grammar_a)
    g2 = _load_grammar(args.grammar_b)
    witness = oracle.compare_languages(g1, g2, args.max_len)
    if witness is None:
        print(f"equal over all strings up to length {args.max_len}")
        return OK
    in1 = oracle.recognize(g1, witness) if set(witness) <= g1.alphabet else False
    in2 = oracle.recognize(g2, witness) if set(witness) <= g2.alphabet else False
    print(f"witness: {witness or EPS} (in {args.grammar_a}: {in1}, in {args.grammar_b}: {in2})")
    return REJECT


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="llconj", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="structural report for a grammar file")
    p.add_argument("grammar")
    p.add_argument("--k", type=int, default=None, help="run a short-rule scan at this lookahead")
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--cap", type=int, default=transforms.DEFAULT_TREE_CAP)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("infer-table", help="infer a lookahead table from member strings")
    p.add_argument("grammar")
    p.add_argument("--k", type=int, default=None, help="lookahead (defaults to the grammar's k)")
    p.add_argument("--max-len", type=int, default=None, help="string-length bound (default 2k+8)")
    p.add_argument("--cap", type=int, default=transforms.DEFAULT_TREE_CAP)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_infer_table)

    p = sub.add_parser("transform", help="run the reduction pipeline up to a stage")
    p.add_argument("grammar")
    p.add_argument("--stage", choices=sorted(transforms.CLI_STAGES), default="full")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--infer-bound", type=int, default=None)
    p.add_argument("--cap", type=int, default=transforms.DEFAULT_TREE_CAP)
    p.add_argument("-o", "--output", default=None, help="output directory")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("parse", help="run the stack-set parser")
    p.add_argument("grammar")
    p.add_argument("--table", required=True)
    p.add_argument("input", nargs="?", default=None)
    p.add_argument("--stdin", action="store_true", help="read one input string per line")
    p.add_argument("--trace", default=None, help="write the step trace to this file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("oracle", help="brute-force recognizer queries")
    p.add_argument("query", choices=["recognize", "language", "tree", "trees"])
    p.add_argument("grammar")
    p.add_argument("input", nargs="?", default="")
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_TREE_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("diff", help="compare two grammars' languages exhaustively")
    p.add_argument("grammar_a")
    p.add_argument("grammar_b")
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(func=cmd_diff)

    return top


def main(argv: list[str] | None = None) -> int:
    arg_parser = build_arg_parser()
    try:
        args = arg_parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as e:
        print(str(e), file=sys.stderr)
        return e.code
    except GrammarFormatError as e:
        print(str(e), file=sys.stderr)
        return USAGE
    except transforms.TransformError as e:
        print(str(e), file=sys.stderr)
        return CONFLICT
    except oracle.TreeOverflowError as e:
        print(str(e), file=sys.stderr)
        return CONFLICT


if __name__ == "__main__":
    sys.exit(main())
