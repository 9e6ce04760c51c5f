"""Command-line interface: ``insideout <command> ...``."""

from __future__ import annotations

import argparse
import math
import sys

from . import counts as counts_mod
from . import oracle
from .chart import analyze
from .corpus import Corpus, CorpusError, read_corpus, sentence
from .counts import CountTable, aggregate
from .estimation import (
    TrainConfig,
    UnparseableCorpusError,
    log_likelihood,
    reestimate,
    train,
)
from .grammar import GrammarError, format_grammar, format_prob, load_grammar, validate_cnf

FORMATS = """\
grammar file format (UTF-8 text, one rule per line):
  LHS -> RHS1 RHS2 <prob>      binary rule, two nonterminals
  LHS -> "terminal" <prob>     lexical rule, one quoted terminal
  <prob> is a decimal literal. Lines beginning # are comments; blank
  lines are ignored. The first non-comment line may be `start: <NT>`;
  the default start symbol is the LHS of the first rule. Each LHS
  distribution must sum to 1 within 1e-9 unless --renormalize is given.

corpus file format (UTF-8 text):
  one sentence per line, whitespace-separated tokens; blank lines are
  skipped. Repeated lines count as repeated occurrences.
"""


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


def fmt(x: float) -> str:
    return format_prob(x)


def _read_grammar(args, check_sums=True):
    try:
        return load_grammar(args.grammar, renormalize_sums=getattr(args, "renormalize", False),
                            check_sums=check_sums)
    except OSError as exc:
        raise CLIError(f"{args.grammar}: {exc.strerror}") from None
    except GrammarError as exc:
        raise CLIError(f"{args.grammar}: {exc}") from None


def _read_corpus(path) -> Corpus:
    try:
        return read_corpus(path)
    except OSError as exc:
        raise CLIError(f"{path}: {exc.strerror}") from None
    except CorpusError as exc:
        raise CLIError(f"{path}: {exc}") from None


def _sentence(text):
    try:
        return sentence(text)
    except CorpusError as exc:
        raise CLIError(f"--sentence: {exc}") from None


def _rule_fields(rule) -> str:
    return " ".join([rule.lhs, *(f'"{s}"' if len(rule.rhs) == 1 else s for s in rule.rhs)])


def _print_table(table: CountTable, out):
    for rule, v in table.rule_counts.items():
        print(f"rule {_rule_fields(rule)} {fmt(v)}", file=out)
    for a, v in table.cat_counts.items():
        print(f"cat {a} {fmt(v)}", file=out)


def cmd_validate(args, out):
    grammar = _read_grammar(args, check_sums=False)
    report = validate_cnf(grammar)
    if report:
        raise CLIError("; ".join(f"{args.grammar}: {msg}" for msg in report))
    print("OK", file=out)


def cmd_inside(args, out):
    grammar = _read_grammar(args)
    y = _sentence(args.sentence)
    analysis = analyze(grammar, y)
    print(f"P {fmt(analysis.prob)}", file=out)
    if args.tables:
        for s, t, a, v in analysis.inside.entries():
            print(f"e {s} {t} {a} {fmt(v)}", file=out)
        for s, t, a, v in analysis.outside.entries():
            print(f"f {s} {t} {a} {fmt(v)}", file=out)


def cmd_counts(args, out):
    grammar = _read_grammar(args)
    if args.sentence is not None:
        corpus = Corpus.from_sentences([_sentence(args.sentence)])
    else:
        corpus = _read_corpus(args.corpus)
    tables = []
    for y, fy in corpus:
        analysis = analyze(grammar, y)
        if not analysis.prob > 0.0:
            print(f"warning: skipped unparseable sentence {' '.join(y)!r}", file=sys.stderr)
            continue
        table = counts_mod.sentence_counts(analysis, grammar)
        if args.per_sentence:
            print(f"sentence {' '.join(y)} freq {fy}", file=out)
            _print_table(table, out)
        tables.append((table, fy))
    if not tables:
        raise CLIError("no sentence has a parse")
    if not args.per_sentence:
        _print_table(aggregate(tables), out)


def cmd_parse(args, out):
    grammar = _read_grammar(args)
    y = _sentence(args.sentence)
    try:
        trees = oracle.enumerate_trees(grammar, y, args.cap)
    except oracle.TreeCapExceeded as exc:
        raise CLIError(str(exc)) from None
    for x in trees:
        print(f"{x.bracket()}\t{fmt(oracle.tree_stats(grammar, x).prob)}", file=out)
    print(f"trees {len(trees)}", file=out)


def cmd_train(args, out):
    grammar = _read_grammar(args)
    corpus = _read_corpus(args.corpus)
    try:
        config = TrainConfig(max_iters=args.max_iters, epsilon=args.epsilon,
                             strict=args.strict, jobs=args.jobs)
        report = train(grammar, corpus, config)
    except (ValueError, UnparseableCorpusError) as exc:
        raise CLIError(str(exc)) from None
    if report.initial_skipped:
        print(f"warning: {report.initial_skipped} unparseable sentence type(s) skipped",
              file=sys.stderr)
    for rec in report.records:
        print(f"iter {rec.index} loglik {fmt(rec.log_likelihood)} delta {fmt(rec.delta)} "
              f"skipped {rec.skipped}", file=out)
    for i, rule in report.zero_rules:
        print(f"warning: rule {rule} reached probability 0 at iteration {i}", file=sys.stderr)
    for i, lost in report.lost_parses:
        print(f"warning: {len(lost)} sentence type(s) lost their last parse at iteration {i}",
              file=sys.stderr)
    text = format_grammar(report.final_grammar)
    if args.out == "-":
        out.write(text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CLIError(f"{args.out}: {exc.strerror}") from None
    print(f"stop {report.stop_reason}", file=sys.stderr)


def _close(a: float, b: float, tol: float) -> bool:
    return a == b or abs(a - b) <= tol * max(abs(a), abs(b))


def cmd_check(args, out):
    grammar = _read_grammar(args)
    corpus = _read_corpus(args.corpus)
    mismatches = []
    compared = 0
    try:
        for y, _ in corpus:
            analysis = analyze(grammar, y)
            if not analysis.prob > 0.0:
                continue
            table = counts_mod.sentence_counts(analysis, grammar)
            ex = oracle.expectations(grammar, y, args.cap)
            text = " ".join(y)
            if not _close(analysis.prob, ex.prob, args.tol):
                mismatches.append(f"sentence-prob in {text!r}: chart {fmt(analysis.prob)} oracle {fmt(ex.prob)}")
            for rule in grammar.rules:
                io, em = table.rule_counts[rule], ex.rule_freq[rule]
                compared += 1
                if not _close(io, em, args.tol):
                    mismatches.append(f"rule-count {rule} in {text!r}: inside-outside {fmt(io)} oracle {fmt(em)}")
            for a in grammar.nonterminals:
                io, em = table.cat_counts[a], ex.cat_freq[a]
                compared += 1
                if not _close(io, em, args.tol):
                    mismatches.append(f"cat-count {a} in {text!r}: inside-outside {fmt(io)} oracle {fmt(em)}")
        step = reestimate(grammar, corpus)
        em = oracle.em_step(grammar, corpus, args.cap)
    except oracle.TreeCapExceeded as exc:
        raise CLIError(str(exc)) from None
    except (UnparseableCorpusError, oracle.UnparseableError) as exc:
        raise CLIError(str(exc)) from None
    for rule, p, q in zip(grammar.rules, step.probs, em.probs):
        compared += 1
        if not _close(p, q, args.tol):
            mismatches.append(f"reestimate {rule}: inside-outside {fmt(p)} oracle {fmt(q)}")
    for line in mismatches:
        print(f"mismatch {line}", file=out)
    if mismatches:
        print(f"error: {len(mismatches)} of {compared} comparisons differ beyond {args.tol:g}",
              file=sys.stderr)
        return 2
    print(f"OK {compared} comparisons within {args.tol:g}", file=out)


def cmd_perplexity(args, out):
    grammar = _read_grammar(args)
    corpus = _read_corpus(args.corpus)
    ll = log_likelihood(grammar, corpus, args.strict)
    skipped = sum(1 for y in corpus.types if not analyze(grammar, y).prob > 0.0)
    if skipped:
        print(f"warning: {skipped} unparseable sentence type(s)"
              f"{' make the likelihood -inf' if args.strict else ' excluded'}", file=sys.stderr)
    print(f"loglik {fmt(ll)}", file=out)
    print(f"perplexity {fmt(math.exp(-ll))}", file=out)
    print(f"skipped {skipped}", file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="insideout",
        description="Inside-outside training for CNF PCFGs, checked against brute-force EM.",
        epilog=FORMATS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def command(name, func, help_text, grammar=True):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=FORMATS,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        if grammar:
            p.add_argument("--grammar", required=True, help="grammar file")
            p.add_argument("--renormalize", action="store_true",
                           help="rescale LHS distributions instead of rejecting them")
        return p

    command("validate", cmd_validate, "check a grammar file and its distributions")

    p = command("inside", cmd_inside, "print the sentence probability P")
    p.add_argument("--sentence", required=True)
    p.add_argument("--tables", action="store_true", help="also print nonzero e and f entries")

    p = command("counts", cmd_counts, "print rule and category counts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--sentence")
    src.add_argument("--corpus")
    p.add_argument("--per-sentence", action="store_true",
                   help="one table per sentence type instead of the frequency-weighted sum")

    p = command("parse", cmd_parse, "enumerate all parse trees of a sentence")
    p.add_argument("--sentence", required=True)
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)

    p = command("train", cmd_train, "run inside-outside re-estimation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--strict", action="store_true", help="fail on unparseable sentences")
    p.add_argument("--out", required=True, help="output grammar file, - for stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the E-step")

    p = command("check", cmd_check, "compare inside-outside against brute-force EM")
    p.add_argument("--corpus", required=True)
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)
    p.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")

    p = command("perplexity", cmd_perplexity, "print log-likelihood and perplexity")
    p.add_argument("--corpus", required=True)
    p.add_argument("--strict", action="store_true")
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code or 0
    try:
        code = args.func(args, out)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
