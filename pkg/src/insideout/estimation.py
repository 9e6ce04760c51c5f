"""Inside-outside re-estimation and the iterative training loop."""

from __future__ import annotations

import math
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Literal

from .chart import analyze
from .corpus import Corpus, Sentence
from .counts import CountTable, aggregate, sentence_counts, zero_table
from .grammar import Grammar, Rule


class UnparseableCorpusError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    max_iters: int = 100
    epsilon: float = 1e-6
    strict: bool = False
    renormalize_tol: float = 1e-9
    jobs: int = 1

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.epsilon >= 0.0:
            raise ValueError("epsilon must be nonnegative")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


@dataclass(frozen=True)
class EStep:
    """Corpus-level expectation results for one grammar."""

    counts: CountTable
    log_likelihood: float
    skipped: tuple[Sentence, ...]
    probs: tuple[float, ...]


def _analyze_type(grammar: Grammar, y: Sentence) -> tuple[float, CountTable | None]:
    analysis = analyze(grammar, y)
    if not analysis.prob > 0.0:
        return analysis.prob, None
    return analysis.prob, sentence_counts(analysis, grammar)


def _likelihood(probs, freqs) -> float:
    parsed = [(p, f) for p, f in zip(probs, freqs) if p > 0.0]
    if not parsed:
        return -math.inf
    total = sum(f for _, f in parsed)
    return math.fsum(f / total * math.log(p) for p, f in parsed)


def expectation(
    grammar: Grammar,
    corpus: Corpus,
    strict: bool = False,
    executor: Executor | None = None,
) -> EStep:
    """Per-type charts and counts, reduced in corpus order.

    Per-type work may run on ``executor``; the reduction is sequential, so
    the result does not depend on the number of workers.
    """
    if executor is None:
        results = [_analyze_type(grammar, y) for y in corpus.types]
    else:
        results = list(executor.map(_analyze_type, [grammar] * len(corpus), corpus.types))
    skipped = tuple(y for y, (p, _) in zip(corpus.types, results) if not p > 0.0)
    if skipped and strict:
        raise UnparseableCorpusError(
            f"{len(skipped)} sentence type(s) have probability 0, first: {' '.join(skipped[0])!r}"
        )
    pairs = [(table, f) for (_, table), f in zip(results, corpus.freqs) if table is not None]
    counts = aggregate(pairs) if pairs else zero_table(grammar)
    probs = tuple(p for p, _ in results)
    return EStep(counts, _likelihood(probs, corpus.freqs), skipped, probs)


def maximize(grammar: Grammar, counts: CountTable) -> Grammar:
    """Ratios of rule counts to category counts.

    A left-hand side whose category count is 0 keeps its distribution.
    The category count equals the sum of its rule counts only up to
    rounding, so a single-rule distribution can come out one ulp above 1;
    ratios are capped at 1 to keep the output loadable.
    """
    probs = []
    for rule, p in grammar.items():
        den = counts.cat_counts[rule.lhs]
        probs.append(min(counts.rule_counts[rule] / den, 1.0) if den > 0.0 else p)
    return grammar.with_probs(probs)


def reestimate(grammar: Grammar, corpus: Corpus, strict: bool = False) -> Grammar:
    est = expectation(grammar, corpus, strict)
    if len(est.skipped) == len(corpus):
        raise UnparseableCorpusError("no sentence in the corpus has a parse")
    return maximize(grammar, est.counts)


def log_likelihood(grammar: Grammar, corpus: Corpus, strict: bool = False) -> float:
    """Sum of p~(y) ln P(y) over sentence types, natural log.

    Types with P(y) = 0 are left out and p~ is renormalized over the rest;
    in strict mode any such type makes the result -inf.
    """
    probs = [analyze(grammar, y).prob for y in corpus.types]
    if strict and any(not p > 0.0 for p in probs):
        return -math.inf
    return _likelihood(probs, corpus.freqs)


def perplexity(grammar: Grammar, corpus: Corpus, strict: bool = False) -> float:
    return math.exp(-log_likelihood(grammar, corpus, strict))


@dataclass(frozen=True)
class IterationRecord:
    index: int
    log_likelihood: float
    delta: float
    skipped: int


@dataclass
class TrainReport:
    records: list[IterationRecord]
    final_grammar: Grammar
    stop_reason: Literal["converged", "max_iters"]
    initial_log_likelihood: float
    initial_skipped: int = 0
    zero_rules: list[tuple[int, Rule]] = field(default_factory=list)
    # (iteration, sentences that lost their last parse)
    lost_parses: list[tuple[int, tuple[Sentence, ...]]] = field(default_factory=list)

    @property
    def log_likelihoods(self) -> list[float]:
        return [self.initial_log_likelihood] + [r.log_likelihood for r in self.records]


def train(grammar: Grammar, corpus: Corpus, config: TrainConfig = TrainConfig()) -> TrainReport:
    """Iterate re-estimation until |delta L| < epsilon or max_iters.

    Record ``i`` holds the log-likelihood of the grammar after ``i`` steps
    and its change against step ``i - 1``.
    """
    pool = ProcessPoolExecutor(config.jobs) if config.jobs > 1 else nullcontext()
    with pool as executor:
        est = expectation(grammar, corpus, config.strict, executor)
        if len(est.skipped) == len(corpus):
            raise UnparseableCorpusError("no sentence in the corpus has a parse")
        report = TrainReport([], grammar, "max_iters", est.log_likelihood, len(est.skipped))
        current = grammar
        zeroed = {r for r, p in grammar.items() if p == 0.0}
        for i in range(1, config.max_iters + 1):
            current = maximize(current, est.counts)
            previous = est
            est = expectation(current, corpus, config.strict, executor)
            lost = tuple(y for y in est.skipped if y not in set(previous.skipped))
            if lost:
                report.lost_parses.append((i, lost))
            for rule, p in current.items():
                if p == 0.0 and rule not in zeroed:
                    zeroed.add(rule)
                    report.zero_rules.append((i, rule))
            delta = est.log_likelihood - previous.log_likelihood
            if math.isnan(delta):
                # both -inf
                delta = 0.0
            report.records.append(IterationRecord(i, est.log_likelihood, delta, len(est.skipped)))
            report.final_grammar = current
            if abs(delta) < config.epsilon:
                report.stop_reason = "converged"
                break
    return report
