"""Rule and category counts computed from inside and outside charts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .chart import SentenceAnalysis, compile_grammar
from .grammar import BinaryRule, Grammar, LexicalRule, Rule


class ZeroProbabilityError(ValueError):
    """The sentence has probability 0 under the grammar."""


@dataclass
class CountTable:
    """Expected rule and category counts, keyed in grammar order."""

    rule_counts: dict[Rule, float]
    cat_counts: dict[str, float]

    def __getitem__(self, key) -> float:
        if isinstance(key, str):
            return self.cat_counts[key]
        return self.rule_counts[key]


def _require_parse(analysis: SentenceAnalysis):
    if not analysis.prob > 0.0:
        raise ZeroProbabilityError(f"sentence {' '.join(analysis.sentence)!r} has probability 0")


def rule_count_lexical(analysis: SentenceAnalysis, grammar: Grammar, rule: LexicalRule) -> float:
    _require_parse(analysis)
    e, f = analysis.inside, analysis.outside
    total = 0.0
    for t, word in enumerate(analysis.sentence, start=1):
        if word == rule.terminal:
            total += e[t, t, rule.lhs] * f[t, t, rule.lhs]
    return total / analysis.prob


def rule_count_binary(analysis: SentenceAnalysis, grammar: Grammar, rule: BinaryRule) -> float:
    _require_parse(analysis)
    e, f = analysis.inside.cells, analysis.outside.cells
    idx = compile_grammar(grammar).nt_index
    a, b, c = idx[rule.lhs], idx[rule.left], idx[rule.right]
    p = grammar.prob(rule)
    n = analysis.n
    total = 0.0
    for s in range(1, n):
        for t in range(s + 1, n + 1):
            for r in range(s, t):
                total += p * e[s][r][b] * e[r + 1][t][c] * f[s][t][a]
    return total / analysis.prob


def rule_count(analysis: SentenceAnalysis, grammar: Grammar, rule: Rule) -> float:
    if isinstance(rule, BinaryRule):
        return rule_count_binary(analysis, grammar, rule)
    return rule_count_lexical(analysis, grammar, rule)


def category_count(analysis: SentenceAnalysis, grammar: Grammar, nonterminal: str) -> float:
    _require_parse(analysis)
    e, f = analysis.inside, analysis.outside
    total = 0.0
    for s, t in e.spans():
        total += e[s, t, nonterminal] * f[s, t, nonterminal]
    return total / analysis.prob


def sentence_counts(analysis: SentenceAnalysis, grammar: Grammar) -> CountTable:
    _require_parse(analysis)
    rules = {rule: rule_count(analysis, grammar, rule) for rule in grammar.rules}
    cats = {a: category_count(analysis, grammar, a) for a in grammar.nonterminals}
    return CountTable(rules, cats)


def aggregate(tables: Iterable[tuple[CountTable, float]]) -> CountTable:
    """Weighted entrywise sum, accumulated in the order given."""
    rules: dict[Rule, float] | None = None
    cats: dict[str, float] | None = None
    for table, weight in tables:
        if rules is None:
            rules = {r: 0.0 for r in table.rule_counts}
            cats = {a: 0.0 for a in table.cat_counts}
        if table.rule_counts.keys() != rules.keys() or table.cat_counts.keys() != cats.keys():
            raise ValueError("count tables belong to different grammars")
        for r, v in table.rule_counts.items():
            rules[r] += weight * v
        for a, v in table.cat_counts.items():
            cats[a] += weight * v
    if rules is None:
        raise ValueError("nothing to aggregate")
    return CountTable(rules, cats)


def zero_table(grammar: Grammar) -> CountTable:
    return CountTable({r: 0.0 for r in grammar.rules}, {a: 0.0 for a in grammar.nonterminals})
