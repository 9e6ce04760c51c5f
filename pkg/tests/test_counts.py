import math

import pytest
from hypothesis import given, settings, strategies as st

from insideout import oracle
from insideout.chart import analyze
from insideout.counts import (
    ZeroProbabilityError,
    aggregate,
    category_count,
    rule_count_binary,
    rule_count_lexical,
    sentence_counts,
)
from insideout.grammar import BinaryRule, LexicalRule
from insideout.randgen import random_pair

SS = BinaryRule("S", "S", "S")
Sa = LexicalRule("S", "a")


def close(a, b, rel=1e-9):
    return a == b or abs(a - b) <= rel * max(abs(a), abs(b))


def test_lexical_counts(g0, g1):
    # (1/0.125) (0.5*0.25 + 0.5*0.25)
    assert rule_count_lexical(analyze(g0, ("a", "a")), g0, Sa) == 2.0
    assert rule_count_lexical(analyze(g1, ("a", "b")), g1, LexicalRule("A", "a")) == 1.0
    assert rule_count_lexical(analyze(g0, ("a",)), g0, Sa) == 1.0


def test_binary_counts(g0):
    assert rule_count_binary(analyze(g0, ("a", "a")), g0, SS) == 1.0
    assert rule_count_binary(analyze(g0, ("a", "a", "a")), g0, SS) == pytest.approx(2.0, rel=1e-12)
    assert rule_count_binary(analyze(g0, ("a",)), g0, SS) == 0.0


def test_category_counts(g0, g1):
    # (1/0.125) (0.5*0.25 + 0.5*0.25 + 0.125*1)
    assert category_count(analyze(g0, ("a", "a")), g0, "S") == 3.0
    assert category_count(analyze(g1, ("a", "b")), g1, "A") == 1.0
    assert category_count(analyze(g0, ("a",)), g0, "S") == 1.0


def test_sentence_tables(g0, g1):
    t = sentence_counts(analyze(g0, ("a", "a")), g0)
    assert t.rule_counts == {SS: 1.0, Sa: 2.0}
    assert t.cat_counts == {"S": 3.0}
    t = sentence_counts(analyze(g1, ("a", "b")), g1)
    assert set(t.rule_counts.values()) == {1.0}
    assert set(t.cat_counts.values()) == {1.0}
    t = sentence_counts(analyze(g0, ("a",)), g0)
    assert t.rule_counts == {SS: 0.0, Sa: 1.0}
    assert t["S"] == 1.0


def test_zero_probability_raises(g0):
    a = analyze(g0, ("b",))
    for fn, arg in [(rule_count_lexical, Sa), (rule_count_binary, SS), (category_count, "S")]:
        with pytest.raises(ZeroProbabilityError):
            fn(a, g0, arg)
    with pytest.raises(ZeroProbabilityError):
        sentence_counts(a, g0)


def test_aggregate(g0):
    aa = sentence_counts(analyze(g0, ("a", "a")), g0)
    a = sentence_counts(analyze(g0, ("a",)), g0)
    assert aggregate([(aa, 1)]) == aa
    doubled = aggregate([(aa, 1), (aa, 1)])
    assert doubled.rule_counts == {SS: 2.0, Sa: 4.0}
    assert doubled.cat_counts == {"S": 6.0}
    corpus = aggregate([(aa, 2), (a, 1)])
    assert corpus.rule_counts == {SS: 2.0, Sa: 5.0}
    assert corpus.cat_counts == {"S": 7.0}


def test_aggregate_rejects_mixed_grammars(g0, g1):
    t0 = sentence_counts(analyze(g0, ("a",)), g0)
    t1 = sentence_counts(analyze(g1, ("a", "b")), g1)
    with pytest.raises(ValueError):
        aggregate([(t0, 1), (t1, 1)])


seeds = st.integers(0, 2**32)


@given(seeds)
@settings(max_examples=150, deadline=None)
def test_category_count_is_sum_of_rule_counts(seed):
    g, c = random_pair(seed)
    for y in c.types:
        a = analyze(g, y)
        table = sentence_counts(a, g)
        for nt in g.nonterminals:
            summed = math.fsum(table.rule_counts[r] for r in g.rules_for(nt))
            assert close(table.cat_counts[nt], summed)
        assert close(math.fsum(table.cat_counts.values()), 2 * len(y) - 1)
        assert all(v >= 0.0 and math.isfinite(v) for v in table.rule_counts.values())


@given(seeds)
@settings(max_examples=100, deadline=None)
def test_rule_counts_are_expected_frequencies(seed):
    g, c = random_pair(seed, tree_count=oracle.count_trees)
    for y in c.types:
        table = sentence_counts(analyze(g, y), g)
        ex = oracle.expectations(g, y)
        for r in g.rules:
            assert close(table.rule_counts[r], ex.rule_freq[r])
        for nt in g.nonterminals:
            assert close(table.cat_counts[nt], ex.cat_freq[nt])
