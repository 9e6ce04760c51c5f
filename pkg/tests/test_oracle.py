import math

import pytest
from hypothesis import given, settings, strategies as st

from insideout import oracle
from insideout.corpus import Corpus
from insideout.grammar import BinaryRule, LexicalRule, parse_grammar
from insideout.oracle import (
    Branch,
    Leaf,
    anchored_indicator,
    anchored_lexical_indicator,
    em_step,
    enumerate_trees,
    expected_cat_freq,
    expected_freq,
    sentence_prob_oracle,
    tree_stats,
    triples,
)
from insideout.randgen import Universe, random_pair

import naive

SS = BinaryRule("S", "S", "S")
Sa = LexicalRule("S", "a")


def as_tuple(x):
    if isinstance(x, Leaf):
        return (x.label, x.terminal)
    return (x.label, as_tuple(x.left), as_tuple(x.right))


def test_single_tree(g0):
    (x,) = enumerate_trees(g0, ("a", "a"))
    assert x.bracket() == "(S (S a) (S a))"
    assert x.span == (1, 2)


@pytest.mark.parametrize("n", range(1, 11))
def test_catalan_counts(g0, n):
    assert len(enumerate_trees(g0, ("a",) * n)) == naive.catalan(n - 1)


def test_unparseable_is_empty(g0):
    assert enumerate_trees(g0, ("b",)) == []


def test_canonical_order(g0):
    brackets = [x.bracket() for x in enumerate_trees(g0, ("a",) * 3)]
    assert brackets == ["(S (S a) (S (S a) (S a)))", "(S (S (S a) (S a)) (S a))"]


def test_cap(g0):
    with pytest.raises(oracle.TreeCapExceeded):
        enumerate_trees(g0, ("a",) * 6, cap=41)
    assert len(enumerate_trees(g0, ("a",) * 6, cap=42)) == 42


def test_tree_stats(g0, g1):
    (x,) = enumerate_trees(g0, ("a", "a"))
    st_ = tree_stats(g0, x)
    assert st_.prob == 0.125
    assert st_.rule_freq == {SS: 1, Sa: 2}
    assert st_.cat_freq == {"S": 3}
    (x,) = enumerate_trees(g1, ("a", "b"))
    st_ = tree_stats(g1, x)
    assert st_.prob == 1.0
    assert set(st_.rule_freq.values()) == {1}
    for x in enumerate_trees(g0, ("a",) * 3):
        st_ = tree_stats(g0, x)
        assert st_.prob == 0.03125
        assert st_.rule_freq == {SS: 2, Sa: 3}


def test_tree_stats_rejects_foreign_rule(g0):
    x = Branch("S", Leaf("S", "a", 1), Leaf("T", "a", 2))
    with pytest.raises(ValueError, match="not in the grammar"):
        tree_stats(g0, x)


def test_sentence_prob_oracle(g0, g1):
    assert sentence_prob_oracle(g0, ("a",) * 3) == 0.0625
    assert sentence_prob_oracle(g1, ("a", "b")) == 1.0
    assert sentence_prob_oracle(g0, ("b",)) == 0.0


def test_expected_freq(g0):
    assert expected_freq(g0, ("a", "a"), SS) == 1.0
    assert expected_freq(g0, ("a", "a", "a"), SS) == 2.0
    assert expected_freq(g0, ("a",), SS) == 0.0
    assert expected_cat_freq(g0, ("a", "a"), "S") == 3.0
    with pytest.raises(oracle.UnparseableError):
        expected_freq(g0, ("b",), SS)


def test_anchored_indicator(g0):
    (x,) = enumerate_trees(g0, ("a", "a"))
    assert anchored_indicator(x, ((1, 2, "S"), (1, 1, "S"), (2, 2, "S"))) == 1
    with pytest.raises(ValueError):
        anchored_indicator(x, ((1, 2, "S"), (1, 0, "S"), (1, 2, "S")))
    right_branching, left_branching = enumerate_trees(g0, ("a",) * 3)
    triple = ((1, 3, "S"), (1, 1, "S"), (2, 3, "S"))
    assert anchored_indicator(left_branching, triple) == 0
    assert anchored_indicator(right_branching, triple) == 1


def test_em_step_examples(g0, g1):
    assert em_step(g0, Corpus.from_sentences(["a a"])).probs == pytest.approx((1 / 3, 2 / 3), abs=1e-15)
    assert em_step(g1, Corpus.from_sentences(["a b"])) == g1
    assert em_step(g0, Corpus.from_sentences(["a"])).probs == (0.0, 1.0)
    with pytest.raises(oracle.UnparseableError):
        em_step(g0, Corpus.from_sentences(["b"]))


def test_em_step_freezes_unused_lhs():
    g = parse_grammar('S -> A A 0.5\nS -> "a" 0.5\nA -> "a" 0.3\nA -> "b" 0.7\n')
    out = em_step(g, Corpus.from_sentences(["a"]))
    assert out.probs == (0.0, 1.0, 0.3, 0.7)


seeds = st.integers(0, 2**32)


def _pair(seed, max_trees=2000):
    return random_pair(seed, Universe(max_trees=max_trees), tree_count=oracle.count_trees)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_forest_enumeration_matches_naive_recursion(seed):
    g, c = _pair(seed)
    for y in c.types:
        got = [as_tuple(x) for x in enumerate_trees(g, y)]
        assert len(set(got)) == len(got)
        assert sorted(got, key=repr) == sorted(naive.trees(g, y), key=repr)
        assert oracle.count_trees(g, y) == len(got)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_tree_invariants(seed):
    g, c = _pair(seed)
    for y in c.types:
        n = len(y)
        for x in enumerate_trees(g, y):
            assert x.label == g.start and x.span == (1, n)
            stats = tree_stats(g, x)
            assert sum(stats.cat_freq.values()) == 2 * n - 1
            for a in g.nonterminals:
                assert stats.cat_freq[a] == sum(stats.rule_freq[r] for r in g.rules_for(a))
            for node in x.nodes():
                assert node.rule in g
                if isinstance(node, Branch):
                    s, t = node.span
                    assert node.left.span == (s, node.split)
                    assert node.right.span == (node.split + 1, t)
                    assert s <= node.split < t
                else:
                    assert node.terminal == y[node.start - 1]


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_rule_frequency_decomposes_into_anchored_triples(seed):
    g, c = _pair(seed, max_trees=200)
    for y in c.types:
        n = len(y)
        for x in enumerate_trees(g, y):
            stats = tree_stats(g, x)
            for r in g.rules:
                if isinstance(r, BinaryRule):
                    total = sum(anchored_indicator(x, tr) for tr in triples(r, n))
                else:
                    total = sum(
                        anchored_lexical_indicator(x, s, r.lhs, r.terminal)
                        for s in range(1, n + 1)
                        if y[s - 1] == r.terminal
                    )
                assert total == stats.rule_freq[r]


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_linearity_of_expectation(seed):
    g, c = _pair(seed, max_trees=200)
    for y in c.types:
        n = len(y)
        trees = enumerate_trees(g, y)
        probs = [tree_stats(g, x).prob for x in trees]
        py = math.fsum(probs)
        posterior = [p / py for p in probs]
        assert abs(math.fsum(posterior) - 1.0) <= 1e-12
        ex = oracle.expectations(g, y)
        for r in g.rules:
            if not isinstance(r, BinaryRule):
                continue
            by_triple = math.fsum(
                math.fsum(q * anchored_indicator(x, tr) for q, x in zip(posterior, trees))
                for tr in triples(r, n)
            )
            assert abs(by_triple - ex.rule_freq[r]) <= 1e-12 * max(1.0, ex.rule_freq[r])


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_oracle_sentence_prob_matches_naive(seed):
    g, c = _pair(seed)
    for y in c.types:
        want = math.fsum(naive.tree_prob(g, x) for x in naive.trees(g, y))
        got = sentence_prob_oracle(g, y)
        assert got == want or abs(got - want) <= 1e-12 * want
