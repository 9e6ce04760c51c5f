"""Random CNF grammars and corpora for property tests and sweeps.

Sentences are sampled top-down against a table of derivable lengths, which
depends on grammar structure only, so sampling never consults the charts
under test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Corpus, Sentence
from .grammar import BinaryRule, Grammar, LexicalRule

NONTERMINALS = ("S", "A", "B", "C", "D", "E")
TERMINALS = ("a", "b", "c", "d", "e")


@dataclass(frozen=True)
class Universe:
    """Bounds of a random (grammar, corpus) universe."""

    nonterminals: tuple[int, int] = (2, 5)
    terminals: tuple[int, int] = (1, 4)
    types: tuple[int, int] = (1, 10)
    length: tuple[int, int] = (1, 7)
    max_binary_per_lhs: int = 2
    # sentences with more parse trees than this are resampled
    max_trees: int = 2000
    min_prob: float = 0.05


def _normalized(rng: random.Random, k: int, min_prob: float) -> list[float]:
    weights = [rng.uniform(min_prob, 1.0) for _ in range(k)]
    total = sum(weights)
    return [w / total for w in weights]


def random_grammar(rng: random.Random, universe: Universe = Universe()) -> Grammar:
    """A normalized CNF grammar in which every terminal has a lexical rule."""
    n_nt = rng.randint(*universe.nonterminals)
    n_t = rng.randint(*universe.terminals)
    nts = NONTERMINALS[:n_nt]
    ts = TERMINALS[:n_t]

    lexical = {a: set() for a in nts}
    for t in ts:
        lexical[rng.choice(nts)].add(t)
    for a in nts:
        for t in ts:
            if rng.random() < 0.3:
                lexical[a].add(t)

    binary = {a: set() for a in nts}
    binary[nts[0]].add((rng.choice(nts), rng.choice(nts)))
    for a in nts:
        for _ in range(rng.randint(0, universe.max_binary_per_lhs)):
            binary[a].add((rng.choice(nts), rng.choice(nts)))

    rules = []
    for a in nts:
        if not lexical[a] and not binary[a]:
            lexical[a].add(rng.choice(ts))
        mine = [BinaryRule(a, b, c) for b, c in sorted(binary[a])]
        mine += [LexicalRule(a, t) for t in sorted(lexical[a])]
        rules.extend(mine)
    probs = []
    for a in nts:
        k = sum(1 for r in rules if r.lhs == a)
        probs.extend(_normalized(rng, k, universe.min_prob))
    return Grammar.build(rules, probs, start=nts[0])


def derivable_lengths(grammar: Grammar, max_len: int) -> dict[str, set[int]]:
    """For each nonterminal, the yield lengths <= max_len it can derive."""
    out = {a: set() for a in grammar.nonterminals}
    for rule in grammar.rules:
        if isinstance(rule, LexicalRule):
            out[rule.lhs].add(1)
    for n in range(2, max_len + 1):
        for rule in grammar.rules:
            if isinstance(rule, BinaryRule) and n not in out[rule.lhs]:
                if any(j in out[rule.left] and n - j in out[rule.right] for j in range(1, n)):
                    out[rule.lhs].add(n)
    return out


def sample_sentence(rng: random.Random, grammar: Grammar, n: int,
                    lengths: dict[str, set[int]] | None = None) -> Sentence:
    """Uniformly-structured random sentence of length ``n`` derivable from the start."""
    if lengths is None:
        lengths = derivable_lengths(grammar, n)
    if n not in lengths[grammar.start]:
        raise ValueError(f"start symbol derives no sentence of length {n}")
    by_lhs: dict[str, list] = {}
    for rule in grammar.rules:
        by_lhs.setdefault(rule.lhs, []).append(rule)

    def grow(a: str, k: int) -> list[str]:
        if k == 1:
            choices = [r for r in by_lhs.get(a, ()) if isinstance(r, LexicalRule)]
            return [rng.choice(choices).terminal]
        splits = [
            (r, j)
            for r in by_lhs.get(a, ())
            if isinstance(r, BinaryRule)
            for j in range(1, k)
            if j in lengths[r.left] and k - j in lengths[r.right]
        ]
        rule, j = rng.choice(splits)
        return grow(rule.left, j) + grow(rule.right, k - j)

    return tuple(grow(grammar.start, n))


def random_corpus(rng: random.Random, grammar: Grammar, universe: Universe = Universe(),
                  tree_count=None) -> Corpus:
    """Parseable sentence types with frequencies 1..3.

    ``tree_count(grammar, sentence)`` lets callers bound ambiguity; sentences
    above ``universe.max_trees`` are redrawn.
    """
    lo, hi = universe.length
    lengths = derivable_lengths(grammar, hi)
    feasible = [n for n in range(lo, hi + 1) if n in lengths[grammar.start]]
    if not feasible:
        raise ValueError("grammar derives no sentence in the length range")
    want = rng.randint(*universe.types)
    counts: dict[Sentence, int] = {}
    attempts = 0
    while len(counts) < want and attempts < 50 * want:
        attempts += 1
        y = sample_sentence(rng, grammar, rng.choice(feasible), lengths)
        if y in counts:
            continue
        if tree_count is not None and tree_count(grammar, y) > universe.max_trees:
            continue
        counts[y] = rng.randint(1, 3)
    if not counts:
        raise ValueError("could not sample any sentence within the tree bound")
    return Corpus.from_counts(counts)


def random_pair(seed: int, universe: Universe = Universe(), tree_count=None) -> tuple[Grammar, Corpus]:
    """Deterministic (grammar, corpus) pair for ``seed``."""
    rng = random.Random(seed)
    while True:
        grammar = random_grammar(rng, universe)
        try:
            return grammar, random_corpus(rng, grammar, universe, tree_count)
        except ValueError:
            continue
