"""Brute-force EM for PCFGs by explicit parse-tree enumeration.

Nothing here touches the inside/outside charts.  Trees are enumerated from
a packed forest built from grammar structure alone, and every expectation
is an explicit sum over those trees.  This is the reference that the
chart-based counts and re-estimation are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

from .corpus import Corpus, Sentence
from .grammar import BinaryRule, Grammar, LexicalRule, Rule

DEFAULT_CAP = 100_000


class TreeCapExceeded(ValueError):
    pass


class UnparseableError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    label: str
    terminal: str
    start: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.start)

    @property
    def rule(self) -> LexicalRule:
        return LexicalRule(self.label, self.terminal)

    def nodes(self) -> Iterator["ParseTree"]:
        yield self

    def bracket(self) -> str:
        return f"({self.label} {self.terminal})"


@dataclass(frozen=True)
class Branch:
    label: str
    left: "ParseTree"
    right: "ParseTree"

    @property
    def span(self) -> tuple[int, int]:
        return (self.left.span[0], self.right.span[1])

    @property
    def split(self) -> int:
        return self.left.span[1]

    @property
    def rule(self) -> BinaryRule:
        return BinaryRule(self.label, self.left.label, self.right.label)

    def nodes(self) -> Iterator["ParseTree"]:
        stack: list[ParseTree] = [self]
        while stack:
            node = stack.pop()
            yield node
            if isinstance(node, Branch):
                stack.append(node.right)
                stack.append(node.left)

    def bracket(self) -> str:
        return f"({self.label} {self.left.bracket()} {self.right.bracket()})"


ParseTree = Union[Leaf, Branch]


@dataclass(frozen=True)
class TreeStats:
    prob: float
    rule_freq: dict[Rule, int]
    cat_freq: dict[str, int]


class Forest:
    """Packed forest of all derivations of a sentence.

    ``options[(s, t, A)]`` lists the ways to build A over (s, t): lexical
    rule indices for single tokens, ``(r, rule index)`` pairs for longer
    spans, sorted by split point and then rule index.
    """

    def __init__(self, grammar: Grammar, y: Sentence):
        self.grammar = grammar
        self.sentence = tuple(y)
        n = len(self.sentence)
        lexical: dict[tuple[str, str], list[int]] = {}
        binary: dict[str, list[int]] = {}
        for k, rule in enumerate(grammar.rules):
            if isinstance(rule, LexicalRule):
                lexical.setdefault((rule.lhs, rule.terminal), []).append(k)
            else:
                binary.setdefault(rule.lhs, []).append(k)
        self.options: dict[tuple[int, int, str], list] = {}
        for s in range(1, n + 1):
            for a in grammar.nonterminals:
                ks = lexical.get((a, self.sentence[s - 1]))
                if ks:
                    self.options[(s, s, a)] = list(ks)
        for length in range(2, n + 1):
            for s in range(1, n - length + 2):
                t = s + length - 1
                for a in grammar.nonterminals:
                    opts = []
                    for r in range(s, t):
                        for k in binary.get(a, ()):
                            rule = grammar.rules[k]
                            if (s, r, rule.left) in self.options and (r + 1, t, rule.right) in self.options:
                                opts.append((r, k))
                    if opts:
                        self.options[(s, t, a)] = opts
        self._counts: dict[tuple[int, int, str], int] = {}

    @property
    def root(self) -> tuple[int, int, str]:
        return (1, len(self.sentence), self.grammar.start)

    def count(self, key: tuple[int, int, str] | None = None) -> int:
        """Number of distinct trees for ``key`` (the root by default)."""
        if key is None:
            key = self.root
        if key not in self.options:
            return 0
        if key in self._counts:
            return self._counts[key]
        s, t, _ = key
        if s == t:
            total = len(self.options[key])
        else:
            total = 0
            for r, k in self.options[key]:
                rule = self.grammar.rules[k]
                total += self.count((s, r, rule.left)) * self.count((r + 1, t, rule.right))
        self._counts[key] = total
        return total

    def trees(self, cap: int = DEFAULT_CAP) -> list[ParseTree]:
        total = self.count()
        if total > cap:
            raise TreeCapExceeded(f"{total} trees exceed the cap of {cap}")
        if total == 0:
            return []
        memo: dict[tuple[int, int, str], list[ParseTree]] = {}

        def unpack(key):
            if key in memo:
                return memo[key]
            s, t, a = key
            out: list[ParseTree] = []
            if s == t:
                for k in self.options[key]:
                    out.append(Leaf(a, self.grammar.rules[k].terminal, s))
            else:
                for r, k in self.options[key]:
                    rule = self.grammar.rules[k]
                    lefts = unpack((s, r, rule.left))
                    rights = unpack((r + 1, t, rule.right))
                    for lt in lefts:
                        for rt in rights:
                            out.append(Branch(a, lt, rt))
            memo[key] = out
            return out

        return unpack(self.root)


def enumerate_trees(grammar: Grammar, y: Sentence, cap: int = DEFAULT_CAP) -> list[ParseTree]:
    return Forest(grammar, y).trees(cap)


def count_trees(grammar: Grammar, y: Sentence) -> int:
    return Forest(grammar, y).count()


def tree_stats(grammar: Grammar, x: ParseTree) -> TreeStats:
    rule_freq = {r: 0 for r in grammar.rules}
    for node in x.nodes():
        rule = node.rule
        if rule not in rule_freq:
            raise ValueError(f"tree uses rule {rule} which is not in the grammar")
        rule_freq[rule] += 1
    prob = 1.0
    for rule, p in grammar.items():
        if rule_freq[rule]:
            prob *= p ** rule_freq[rule]
    cat_freq = {a: 0 for a in grammar.nonterminals}
    for rule, f in rule_freq.items():
        cat_freq[rule.lhs] += f
    return TreeStats(prob, rule_freq, cat_freq)


def sentence_prob_oracle(grammar: Grammar, y: Sentence, cap: int = DEFAULT_CAP) -> float:
    return math.fsum(tree_stats(grammar, x).prob for x in enumerate_trees(grammar, y, cap))


@dataclass(frozen=True)
class Expectations:
    """Posterior expected rule and category frequencies for one sentence."""

    prob: float
    rule_freq: dict[Rule, float]
    cat_freq: dict[str, float]
    n_trees: int


def expectations(grammar: Grammar, y: Sentence, cap: int = DEFAULT_CAP) -> Expectations:
    trees = enumerate_trees(grammar, y, cap)
    stats = [tree_stats(grammar, x) for x in trees]
    py = math.fsum(st.prob for st in stats)
    if not py > 0.0:
        raise UnparseableError(f"sentence {' '.join(y)!r} has probability 0")
    rule_freq = {
        r: math.fsum(st.prob / py * st.rule_freq[r] for st in stats) for r in grammar.rules
    }
    cat_freq = {
        a: math.fsum(st.prob / py * st.cat_freq[a] for st in stats) for a in grammar.nonterminals
    }
    return Expectations(py, rule_freq, cat_freq, len(trees))


def expected_freq(grammar: Grammar, y: Sentence, rule: Rule, cap: int = DEFAULT_CAP) -> float:
    return expectations(grammar, y, cap).rule_freq[rule]


def expected_cat_freq(grammar: Grammar, y: Sentence, nonterminal: str, cap: int = DEFAULT_CAP) -> float:
    return expectations(grammar, y, cap).cat_freq[nonterminal]


Span = tuple[int, int, str]


def _check_triple(triple: tuple[Span, Span, Span]):
    (s, t, _), (s2, r, _), (r1, t2, _) = triple
    if not (s2 == s and t2 == t and r1 == r + 1 and 1 <= s <= r < t):
        raise ValueError(f"spans {triple} do not form a binary split s <= r < t")


def anchored_indicator(x: ParseTree, triple: tuple[Span, Span, Span]) -> int:
    """1 if ``x`` has the node A(s,t) -> B(s,r) C(r+1,t) named by ``triple``."""
    _check_triple(triple)
    (s, t, a), (_, r, b), (_, _, c) = triple
    for node in x.nodes():
        if (
            isinstance(node, Branch)
            and node.label == a
            and node.span == (s, t)
            and node.split == r
            and node.left.label == b
            and node.right.label == c
        ):
            return 1
    return 0


def anchored_lexical_indicator(x: ParseTree, s: int, nonterminal: str, terminal: str) -> int:
    """1 if ``x`` has the leaf A(s,s) -> terminal."""
    for node in x.nodes():
        if isinstance(node, Leaf) and node.start == s and node.label == nonterminal and node.terminal == terminal:
            return 1
    return 0


def triples(rule: BinaryRule, n: int) -> Iterator[tuple[Span, Span, Span]]:
    """Every anchoring of ``rule`` in a sentence of length ``n``."""
    for s in range(1, n):
        for t in range(s + 1, n + 1):
            for r in range(s, t):
                yield (s, t, rule.lhs), (s, r, rule.left), (r + 1, t, rule.right)


def em_step(grammar: Grammar, corpus: Corpus, cap: int = DEFAULT_CAP) -> Grammar:
    """One EM step from tree-posterior expectations, weighted by p~(y) = f(y)/N.

    Unparseable sentence types carry no trees and are left out; a
    left-hand side with zero expected frequency keeps its probabilities.
    """
    num = {r: [] for r in grammar.rules}
    den = {a: [] for a in grammar.nonterminals}
    n_total = corpus.total
    parsed = 0
    for y, fy in corpus:
        if count_trees(grammar, y) == 0:
            continue
        try:
            ex = expectations(grammar, y, cap)
        except UnparseableError:
            continue
        parsed += 1
        weight = fy / n_total
        for r in grammar.rules:
            num[r].append(weight * ex.rule_freq[r])
        for a in grammar.nonterminals:
            den[a].append(weight * ex.cat_freq[a])
    if not parsed:
        raise UnparseableError("no sentence in the corpus has a parse")
    probs = []
    for rule, p in grammar.items():
        d = math.fsum(den[rule.lhs])
        probs.append(math.fsum(num[rule]) / d if d > 0.0 else p)
    return grammar.with_probs(probs)
