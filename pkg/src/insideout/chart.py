"""Inside and outside probabilities for one sentence.

Spans are 1-based and inclusive at the API: ``chart[s, t, A]`` covers
tokens ``w_s .. w_t``.  Arithmetic is plain double precision in probability
space, so very long sentences (a few hundred tokens, fewer for skewed
grammars) underflow to P = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .corpus import Sentence
from .grammar import BinaryRule, Grammar, LexicalRule


@dataclass(frozen=True)
class _Compiled:
    nt_index: dict[str, int]
    # (rule index, lhs, left, right, prob)
    binary: tuple[tuple[int, int, int, int, float], ...]
    # terminal -> ((rule index, lhs, prob), ...)
    lexical: dict[str, tuple[tuple[int, int, float], ...]]
    start: int


@lru_cache(maxsize=128)
def compile_grammar(grammar: Grammar) -> _Compiled:
    nt_index = {a: i for i, a in enumerate(grammar.nonterminals)}
    binary = []
    lexical: dict[str, list] = {}
    for k, (rule, p) in enumerate(grammar.items()):
        if isinstance(rule, BinaryRule):
            binary.append((k, nt_index[rule.lhs], nt_index[rule.left], nt_index[rule.right], p))
        else:
            lexical.setdefault(rule.terminal, []).append((k, nt_index[rule.lhs], p))
    return _Compiled(
        nt_index,
        tuple(binary),
        {a: tuple(v) for a, v in lexical.items()},
        nt_index[grammar.start],
    )


class _Table:
    """Dense (s, t, A) table with 1-based inclusive spans."""

    def __init__(self, n: int, nonterminals: Sequence[str]):
        self.n = n
        self.nonterminals = tuple(nonterminals)
        self._index = {a: i for i, a in enumerate(self.nonterminals)}
        k = len(self.nonterminals)
        # cells[s][t] for 1 <= s <= t <= n; row 0 and t < s unused
        self.cells = [[[0.0] * k for _ in range(n + 1)] for _ in range(n + 1)]

    def _check(self, s: int, t: int):
        if not (1 <= s <= t <= self.n):
            raise IndexError(f"span ({s}, {t}) outside 1 <= s <= t <= {self.n}")

    def __getitem__(self, key) -> float:
        s, t, a = key
        self._check(s, t)
        if isinstance(a, str):
            a = self._index[a]
        return self.cells[s][t][a]

    def cell(self, s: int, t: int) -> list[float]:
        self._check(s, t)
        return self.cells[s][t]

    def spans(self) -> Iterator[tuple[int, int]]:
        for s in range(1, self.n + 1):
            for t in range(s, self.n + 1):
                yield s, t

    def entries(self, nonzero: bool = True) -> Iterator[tuple[int, int, str, float]]:
        """Entries ordered by span length, then start, then nonterminal."""
        for length in range(1, self.n + 1):
            for s in range(1, self.n - length + 2):
                t = s + length - 1
                for a, value in zip(self.nonterminals, self.cells[s][t]):
                    if value != 0.0 or not nonzero:
                        yield s, t, a, value


class InsideChart(_Table):
    pass


class OutsideChart(_Table):
    pass


@dataclass(frozen=True)
class SentenceAnalysis:
    sentence: Sentence
    inside: InsideChart
    outside: OutsideChart
    prob: float

    @property
    def n(self) -> int:
        return len(self.sentence)


Trace = Callable[[int, int], None]


def inside(grammar: Grammar, y: Sentence, trace: Trace | None = None) -> InsideChart:
    """Fill e(s, t, A) for all spans by increasing span length.

    Tokens with no lexical rule simply leave zero entries.  ``trace`` is
    called with ``(s, t)`` after each span is complete.
    """
    comp = compile_grammar(grammar)
    n = len(y)
    chart = InsideChart(n, grammar.nonterminals)
    e = chart.cells
    for s in range(1, n + 1):
        cell = e[s][s]
        for _, a, p in comp.lexical.get(y[s - 1], ()):
            cell[a] = p
        if trace is not None:
            trace(s, s)
    for length in range(2, n + 1):
        for s in range(1, n - length + 2):
            t = s + length - 1
            cell = e[s][t]
            for _, a, b, c, p in comp.binary:
                total = 0.0
                for r in range(s, t):
                    total += p * e[s][r][b] * e[r + 1][t][c]
                cell[a] += total
            if trace is not None:
                trace(s, t)
    return chart


def outside(
    grammar: Grammar, y: Sentence, inside_chart: InsideChart, trace: Trace | None = None
) -> OutsideChart:
    """Fill f(s, t, A) top-down by decreasing span length.

    The whole-sentence span takes the boundary value (1 for the start
    symbol, 0 otherwise).  Every other span sums over the parent rules
    C -> B A (A as right child) and C -> A B (A as left child) of the
    grammar.
    """
    comp = compile_grammar(grammar)
    n = len(y)
    chart = OutsideChart(n, grammar.nonterminals)
    if n == 0:
        return chart
    f = chart.cells
    e = inside_chart.cells
    f[1][n][comp.start] = 1.0
    if trace is not None:
        trace(1, n)
    for length in range(n - 1, 0, -1):
        for s in range(1, n - length + 2):
            t = s + length - 1
            cell = f[s][t]
            for _, c, left, right, p in comp.binary:
                # C -> B A with A = right child spanning (s, t)
                total = 0.0
                for r in range(1, s):
                    total += f[r][t][c] * p * e[r][s - 1][left]
                cell[right] += total
                # C -> A B with A = left child spanning (s, t)
                total = 0.0
                for r in range(t + 1, n + 1):
                    total += f[s][r][c] * p * e[t + 1][r][right]
                cell[left] += total
            if trace is not None:
                trace(s, t)
    return chart


def analyze(grammar: Grammar, y: Sentence) -> SentenceAnalysis:
    y = tuple(y)
    e = inside(grammar, y)
    f = outside(grammar, y, e)
    prob = e[1, len(y), grammar.start] if y else 0.0
    return SentenceAnalysis(y, e, f, prob)


def sentence_prob(grammar: Grammar, y: Sentence) -> float:
    return inside(grammar, tuple(y))[1, len(y), grammar.start]
