"""Training corpora: sentence types with their frequencies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

Sentence = tuple[str, ...]


class CorpusError(ValueError):
    pass


def sentence(text_or_tokens: str | Sequence[str]) -> Sentence:
    """Normalize a whitespace-separated string or token sequence."""
    if isinstance(text_or_tokens, str):
        tokens = tuple(text_or_tokens.split())
    else:
        tokens = tuple(text_or_tokens)
    if not tokens:
        raise CorpusError("empty sentence")
    for tok in tokens:
        if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
            raise CorpusError(f"invalid token {tok!r}")
    return tokens


@dataclass(frozen=True)
class Corpus:
    """Distinct sentence types in first-occurrence order with frequencies."""

    types: tuple[Sentence, ...]
    freqs: tuple[int, ...]

    def __post_init__(self):
        if not self.types:
            raise CorpusError("empty corpus")
        if len(self.types) != len(self.freqs):
            raise CorpusError("types and frequencies differ in length")
        if len(set(self.types)) != len(self.types):
            raise CorpusError("duplicate sentence type")
        for f in self.freqs:
            if not isinstance(f, int) or f < 1:
                raise CorpusError(f"frequency {f!r} is not a positive integer")

    @classmethod
    def from_sentences(cls, sentences: Iterable[str | Sequence[str]]) -> "Corpus":
        counts: dict[Sentence, int] = {}
        for s in sentences:
            y = sentence(s)
            counts[y] = counts.get(y, 0) + 1
        return cls(tuple(counts), tuple(counts.values()))

    @classmethod
    def from_counts(cls, counts: Mapping[Sentence, int]) -> "Corpus":
        return cls(tuple(sentence(y) for y in counts), tuple(counts.values()))

    @property
    def total(self) -> int:
        return sum(self.freqs)

    def __len__(self) -> int:
        return len(self.types)

    def __iter__(self):
        return iter(zip(self.types, self.freqs))

    def freq(self, y) -> int:
        y = tuple(y.split()) if isinstance(y, str) else tuple(y)
        try:
            return self.freqs[self.types.index(y)]
        except ValueError:
            return 0

    def scaled(self, k: int) -> "Corpus":
        return Corpus(self.types, tuple(f * k for f in self.freqs))


def load_corpus(text: str) -> Corpus:
    """One sentence per line, tokens split on whitespace, blank lines skipped."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise CorpusError("corpus has no sentences")
    return Corpus.from_sentences(lines)


def read_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return load_corpus(fh.read())


def empirical_prob(corpus: Corpus, y) -> float:
    return corpus.freq(y) / corpus.total
