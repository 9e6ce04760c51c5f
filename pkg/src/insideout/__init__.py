"""Inside-outside training for CNF PCFGs, with a brute-force EM oracle."""

from .chart import InsideChart, OutsideChart, SentenceAnalysis, analyze, inside, outside
from .corpus import Corpus, CorpusError, empirical_prob, load_corpus, read_corpus
from .counts import (
    CountTable,
    ZeroProbabilityError,
    aggregate,
    category_count,
    rule_count_binary,
    rule_count_lexical,
    sentence_counts,
)
from .estimation import (
    IterationRecord,
    TrainConfig,
    TrainReport,
    log_likelihood,
    perplexity,
    reestimate,
    train,
)
from .grammar import (
    BinaryRule,
    Grammar,
    GrammarError,
    LexicalRule,
    SymbolTable,
    format_grammar,
    load_grammar,
    parse_grammar,
    renormalize,
    validate_cnf,
)

__all__ = [
    "BinaryRule", "Corpus", "CorpusError", "CountTable", "Grammar", "GrammarError",
    "InsideChart", "IterationRecord", "LexicalRule", "OutsideChart", "SentenceAnalysis",
    "SymbolTable", "TrainConfig", "TrainReport", "ZeroProbabilityError", "aggregate",
    "analyze", "category_count", "empirical_prob", "format_grammar", "inside",
    "load_corpus", "load_grammar", "log_likelihood", "outside", "parse_grammar",
    "perplexity", "read_corpus", "reestimate", "renormalize", "rule_count_binary",
    "rule_count_lexical", "sentence_counts", "train", "validate_cnf",
]
