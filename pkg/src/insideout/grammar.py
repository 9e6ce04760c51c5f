"""Probabilistic context-free grammars in Chomsky normal form.

Grammar file format (UTF-8, one rule per line)::

    # comment
    start: S
    S -> S S 0.5
    S -> "a" 0.5

Binary rules name two nonterminals on the right-hand side, lexical rules a
single quoted terminal.  The ``start:`` line is optional and must precede
the first rule; without it the start symbol is the left-hand side of the
first rule.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

SUM_TOLERANCE = 1e-9

_NAME_RE = re.compile(r'^[^\s"]+$')


class GrammarError(ValueError):
    """Malformed grammar text or an inconsistent grammar object."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class BinaryRule:
    lhs: str
    left: str
    right: str

    @property
    def rhs(self) -> tuple[str, str]:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.left} {self.right}"


@dataclass(frozen=True)
class LexicalRule:
    lhs: str
    terminal: str

    @property
    def rhs(self) -> tuple[str]:
        return (self.terminal,)

    def __str__(self) -> str:
        return f'{self.lhs} -> "{self.terminal}"'


Rule = Union[BinaryRule, LexicalRule]


@dataclass(frozen=True)
class SymbolTable:
    nonterminals: tuple[str, ...]
    terminals: tuple[str, ...]
    start: str

    def __post_init__(self):
        for name in self.nonterminals + self.terminals:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise GrammarError(f"invalid symbol name {name!r}")
        if len(set(self.nonterminals)) != len(self.nonterminals):
            raise GrammarError("duplicate nonterminal")
        if len(set(self.terminals)) != len(self.terminals):
            raise GrammarError("duplicate terminal")
        both = set(self.nonterminals) & set(self.terminals)
        if both:
            raise GrammarError(
                f"symbols used as both nonterminal and terminal: {sorted(both)}"
            )
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} is not a nonterminal")


@dataclass(frozen=True)
class Grammar:
    """A CNF grammar with one probability per rule.

    ``probs[i]`` belongs to ``rules[i]``.  The rule order is the iteration
    order used by every computation in the package.

    Construction checks the structural invariants only.  Whether each
    left-hand side distribution sums to one is reported by
    :func:`validate_cnf`, so that broken grammars can still be inspected.
    """

    symbols: SymbolTable
    rules: tuple[Rule, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.rules) != len(self.probs):
            raise GrammarError("rules and probabilities differ in length")
        nts = set(self.symbols.nonterminals)
        ts = set(self.symbols.terminals)
        seen = set()
        for rule in self.rules:
            if rule in seen:
                raise GrammarError(f"duplicate rule {rule}")
            seen.add(rule)
            if rule.lhs not in nts:
                raise GrammarError(f"unknown nonterminal {rule.lhs!r} in {rule}")
            if isinstance(rule, BinaryRule):
                for name in rule.rhs:
                    if name not in nts:
                        raise GrammarError(f"unknown nonterminal {name!r} in {rule}")
            elif isinstance(rule, LexicalRule):
                if rule.terminal not in ts:
                    raise GrammarError(f"unknown terminal {rule.terminal!r} in {rule}")
            else:
                raise GrammarError(f"not a CNF rule: {rule!r}")

    @classmethod
    def build(
        cls,
        rules: Iterable[Rule],
        probs: Iterable[float],
        start: str | None = None,
    ) -> "Grammar":
        """Build a grammar, deriving the symbol table from the rules.

        Symbols are ordered by first appearance, with the start symbol
        first.  :func:`parse_grammar` uses the same convention, which makes
        serialization round-trip exactly.
        """
        rules = tuple(rules)
        if not rules:
            raise GrammarError("grammar has no rules")
        if start is None:
            start = rules[0].lhs
        nonterminals = {start: None}
        terminals = {}
        for rule in rules:
            nonterminals.setdefault(rule.lhs)
            if isinstance(rule, BinaryRule):
                nonterminals.setdefault(rule.left)
                nonterminals.setdefault(rule.right)
            else:
                terminals.setdefault(rule.terminal)
        symbols = SymbolTable(tuple(nonterminals), tuple(terminals), start)
        return cls(symbols, rules, tuple(probs))

    @property
    def start(self) -> str:
        return self.symbols.start

    @property
    def nonterminals(self) -> tuple[str, ...]:
        return self.symbols.nonterminals

    @property
    def terminals(self) -> tuple[str, ...]:
        return self.symbols.terminals

    @cached_property
    def _rule_index(self) -> dict[Rule, int]:
        return {rule: i for i, rule in enumerate(self.rules)}

    def prob(self, rule: Rule) -> float:
        return self.probs[self._rule_index[rule]]

    def index(self, rule: Rule) -> int:
        return self._rule_index[rule]

    def __contains__(self, rule) -> bool:
        return rule in self._rule_index

    def rules_for(self, lhs: str) -> list[Rule]:
        """The rules with left-hand side ``lhs`` in canonical order."""
        return [r for r in self.rules if r.lhs == lhs]

    def lhs_sums(self) -> dict[str, float]:
        sums: dict[str, float] = {}
        for rule, p in zip(self.rules, self.probs):
            sums[rule.lhs] = sums.get(rule.lhs, 0.0) + p
        return sums

    def with_probs(self, probs: Sequence[float]) -> "Grammar":
        return Grammar(self.symbols, self.rules, tuple(probs))

    def items(self):
        return zip(self.rules, self.probs)


def validate_cnf(grammar: Grammar, tol: float = SUM_TOLERANCE) -> list[str]:
    """Return one message per violated invariant; empty means valid."""
    report = []
    for rule, p in grammar.items():
        if not math.isfinite(p) or p < 0.0 or p > 1.0:
            report.append(f"rule {rule} has probability {p!r} outside [0, 1]")
    for lhs, total in grammar.lhs_sums().items():
        if not abs(total - 1.0) <= tol:
            report.append(f"{lhs} distribution sums to {total!r}")
    return report


def renormalize(grammar: Grammar) -> Grammar:
    """Divide each left-hand side distribution by its total.

    Distributions whose total already equals one up to summation rounding
    are left untouched, which makes the operation exactly idempotent.
    """
    sums = grammar.lhs_sums()
    sizes: dict[str, int] = {}
    for rule in grammar.rules:
        sizes[rule.lhs] = sizes.get(rule.lhs, 0) + 1
    divisors = {}
    for lhs, total in sums.items():
        if not total > 0.0 or not math.isfinite(total):
            raise GrammarError(f"{lhs} has total probability mass {total!r}")
        rounding = 4 * sys.float_info.epsilon * sizes[lhs]
        divisors[lhs] = 1.0 if abs(total - 1.0) <= rounding else total
    probs = [p / divisors[rule.lhs] for rule, p in grammar.items()]
    return grammar.with_probs(probs)


def format_prob(p: float) -> str:
    return format(p, ".17g")


def format_rule(rule: Rule) -> str:
    return str(rule)


def format_grammar(grammar: Grammar) -> str:
    lines = [f"start: {grammar.start}"]
    for rule, p in grammar.items():
        lines.append(f"{rule} {format_prob(p)}")
    return "\n".join(lines) + "\n"


_RULE_RE = re.compile(r"^(\S+)\s*->\s*(.*\S)\s+(\S+)$")


def _parse_prob(token: str, lineno: int) -> float:
    try:
        p = float(token)
    except ValueError:
        raise GrammarError(f"bad probability {token!r}", lineno) from None
    if not math.isfinite(p) or p < 0.0 or p > 1.0:
        raise GrammarError(f"probability {token} outside [0, 1]", lineno)
    return p


def _parse_rhs(text: str, lineno: int) -> tuple[str, ...] | str:
    """Return a terminal name (str) or a tuple of nonterminal names."""
    if text.startswith('"'):
        if len(text) < 3 or not text.endswith('"') or '"' in text[1:-1]:
            raise GrammarError(f"malformed terminal {text}", lineno)
        terminal = text[1:-1]
        if not _NAME_RE.match(terminal):
            raise GrammarError(f"invalid terminal name {text}", lineno)
        return terminal
    parts = text.split()
    if any('"' in part for part in parts):
        raise GrammarError("terminals must appear alone on the right-hand side", lineno)
    if len(parts) == 1:
        raise GrammarError(f"unit rule with right-hand side {parts[0]} is not CNF", lineno)
    if len(parts) != 2:
        raise GrammarError(f"right-hand side has {len(parts)} symbols, expected 2", lineno)
    return tuple(parts)


def parse_grammar(text: str, renormalize_sums: bool = False, tol: float = SUM_TOLERANCE,
                  check_sums: bool = True) -> Grammar:
    """Parse grammar file text.

    With ``renormalize_sums`` each left-hand side distribution is divided
    by its total instead of being rejected when it does not sum to one.
    ``check_sums=False`` skips the sum check altogether (used by the
    ``validate`` command, which reports instead of failing).
    """
    start = None
    rules: list[Rule] = []
    probs: list[float] = []
    seen: dict[Rule, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("start:"):
            if rules or start is not None:
                raise GrammarError("start declaration must come before the rules", lineno)
            start = line[len("start:"):].strip()
            if not start or not _NAME_RE.match(start):
                raise GrammarError("start declaration names no valid nonterminal", lineno)
            continue
        m = _RULE_RE.match(line)
        if m is None:
            raise GrammarError(f"cannot parse rule {line!r}", lineno)
        lhs, rhs_text, prob_text = m.groups()
        if '"' in lhs:
            raise GrammarError(f"left-hand side {lhs} is not a nonterminal", lineno)
        rhs = _parse_rhs(rhs_text.strip(), lineno)
        rule: Rule
        if isinstance(rhs, str):
            rule = LexicalRule(lhs, rhs)
        else:
            rule = BinaryRule(lhs, rhs[0], rhs[1])
        if rule in seen:
            raise GrammarError(f"duplicate rule {rule} (first on line {seen[rule]})", lineno)
        seen[rule] = lineno
        rules.append(rule)
        probs.append(_parse_prob(prob_text, lineno))
    if not rules:
        raise GrammarError("grammar has no rules")
    grammar = Grammar.build(rules, probs, start)
    if renormalize_sums:
        return renormalize(grammar)
    if check_sums:
        for lhs, total in grammar.lhs_sums().items():
            if not abs(total - 1.0) <= tol:
                raise GrammarError(
                    f"{lhs} distribution sums to {total:.17g}, not 1",
                    seen[grammar.rules_for(lhs)[0]],
                )
    return grammar


def load_grammar(path, **kwargs) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read(), **kwargs)
