import pytest

from insideout.grammar import parse_grammar

G0_TEXT = """\
S -> S S 0.5
S -> "a" 0.5
"""

G1_TEXT = """\
S -> A B 1.0
A -> "a" 1.0
B -> "b" 1.0
"""

# filled by tests/test_acceptance.py, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def g0():
    return parse_grammar(G0_TEXT)


@pytest.fixture
def g1():
    return parse_grammar(G1_TEXT)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
