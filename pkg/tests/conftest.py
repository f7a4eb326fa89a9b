import random

import pytest

from leftctx.grammar import Conjunct, Grammar, Kind, Rule
from leftctx.symbols import Name

# name -> (passed, detail); filled by test_acceptance, printed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")


def random_grammar(rng: random.Random, n_nonterminals: int = 3, alphabet: str = "ab",
                   max_rules: int = 3, max_conjuncts: int = 2, max_body: int = 2) -> Grammar:
    """An arbitrary grammar with left contexts (no normal form)."""
    nts = [Name(x) for x in "SXY"[:n_nonterminals]]
    symbols = list(alphabet) + nts
    rules = []
    for head in nts:
        for _ in range(rng.randint(1, max_rules)):
            conj = [Conjunct(Kind.BASE, _body(rng, symbols, max_body))]
            for _ in range(rng.randint(0, max_conjuncts - 1)):
                kind = rng.choice(list(Kind))
                conj.append(Conjunct(kind, _body(rng, symbols, max_body)))
            rules.append(Rule(head, tuple(conj)))
    return Grammar.build(rules, nts[0], alphabet=alphabet)


def _body(rng, symbols, max_body):
    return tuple(rng.choice(symbols) for _ in range(rng.randint(0, max_body)))


def random_binary_grammar(rng: random.Random, n_nonterminals: int = 3,
                          alphabet: str = "ab") -> Grammar:
    """A random grammar in binary normal form."""
    nts = [Name(x) for x in "SXYZ"[:n_nonterminals]]
    rules = []
    for head in nts:
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.5:
                ctx = () if rng.random() < 0.5 else (rng.choice(nts),)
                rules.append(Rule(head, (Conjunct(Kind.BASE, (rng.choice(alphabet),)),
                                         Conjunct(Kind.PROPER, ctx))))
            else:
                conj = tuple(Conjunct(Kind.BASE, (rng.choice(nts), rng.choice(nts)))
                             for _ in range(rng.randint(1, 2)))
                rules.append(Rule(head, conj))
    return Grammar.build(rules, nts[0], alphabet=alphabet)


@pytest.fixture
def rng():
    return random.Random(20240611)
