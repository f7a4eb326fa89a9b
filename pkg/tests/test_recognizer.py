import random

import pytest
from hypothesis import given, settings, strategies as st

from leftctx.grammar import Rule, base, make_grammar, parse_grammar_text
from leftctx.recognizer import (AlphabetError, all_strings, derive_chart, enumerate_language,
                                recognize, recognize_topdown)
from leftctx.symbols import Name

from conftest import random_grammar

S, A, B = Name("S"), Name("A"), Name("B")
SINGLE = parse_grammar_text("S -> a & < _")
SAMPLE = parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & < A")
CIRCULAR = parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & <= S")


def test_single_rule_chart():
    assert (S, 0, 1) in derive_chart(SINGLE, "a")


def test_sample_chart_by_hand():
    # Items over "ab": A only on (0,1); B needs a prefix in L(A), so only (1,2).
    chart = derive_chart(SAMPLE, "ab")
    assert chart.item_set(nonterminals_only=True) == {(A, 0, 1), (B, 1, 2), (S, 0, 2)}
    assert (S, 0, 2) not in derive_chart(SAMPLE, "ba")


def test_circular_extended_context_stays_empty():
    chart = derive_chart(CIRCULAR, "ab")
    assert (S, 0, 2) not in chart
    assert chart.spans(B) == []
    assert not recognize_topdown(CIRCULAR, "ab")


def test_recognize_examples():
    assert recognize(SINGLE, "a")
    assert not recognize(SINGLE, "")
    assert recognize(SAMPLE, "ab")
    assert not recognize(SAMPLE, "aa")


@pytest.mark.parametrize("g,w", [(SINGLE, "a"), (SINGLE, ""), (SAMPLE, "ab"), (SAMPLE, "aa"),
                                 (SAMPLE, "ba"), (CIRCULAR, "ab")])
def test_topdown_agrees_on_examples(g, w):
    assert recognize_topdown(g, w) == recognize(g, w)


def test_enumerate_examples():
    assert enumerate_language(SINGLE, 2) == {"a"}
    assert enumerate_language(SAMPLE, 3) == {"ab"}
    flagged = parse_grammar_text("S -> _ | a & < _")
    assert enumerate_language(flagged, 0) == {""}


def test_enumerate_matches_recognize_on_every_string():
    g = parse_grammar_text("S -> A B | a & < _\nA -> a & < _ | b & < S\nB -> b & < A | a & < B")
    expected = {w for n in range(5) for w in all_strings("ab", n) if recognize(g, w)}
    assert enumerate_language(g, 4) == expected


def test_alphabet_error():
    with pytest.raises(AlphabetError):
        derive_chart(SAMPLE, "abc")


def test_axiom_completeness():
    w = "abba"
    chart = derive_chart(SAMPLE, w)
    for i in range(len(w)):
        for a in "ab":
            assert ((a, i, i + 1) in chart) == (w[i] == a)


def test_empty_bodies():
    # an empty base body derives every empty span
    g = make_grammar([("S", [base("a")]), ("T", [base()])], alphabet="a")
    chart = derive_chart(g, "aa")
    assert {(i, j) for i, j in chart.spans(Name("T"))} == {(0, 0), (1, 1), (2, 2)}
    # <= _ only holds where the whole prefix up to the span end is empty
    g2 = parse_grammar_text("S -> a & <= _ | A\nA -> _ & <= _")
    chart = derive_chart(g2, "a")
    assert chart.spans(A) == [(0, 0)]
    assert (S, 0, 1) not in chart


def test_long_input():
    g = parse_grammar_text("S -> a & < _ | S T\nT -> b & < S")
    w = "a" + "b" * 700
    assert recognize(g, w)
    assert not recognize(g, w + "a")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_fixpoint_is_order_independent(seed, order_seed):
    rng = random.Random(seed)
    g = random_grammar(rng)
    w = "".join(rng.choice("ab") for _ in range(rng.randint(0, 5)))
    reference = derive_chart(g, w).item_set()
    shuffled = derive_chart(g, w, rng=random.Random(order_seed)).item_set()
    assert shuffled == reference


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_adding_a_rule_is_monotone(seed):
    rng = random.Random(seed)
    g = random_grammar(rng)
    extra = random_grammar(rng).rules[0]
    bigger = g.with_rules(list(g.rules) + [Rule(extra.head, extra.conjuncts)], sort=False)
    w = "".join(rng.choice("ab") for _ in range(rng.randint(0, 5)))
    assert derive_chart(g, w).item_set() <= derive_chart(bigger, w).item_set()


def test_strategies_agree_on_random_pairs():
    rng = random.Random(7)
    for _ in range(100):
        g = random_grammar(rng, n_nonterminals=rng.randint(1, 3))
        w = "".join(rng.choice("ab") for _ in range(rng.randint(0, 5)))
        assert recognize(g, w) == recognize_topdown(g, w), (str(g), w)
