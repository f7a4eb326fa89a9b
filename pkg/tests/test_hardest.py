import re

import pytest

from leftctx.fixtures import load_fixture
from leftctx.grammar import GrammarError, Rule, base, parse_grammar_text, proper
from leftctx.hardest import (HARDEST_ALPHABET, build_homomorphism, conjunct_form, encode_string,
                             enumerate_conjuncts, hardest_grammar, image_lengths, lambda_repr,
                             rho_repr, sigma_expansion)
from leftctx.normal_form import to_even_odd_nf
from leftctx.recognizer import all_strings, derive_chart, recognize
from leftctx.symbols import Name

G0 = hardest_grammar()
SINGLE_NF = parse_grammar_text("S -> a & < _")
BAC = parse_grammar_text("S -> A a B\nA -> a & < _\nB -> b & < A a")


def n(x):
    return Name(x)


# -- the fixed grammar ----------------------------------------------------------------

def test_size():
    assert len(G0.nonterminals) == 14
    assert len(G0.rules) == 35
    assert G0.start == n("S0")
    assert G0.alphabet == HARDEST_ALPHABET


def test_rules_for_a():
    assert set(G0.rules_for(n("A"))) == {Rule(n("A"), (base(n("A"), "a"),)),
                                         Rule(n("A"), (base("a"),))}


def test_rejects_empty_string():
    assert not recognize(G0, "")


def test_literal_listing_differs_in_one_rule():
    literal = hardest_grammar(literal=True)
    assert len(literal.rules) == 35
    diff = set(G0.rules) ^ set(literal.rules)
    assert {str(r) for r in diff} == {"F0 -> a c El b", "F0 -> a c Hl b"}


# -- conjunct table and representations -----------------------------------------------

def test_table_single_rule():
    t = enumerate_conjuncts(SINGLE_NF)
    assert list(t.entries) == [base(), base("a"), proper()]
    assert str(t).split("\n") == ["   0  _", "   1  a", "   2  < _"]


def test_table_augments_context_bodies():
    t = enumerate_conjuncts(BAC)
    ctx = proper(n("A"), "a")
    assert t.context_target(ctx) == t.index(base(n("A"), "a"))
    assert t.index(proper()) < t.index(ctx)


def test_table_merges_duplicates():
    g = parse_grammar_text("S -> A a B\nA -> a & < _\nB -> a & < _")
    t = enumerate_conjuncts(g)
    assert [str(c) for c in t.entries].count("a") == 1


def test_table_requires_normal_form():
    with pytest.raises(GrammarError):
        enumerate_conjuncts(parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & < _"))


def test_conjunct_forms():
    assert conjunct_form(base(n("B"), "a", n("B"))) == "BaC"
    assert conjunct_form(proper(n("D"), "b")) == "<Ba"
    assert conjunct_form(proper()) == "<_"


def test_lambda_rho_examples():
    t = enumerate_conjuncts(SINGLE_NF)
    r = SINGLE_NF.rules[0]
    assert lambda_repr(r, t) == "cacaa"
    assert rho_repr(r, t) == "aacac"
    t3 = enumerate_conjuncts(BAC)
    assert [str(c) for c in t3.entries[1:4]] == ["a", "b", "A a"]
    assert lambda_repr([t3[3]], t3) == "caaa"
    assert rho_repr([t3[3]], t3) == "aaac"


def test_rho_is_reversed_lambda():
    g = to_even_odd_nf(load_fixture("four"))
    t = enumerate_conjuncts(g)
    for r in g.rules:
        assert rho_repr(r, t) == lambda_repr(r, t)[::-1]


def test_sigma_examples():
    t = enumerate_conjuncts(SINGLE_NF)
    assert sigma_expansion(1, SINGLE_NF, t) == "bd"
    assert sigma_expansion(2, SINGLE_NF, t) == "cebbd"
    with pytest.raises(ValueError):
        sigma_expansion(0, SINGLE_NF, t)


def test_sigma_single_pair_product():
    t = enumerate_conjuncts(BAC)
    k = t.index(base(n("A"), "a", n("B")))
    (ra,), (rb,) = BAC.rules_for(n("A")), BAC.rules_for(n("B"))
    assert sigma_expansion(k, BAC, t) == lambda_repr(ra, t) + "b" * k + rho_repr(rb, t) + "d"
    ctx = t.index(proper(n("A"), "a"))
    l = t.context_target(proper(n("A"), "a"))
    assert sigma_expansion(ctx, BAC, t) == "c" + "a" * l + "e" + "b" * ctx + "d"


# -- homomorphism ---------------------------------------------------------------------

def test_single_rule_image():
    h = build_homomorphism(SINGLE_NF)
    assert h.image("a") == "aacacddbdcebbd#"
    assert encode_string(h, "a") == "aacacddbdcebbd#"
    assert encode_string(h, "") == ""


@pytest.mark.parametrize("name", ["ab", "abstar", "four", "eps", "single"])
def test_image_invariants(name):
    nf = to_even_odd_nf(load_fixture(name))
    h = build_homomorphism(nf)
    imgs = h.images
    assert set(imgs) == set(nf.alphabet)
    for img in imgs.values():
        assert img and img.endswith("#") and img.count("#") == 1
        assert set(img) <= HARDEST_ALPHABET
        assert "cc" not in img
    assert len(set(imgs.values())) == len(imgs)
    lens = image_lengths(h)
    for w in ["", "a", "ab", "bba"]:
        if set(w) <= nf.alphabet:
            assert len(encode_string(h, w)) == sum(lens[s] for s in w)
    assert build_homomorphism(nf) == h


def test_missing_image():
    with pytest.raises(KeyError):
        encode_string(build_homomorphism(SINGLE_NF), "b")


# -- behaviour of the fixed grammar on images -------------------------------------------

def _words(alphabet, max_len, min_len=0):
    for k in range(min_len, max_len + 1):
        yield from all_strings(alphabet, k)


def _offsets(h, w):
    out, pos = [0], 0
    for s in w:
        pos += len(h.image(s))
        out.append(pos)
    return out


CASE_FIXTURES = [("single", 3), ("ab", 3), ("abstar", 3), ("four", 2)]


def right_e_violations(h, max_len):
    """x<d y # h(v)> with x d y # = h(u): Er iff v is empty, Erp always.

    Returns the number of decompositions checked and the failing ones.
    """
    er, erp = n("Er"), n("Erp")
    checked, bad = 0, []
    for w in _words(sorted(h.tails), max_len, 1):
        code = encode_string(h, w)
        chart = derive_chart(G0, code)
        offs = _offsets(h, w)
        for k in range(1, len(w) + 1):
            start, end = offs[k - 1], offs[k]
            for m in re.finditer("d", code[start:end]):
                i = start + m.start()
                checked += 1
                if ((er, i, len(code)) in chart) != (k == len(w)) \
                        or (erp, i, len(code)) not in chart:
                    bad.append((w, k, i))
    return checked, bad


def left_e_violations(h, max_len):
    """h(u)<h(v) y d> with y d a prefix of the last image: El iff v is empty, Elp always."""
    el, elp = n("El"), n("Elp")
    checked, bad = 0, []
    for w in _words(sorted(h.tails), max_len, 1):
        code = encode_string(h, w)
        chart = derive_chart(G0, code)
        offs = _offsets(h, w)
        t_start, t_end = offs[-2], offs[-1]
        ends = [t_start + m.start() + 1 for m in re.finditer("d", code[t_start:t_end])]
        for u_len in range(len(w)):
            i = offs[u_len]
            for j in ends:
                checked += 1
                if ((el, i, j) in chart) != (u_len == len(w) - 1) or (elp, i, j) not in chart:
                    bad.append((w, u_len, j))
    return checked, bad


@pytest.mark.parametrize("name,max_len", CASE_FIXTURES)
def test_right_e_on_suffixes(name, max_len):
    h = build_homomorphism(to_even_odd_nf(load_fixture(name)))
    checked, bad = right_e_violations(h, max_len)
    assert checked and not bad


@pytest.mark.parametrize("name,max_len", CASE_FIXTURES)
def test_left_e_on_prefixes(name, max_len):
    h = build_homomorphism(to_even_odd_nf(load_fixture(name)))
    checked, bad = left_e_violations(h, max_len)
    assert checked and not bad


def test_helper_nonterminals():
    h = build_homomorphism(to_even_odd_nf(load_fixture("ab")))
    code = encode_string(h, "ab")
    chart = derive_chart(G0, code)
    spans = {x: set(chart.spans(n(x))) for x in "ABCD"}
    n_ = len(code)
    for i in range(n_ + 1):
        for j in range(i, n_ + 1):
            piece = code[i:j]
            assert ((i, j) in spans["A"]) == bool(re.fullmatch("a+", piece))
            assert ((i, j) in spans["B"]) == bool(re.fullmatch("[ac]+", piece))
            assert ((i, j) in spans["C"]) == ("#" not in piece)
            assert ((i, j) in spans["D"]) == bool(re.fullmatch("([a-e]*#)*", piece))


@pytest.mark.parametrize("name", ["single", "ab", "eps"])
def test_reduction_small(name):
    g = load_fixture(name)
    h = build_homomorphism(to_even_odd_nf(g))
    for w in _words(sorted(g.alphabet), 2, 1):
        assert recognize(G0, encode_string(h, w)) == recognize(g, w), w


def test_literal_listing_rejects_positive_images():
    h = build_homomorphism(SINGLE_NF)
    assert recognize(G0, h.image("a"))
    assert not recognize(hardest_grammar(literal=True), h.image("a"))
