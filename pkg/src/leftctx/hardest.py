"""The fixed hardest grammar and the homomorphic encoding into it.

Every grammar in even-odd normal form is encoded by a homomorphism ``h``
into the six-letter alphabet ``a b c d e #`` so that ``w`` is in the
language iff ``h(w)`` is accepted by :func:`hardest_grammar`.

Conjuncts of the source grammar are numbered (:class:`ConjunctTable`).  A
rule is written as blocks ``c a^i`` (left representation) or ``a^i c``
(right representation), one per conjunct index ``i``; the marker ``b^k``
identifies conjunct ``k`` inside the image of the terminal it contains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .grammar import Conjunct, Grammar, GrammarError, Kind, Rule, parse_grammar_text, \
    validate_even_odd_nf
from .symbols import Nonterminal, symbol_key

HARDEST_ALPHABET = frozenset("abcde#")

# ``Er``/``El`` stand for the right- and left-pointing E, ``p`` for the
# subscript +, ``Hl`` for the left H, ``E0``/``F0`` for the start variants.
HARDEST_NAMES = ("S0", "A", "B", "C", "D", "Er", "Erp", "Fr",
                 "El", "Elp", "Fl", "Hl", "E0", "F0")

_HARDEST_TEXT = """\
S0 -> B d S0 | F0 Er & A c E0
A -> A a | a
B -> a B | c B | a | c
C -> a C | b C | c C | d C | e C | _
D -> C # D | _
Er -> Fr Er & A c Erp | d C #
Erp -> Fr Er & A c Erp | d C # D
Fr -> a Fr b | a c C # El b
El -> El Fl & Elp c A | C d | C d Hl e
Hl -> c A & <= El | c & < El
Elp -> El Fl & Elp c A | D C d
Fl -> b Fl a | b Er C c a
E0 -> F0 Er & A c E0 | d C # D
F0 -> a F0 b | a c {inner} b
"""


@lru_cache(maxsize=None)
def hardest_grammar(literal: bool = False) -> Grammar:
    """The 14-nonterminal, 35-rule grammar ``G0`` with start ``S0``.

    The base rule for ``F0`` matches the right representation of a start
    rule up to the marker of its last conjunct; the part in between is
    parsed by ``El`` from inside the image of the first symbol.  With
    ``literal=True`` that rule uses ``Hl`` instead, as printed in the
    original listing; that variant accepts nothing (``Hl`` begins with
    ``c`` and images never contain ``cc``) and is kept for comparison.
    """
    return parse_grammar_text(_HARDEST_TEXT.format(inner="Hl" if literal else "El"))


# -- conjunct table --------------------------------------------------------------

_FORM_RANK = {"a": 1, "Ba": 2, "BaC": 3, "<_": 4, "<Ba": 5}


def conjunct_form(c: Conjunct) -> str:
    body = c.body
    shape = "".join("a" if isinstance(s, str) else "B" for s in body).replace("aB", "aC")
    if c.kind is Kind.BASE and shape in ("a", "Ba", "BaC"):
        return shape
    if c.kind is Kind.PROPER and shape in ("", "Ba"):
        return "<" + (shape or "_")
    raise GrammarError(f"conjunct {c} is not of an even-odd normal form shape")


def _canonical_key(c: Conjunct):
    return (_FORM_RANK[conjunct_form(c)], tuple(symbol_key(s) for s in c.body))


EPSILON_CONJUNCT = Conjunct(Kind.BASE, ())


@dataclass(frozen=True)
class ConjunctTable:
    """The numbering ``alpha_0 = eps, alpha_1, ...`` of a grammar's conjuncts."""

    entries: tuple
    index_of: Mapping = field(compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> Conjunct:
        return self.entries[k]

    def index(self, c: Conjunct) -> int:
        try:
            return self.index_of[c]
        except KeyError:
            raise KeyError(f"conjunct {c} is not in the table") from None

    def context_target(self, c: Conjunct) -> int:
        """For a context ``<beta`` the index of the body ``beta``."""
        return self.index(Conjunct(Kind.BASE, c.body))

    def __str__(self) -> str:
        return "\n".join(f"{k:4d}  {c if k else '_'}" for k, c in enumerate(self.entries))


def enumerate_conjuncts(g: Grammar) -> ConjunctTable:
    """Number all conjuncts of ``g`` in canonical order (form, then symbols).

    The body of every context conjunct is added as a plain conjunct; the
    body of ``<_`` is ``alpha_0``.
    """
    report = validate_even_odd_nf(g)
    if not report:
        raise GrammarError(str(report))
    found = set()
    for r in g.rules:
        for c in r.conjuncts:
            found.add(c)
            if c.kind is Kind.PROPER and c.body:
                found.add(Conjunct(Kind.BASE, c.body))
    entries = (EPSILON_CONJUNCT,) + tuple(sorted(found, key=_canonical_key))
    return ConjunctTable(entries, {c: k for k, c in enumerate(entries)})


# -- representations -------------------------------------------------------------

def _indices(r, t: ConjunctTable) -> list[int]:
    conj = r.conjuncts if isinstance(r, Rule) else tuple(r)
    return sorted(t.index(c) for c in conj)


def lambda_repr(r, t: ConjunctTable) -> str:
    """``c a^i1 ... c a^im`` over the conjunct indices of ``r`` ascending."""
    return "".join("c" + "a" * i for i in _indices(r, t))


def rho_repr(r, t: ConjunctTable) -> str:
    """``a^im c ... a^i1 c``; the reversal of :func:`lambda_repr`."""
    return "".join("a" * i + "c" for i in reversed(_indices(r, t)))


def sigma_expansion(k: int, g: Grammar, t: ConjunctTable) -> str:
    """The expansion of conjunct ``alpha_k`` placed in the images."""
    if k == 0:
        raise ValueError("alpha_0 has no expansion")
    c = t[k]
    form = conjunct_form(c)
    mark = "b" * k
    if form == "a":
        return mark + "d"
    if form == "Ba":
        return "".join(lambda_repr(r, t) + mark + "d" for r in _rules_of(g, c.body[0]))
    if form == "BaC":
        return "".join(lambda_repr(r, t) + mark + rho_repr(r2, t) + "d"
                       for r in _rules_of(g, c.body[0])
                       for r2 in _rules_of(g, c.body[2]))
    l = t.context_target(c)
    return "c" + "a" * l + "e" + mark + "d"


def _rules_of(g: Grammar, head: Nonterminal) -> list[Rule]:
    return sorted(g.rules_for(head), key=lambda r: r.sort_key)


# -- homomorphism ------------------------------------------------------------------

@dataclass(frozen=True)
class Homomorphism:
    """Images of source terminals.

    Every image is ``prefix + "d" + tails[s] + "#"``; the prefix lists the
    start rules and is shared by all symbols.
    """

    prefix: str
    tails: Mapping

    @property
    def images(self) -> dict[str, str]:
        return {s: self.image(s) for s in sorted(self.tails)}

    def image(self, s: str) -> str:
        try:
            return self.prefix + "d" + self.tails[s] + "#"
        except KeyError:
            raise KeyError(f"no image for symbol {s!r}") from None

    def __str__(self) -> str:
        return "\n".join(f"{s}\t{img}" for s, img in self.images.items())


def _symbol_conjuncts(g: Grammar, t: ConjunctTable, s: str) -> list[int]:
    ks = set()
    for k, c in enumerate(t.entries):
        if k and c.kind is Kind.BASE and s in c.body:
            ks.add(k)
    for r in g.rules:
        if len(r.conjuncts) == 2 and r.conjuncts[0].body == (s,):
            ks.add(t.index(r.conjuncts[1]))
    return sorted(ks)


def build_homomorphism(g: Grammar, table: ConjunctTable | None = None) -> Homomorphism:
    """Encode ``g`` (even-odd normal form) as images of its terminals.

    The empty string is not encoded; the flag ``g.accepts_epsilon`` is left
    to the caller.
    """
    t = table if table is not None else enumerate_conjuncts(g)
    prefix = "".join(rho_repr(r, t) + "d" for r in _rules_of(g, g.start))
    sigma = {}
    tails = {}
    for s in sorted(g.alphabet):
        parts = []
        for k in _symbol_conjuncts(g, t, s):
            if k not in sigma:
                sigma[k] = sigma_expansion(k, g, t)
            parts.append(sigma[k])
        tails[s] = "".join(parts)
    return Homomorphism(prefix, tails)


def encode_string(h: Homomorphism, w: str) -> str:
    return "".join(h.image(s) for s in w)


def image_lengths(h: Homomorphism) -> dict[str, int]:
    return {s: len(img) for s, img in h.images.items()}


__all__ = [
    "HARDEST_ALPHABET", "HARDEST_NAMES", "ConjunctTable", "Homomorphism",
    "build_homomorphism", "conjunct_form", "encode_string", "enumerate_conjuncts",
    "hardest_grammar", "image_lengths", "lambda_repr", "rho_repr", "sigma_expansion",
]
