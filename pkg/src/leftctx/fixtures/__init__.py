"""Sample grammars in binary normal form, shipped as package data."""

from importlib import resources

from ..grammar import Grammar, parse_grammar_text

# name -> what it exercises
CATALOG = {
    "abstar": "a b*, context-free shape (contexts only anchor terminals)",
    "ab": "{ab}, a proper context naming a nonterminal",
    "single": "{a}, the smallest grammar",
    "eps": "{_, ab}, the empty-string flag",
    "four": "all strings of length 4, extended contexts appear after oddification",
    "anbn": "a^n b^n, context-free shape with a generic prefix nonterminal",
}


def fixture_text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.gr").read_text(encoding="utf-8")


def load_fixture(name: str) -> Grammar:
    return parse_grammar_text(fixture_text(name))
