"""Grammar symbols.

Terminals are plain one-character strings.  Nonterminals are instances of the
:class:`Nonterminal` subclasses below; structured identifiers (triples,
conditional triples, sets) compare by value and render to a bracketed text
form that :func:`parse_nonterminal` reads back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

EPSILON_TOKEN = "_"
TERMINAL_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789#")
_IDENT = re.compile(r"[A-Z][A-Za-z0-9_']*")


class Nonterminal:
    """Base class for every nonterminal identifier."""

    __slots__ = ()

    def __str__(self) -> str:
        return render_symbol(self)

    def __lt__(self, other: "Nonterminal") -> bool:
        return render_symbol(self) < render_symbol(other)


Symbol = Union[str, Nonterminal]


class _CachedHash:
    __slots__ = ()

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._key()))


def _hashed(cls):
    # Nested identifiers get deep; dataclass would rehash them on every lookup.
    cls.__hash__ = lambda self: self._hash
    return cls


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class Name(Nonterminal, _CachedHash):
    text: str
    _hash: int = field(init=False, compare=False, repr=False)

    def _key(self):
        return (self.text,)

    def __repr__(self):
        return f"Name({self.text!r})"


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class Triple(Nonterminal, _CachedHash):
    """The symbol [x|A|y]: ``A`` with ``x`` cut on the left, ``y`` on the right.

    ``left``/``right`` are single terminals or ``""`` for the empty string.
    """

    left: str
    base: Nonterminal
    right: str
    _hash: int = field(init=False, compare=False, repr=False)

    def _key(self):
        return (self.left, self.base, self.right)

    def __repr__(self):
        return f"Triple({render_symbol(self)})"


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class ContextTag(_CachedHash):
    """A left-context condition: a set of nonterminals followed by a terminal.

    ``last == ""`` is the distinguished empty context; its condition set is
    always empty.
    """

    conditions: frozenset
    last: str
    _hash: int = field(init=False, compare=False, repr=False)

    def _key(self):
        return (self.conditions, self.last)

    @property
    def is_empty(self) -> bool:
        return self.last == ""

    def __repr__(self):
        return f"ContextTag({_render_tag(self)})"


EMPTY_CONTEXT = ContextTag(frozenset(), "")


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class Conditional(Nonterminal, _CachedHash):
    """The symbol [X|A|Y] with context tag X and pending extended contexts Y."""

    ctx: ContextTag
    base: Nonterminal
    pending: frozenset
    _hash: int = field(init=False, compare=False, repr=False)

    def _key(self):
        return (self.ctx, self.base, self.pending)

    def __repr__(self):
        return f"Conditional({render_symbol(self)})"


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class PowerSet(Nonterminal, _CachedHash):
    """A nonterminal defining the intersection of its members' languages."""

    members: frozenset
    _hash: int = field(init=False, compare=False, repr=False)

    def _key(self):
        return (self.members,)

    def __repr__(self):
        return f"PowerSet({render_symbol(self)})"


def is_terminal(sym: Symbol) -> bool:
    return isinstance(sym, str)


# -- rendering ---------------------------------------------------------------

def _render_set(items) -> str:
    return "{" + ",".join(sorted(render_symbol(x) for x in items)) + "}"


def _render_tag(tag: ContextTag) -> str:
    if tag.is_empty:
        return "{" + EPSILON_TOKEN + "}"
    return _render_set(tag.conditions) + tag.last


@lru_cache(maxsize=None)
def render_symbol(sym: Symbol) -> str:
    if isinstance(sym, str):
        return sym
    if isinstance(sym, Name):
        return sym.text
    if isinstance(sym, Triple):
        return "[%s|%s|%s]" % (sym.left or EPSILON_TOKEN, render_symbol(sym.base),
                               sym.right or EPSILON_TOKEN)
    if isinstance(sym, Conditional):
        return "[%s|%s|%s]" % (_render_tag(sym.ctx), render_symbol(sym.base),
                               _render_set(sym.pending))
    if isinstance(sym, PowerSet):
        return _render_set(sym.members)
    raise TypeError(f"not a symbol: {sym!r}")


def symbol_key(sym: Symbol):
    """Sort key: terminals before nonterminals, then by rendering."""
    return (0 if isinstance(sym, str) else 1, render_symbol(sym))


# -- parsing -----------------------------------------------------------------

class SymbolSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at column {pos + 1}")
        self.pos = pos


def _expect(text: str, pos: int, ch: str) -> int:
    if not text.startswith(ch, pos):
        found = text[pos] if pos < len(text) else "end of input"
        raise SymbolSyntaxError(f"expected {ch!r}, found {found!r}", pos)
    return pos + len(ch)


def _parse_edge(text: str, pos: int) -> tuple[str, int]:
    """A triple component: ``_`` or a single terminal."""
    if pos < len(text) and text[pos] == EPSILON_TOKEN:
        return "", pos + 1
    if pos < len(text) and text[pos] in TERMINAL_CHARS:
        return text[pos], pos + 1
    raise SymbolSyntaxError("expected terminal or '_'", pos)


def _parse_set(text: str, pos: int) -> tuple[frozenset, int]:
    pos = _expect(text, pos, "{")
    items = []
    if text.startswith("}", pos):
        return frozenset(), pos + 1
    while True:
        sym, pos = parse_nonterminal(text, pos)
        items.append(sym)
        if text.startswith(",", pos):
            pos += 1
            continue
        pos = _expect(text, pos, "}")
        return frozenset(items), pos


def parse_nonterminal(text: str, pos: int = 0) -> tuple[Nonterminal, int]:
    """Parse one nonterminal token starting at ``pos``; return it and the end."""
    if pos >= len(text):
        raise SymbolSyntaxError("expected nonterminal, found end of input", pos)
    ch = text[pos]
    if ch == "{":
        members, end = _parse_set(text, pos)
        if not members:
            raise SymbolSyntaxError("empty set is not a nonterminal", pos)
        return PowerSet(members), end
    if ch == "[":
        pos += 1
        if text.startswith("{" + EPSILON_TOKEN + "}", pos):
            tag, pos = EMPTY_CONTEXT, pos + 3
            conditional = True
        elif text.startswith("{", pos):
            conds, pos = _parse_set(text, pos)
            last, pos = _parse_edge(text, pos)
            if not last:
                raise SymbolSyntaxError("context tag needs a last symbol", pos - 1)
            tag, conditional = ContextTag(conds, last), True
        else:
            left, pos = _parse_edge(text, pos)
            conditional = False
        pos = _expect(text, pos, "|")
        base, pos = parse_nonterminal(text, pos)
        pos = _expect(text, pos, "|")
        if conditional:
            pending, pos = _parse_set(text, pos)
            pos = _expect(text, pos, "]")
            return Conditional(tag, base, pending), pos
        right, pos = _parse_edge(text, pos)
        pos = _expect(text, pos, "]")
        return Triple(left, base, right), pos
    m = _IDENT.match(text, pos)
    if not m:
        raise SymbolSyntaxError(f"expected nonterminal, found {ch!r}", pos)
    return Name(m.group()), m.end()


def nonterminal(text: str) -> Nonterminal:
    """Parse a complete nonterminal rendering."""
    sym, end = parse_nonterminal(text, 0)
    if end != len(text):
        raise SymbolSyntaxError("trailing characters", end)
    return sym
