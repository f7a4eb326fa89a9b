"""Grammars with left contexts: data model, text format and structural checks.

Text format, one rule per line::

    // comment
    S -> A B | C
    A -> a & < _
    B -> b & < A & <= S

``<`` marks a proper left context, ``<=`` an extended left context, ``_`` is
the empty word.  The start symbol is the head of the first rule.  A line
``S -> _`` for the start symbol records that the empty string is in the
language; an actual empty rule for the start symbol is written ``S -> _ & _``.
Three optional directives cover what rules alone cannot express:
``%start X``, ``%alphabet a b ...`` and ``%nonterminals X Y ...`` (symbols
without rules).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .symbols import (
    EPSILON_TOKEN,
    TERMINAL_CHARS,
    Name,
    Nonterminal,
    Symbol,
    SymbolSyntaxError,
    parse_nonterminal,
    render_symbol,
    symbol_key,
)


class GrammarError(ValueError):
    """Raised for malformed grammars or grammar text."""


class Kind(enum.IntEnum):
    BASE = 0
    PROPER = 1      # < beta
    EXTENDED = 2    # <= gamma


_PREFIX = {Kind.BASE: "", Kind.PROPER: "< ", Kind.EXTENDED: "<= "}


@dataclass(frozen=True)
class Conjunct:
    kind: Kind
    body: tuple = ()

    def __post_init__(self):
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))

    @property
    def sort_key(self):
        return (int(self.kind), len(self.body), tuple(symbol_key(s) for s in self.body))

    def __str__(self) -> str:
        word = " ".join(render_symbol(s) for s in self.body) or EPSILON_TOKEN
        return _PREFIX[self.kind] + word


def base(*body: Symbol) -> Conjunct:
    return Conjunct(Kind.BASE, tuple(body))


def proper(*body: Symbol) -> Conjunct:
    return Conjunct(Kind.PROPER, tuple(body))


def extended(*body: Symbol) -> Conjunct:
    return Conjunct(Kind.EXTENDED, tuple(body))


@dataclass(frozen=True)
class Rule:
    """``head -> c1 & ... & ck``; conjuncts are deduplicated and sorted."""

    head: Nonterminal
    conjuncts: tuple

    def __post_init__(self):
        conj = tuple(sorted(set(self.conjuncts), key=lambda c: c.sort_key))
        if not any(c.kind is Kind.BASE for c in conj):
            raise GrammarError(f"rule for {self.head} has no base conjunct")
        object.__setattr__(self, "conjuncts", conj)

    @property
    def sort_key(self):
        return (render_symbol(self.head), tuple(c.sort_key for c in self.conjuncts))

    def of_kind(self, kind: Kind) -> list[Conjunct]:
        return [c for c in self.conjuncts if c.kind is kind]

    def symbols(self):
        for c in self.conjuncts:
            yield from c.body

    def __str__(self) -> str:
        return f"{render_symbol(self.head)} -> " + " & ".join(map(str, self.conjuncts))


@dataclass(frozen=True, eq=False)
class Grammar:
    alphabet: frozenset
    nonterminals: frozenset
    rules: tuple
    start: Nonterminal
    accepts_epsilon: bool = False
    _by_head: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "rules", tuple(dict.fromkeys(self.rules)))
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start} is not declared")
        by_head: dict = {}
        for r in self.rules:
            if r.head not in self.nonterminals:
                raise GrammarError(f"undeclared nonterminal {r.head}")
            for s in r.symbols():
                if isinstance(s, str):
                    if s not in self.alphabet:
                        raise GrammarError(f"undeclared terminal {s!r} in rule {r}")
                elif s not in self.nonterminals:
                    raise GrammarError(f"undeclared nonterminal {s} in rule {r}")
            by_head.setdefault(r.head, []).append(r)
        object.__setattr__(self, "_by_head", by_head)

    @classmethod
    def build(cls, rules: Iterable[Rule], start: Nonterminal, alphabet=(),
              accepts_epsilon: bool = False, extra_nonterminals=(),
              sort: bool = False) -> "Grammar":
        """Make a grammar, inferring symbol sets from the rules."""
        rules = list(rules)
        if sort:
            rules.sort(key=lambda r: r.sort_key)
        terms = set(alphabet)
        nts = {start, *extra_nonterminals}
        for r in rules:
            nts.add(r.head)
            for s in r.symbols():
                (terms if isinstance(s, str) else nts).add(s)
        return cls(frozenset(terms), frozenset(nts), tuple(rules), start, accepts_epsilon)

    def rules_for(self, head: Nonterminal) -> list[Rule]:
        return self._by_head.get(head, [])

    def with_rules(self, rules: Iterable[Rule], **changes) -> "Grammar":
        """Same alphabet and start, new rule set; unused nonterminals dropped."""
        kw = dict(start=self.start, alphabet=self.alphabet,
                  accepts_epsilon=self.accepts_epsilon, sort=True)
        kw.update(changes)
        return Grammar.build(rules, **kw)

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return (self.alphabet == other.alphabet
                and self.nonterminals == other.nonterminals
                and frozenset(self.rules) == frozenset(other.rules)
                and self.start == other.start
                and self.accepts_epsilon == other.accepts_epsilon)

    def __hash__(self):
        return hash((self.alphabet, frozenset(self.rules), self.start, self.accepts_epsilon))

    def __str__(self) -> str:
        return render_grammar_text(self)


# -- text format --------------------------------------------------------------

def _strip_comment(line: str) -> str:
    i = line.find("//")
    return line if i < 0 else line[:i]


class _LineParser:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, msg: str, pos: int | None = None):
        col = (self.pos if pos is None else pos) + 1
        return GrammarError(f"line {self.lineno}, column {col}: {msg}")

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def take(self, s: str):
        if not self.peek(s):
            raise self.error(f"expected {s!r}")
        self.pos += len(s)

    def nonterminal(self) -> Nonterminal:
        self.skip_ws()
        try:
            sym, self.pos = parse_nonterminal(self.text, self.pos)
        except SymbolSyntaxError as e:
            raise self.error(str(e).rsplit(" at column", 1)[0], e.pos) from None
        return sym

    def word(self) -> tuple:
        syms: list = []
        self.skip_ws()
        if self.peek(EPSILON_TOKEN) and not self.text[self.pos + 1:self.pos + 2].isalnum():
            self.pos += 1
            return ()
        while not self.at_end() and self.text[self.pos] not in "&|":
            ch = self.text[self.pos]
            if ch in TERMINAL_CHARS:
                syms.append(ch)
                self.pos += 1
            elif ch.isupper() or ch in "[{":
                syms.append(self.nonterminal())
            else:
                raise self.error(f"unexpected character {ch!r}")
        if not syms:
            raise self.error("empty conjunct (use '_' for the empty word)")
        return tuple(syms)

    def conjunct(self) -> Conjunct:
        if self.peek("<="):
            self.pos += 2
            return Conjunct(Kind.EXTENDED, self.word())
        if self.peek("<"):
            self.pos += 1
            return Conjunct(Kind.PROPER, self.word())
        return Conjunct(Kind.BASE, self.word())

    def body(self) -> list[Conjunct]:
        conj = [self.conjunct()]
        while self.peek("&"):
            self.pos += 1
            conj.append(self.conjunct())
        return conj


def parse_grammar_text(text: str) -> Grammar:
    rules: list[Rule] = []
    start = None
    eps_heads: set = set()
    alphabet: set | None = None
    extra: set = set()
    first_head = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("%"):
            directive, *args = line.split()
            p = _LineParser(line, lineno)
            if directive == "%start" and len(args) == 1:
                p.pos = len(directive)
                start = p.nonterminal()
            elif directive == "%alphabet":
                bad = [a for a in args if len(a) != 1 or a not in TERMINAL_CHARS]
                if bad:
                    raise GrammarError(f"line {lineno}: bad terminal {bad[0]!r}")
                alphabet = set(args)
            elif directive == "%nonterminals":
                p.pos = len(directive)
                while not p.at_end():
                    extra.add(p.nonterminal())
            else:
                raise GrammarError(f"line {lineno}: unknown directive {line!r}")
            continue
        p = _LineParser(line, lineno)
        head = p.nonterminal()
        if first_head is None:
            first_head = head
        p.take("->")
        while True:
            conj = p.body()
            if len(conj) == 1 and conj[0] == Conjunct(Kind.BASE, ()):
                eps_heads.add(head)
            else:
                try:
                    rules.append(Rule(head, tuple(conj)))
                except GrammarError as e:
                    raise GrammarError(f"line {lineno}: {e}") from None
            if p.at_end():
                break
            p.take("|")
    if start is None:
        start = first_head
    if start is None:
        raise GrammarError("grammar has no rules and no %start directive")
    accepts_epsilon = start in eps_heads
    for h in eps_heads - {start}:
        rules.append(Rule(h, (Conjunct(Kind.BASE, ()),)))
    heads = {r.head for r in rules} | {start} | extra
    for r in rules:
        for s in r.symbols():
            if isinstance(s, str):
                if alphabet is not None and s not in alphabet:
                    raise GrammarError(f"undeclared terminal {s!r} in rule {r}")
            elif s not in heads:
                raise GrammarError(f"undeclared nonterminal {s} in rule {r}")
    if alphabet is None:
        alphabet = {s for r in rules for s in r.symbols() if isinstance(s, str)}
    return Grammar.build(rules, start, alphabet=alphabet, accepts_epsilon=accepts_epsilon,
                         extra_nonterminals=extra)


def render_grammar_text(g: Grammar) -> str:
    """Canonical text: the start symbol's rules first, then all others sorted.

    The output does not depend on the order of ``g.rules``.
    """
    lines: list[str] = []
    rules = sorted(g.rules, key=lambda r: (r.head != g.start, r.sort_key))
    inferred_terms = {s for r in rules for s in r.symbols() if isinstance(s, str)}
    heads = {r.head for r in rules}
    if not g.rules_for(g.start) and not g.accepts_epsilon:
        lines.append(f"%start {render_symbol(g.start)}")
    if inferred_terms != set(g.alphabet):
        lines.append("%alphabet " + " ".join(sorted(g.alphabet)))
    extra = sorted(g.nonterminals - heads - {g.start}, key=render_symbol)
    if extra:
        lines.append("%nonterminals " + " ".join(map(render_symbol, extra)))
    if g.accepts_epsilon:
        lines.append(f"{render_symbol(g.start)} -> {EPSILON_TOKEN}")
    for r in rules:
        if r.head == g.start and r.conjuncts == (Conjunct(Kind.BASE, ()),):
            # a genuine rule, not the flag; the repeated conjunct is merged on parsing
            lines.append(f"{render_symbol(r.head)} -> {EPSILON_TOKEN} & {EPSILON_TOKEN}")
        else:
            lines.append(str(r))
    return "".join(line + "\n" for line in lines)


# -- structural validation ------------------------------------------------------

@dataclass
class ValidationReport:
    form: str
    violations: list = field(default_factory=list)   # (rule, reason)
    strict: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return f"{self.form}: ok" + (" (strict)" if self.strict else "")
        lines = [f"{self.form}: {len(self.violations)} violation(s)"]
        lines += [f"  {rule}    [{why}]" for rule, why in self.violations]
        return "\n".join(lines)


def _is_nt(s) -> bool:
    return isinstance(s, Nonterminal)


def _binary_shape(r: Rule) -> str | None:
    conj = r.conjuncts
    if all(c.kind is Kind.BASE for c in conj):
        if all(len(c.body) == 2 and _is_nt(c.body[0]) and _is_nt(c.body[1]) for c in conj):
            return None
        if len(conj) == 1 and len(conj[0].body) == 1 and isinstance(conj[0].body[0], str):
            return "terminal rule without a context conjunct"
        return "base conjuncts must be pairs of nonterminals"
    if len(conj) == 2:
        b, p = conj
        if (b.kind is Kind.BASE and len(b.body) == 1 and isinstance(b.body[0], str)
                and p.kind is Kind.PROPER
                and (p.body == () or (len(p.body) == 1 and _is_nt(p.body[0])))):
            return None
    return "not of the form BC&..., a & <D or a & <_"


def validate_binary_nf(g: Grammar) -> ValidationReport:
    report = ValidationReport("binary normal form")
    for r in g.rules:
        why = _binary_shape(r)
        if why:
            report.violations.append((r, why))
    return report


def _even_odd_shape(r: Rule, start) -> str | None:
    conj = r.conjuncts
    if all(c.kind is Kind.BASE for c in conj):
        if all(len(c.body) == 3 and _is_nt(c.body[0]) and isinstance(c.body[1], str)
               and _is_nt(c.body[2]) for c in conj):
            return None
        if (r.head == start and len(conj) == 1 and len(conj[0].body) == 2
                and _is_nt(conj[0].body[0]) and isinstance(conj[0].body[1], str)):
            return "even"
        return "base conjuncts must be of the form BaC"
    if len(conj) == 2:
        b, p = conj
        if (b.kind is Kind.BASE and len(b.body) == 1 and isinstance(b.body[0], str)
                and p.kind is Kind.PROPER
                and (p.body == () or (len(p.body) == 2 and _is_nt(p.body[0])
                                      and isinstance(p.body[1], str)))):
            return None
    return "not of the form BaC&..., a & <Db or a & <_"


def validate_even_odd_nf(g: Grammar) -> ValidationReport:
    report = ValidationReport("even-odd normal form")
    even = g.accepts_epsilon
    for r in g.rules:
        if any(s == g.start for s in r.symbols()):
            report.violations.append((r, "start symbol on a right-hand side"))
            continue
        why = _even_odd_shape(r, g.start)
        if why == "even":
            even = True
        elif why:
            report.violations.append((r, why))
    report.strict = report.ok and not even
    return report


# -- trimming ------------------------------------------------------------------

def reachable_trim(g: Grammar) -> Grammar:
    """Drop nonterminals unreachable from the start through any conjunct."""
    seen = {g.start}
    todo = [g.start]
    while todo:
        a = todo.pop()
        for r in g.rules_for(a):
            for s in r.symbols():
                if not isinstance(s, str) and s not in seen:
                    seen.add(s)
                    todo.append(s)
    rules = [r for r in g.rules if r.head in seen]
    if len(rules) == len(g.rules):
        return g
    return Grammar.build(rules, g.start, alphabet=g.alphabet,
                         accepts_epsilon=g.accepts_epsilon)


def productive_trim(g: Grammar, keep: Sequence = ()) -> Grammar:
    """Drop rules mentioning nonterminals that derive nothing at all.

    A nonterminal is productive if some rule has every symbol of every
    conjunct productive; anything else has an empty language whatever the
    contexts, so removing it is language-preserving.
    """
    productive: set = set()
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if r.head not in productive and all(
                    isinstance(s, str) or s in productive for s in r.symbols()):
                productive.add(r.head)
                changed = True
    rules = [r for r in g.rules if r.head in productive
             and all(isinstance(s, str) or s in productive for s in r.symbols())]
    return Grammar.build(rules, g.start, alphabet=g.alphabet,
                         accepts_epsilon=g.accepts_epsilon, extra_nonterminals=keep)


def trim(g: Grammar) -> Grammar:
    return reachable_trim(productive_trim(g))


def make_grammar(rules: Sequence[tuple], start=None, alphabet=(), accepts_epsilon=False) -> Grammar:
    """Convenience constructor from ``(head, [conjunct, ...])`` pairs.

    Heads may be given as strings (converted to :class:`Name`).
    """
    built = []
    for head, conj in rules:
        if isinstance(head, str):
            head = Name(head)
        built.append(Rule(head, tuple(conj)))
    if start is None:
        start = built[0].head
    elif isinstance(start, str):
        start = Name(start)
    return Grammar.build(built, start, alphabet=alphabet, accepts_epsilon=accepts_epsilon)
