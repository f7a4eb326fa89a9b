"""Chart recognition for grammars with left contexts.

An item ``(X, i, j)`` states that ``w[i:j]`` written after the left context
``w[:i]`` has property ``X``.  The chart is the least set of items closed
under the axioms ``(a, i, i+1)`` and the rules of the grammar.

Items ending at ``j`` only depend on items ending at positions ``<= j``, so
:func:`derive_chart` runs one fixpoint per end position, left to right.  For
each symbol and end position the set of start positions is kept as an int
bitmask.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator

from .grammar import Grammar, Kind
from .symbols import Nonterminal, Symbol


class AlphabetError(ValueError):
    """The input string uses a symbol outside the grammar's alphabet."""


def _check_alphabet(g: Grammar, w: str):
    for pos, ch in enumerate(w):
        if ch not in g.alphabet:
            raise AlphabetError(f"symbol {ch!r} at position {pos} is not in the alphabet")


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Chart:
    """The derivable items for one input string."""

    def __init__(self, grammar: Grammar, w: str, starts: dict):
        self.grammar = grammar
        self.input = w
        self._starts = starts     # symbol -> list over j of start bitmask

    def __contains__(self, item) -> bool:
        sym, i, j = item
        col = self._starts.get(sym)
        if col is None or not 0 <= i <= j <= len(self.input):
            return False
        return bool(col[j] >> i & 1)

    def starts(self, sym: Symbol, j: int) -> int:
        """Bitmask of ``i`` with ``(sym, i, j)`` in the chart."""
        col = self._starts.get(sym)
        return col[j] if col is not None else 0

    def spans(self, sym: Symbol) -> list[tuple[int, int]]:
        col = self._starts.get(sym)
        if col is None:
            return []
        return [(i, j) for j, mask in enumerate(col) for i in _bits(mask)]

    def items(self) -> Iterator[tuple[Symbol, int, int]]:
        for sym, col in self._starts.items():
            for j, mask in enumerate(col):
                for i in _bits(mask):
                    yield (sym, i, j)

    def item_set(self, nonterminals_only: bool = False) -> set:
        return {it for it in self.items()
                if not nonterminals_only or isinstance(it[0], Nonterminal)}

    def __len__(self) -> int:
        return sum(bin(m).count("1") for col in self._starts.values() for m in col)

    def __repr__(self):
        return f"<Chart {self.input!r}: {len(self)} items>"


class _Compiled:
    """Grammar rules flattened for the chart loop.

    Every conjunct body is split into its chain of prefixes; prefix ``k``
    extends prefix ``parent[k]`` by the symbol ``last[k]``.  Prefix 0 is the
    empty body.
    """

    def __init__(self, g: Grammar):
        self.prefix_id = {(): 0}
        self.parent = [-1]
        self.last: list = [None]
        self.rules = []
        ctx = {}
        for r in g.rules:
            ids = {k: tuple(self._intern(c.body) for c in r.of_kind(k)) for k in Kind}
            for b in ids[Kind.PROPER] + ids[Kind.EXTENDED]:
                ctx[b] = None
            self.rules.append((r.head, ids[Kind.BASE], ids[Kind.PROPER], ids[Kind.EXTENDED]))
        self.context_bodies = list(ctx)

    def _intern(self, body: tuple) -> int:
        pid = self.prefix_id.get(body)
        if pid is None:
            parent = self._intern(body[:-1])
            pid = len(self.parent)
            self.prefix_id[body] = pid
            self.parent.append(parent)
            self.last.append(body[-1])
        return pid


def derive_chart(g: Grammar, w: str, rng: random.Random | None = None) -> Chart:
    """Least fixpoint of the deduction rules over ``w``.

    Columns are completed left to right.  Within column ``j`` new start
    positions are propagated as deltas: a symbol gaining starts extends the
    body prefixes ending in it, which wakes the rules using those bodies.
    ``rng`` shuffles the initial rule order of every column; the result does
    not depend on it.
    """
    _check_alphabet(g, w)
    n = len(w)
    comp = _Compiled(g)
    starts: dict = {s: [0] * (n + 1) for s in g.nonterminals}
    for a in g.alphabet:
        col = [0] * (n + 1)
        for j in range(1, n + 1):
            if w[j - 1] == a:
                col[j] = 1 << (j - 1)
        starts[a] = col
    npre = len(comp.parent)
    parent, last = comp.parent, comp.last
    # pm[k][q]: start positions i such that prefix k derives w[i:q]
    pm = [[0] * (n + 1) for _ in range(npre)]
    pm[0] = [1 << q for q in range(n + 1)]
    term_prefixes = [k for k in range(1, npre) if isinstance(last[k], str)]
    by_last: dict = {}
    children: list = [[] for _ in range(npre)]
    for k in range(1, npre):
        if not isinstance(last[k], str):
            by_last.setdefault(last[k], []).append(k)
            children[parent[k]].append(k)
    rules = list(comp.rules)
    by_base: list = [[] for _ in range(npre)]
    by_ctx: list = [[] for _ in range(npre)]
    for idx, (_, base, prop, ext) in enumerate(rules):
        for b in base:
            by_base[b].append(idx)
        for b in prop + ext:
            by_ctx[b].append(idx)
    # context body -> bitmask of p with (body derives w[0:p])
    ctx_ends = {b: 0 for b in comp.context_bodies}
    order = list(range(len(rules)))

    for j in range(n + 1):
        full = (1 << (j + 1)) - 1
        bit_j = 1 << j
        if j:
            ch = w[j - 1]
            for k in term_prefixes:
                if last[k] == ch:
                    pm[k][j] = pm[parent[k]][j - 1]
        for b in ctx_ends:
            if pm[b][j] & 1:
                ctx_ends[b] |= bit_j
        if rng is not None:
            rng.shuffle(order)
        queue = list(reversed(order))
        queued = set(order)
        prefix_work: list = []

        def grow_prefix(k, delta):
            pm[k][j] |= delta
            prefix_work.append((k, delta))

        while queue or prefix_work:
            while prefix_work:
                k, delta = prefix_work.pop()
                for idx in by_base[k]:
                    if idx not in queued:
                        queued.add(idx)
                        queue.append(idx)
                if k in ctx_ends and delta & 1 and not ctx_ends[k] & bit_j:
                    ctx_ends[k] |= bit_j
                    for idx in by_ctx[k]:
                        if idx not in queued:
                            queued.add(idx)
                            queue.append(idx)
                for k2 in children[k]:
                    if starts[last[k2]][j] & bit_j:
                        add = delta & ~pm[k2][j]
                        if add:
                            grow_prefix(k2, add)
            if not queue:
                break
            idx = queue.pop()
            queued.discard(idx)
            head, base, prop, ext = rules[idx]
            if any(not ctx_ends[b] & bit_j for b in ext):
                continue
            mask = full
            for b in prop:
                mask &= ctx_ends[b]
            for b in base:
                if not mask:
                    break
                mask &= pm[b][j]
            col = starts[head]
            new = mask & ~col[j]
            if not new:
                continue
            col[j] |= new
            for k in by_last.get(head, ()):
                src = pm[parent[k]]
                add = 0
                m = new
                while m:
                    low = m & -m
                    add |= src[low.bit_length() - 1]
                    m ^= low
                add &= ~pm[k][j]
                if add:
                    grow_prefix(k, add)
        # proper contexts are anchored at 0 and never look past j
        assert all(m < bit_j << 1 for m in ctx_ends.values())
    return Chart(g, w, starts)


def recognize(g: Grammar, w: str) -> bool:
    if not w and g.accepts_epsilon:
        _check_alphabet(g, w)
        return True
    return (g.start, 0, len(w)) in derive_chart(g, w)


def recognize_topdown(g: Grammar, w: str) -> bool:
    """Goal-directed recognition, independent of :func:`derive_chart`.

    Goals under evaluation count as false when met again; the search repeats
    with everything proved so far until a pass proves nothing new.
    """
    _check_alphabet(g, w)
    if not w and g.accepts_epsilon:
        return True
    n = len(w)
    known: set = set()

    while True:
        before = len(known)
        memo: dict = {}
        seq_memo: dict = {}
        active: set = set()

        def holds(sym, i, j):
            if isinstance(sym, str):
                return j == i + 1 and w[i] == sym
            key = (sym, i, j)
            if key in known:
                return True
            if key in memo:
                return memo[key]
            if key in active:
                return False
            active.add(key)
            result = any(rule_holds(r, i, j) for r in g.rules_for(sym))
            active.discard(key)
            memo[key] = result
            if result:
                known.add(key)
            return result

        def seq(body, i, j):
            if not body:
                return i == j
            key = (body, i, j)
            if key in seq_memo:
                return seq_memo[key]
            head, rest = body[0], body[1:]
            result = any(holds(head, i, k) and seq(rest, k, j) for k in range(i, j + 1))
            seq_memo[key] = result
            return result

        def rule_holds(r, i, j):
            for c in r.conjuncts:
                if c.kind is Kind.BASE:
                    ok = seq(c.body, i, j)
                elif c.kind is Kind.PROPER:
                    ok = seq(c.body, 0, i)
                else:
                    ok = seq(c.body, 0, j)
                if not ok:
                    return False
            return True

        result = holds(g.start, 0, n)
        if len(known) == before:
            return result


def all_strings(alphabet, length: int) -> Iterator[str]:
    for t in itertools.product(sorted(alphabet), repeat=length):
        yield "".join(t)


def enumerate_language(g: Grammar, max_len: int) -> set[str]:
    """All strings of length at most ``max_len`` in ``L(g)``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    found = set()
    if g.accepts_epsilon:
        found.add("")
    if not g.alphabet:
        if not g.accepts_epsilon and recognize(g, ""):
            found.add("")
        return found
    # A chart for w also decides every prefix of w.
    for w in all_strings(g.alphabet, max_len):
        chart = derive_chart(g, w)
        for k in range(max_len + 1):
            if (g.start, 0, k) in chart:
                found.add(w[:k])
    return found
