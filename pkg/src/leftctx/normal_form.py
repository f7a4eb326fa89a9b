"""Transformation into the even-odd normal form.

Pipeline: :func:`oddify` -> :func:`cleanup` -> :func:`deextend` (which runs
:func:`cleanup` again and :func:`powerset_merge`) -> final start symbol.
Every nonterminal of the result other than the start defines only odd-length
substrings in even-length left contexts; :func:`parity_audit` checks that on a
concrete chart.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Iterable, Sequence

from .grammar import (
    Conjunct,
    Grammar,
    GrammarError,
    Kind,
    Rule,
    base,
    extended,
    proper,
    productive_trim,
    validate_binary_nf,
    validate_even_odd_nf,
)
from .recognizer import derive_chart
from .symbols import (
    EMPTY_CONTEXT,
    Conditional,
    ContextTag,
    Name,
    Nonterminal,
    PowerSet,
    Triple,
    render_symbol,
)

DEFAULT_BUDGET = 20000


class PreconditionError(GrammarError):
    """The input grammar is not of the shape a stage expects."""


class BudgetExceeded(RuntimeError):
    """A construction needed more nonterminals than allowed."""


def _trim_from(g: Grammar, roots: Iterable[Nonterminal], keep_declared: bool = False) -> Grammar:
    """Productive trim, then keep what is reachable from ``roots``."""
    g = productive_trim(g)
    seen = set(roots)
    todo = list(seen)
    while todo:
        a = todo.pop()
        for r in g.rules_for(a):
            for s in r.symbols():
                if not isinstance(s, str) and s not in seen:
                    seen.add(s)
                    todo.append(s)
    rules = [r for r in g.rules if r.head in seen]
    extra = g.nonterminals if keep_declared else [s for s in roots]
    return g.with_rules(rules, extra_nonterminals=extra)


# -- oddification ----------------------------------------------------------------

def oddify(g: Grammar) -> Grammar:
    """Split every nonterminal into triples [x|A|y] defining odd-in-even pieces.

    [x|A|y] holds on ``ux<v>`` exactly when ``A`` holds on ``u<xvy>`` and
    ``|ux|`` is even, ``|v|`` odd.  The start is [_|S|_]; the triples
    [_|S|a] needed for even-length words are kept as well.
    """
    report = validate_binary_nf(g)
    if not report.ok:
        raise PreconditionError(str(report))
    sigma = sorted(g.alphabet)
    edges = [""] + sigma
    ctx_rules = defaultdict(list)     # A -> [(a, D or None)]
    concat_rules = defaultdict(list)  # A -> [((B, C), ...)]
    for r in g.rules:
        b = r.of_kind(Kind.BASE)
        if len(b[0].body) == 1:
            p = r.of_kind(Kind.PROPER)[0].body
            ctx_rules[r.head].append((b[0].body[0], p[0] if p else None))
        else:
            concat_rules[r.head].append(tuple(c.body for c in b))

    def T(x, A, y):
        return Triple(x, A, y)

    def choices(B, C, x, y):
        """Alternatives for one conjunct BC of [x|A|y], as conjunct lists."""
        out = []
        for a in sigma:
            out.append([base(T(x, B, a), a, T("", C, y))])
        for a in sigma:
            out.append([base(T(x, B, ""), a, T(a, C, y))])
        if y:
            for t, D in ctx_rules[C]:
                if t == y and D is not None:
                    out.append([base(T(x, B, "")), extended(T("", D, ""))])
        if x:
            for t, D in ctx_rules[B]:
                if t == x and D is not None:
                    out.append([base(T("", C, y)), proper(T("", D, ""), x)])
        return out

    def triples_of(conj_list):
        return [s for c in conj_list for s in c.body if isinstance(s, Triple)]

    # productivity first, so the per-rule products only range over live choices
    heads = [T(x, A, y) for A in sorted(g.nonterminals, key=render_symbol)
             for x in edges for y in edges]
    live: set = set()
    changed = True
    while changed:
        changed = False
        for h in heads:
            if h in live:
                continue
            x, A, y = h.left, h.base, h.right
            ok = False
            if not x and not y:
                ok = any(D is None or any(T("", D, b) in live for b in sigma)
                         for _, D in ctx_rules[A])
            if not ok:
                ok = any(all(any(all(t in live for t in triples_of(ch))
                                 for ch in choices(B, C, x, y)) for B, C in pairs)
                         for pairs in concat_rules[A])
            if ok:
                live.add(h)
                changed = True

    rules = []
    for h in heads:
        if h not in live:
            continue
        x, A, y = h.left, h.base, h.right
        if not x and not y:
            for a, D in ctx_rules[A]:
                if D is None:
                    rules.append(Rule(h, (base(a), proper())))
                else:
                    for b in sigma:
                        if T("", D, b) in live:
                            rules.append(Rule(h, (base(a), proper(T("", D, b), b))))
        for pairs in concat_rules[A]:
            per_conjunct = [[ch for ch in choices(B, C, x, y)
                             if all(t in live for t in triples_of(ch))] for B, C in pairs]
            for combo in itertools.product(*per_conjunct):
                rules.append(Rule(h, tuple(c for ch in combo for c in ch)))
    S = g.start
    roots = [T("", S, y) for y in edges]
    out = Grammar.build(rules, T("", S, ""), alphabet=g.alphabet,
                        accepts_epsilon=g.accepts_epsilon, sort=True)
    return _trim_from(out, roots)


# -- cleanup ----------------------------------------------------------------------

def _form(c: Conjunct) -> str:
    """Classify a conjunct among a, B, BaC, <=B, <Ba, <_ (or '?')."""
    b = c.body
    if c.kind is Kind.BASE:
        if len(b) == 1:
            return "a" if isinstance(b[0], str) else "B"
        if (len(b) == 3 and isinstance(b[0], Nonterminal) and isinstance(b[1], str)
                and isinstance(b[2], Nonterminal)):
            return "BaC"
    elif c.kind is Kind.PROPER:
        if not b:
            return "<_"
        if len(b) == 2 and isinstance(b[0], Nonterminal) and isinstance(b[1], str):
            return "<Ba"
    elif len(b) == 1 and isinstance(b[0], Nonterminal):
        return "<=B"
    return "?"


def _check_cleanup_input(g: Grammar):
    for r in g.rules:
        forms = [_form(c) for c in r.conjuncts]
        if "?" in forms:
            raise PreconditionError(f"conjunct shape not allowed: {r}")
        if "<_" in forms and "a" not in forms:
            raise PreconditionError(f"empty context without a solitary terminal: {r}")
        if "a" in forms and "<_" not in forms and "<Ba" not in forms:
            raise PreconditionError(f"solitary terminal without a context: {r}")


def _contradictory(body: frozenset) -> bool:
    solitary = set()
    lasts = set()
    has_bac = has_eps_ctx = False
    for c in body:
        f = _form(c)
        if f == "a":
            solitary.add(c.body[0])
        elif f == "BaC":
            has_bac = True
        elif f == "<_":
            has_eps_ctx = True
        elif f == "<Ba":
            lasts.add(c.body[1])
    return ((solitary and has_bac) or (has_eps_ctx and lasts)
            or len(solitary) > 1 or len(lasts) > 1)


def _prune_subsumed(bodies: set) -> set:
    """Drop bodies that are supersets of other bodies (strictly weaker rules)."""
    ordered = sorted(bodies, key=len)
    kept: list = []
    for b in ordered:
        if not any(k <= b for k in kept):
            kept.append(b)
    return set(kept)


def cleanup(g: Grammar, budget: int | None = None) -> Grammar:
    """Remove unit conjuncts and contradictory rules, keeping every language.

    Output rules have the shapes ``a & <_``; ``a & <D1b & ... & <=E ...``;
    ``B1a1C1 & ... & <D1b & ... & <=E ...``.
    """
    _check_cleanup_input(g)
    budget = budget or DEFAULT_BUDGET * 10

    # step 1: rules with an empty context only ever derive _<a>
    eps_ctx = proper()
    eps_rules = []
    for a in sorted(g.alphabet):
        chart = derive_chart(g, a)
        for A in g.nonterminals:
            if (A, 0, 1) in chart:
                eps_rules.append(Rule(A, (base(a), eps_ctx)))
    rules = [r for r in g.rules if eps_ctx not in r.conjuncts] + eps_rules

    # step 2: substitute unit conjuncts, least fixpoint over unit chains
    bodies: dict = defaultdict(set)
    unit_rules = []
    for r in rules:
        units = [c.body[0] for c in r.conjuncts if _form(c) == "B"]
        rest = frozenset(c for c in r.conjuncts if _form(c) != "B")
        if not units:
            if not _contradictory(rest):
                bodies[r.head].add(rest)
        else:
            unit_rules.append((r.head, tuple(sorted(set(units), key=render_symbol)), rest))
    seen_sizes: dict = {}
    total = sum(len(v) for v in bodies.values())
    changed = True
    while changed:
        changed = False
        for idx, (head, units, rest) in enumerate(unit_rules):
            sizes = tuple(len(bodies[u]) for u in units)
            if seen_sizes.get(idx) == sizes:
                continue
            seen_sizes[idx] = sizes
            for combo in itertools.product(*(list(bodies[u]) for u in units)):
                body = rest.union(*combo)
                if eps_ctx in body or _contradictory(body):
                    continue
                if body not in bodies[head]:
                    bodies[head].add(body)
                    total += 1
                    changed = True
                    if total > budget:
                        raise BudgetExceeded(f"cleanup produced more than {budget} rules")
    out = []
    for head, bs in bodies.items():
        for b in _prune_subsumed(bs):
            out.append(Rule(head, tuple(b)))
    result = g.with_rules(out, extra_nonterminals=g.nonterminals)
    return productive_trim(result, keep=g.nonterminals)


# -- de-extension ------------------------------------------------------------------

def _parse_cleaned(g: Grammar):
    """Split rules of the cleanup output into the three shapes."""
    short, ctx, concat = defaultdict(list), defaultdict(list), defaultdict(list)
    for r in g.rules:
        forms = [_form(c) for c in r.conjuncts]
        sol = [c.body[0] for c in r.conjuncts if _form(c) == "a"]
        bac = tuple(sorted((c.body for c in r.conjuncts if _form(c) == "BaC"),
                           key=lambda b: tuple(render_symbol(s) for s in b)))
        ds = frozenset(c.body[0] for c in r.conjuncts if _form(c) == "<Ba")
        lasts = {c.body[1] for c in r.conjuncts if _form(c) == "<Ba"}
        es = frozenset(c.body[0] for c in r.conjuncts if _form(c) == "<=B")
        if len(lasts) > 1 or "?" in forms or "B" in forms:
            raise PreconditionError(f"not a cleaned-up rule: {r}")
        last = next(iter(lasts), None)
        if sol and not bac and "<_" in forms and len(r.conjuncts) == 2:
            short[r.head].append(sol[0])
        elif len(sol) == 1 and not bac and ds and "<_" not in forms:
            ctx[r.head].append((sol[0], ds, last, es))
        elif bac and not sol and "<_" not in forms:
            concat[r.head].append((bac, ds, last, es))
        else:
            raise PreconditionError(f"not a cleaned-up rule: {r}")
    return short, ctx, concat


def _requirements(short, ctx, concat):
    """Exact left-spine context requirements of derivations, per nonterminal.

    A derivation's leftmost leaves all sit at the start of its span, so its
    requirement is either the empty context or one tag ``(conditions, b)``
    collecting every ``<Db`` met on the left spine.
    """
    req: dict = defaultdict(set)
    for A in short:
        req[A].add(EMPTY_CONTEXT)
    for A, rs in ctx.items():
        for _, ds, b, _ in rs:
            req[A].add(ContextTag(ds, b))
    changed = True
    while changed:
        changed = False
        for A, rs in concat.items():
            for conj, ds, b, _ in rs:
                for combo in itertools.product(*(list(req[B]) for B, _, _ in conj)):
                    tags = set(combo)
                    if ds:
                        tags.add(ContextTag(ds, b))
                    lasts = {t.last for t in tags}
                    if len(lasts) != 1:
                        continue
                    last = lasts.pop()
                    tag = (EMPTY_CONTEXT if last == "" else
                           ContextTag(frozenset().union(*(t.conditions for t in tags)), last))
                    if tag not in req[A]:
                        req[A].add(tag)
                        changed = True
    return req


def build_conditional_grammar(g: Grammar, targets: Sequence[Nonterminal] | None = None,
                              budget: int = DEFAULT_BUDGET) -> Grammar:
    """The intermediate grammar over conditional symbols [X|A|Y].

    [X|A|Y] holds on ``u<v>`` when ``A`` does, provided the extended context
    ``uv`` satisfies every nonterminal in ``Y``; ``u`` is checked against ``X``.
    Symbols are instantiated on demand from ``[{_}|A|{}]`` for each target;
    the tag of a right operand is the left operand's pending set plus one
    exact requirement set of the right operand.
    """
    short, ctx, concat = _parse_cleaned(g)
    req = _requirements(short, ctx, concat)
    targets = [g.start] if targets is None else list(targets)
    rules: dict = defaultdict(set)           # head -> set of bodies
    by_ctx_base: dict = defaultdict(set)     # (ctx, A) -> set of pending sets
    demanded: dict = {}                      # (ctx, A) -> None, insertion ordered

    def eps(A):
        return Conditional(EMPTY_CONTEXT, A, frozenset())

    def demand(X, A) -> bool:
        if (X, A) in demanded:
            return False
        demanded[(X, A)] = None
        if len(demanded) > budget:
            raise BudgetExceeded(f"more than {budget} conditional nonterminals")
        return True

    def add(head: Conditional, body: tuple) -> bool:
        if head not in rules:
            if len(rules) >= budget:
                raise BudgetExceeded(f"more than {budget} conditional nonterminals")
            by_ctx_base[(head.ctx, head.base)].add(head.pending)
        if body in rules[head]:
            return False
        rules[head].add(body)
        return True

    for A in targets:
        demand(EMPTY_CONTEXT, A)
    changed = True
    while changed:
        changed = False
        for X, A in list(demanded):
            if X.is_empty:
                for a in short.get(A, ()):
                    changed |= add(eps(A), (base(a), proper()))
            else:
                for a, ds, b, es in ctx.get(A, ()):
                    if b != X.last or not ds <= X.conditions:
                        continue
                    for h in X.conditions:
                        changed |= demand(EMPTY_CONTEXT, h)
                    if all(eps(h) in rules for h in X.conditions):
                        body = (base(a),) + tuple(proper(eps(h), b) for h in X.conditions)
                        changed |= add(Conditional(X, A, es), body)
            for conj, ds, b, es in concat.get(A, ()):
                if ds and (b != X.last or not ds <= X.conditions):
                    continue
                options = []
                for B, a, C in conj:
                    changed |= demand(X, B)
                    opts = []
                    for Y in sorted(by_ctx_base.get((X, B), ()), key=_set_key):
                        for need in req.get(C, ()):
                            if need.last != a:
                                continue
                            tag = ContextTag(Y | need.conditions, a)
                            changed |= demand(tag, C)
                            for Z in sorted(by_ctx_base.get((tag, C), ()), key=_set_key):
                                opts.append((base(Conditional(X, B, Y), a,
                                                  Conditional(tag, C, Z)), Z))
                    options.append(opts)
                for combo in itertools.product(*options):
                    pending = es.union(*(z for _, z in combo))
                    changed |= add(Conditional(X, A, pending), tuple(c for c, _ in combo))
            if X.is_empty:
                for Y in sorted(by_ctx_base.get((X, A), ()), key=_set_key):
                    for E in Y:
                        changed |= demand(EMPTY_CONTEXT, E)
                        if eps(E) in rules:
                            head = Conditional(EMPTY_CONTEXT, A, Y - {E})
                            changed |= add(head, (base(Conditional(EMPTY_CONTEXT, A, Y)),
                                                  base(eps(E))))

    out = [Rule(h, body) for h, bodies in rules.items() for body in bodies]
    return Grammar.build(out, eps(targets[0]), alphabet=g.alphabet, sort=True)


def _set_key(s: frozenset):
    return sorted(render_symbol(x) for x in s)


def powerset_merge(g: Grammar, roots: Sequence[Nonterminal] | None = None,
                   budget: int = DEFAULT_BUDGET) -> Grammar:
    """Replace several proper contexts in a rule by one set-valued nonterminal.

    Every nonterminal ``X`` becomes ``{X}``; a set ``{X1,...,Xk}`` gets one
    rule per compatible choice of rules for its members.
    """
    for r in g.rules:
        for c in r.conjuncts:
            if c.kind is Kind.EXTENDED:
                raise PreconditionError(f"extended context in {r}")
            if c.kind is Kind.PROPER and _form(c) not in ("<_", "<Ba"):
                raise PreconditionError(f"proper context must be <_ or <Qb: {r}")
    roots = [g.start] if roots is None else list(roots)

    def classify(r: Rule):
        sol = [c.body[0] for c in r.conjuncts if c.kind is Kind.BASE and len(c.body) == 1
               and isinstance(c.body[0], str)]
        ctxs = [c.body for c in r.conjuncts if c.kind is Kind.PROPER]
        bases = [c.body for c in r.conjuncts if c.kind is Kind.BASE]
        if sol and len(bases) == 1:
            if ctxs == [()]:
                return ("eps", sol[0], None, None)
            if ctxs and all(len(b) == 2 for b in ctxs) and len({b[1] for b in ctxs}) == 1:
                return ("ctx", sol[0], ctxs[0][1], frozenset(b[0] for b in ctxs))
        if not ctxs and not sol:
            return ("cat", None, None, frozenset(bases))
        return ("other", None, None, None)

    kinds = {r: classify(r) for r in g.rules}
    for r, k in kinds.items():
        if k[0] == "other":
            raise PreconditionError(f"rule shape not supported by the merge: {r}")

    def single(x):
        return PowerSet(frozenset([x]))

    out_rules = []
    todo = [frozenset([x]) for x in roots]
    done: set = set()
    while todo:
        members = todo.pop()
        if members in done:
            continue
        done.add(members)
        if len(done) > budget:
            raise BudgetExceeded(f"more than {budget} powerset nonterminals")
        head = PowerSet(members)
        ordered = sorted(members, key=render_symbol)
        for combo in itertools.product(*(g.rules_for(m) for m in ordered)):
            ks = [kinds[r] for r in combo]
            tags = {k[0] for k in ks}
            if len(tags) != 1:
                continue
            tag = tags.pop()
            if tag == "cat":
                conj = []
                for k in ks:
                    for B, a, C in k[3]:
                        conj.append(base(single(B), a, single(C)))
                        for x in (B, C):
                            todo.append(frozenset([x]))
                out_rules.append(Rule(head, tuple(conj)))
            elif tag == "eps":
                if len({k[1] for k in ks}) == 1:
                    out_rules.append(Rule(head, (base(ks[0][1]), proper())))
            else:
                if len({k[1] for k in ks}) != 1 or len({k[2] for k in ks}) != 1:
                    continue
                q = frozenset().union(*(k[3] for k in ks))
                todo.append(q)
                out_rules.append(Rule(head, (base(ks[0][1]), proper(PowerSet(q), ks[0][2]))))
    start = single(g.start)
    out = Grammar.build(out_rules, start, alphabet=g.alphabet,
                        accepts_epsilon=g.accepts_epsilon, sort=True,
                        extra_nonterminals=[single(x) for x in roots])
    return _trim_from(out, [single(x) for x in roots])


def alias(A: Nonterminal) -> PowerSet:
    """The nonterminal standing for ``A`` in empty left context after de-extension."""
    return PowerSet(frozenset([Conditional(EMPTY_CONTEXT, A, frozenset())]))


def deextend(g: Grammar, targets: Sequence[Nonterminal] | None = None,
             budget: int = DEFAULT_BUDGET) -> Grammar:
    """Eliminate extended contexts; result is in strict even-odd normal form.

    For each target ``A`` (default: every nonterminal), ``alias(A)`` defines
    exactly the strings ``_<v>`` that ``A`` defines in ``g``.  The start of
    the result is ``alias(g.start)``.
    """
    _parse_cleaned(g)
    targets = sorted(g.nonterminals, key=render_symbol) if targets is None else list(targets)
    g3 = build_conditional_grammar(g, targets=targets, budget=budget)
    roots = [Conditional(EMPTY_CONTEXT, A, frozenset()) for A in targets]
    g3 = _trim_from(g3, roots)
    g3 = cleanup(g3, budget=budget * 10)
    g3 = _trim_from(g3, roots)
    g4 = powerset_merge(g3, roots=roots, budget=budget)
    start = alias(g.start)
    g4 = Grammar.build(g4.rules, start, alphabet=g.alphabet, sort=True,
                       extra_nonterminals=[alias(A) for A in targets])
    return g4


# -- full pipeline ----------------------------------------------------------------

START = Name("S'")


def to_even_odd_nf(g: Grammar, budget: int = DEFAULT_BUDGET) -> Grammar:
    """An even-odd normal form grammar for ``L(g)`` (``g`` in binary normal form)."""
    g1 = oddify(g)
    g2 = cleanup(g1, budget=budget)
    sigma = sorted(g.alphabet)
    whole = Triple("", g.start, "")
    cut = {a: Triple("", g.start, a) for a in sigma}
    targets = [t for t in [whole, *cut.values()] if t in g2.nonterminals]
    g4 = deextend(g2, targets=targets, budget=budget)
    final = []
    for r in g4.rules_for(alias(whole)):
        final.append(Rule(START, r.conjuncts))
    for a in sigma:
        if cut[a] in targets and g4.rules_for(alias(cut[a])):
            final.append(Rule(START, (base(alias(cut[a]), a),)))
    out = Grammar.build(list(g4.rules) + final, START, alphabet=g.alphabet,
                        accepts_epsilon=g.accepts_epsilon, sort=True)
    return _trim_from(out, [START])


# -- parity audit -------------------------------------------------------------------

def parity_audit(g: Grammar, w: str) -> list[tuple]:
    """Chart items ``(A, i, j)`` with odd ``i`` or even ``j - i`` (start excluded)."""
    report = validate_even_odd_nf(g)
    if not report.ok:
        raise PreconditionError(str(report))
    chart = derive_chart(g, w)
    bad = []
    for sym, i, j in chart.items():
        if isinstance(sym, Nonterminal) and sym != g.start and (i % 2 or (j - i) % 2 == 0):
            bad.append((sym, i, j))
    return sorted(bad, key=lambda t: (t[1], t[2], render_symbol(t[0])))
