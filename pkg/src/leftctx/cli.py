"""Command line front end.

Exit status: 0 for success, accept or PASS; 1 for reject or FAIL; 2 for
usage, input and budget errors.
"""

from __future__ import annotations

import argparse
import signal
import sys
from contextlib import contextmanager
from typing import Sequence

from .grammar import (Grammar, GrammarError, parse_grammar_text, render_grammar_text,
                      validate_binary_nf, validate_even_odd_nf)
from .hardest import build_homomorphism, encode_string, hardest_grammar
from .normal_form import DEFAULT_BUDGET, BudgetExceeded, to_even_odd_nf
from .recognizer import AlphabetError, enumerate_language, recognize
from .symbols import EPSILON_TOKEN, SymbolSyntaxError
from .verify import verify_reduction


class TimeLimitExceeded(Exception):
    pass


@contextmanager
def _time_limit(seconds: float | None):
    if not seconds or not hasattr(signal, "setitimer"):
        yield
        return

    def expire(signum, frame):
        raise TimeLimitExceeded(f"time limit of {seconds:g}s exceeded")

    old = signal.signal(signal.SIGALRM, expire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _load(path: str) -> Grammar:
    if path == "-":
        return parse_grammar_text(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_grammar_text(fh.read())


def _word(text: str) -> str:
    return "" if text == EPSILON_TOKEN else text


def _cmd_check(args) -> int:
    ok = recognize(_load(args.grammar), _word(args.word))
    print("accept" if ok else "reject")
    return 0 if ok else 1


def _cmd_normalize(args) -> int:
    nf = to_even_odd_nf(_load(args.grammar), budget=args.max_nonterminals)
    sys.stdout.write(render_grammar_text(nf))
    return 0


def _cmd_encode(args) -> int:
    nf = to_even_odd_nf(_load(args.grammar), budget=args.max_nonterminals)
    print(encode_string(build_homomorphism(nf), _word(args.word)))
    return 0


def _cmd_hardest(args) -> int:
    sys.stdout.write(render_grammar_text(hardest_grammar(literal=args.literal)))
    return 0


def _cmd_verify(args) -> int:
    report = verify_reduction(_load(args.grammar), args.max_len, name=args.grammar,
                              budget=args.max_nonterminals, jobs=args.jobs)
    print(report)
    return 0 if report.passed else 1


def _cmd_enumerate(args) -> int:
    words = enumerate_language(_load(args.grammar), args.max_len)
    for w in sorted(words, key=lambda s: (len(s), s)):
        print(w or EPSILON_TOKEN)
    return 0


def _cmd_validate(args) -> int:
    g = _load(args.grammar)
    report = validate_binary_nf(g) if args.form == "binary" else validate_even_odd_nf(g)
    print(report)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leftctx",
                                description="Grammars with left contexts: recognition, "
                                            "normal forms and the hardest-language encoding.")
    p.add_argument("--max-nonterminals", type=int, default=DEFAULT_BUDGET, metavar="N",
                   help="budget for generated nonterminals (default %(default)s)")
    p.add_argument("--time-limit", type=float, default=None, metavar="SEC",
                   help="abort after this many seconds")
    sub = p.add_subparsers(dest="command", required=True)

    def grammar_cmd(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("grammar", help="grammar file, or - for stdin")
        sp.set_defaults(func=func)
        return sp

    grammar_cmd("check", _cmd_check, "recognize a string").add_argument(
        "word", help="input string (_ for the empty string)")
    grammar_cmd("normalize", _cmd_normalize, "print the even-odd normal form")
    grammar_cmd("encode", _cmd_encode, "print the image of a string").add_argument(
        "word", help="input string (_ for the empty string)")
    sp = sub.add_parser("hardest", help="print the hardest grammar")
    sp.add_argument("--literal", action="store_true",
                    help="the listing as originally printed (its F0 rule can never match)")
    sp.set_defaults(func=_cmd_hardest)
    sp = grammar_cmd("verify", _cmd_verify, "check the reduction on all short strings")
    sp.add_argument("--max-len", type=int, default=2)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    grammar_cmd("enumerate", _cmd_enumerate, "list the language up to a length").add_argument(
        "--max-len", type=int, default=4)
    grammar_cmd("validate", _cmd_validate, "check a normal form").add_argument(
        "--form", choices=("binary", "even-odd"), required=True)
    return p


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with _time_limit(args.time_limit):
            return args.func(args)
    except (GrammarError, SymbolSyntaxError, AlphabetError, BudgetExceeded,
            TimeLimitExceeded, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
