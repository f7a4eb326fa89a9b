"""End-to-end check of the reduction ``w in L(G)  <=>  h(w) in L(G0)``."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .grammar import Grammar
from .hardest import Homomorphism, build_homomorphism, encode_string, hardest_grammar
from .normal_form import DEFAULT_BUDGET, to_even_odd_nf
from .recognizer import all_strings, recognize


@dataclass
class VerificationReport:
    grammar_name: str
    max_len: int
    tested: int = 0     # non-empty strings; the empty string is always checked too
    mismatches: list = field(default_factory=list)   # (w, expected, got)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def __str__(self) -> str:
        rows = [("grammar", self.grammar_name), ("max length", str(self.max_len)),
                ("strings tested", str(self.tested)),
                ("mismatches", str(len(self.mismatches))),
                ("elapsed", f"{self.elapsed:.2f}s")]
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
        for w, exp, got in self.mismatches:
            lines.append(f"  {w or '_'}: expected {_verdict(exp)}, got {_verdict(got)}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _verdict(b: bool) -> str:
    return "accept" if b else "reject"


def _check_one(args) -> tuple[str, bool, bool]:
    g, code, w = args
    return w, recognize(g, w), recognize(hardest_grammar(), code)


def check_encoding(g: Grammar, h: Homomorphism, max_len: int, accepts_epsilon: bool,
                   name: str = "", jobs: int = 1) -> VerificationReport:
    """Compare ``g`` against ``G0`` through ``h`` on all strings up to ``max_len``.

    ``accepts_epsilon`` is the flag of the encoded grammar: when set the
    empty string is compared against ``L(G0)`` plus the empty string.
    """
    report = VerificationReport(name, max_len)
    t0 = time.perf_counter()
    got = True if accepts_epsilon else recognize(hardest_grammar(), "")
    if recognize(g, "") != got:
        report.mismatches.append(("", recognize(g, ""), got))
    tasks = [(g, encode_string(h, w), w)
             for n in range(1, max_len + 1) for w in all_strings(g.alphabet, n)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check_one, tasks))
    else:
        results = [_check_one(t) for t in tasks]
    for w, exp, got in results:        # already in enumeration order
        report.tested += 1
        if exp != got:
            report.mismatches.append((w, exp, got))
    report.elapsed = time.perf_counter() - t0
    return report


def verify_reduction(g: Grammar, max_len: int, name: str = "", budget: int = DEFAULT_BUDGET,
                     jobs: int = 1) -> VerificationReport:
    """Normalize ``g``, encode it and compare memberships up to ``max_len``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    t0 = time.perf_counter()
    nf = to_even_odd_nf(g, budget=budget)
    h = build_homomorphism(nf)
    report = check_encoding(g, h, max_len, nf.accepts_epsilon, name=name, jobs=jobs)
    report.elapsed = time.perf_counter() - t0
    return report
