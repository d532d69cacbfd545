"""Minimization: deciding whether a nontrivial congruence exists, quotienting
by it until none is left, and the bounded brute-force oracle used to check
the decision procedure.

For a fixed partition of the state orbits, the existence of chars and diffs
making a congruence is a Presburger-with-divisibility formula.  Variables are
``char_<i>`` for class i and ``diff_<rep>_<tau>`` for every non-representative
orbit; the diff between two orbits of a class is the difference of their
offsets, so the cocycle condition holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Iterator, Optional

from .automata import EquivariantDFA, trim
from .epad import (FALSE, TRUE, And, Div, Eq, Formula, Le, LinearTerm, Not, Or, Sat, SolveConfig,
                   Unknown, Unsat, evaluate, solve)
from .semilinear import lcm, pw_eval
from .signatures import (EquivalenceSignature, _pair_cases, _z_pieces, is_congruence,
                         is_nontrivial, quotient, refine, respects_accepting)

SAT, NONE, UNKNOWN = "SAT", "NONE", "UNKNOWN"


class InvalidEquivalenceType(ValueError):
    pass


class EncodingError(AssertionError):
    """A decoded solver witness failed re-verification."""


# --------------------------------------------------------------------------
# equivalence types


def set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


def equivalence_types(d: EquivariantDFA) -> list[list[list[str]]]:
    """Partitions of the state orbits that never mix accepting and rejecting
    orbits, fewest classes first."""
    acc = sorted(t for t in d.states.ids if t in d.accepting)
    rej = sorted(t for t in d.states.ids if t not in d.accepting)
    out = []
    for pa in set_partitions(acc):
        for pr in set_partitions(rej):
            out.append(sorted((sorted(c) for c in pa + pr), key=lambda c: c[0]))
    out.sort(key=lambda p: (len(p), [c for c in p]))
    return out


# --------------------------------------------------------------------------
# encoding


class _Encoder:
    def __init__(self, d: EquivariantDFA, sim):
        self.d = d
        self.classes = [sorted(c) for c in sim]
        self.classes.sort(key=lambda c: c[0])
        seen = [t for c in self.classes for t in c]
        if sorted(seen) != sorted(d.states.ids) or len(set(seen)) != len(seen):
            raise InvalidEquivalenceType(f"{sim} is not a partition of {sorted(d.states.ids)}")
        self.cls = {t: i for i, c in enumerate(self.classes) for t in c}

    def char(self, tau) -> LinearTerm:
        return LinearTerm.var(f"char_{self.cls[tau]}")

    def off(self, tau) -> LinearTerm:
        rep = self.classes[self.cls[tau]][0]
        return LinearTerm.const(0) if tau == rep else LinearTerm.var(f"diff_{rep}_{tau}")

    def finite_gcd(self, ci) -> int:
        g = 0
        for t in self.classes[ci]:
            g = gcd(g, self.d.states.char(t))
        return g

    def consistency(self) -> list[Formula]:
        out = []
        for ci, c in enumerate(self.classes):
            ch = LinearTerm.var(f"char_{ci}")
            g = self.finite_gcd(ci)
            if g:
                out += [Le(1, ch), Div(ch, g)]
                bounded = [Le(0, self.off(t)) for t in c[1:]] + [Le(self.off(t), ch - 1) for t in c[1:]]
                out += bounded
            else:
                out.append(Le(0, ch))
                for t in c[1:]:
                    out.append(Or(Eq(ch, 0), And(Le(0, self.off(t)), Le(self.off(t), ch - 1))))
        return out

    def nontrivial(self) -> Formula:
        alts = []
        for ci, c in enumerate(self.classes):
            if len(c) >= 2:
                return TRUE
            k = self.d.states.char(c[0])
            ch = LinearTerm.var(f"char_{ci}")
            alts.append(Le(ch, k - 1) if k else Le(1, ch))
        return Or(*alts) if alts else FALSE

    def related(self, a, b) -> bool:
        return self.cls[a] == self.cls[b]

    def same(self, e1, e2) -> Formula:
        """e1 ~ e2 as a formula in the signature variables."""
        if not self.related(e1.orbit, e2.orbit):
            return FALSE
        gap = (self.off(e1.orbit) - self.off(e2.orbit)) + (e2.value - e1.value)
        return Div(self.char(e1.orbit), gap)

    def shift_member(self, delta: LinearTerm, tau, sigma, alpha) -> Formula:
        """delta lies in the shift set of the (tau, alpha) and (sigma, alpha) maps."""
        st = self.d.states
        f, g = self.d.map_for(tau, alpha), self.d.map_for(sigma, alpha)
        kf, kg = st.char(tau), st.char(sigma)
        if kf and kg:
            K = lcm(kf, kg)
            fv = [pw_eval(f, i, st) for i in range(kf)]
            gv = [pw_eval(g, i, st) for i in range(kg)]
            alts = []
            for D in range(K):
                lits = []
                for i in range(K):
                    lits.append(self.same(fv[i % kf], gv[(i + D) % kg]))
                alts.append(And(Div(K, delta - D), *_dedupe(lits)))
            return Or(*alts)
        clauses = []
        for P in _z_pieces(f, kf):
            for Q in _z_pieces(g, kg):
                clauses.extend(self._pair(delta, P, Q))
        return And(*clauses)

    def _pair(self, delta, P, Q) -> list[Formula]:
        """One disjunction over the residue r of delta mod L.  Within a branch
        every affine condition on m = (delta - r) / L is multiplied by L."""
        by_r: dict = {}
        L = None
        for case in _pair_cases(P, Q):
            by_r.setdefault(case[0], []).append(case)
            L = case[1]
        if L is None:
            return []
        alts = []
        for r in range(L):
            m_L = delta - r  # L*m

            def aff(a, b):
                return m_L * b + L * a

            oks = []
            for _, _, regime, nonempty, several, tp, tq, s0, s1 in by_r.get(r, ()):
                escape = [Le(aff(a, b), -1) for a, b in regime]
                if nonempty is not None:
                    escape.append(Le(aff(*nonempty), -1))
                if self.related(tp, tq):
                    td = (self.off(tq) - self.off(tp)) * L
                    c = self.char(tp) * L
                    ok0 = Div(c, aff(*s0) - td)
                    ok1 = Div(c, aff(*s1) - td)
                    tail = ok1 if several is None else Or(Le(aff(*several), -1), ok1)
                    escape.append(And(ok0, tail))
                oks.append(Or(*escape) if escape else FALSE)
            guard = [Div(L, delta - r)] if L > 1 else []
            alts.append(And(*(guard + oks)) if guard or oks else TRUE)
        return [Or(*alts)] if len(alts) > 1 else alts

    def congruence(self) -> list[Formula]:
        out = []
        alphas = self.d.alphabet.ids
        for ci, c in enumerate(self.classes):
            ch = LinearTerm.var(f"char_{ci}")
            zero_ok = self.finite_gcd(ci) == 0
            for tau in c:
                for alpha in alphas:
                    f = self.shift_member(ch, tau, tau, alpha)
                    out.append(Or(Eq(ch, 0), f) if zero_ok else f)
            rep = c[0]
            for sigma in c[1:]:
                for alpha in alphas:
                    out.append(self.shift_member(self.off(sigma), rep, sigma, alpha))
        return out


def _dedupe(fs):
    seen, out = set(), []
    for f in fs:
        key = repr(f)
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out


def encode_congruence_existence(d: EquivariantDFA, sim, nontrivial: bool = True) -> Formula:
    """Formula in char_* and diff_* that is satisfiable iff some signature
    with equivalence type ``sim`` is a (nontrivial, if asked) congruence of d."""
    enc = _Encoder(d, sim)
    parts = enc.consistency() + enc.congruence()
    if nontrivial:
        parts.append(enc.nontrivial())
    return And(*parts)


def signature_valuation(sig: EquivalenceSignature) -> dict:
    """The encoding's variable assignment describing ``sig``."""
    v = {}
    for ci, (c, ch) in enumerate(zip(sig.classes, sig.chars)):
        v[f"char_{ci}"] = ch
        for t in c[1:]:
            o = sig.offset(t)
            v[f"diff_{c[0]}_{t}"] = o % ch if ch else o
    return v


def decode(sim, valuation: dict) -> EquivalenceSignature:
    classes = sorted((sorted(c) for c in sim), key=lambda c: c[0])
    chars, offs = [], {}
    for ci, c in enumerate(classes):
        ch = valuation.get(f"char_{ci}", 0)
        chars.append(ch)
        for t in c[1:]:
            offs[t] = valuation.get(f"diff_{c[0]}_{t}", 0)
    return EquivalenceSignature.from_offsets(classes, chars, offs)


# --------------------------------------------------------------------------
# search


@dataclass
class CongruenceSearchReport:
    candidates: list = field(default_factory=list)
    results: list = field(default_factory=list)
    found: Optional[EquivalenceSignature] = None
    complete: bool = True

    def lines(self) -> list[str]:
        out = []
        for sim, res in zip(self.candidates, self.results):
            out.append(f"{_fmt_sim(sim)} -> {res}")
        return out


def _fmt_sim(sim) -> str:
    return "{" + ",".join("[" + ",".join(c) + "]" for c in sim) + "}"


@dataclass
class SearchOutcome:
    status: str
    signature: Optional[EquivalenceSignature]
    report: CongruenceSearchReport


def _verify(d, sig):
    if not (respects_accepting(sig, d) and is_nontrivial(sig, d.states) and is_congruence(d, sig)):
        raise EncodingError(f"decoded signature {sig!r} is not a nontrivial congruence")


def exists_nontrivial_congruence(d: EquivariantDFA, config: SolveConfig = SolveConfig()) -> SearchOutcome:
    cfg = SolveConfig(char_search_cap=config.char_search_cap, witness_box=config.witness_box,
                      minimize_witness=False, deterministic=config.deterministic)
    report = CongruenceSearchReport()
    for sim in equivalence_types(d):
        res = solve(encode_congruence_existence(d, sim), cfg)
        report.candidates.append(sim)
        if isinstance(res, Sat):
            sig = decode(sim, res.valuation)
            _verify(d, sig)
            report.results.append(SAT)
            report.found = sig
            return SearchOutcome(SAT, sig, report)
        if isinstance(res, Unknown):
            report.results.append(UNKNOWN)
            report.complete = False
        else:
            report.results.append("UNSAT")
    return SearchOutcome(NONE if report.complete else UNKNOWN, None, report)


def _divisors(g: int) -> list[int]:
    return [c for c in range(1, g + 1) if g % c == 0]


def brute_force_search(d: EquivariantDFA, char_cap: int = 64, diff_cap: int = 16):
    """Try every signature within the bounds; returns (signature or None, complete)."""
    st = d.states
    complete = all(st.char(t) for t in st.ids)
    for sim in equivalence_types(d):
        char_opts = []
        for c in sim:
            g = 0
            for t in c:
                g = gcd(g, st.char(t))
            char_opts.append(_divisors(g) if g else list(range(char_cap + 1)))
        for chars in product(*char_opts):
            diff_opts = []
            for c, ch in zip(sim, chars):
                rng = range(ch) if ch else range(-diff_cap, diff_cap + 1)
                diff_opts += [[(t, v) for v in rng] for t in c[1:]]
            for combo in product(*diff_opts):
                sig = EquivalenceSignature.from_offsets(sim, chars, dict(combo))
                if is_nontrivial(sig, st) and respects_accepting(sig, d) and is_congruence(d, sig):
                    return sig, complete
    return None, complete


@dataclass
class Minimality:
    status: str  # YES, NO or UNKNOWN
    signature: Optional[EquivalenceSignature]
    report: CongruenceSearchReport


def is_minimal(d: EquivariantDFA, config: SolveConfig = SolveConfig()) -> Minimality:
    out = exists_nontrivial_congruence(trim(d), config)
    status = {SAT: "NO", NONE: "YES", UNKNOWN: "UNKNOWN"}[out.status]
    return Minimality(status, out.signature, out.report)


@dataclass
class MinimizeTrace:
    steps: list = field(default_factory=list)  # (signature, quotient automaton)
    minimal_within_bounds: bool = False
    reports: list = field(default_factory=list)


def _measure(d: EquivariantDFA):
    return len(d.states), sorted((o.characteristic == 0, o.characteristic) for o in d.states)


def _decreases(before: EquivariantDFA, phi: EquivalenceSignature) -> bool:
    # fewer orbits, or same orbits with some char strictly dividing the old one
    if len(phi.classes) < len(before.states):
        return True
    return any(ch != before.states.char(c[0]) for c, ch in zip(phi.classes, phi.chars))


def minimize(d: EquivariantDFA, config: SolveConfig = SolveConfig(), max_rounds: int = 1000):
    """Quotient by nontrivial congruences until none is found; returns (dfa, trace)."""
    cur = trim(d)
    trace = MinimizeTrace()
    for _ in range(max_rounds):
        out = exists_nontrivial_congruence(cur, config)
        trace.reports.append(out.report)
        if out.status != SAT:
            trace.minimal_within_bounds = out.status == UNKNOWN
            return cur, trace
        if not _decreases(cur, out.signature):
            raise EncodingError("quotient did not decrease the termination measure")
        cur, _ = quotient(cur, out.signature, check=False)
        cur = trim(cur)
        trace.steps.append((out.signature, cur))
    raise EncodingError("minimization did not terminate within max_rounds")


@dataclass
class RefinementTrace:
    signatures: list
    stabilized: bool


def partition_refinement(d: EquivariantDFA, max_steps: int) -> RefinementTrace:
    phi = EquivalenceSignature.by_acceptance(d)
    trace = [phi]
    for _ in range(max_steps):
        nxt = refine(d, phi)
        if nxt == phi:
            return RefinementTrace(trace, True)
        trace.append(nxt)
        phi = nxt
    # a fixpoint reached exactly at the last step is still detected
    if max_steps and refine(d, phi) == phi:
        return RefinementTrace(trace, True)
    return RefinementTrace(trace, False)
