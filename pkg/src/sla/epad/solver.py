"""Layered satisfiability for existential Presburger arithmetic with divisibility.

Layer 1 decides conjunctions whose divisors are constants, completely, by
Cooper-style variable elimination with witness reconstruction.  Layer 2
splits a divisor over the finitely many divisors of a nonzero constant it is
known to divide.  Layer 3 enumerates the remaining divisor values up to a
cap; when nothing is found and the cap does not provably exhaust the case
space, the answer is :class:`Unknown`.

Disjunctions are expanded lazily, depth first, with cheap one-variable
domain propagation used to prune branches early.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional

from .formula import (FALSE, TRUE, And, Const, Div, Eq, Formula, Le, LinearTerm, Not, Or,
                      evaluate, free_vars, nnf)

log = logging.getLogger(__name__)

ENUM_LIMIT = 20000  # largest finite divisor domain enumerated exhaustively


class MalformedFormula(TypeError):
    pass


class SolverInternalError(AssertionError):
    pass


@dataclass(frozen=True)
class SolveConfig:
    char_search_cap: int = 64
    witness_box: Optional[int] = None
    minimize_witness: bool = True
    deterministic: bool = True


class SolveResult:
    complete = True


@dataclass(frozen=True)
class Sat(SolveResult):
    valuation: dict = field(default_factory=dict)

    def __str__(self):
        body = ", ".join(f"{k}={v}" for k, v in sorted(self.valuation.items()))
        return f"SAT({body})"


@dataclass(frozen=True)
class Unsat(SolveResult):
    def __str__(self):
        return "UNSAT"


@dataclass(frozen=True)
class Unknown(SolveResult):
    reason: str = ""
    cap: Optional[int] = None
    complete = False

    def __str__(self):
        return f"UNKNOWN({self.reason}; cap={self.cap})"


UNSAT = Unsat()


# --------------------------------------------------------------------------
# internal literals: ('le', t) t<=0 | ('eq', t) t=0 | ('dv', d, t) d|t | ('nd', d, t) not d|t


def _to_lit(f: Formula):
    if isinstance(f, Le):
        return ("le", f.lhs - f.rhs)
    if isinstance(f, Eq):
        return ("eq", f.lhs - f.rhs)
    if isinstance(f, Div):
        return ("dv", f.divisor, f.dividend)
    if isinstance(f, Not) and isinstance(f.arg, Div):
        return ("nd", f.arg.divisor, f.arg.dividend)
    raise MalformedFormula(f"not a literal: {f!r}")


def _lit_vars(lit) -> set[str]:
    if lit[0] in ("le", "eq", "ne"):
        return lit[1].variables
    return lit[1].variables | lit[2].variables


def _content(t: LinearTerm) -> int:
    g = 0
    for _, c in t.coeffs:
        g = gcd(g, c)
    return g


def _reduce_mod(t: LinearTerm, m: int) -> LinearTerm:
    return LinearTerm([(v, c % m) for v, c in t.coeffs], t.constant % m)


def _strip_multiple(d: LinearTerm, e: LinearTerm) -> LinearTerm:
    """Rewrite e as e - k*d when that removes variables (d | e iff d | e - k*d)."""
    for v, a in d.coeffs:
        b = e.coeff(v)
        if b and b % a == 0:
            cand = e - d * (b // a)
            if len(cand.coeffs) < len(e.coeffs):
                return cand
    return e


def _norm(lit):
    """Normalize a literal: returns True, False, or a normalized literal."""
    kind = lit[0]
    if kind == "le":
        t = lit[1]
        if t.is_constant:
            return t.constant <= 0
        g = _content(t)
        if g > 1:
            t = LinearTerm([(v, c // g) for v, c in t.coeffs], -((-t.constant) // g))
        return ("le", t)
    if kind == "eq":
        t = lit[1]
        if t.is_constant:
            return t.constant == 0
        g = _content(t)
        if t.constant % g:
            return False
        if g > 1:
            t = LinearTerm([(v, c // g) for v, c in t.coeffs], t.constant // g)
        if t.coeffs[0][1] < 0:
            t = -t
        return ("eq", t)
    if kind == "ne":
        t = lit[1]
        if t.is_constant:
            return t.constant != 0
        g = _content(t)
        if t.constant % g:
            return True
        if g > 1:
            t = LinearTerm([(v, c // g) for v, c in t.coeffs], t.constant // g)
        if t.coeffs[0][1] < 0:
            t = -t
        return ("ne", t)
    d, t = lit[1], lit[2]
    neg = kind == "nd"
    if d.is_constant:
        m = abs(d.constant)
        if m == 0:
            if neg:
                # e != 0 has no single-literal form; caller branches
                return ("ne", t) if not t.is_constant else t.constant != 0
            return _norm(("eq", t))
        if m == 1:
            return not neg
        t = _reduce_mod(t, m)
        if t.is_constant:
            return (t.constant % m == 0) != neg
        g = gcd(m, _content(t), t.constant)
        if g > 1:
            m //= g
            t = LinearTerm([(v, c // g) for v, c in t.coeffs], t.constant // g)
            if m == 1:
                return not neg
        return (kind, LinearTerm.const(m), t)
    t = _strip_multiple(d, t)
    if t.is_constant and t.constant == 0:
        return not neg
    return (kind, d, t)


def _subst_lit(lit, name: str, term: LinearTerm):
    if lit[0] in ("le", "eq", "ne"):
        return (lit[0], lit[1].substitute(name, term))
    return (lit[0], lit[1].substitute(name, term), lit[2].substitute(name, term))


def _eval_lit(lit, v) -> bool:
    kind = lit[0]
    if kind == "le":
        return lit[1].evaluate(v) <= 0
    if kind == "eq":
        return lit[1].evaluate(v) == 0
    if kind == "ne":
        return lit[1].evaluate(v) != 0
    d, e = lit[1].evaluate(v), lit[2].evaluate(v)
    ok = (e == 0) if d == 0 else (e % d == 0)
    return ok if kind == "dv" else not ok


def _normalize_all(lits) -> Optional[list]:
    out = []
    seen = set()
    for lit in lits:
        n = _norm(lit)
        if n is True:
            continue
        if n is False:
            return None
        if n not in seen:
            seen.add(n)
            out.append(n)
    for n in out:
        if n[0] == "dv" and ("nd",) + n[1:] in seen:
            return None
    return out


# --------------------------------------------------------------------------
# one-variable domains (interval + residue class) for pruning


class _Dom:
    __slots__ = ("lo", "hi", "r", "m")

    def __init__(self):
        self.lo = None
        self.hi = None
        self.r = 0
        self.m = 1

    def empty(self) -> bool:
        if self.m == 0:
            return True
        if self.lo is not None and self.hi is not None:
            if self.lo > self.hi:
                return True
            first = self.lo + (self.r - self.lo) % self.m
            return first > self.hi
        return False

    def size(self) -> Optional[int]:
        if self.lo is None or self.hi is None:
            return None
        if self.lo > self.hi:
            return 0
        first = self.lo + (self.r - self.lo) % self.m
        return 0 if first > self.hi else (self.hi - first) // self.m + 1

    def values(self):
        first = self.lo + (self.r - self.lo) % self.m
        return range(first, self.hi + 1, self.m)

    def allows(self, x: int) -> bool:
        if self.lo is not None and x < self.lo:
            return False
        if self.hi is not None and x > self.hi:
            return False
        return (x - self.r) % self.m == 0

    def add_residue(self, r: int, m: int):
        from ..semilinear import crt_pair
        if self.m == 0:
            return
        sol = crt_pair(self.r % self.m, self.m, r % m, m)
        if sol is None:
            self.m = 0
        else:
            self.r, self.m = sol


def _domains(lits) -> Optional[dict]:
    """Propagate one-variable literals; None when some domain is empty."""
    doms: dict[str, _Dom] = {}
    for lit in lits:
        kind = lit[0]
        if kind in ("le", "eq"):
            t = lit[1]
            if len(t.coeffs) != 1:
                continue
            (v, a), c = t.coeffs[0], t.constant
            d = doms.setdefault(v, _Dom())
            if kind == "eq":
                if c % a:
                    return None
                x = -c // a
                d.lo = x if d.lo is None else max(d.lo, x)
                d.hi = x if d.hi is None else min(d.hi, x)
            elif a > 0:
                ub = (-c) // a
                d.hi = ub if d.hi is None else min(d.hi, ub)
            else:
                lb = _ceil_div(c, -a)
                d.lo = lb if d.lo is None else max(d.lo, lb)
        elif kind == "dv" and lit[1].is_constant:
            t = lit[2]
            if len(t.coeffs) != 1:
                continue
            (v, a), c = t.coeffs[0], t.constant
            m = abs(lit[1].constant)
            g = gcd(a, m)
            if c % g:
                return None
            m2 = m // g
            if m2 == 1:
                continue
            r = (-c // g) * pow((a // g) % m2, -1, m2)
            doms.setdefault(v, _Dom()).add_residue(r, m2)
        else:
            continue
    for d in doms.values():
        if d.empty():
            return None
    return doms


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


# --------------------------------------------------------------------------
# layer 1: Cooper elimination over constant-divisor conjunctions


def _scale(lit, k: int):
    if k == 1:
        return lit
    if lit[0] == "le":
        return ("le", lit[1] * k)
    if lit[0] == "eq":
        return ("eq", lit[1] * k)
    return (lit[0], LinearTerm.const(abs(lit[1].constant) * k), lit[2] * k)


class _Cooper:
    def __init__(self):
        self.cache: dict = {}

    def solve(self, lits) -> Optional[dict]:
        lits = _normalize_all(lits)
        if lits is None:
            return None
        key = frozenset(lits)
        if key in self.cache:
            return self.cache[key]
        res = self._solve(lits)
        self.cache[key] = res
        return res

    def _solve(self, lits) -> Optional[dict]:
        if not lits:
            return {}
        doms = _domains(lits)
        if doms is None:
            return None
        for lit in lits:
            if lit[0] == "ne":
                t = lit[1]
                rest = [l for l in lits if l is not lit]
                for alt in (("le", t + 1), ("le", -t + 1)):
                    sol = self.solve(rest + [alt])
                    if sol is not None:
                        return sol
                return None
        eqs = [l for l in lits if l[0] == "eq"]
        if eqs:
            return self._eliminate_equality(lits, eqs)
        return self._eliminate_inequality(lits, doms)

    def _eliminate_equality(self, lits, eqs):
        best = None
        for e in eqs:
            for v, a in e[1].coeffs:
                if best is None or abs(a) < abs(best[2]):
                    best = (e, v, a)
        e, x, a = best
        s = e[1] - LinearTerm.var(x, a)  # a*x + s = 0
        rest = [l for l in lits if l is not e]
        if abs(a) == 1:
            xterm = s * (-a)
            sol = self.solve([_subst_lit(l, x, xterm) for l in rest])
            if sol is None:
                return None
            sol = dict(sol)
            sol[x] = xterm.evaluate(_defaulted(sol, xterm))
            return sol
        A = abs(a)
        sg = 1 if a > 0 else -1
        new = [("dv", LinearTerm.const(A), s)]
        for l in rest:
            if x not in _lit_vars(l):
                new.append(l)
                continue
            if l[0] in ("le", "eq", "ne"):
                t = l[1]
                b = t.coeff(x)
                tr = t - LinearTerm.var(x, b)
                new.append((l[0], tr * A + s * (-b * sg)))
            else:
                m = abs(l[1].constant)
                t = l[2]
                b = t.coeff(x)
                tr = t - LinearTerm.var(x, b)
                new.append((l[0], LinearTerm.const(m * A), tr * A + s * (-b * sg)))
        sol = self.solve(new)
        if sol is None:
            return None
        sol = dict(sol)
        sv = s.evaluate(_defaulted(sol, s))
        if sv % a:
            raise SolverInternalError("equality elimination produced a non-integral value")
        sol[x] = -sv // a
        return sol

    def _eliminate_inequality(self, lits, doms):
        allv = set()
        for l in lits:
            allv |= _lit_vars(l)

        def cost(v):
            lo = up = 0
            delta = 1
            for l in lits:
                c = (l[1] if l[0] == "le" else l[2]).coeff(v)
                if not c:
                    continue
                delta = delta * abs(c) // gcd(delta, abs(c))
                if l[0] == "le":
                    if c > 0:
                        up += 1
                    else:
                        lo += 1
            D = delta
            for l in lits:
                if l[0] in ("dv", "nd"):
                    c = l[2].coeff(v)
                    if c:
                        m = abs(l[1].constant) * (delta // abs(c))
                        D = D * m // gcd(D, m)
            branches = D * (min(lo, up) if lo and up else 1)
            dom = doms.get(v)
            size = dom.size() if dom is not None else None
            if size is not None and size <= branches:
                return (size, 0, v)
            return (branches, 1, v)

        best = min(cost(v) for v in allv)
        x = best[2]
        if best[1] == 0:
            for val in sorted(doms[x].values(), key=lambda z: (abs(z), z < 0)):
                xt = LinearTerm.const(val)
                sol = self.solve([_subst_lit(l, x, xt) for l in lits])
                if sol is not None:
                    sol = dict(sol)
                    sol[x] = val
                    return sol
            return None
        mine = [l for l in lits if x in _lit_vars(l)]
        others = [l for l in lits if x not in _lit_vars(l)]
        delta = 1
        for l in mine:
            c = (l[1] if l[0] == "le" else l[2]).coeff(x)
            delta = delta * abs(c) // gcd(delta, abs(c))
        # rewrite so that x stands for y = delta*x with unit coefficients
        ylits = []
        for l in mine:
            if l[0] == "le":
                c = l[1].coeff(x)
                k = delta // abs(c)
                t = l[1] * k
                t = t - LinearTerm.var(x, t.coeff(x)) + LinearTerm.var(x, 1 if c > 0 else -1)
                ylits.append(("le", t))
            else:
                c = l[2].coeff(x)
                k = delta // abs(c)
                m = abs(l[1].constant) * k
                t = l[2] * k
                t = t - LinearTerm.var(x, t.coeff(x)) + LinearTerm.var(x, 1 if c > 0 else -1)
                ylits.append((l[0], LinearTerm.const(m), t))
        if delta > 1:
            ylits.append(("dv", LinearTerm.const(delta), LinearTerm.var(x)))
        lowers, uppers, divs = [], [], []
        for l in ylits:
            if l[0] == "le":
                c = l[1].coeff(x)
                r = l[1] - LinearTerm.var(x, c)
                if c > 0:
                    uppers.append(-r)  # y <= -r
                else:
                    lowers.append(r)  # y >= r
            else:
                divs.append(l)
        D = 1
        for l in divs:
            m = abs(l[1].constant)
            D = D * m // gcd(D, m)

        def finish(sol, y):
            sol = dict(sol)
            if y % delta:
                raise SolverInternalError("cooper witness not divisible by coefficient lcm")
            sol[x] = y // delta
            return sol

        if not lowers or not uppers:
            unbounded_below = not lowers
            for j in range(D):
                sub = [_subst_lit(l, x, LinearTerm.const(j)) for l in divs]
                sol = self.solve(others + sub)
                if sol is None:
                    continue
                bounds = [b.evaluate(_defaulted(sol, b)) for b in (uppers if unbounded_below else lowers)]
                y = j
                if unbounded_below and bounds and y > min(bounds):
                    y -= D * _ceil_div(y - min(bounds), D)
                elif not unbounded_below and bounds and y < max(bounds):
                    y += D * _ceil_div(max(bounds) - y, D)
                return finish(_defaulted(sol, *uppers, *lowers), y)
            return None
        use_lower = len(lowers) <= len(uppers)
        anchors = lowers if use_lower else uppers
        for b in anchors:
            for j in range(D):
                yterm = b + j if use_lower else b - j
                sub = [_subst_lit(l, x, yterm) for l in ylits]
                sol = self.solve(others + sub)
                if sol is not None:
                    full = _defaulted(sol, yterm)
                    return finish(full, yterm.evaluate(full))
        return None


def _defaulted(sol: dict, *terms) -> dict:
    """Assign 0 to variables that were eliminated without constraint."""
    missing = set()
    for t in terms:
        missing |= t.variables - sol.keys()
    if not missing:
        return sol
    out = dict(sol)
    for v in missing:
        out[v] = 0
    return out


# --------------------------------------------------------------------------
# layers 2 and 3 on conjunctions, and the lazy DNF search over formulas


def _divisor_values(k: int) -> list[int]:
    k = abs(k)
    out = []
    i = 1
    while i * i <= k:
        if k % i == 0:
            out.append(i)
            if i * i != k:
                out.append(k // i)
        i += 1
    out.sort()
    return [s * d for d in out for s in (1, -1)]


def _cap_order(cap: int) -> list[int]:
    out = [0]
    for k in range(1, cap + 1):
        out.extend((k, -k))
    return out


class _Search:
    def __init__(self, config: SolveConfig, cooper: Optional[_Cooper] = None):
        self.config = config
        self.cooper = cooper if cooper is not None else _Cooper()
        self.unknown_reason: Optional[str] = None

    # ---- conjunction level ------------------------------------------

    def decide(self, lits) -> SolveResult:
        lits = _normalize_all(lits)
        if lits is None:
            return UNSAT
        doms = _domains(lits)
        if doms is None:
            return UNSAT
        # unit equality substitution
        for lit in lits:
            if lit[0] == "eq":
                for v, a in lit[1].coeffs:
                    if abs(a) == 1:
                        term = (lit[1] - LinearTerm.var(v, a)) * (-a)
                        rest = [_subst_lit(l, v, term) for l in lits if l is not lit]
                        return self._with_subst(self.decide(rest), v, term)
        for lit in lits:
            if lit[0] == "dv" and not lit[1].is_constant and lit[2].is_constant:
                return self._split_divisor(lits, lit, _divisor_values(lit[2].constant), True)
        for lit in lits:
            if lit[0] in ("dv", "nd") and not lit[1].is_constant:
                d = lit[1]
                values, exhaustive = self._enum_values(d, doms)
                return self._split_divisor(lits, lit, values, exhaustive)
        sol = self.cooper.solve(lits)
        if sol is None:
            return UNSAT
        return Sat(sol)

    def _enum_values(self, d: LinearTerm, doms) -> tuple[list[int], bool]:
        if len(d.coeffs) == 1 and abs(d.coeffs[0][1]) == 1:
            v = d.coeffs[0][0]
            dom = doms.get(v)
            if dom is not None:
                size = dom.size()
                if size is not None and size <= ENUM_LIMIT:
                    a, c = d.coeffs[0][1], d.constant
                    vals = sorted({a * x + c for x in dom.values()}, key=lambda z: (abs(z), z < 0))
                    return vals, True
        return _cap_order(self.config.char_search_cap), False

    def _split_divisor(self, lits, lit, values, exhaustive) -> SolveResult:
        d = lit[1]
        rest = [l for l in lits if l is not lit]
        unknown = False
        for val in values:
            branch = [l if l[0] not in ("dv", "nd") or l[1] != d else (l[0], LinearTerm.const(val), l[2])
                      for l in rest]
            branch.append((lit[0], LinearTerm.const(val), lit[2]))
            branch.append(("eq", d - val))
            res = self.decide(branch)
            if isinstance(res, Sat):
                return res
            if isinstance(res, Unknown):
                unknown = True
        if exhaustive and not unknown:
            return UNSAT
        cap = self.config.char_search_cap
        relaxed = [l for l in rest if not (l[0] in ("dv", "nd") and l[1] == d)]
        outside = [self.decide(relaxed + [("le", -d + cap + 1)]), self.decide(relaxed + [("le", d + cap + 1)])]
        if not unknown and all(isinstance(r, Unsat) for r in outside):
            return UNSAT
        self.unknown_reason = f"divisor {d} not resolved within cap"
        return Unknown(self.unknown_reason, cap)

    def _with_subst(self, res: SolveResult, v: str, term: LinearTerm) -> SolveResult:
        if not isinstance(res, Sat):
            return res
        sol = _defaulted(res.valuation, term)
        sol = dict(sol)
        sol[v] = term.evaluate(sol)
        return Sat(sol)

    @staticmethod
    def _first_sat(results: Iterable[SolveResult]) -> SolveResult:
        unknown = None
        for r in results:
            if isinstance(r, Sat):
                return r
            if isinstance(r, Unknown) and unknown is None:
                unknown = r
        return unknown if unknown is not None else UNSAT

    # ---- formula level ----------------------------------------------

    def search(self, agenda: list, lits: list) -> SolveResult:
        agenda = list(agenda)
        lits = list(lits)
        ors = []
        while agenda:
            f = agenda.pop()
            if isinstance(f, Const):
                if not f.value:
                    return UNSAT
            elif isinstance(f, And):
                agenda.extend(f.args)
            elif isinstance(f, Or):
                ors.append(f)
            else:
                n = _norm(_to_lit(f))
                if n is False:
                    return UNSAT
                if n is not True:
                    lits.append(n)
        lits = _normalize_all(lits)
        if lits is None:
            return UNSAT
        doms = _domains(lits)
        if doms is None:
            return UNSAT
        if not ors:
            return self.decide(lits)
        # substitute unit equalities into pending disjunctions
        for lit in lits:
            if lit[0] == "eq":
                for v, a in lit[1].coeffs:
                    if abs(a) == 1:
                        term = (lit[1] - LinearTerm.var(v, a)) * (-a)
                        rest = [_subst_lit(l, v, term) for l in lits if l is not lit]
                        new_ors = [substitute(o, v, term) for o in ors]
                        return self._with_subst(self.search(new_ors, rest), v, term)
        # split divisor variables before expanding disjunctions
        for lit in lits:
            if lit[0] == "dv" and _single_var(lit[1]) and lit[2].is_constant:
                return self._split_var(ors, lits, lit[1], _divisor_values(lit[2].constant), True)
        dvar = _divisor_var(ors, lits)
        if dvar is not None:
            values, exhaustive = self._enum_values(dvar, doms)
            return self._split_var(ors, lits, dvar, values, exhaustive)
        pick = min(range(len(ors)), key=lambda i: len(ors[i].args))
        chosen = ors[pick]
        rest_ors = ors[:pick] + ors[pick + 1:]
        return self._first_sat(self.search(rest_ors + [alt], lits) for alt in chosen.args)

    def _split_var(self, ors, lits, d: LinearTerm, values, exhaustive) -> SolveResult:
        (v, a), c = d.coeffs[0], d.constant
        unknown = False
        for val in values:
            if (val - c) % a:
                continue
            x = (val - c) // a
            xt = LinearTerm.const(x)
            res = self.search([substitute(o, v, xt) for o in ors], [_subst_lit(l, v, xt) for l in lits])
            if isinstance(res, Sat):
                sol = dict(res.valuation)
                sol[v] = x
                return Sat(sol)
            if isinstance(res, Unknown):
                unknown = True
        if exhaustive and not unknown:
            return UNSAT
        cap = self.config.char_search_cap
        relaxed_ors = [_relax(o, d) for o in ors]
        relaxed_lits = [l for l in lits if not (l[0] in ("dv", "nd") and l[1] == d)]
        outside = [
            self.search(relaxed_ors, relaxed_lits + [("le", -d + cap + 1)]),
            self.search(relaxed_ors, relaxed_lits + [("le", d + cap + 1)]),
        ]
        if not unknown and all(isinstance(r, Unsat) for r in outside):
            return UNSAT
        self.unknown_reason = f"divisor {d} not resolved within cap"
        return Unknown(self.unknown_reason, cap)


def _single_var(t: LinearTerm) -> bool:
    return len(t.coeffs) == 1 and abs(t.coeffs[0][1]) == 1


def _divisor_var(ors, lits) -> Optional[LinearTerm]:
    found = []
    for lit in lits:
        if lit[0] in ("dv", "nd") and len(lit[1].coeffs) == 1:
            found.append(lit[1])

    def walk(f):
        if isinstance(f, Div) and len(f.divisor.coeffs) == 1:
            found.append(f.divisor)
        elif isinstance(f, Not):
            walk(f.arg)
        elif isinstance(f, (And, Or)):
            for a in f.args:
                walk(a)

    for o in ors:
        walk(o)
    if not found:
        return None
    name = min(t.coeffs[0][0] for t in found)
    return LinearTerm.var(name)


def _relax(f: Formula, d: LinearTerm) -> Formula:
    """Replace divisibility literals whose divisor mentions d's variable by true (f in NNF)."""
    names = d.variables
    if isinstance(f, Div):
        return TRUE if f.divisor.variables & names else f
    if isinstance(f, Not):
        return TRUE if isinstance(f.arg, Div) and f.arg.divisor.variables & names else f
    if isinstance(f, And):
        return And(*[_relax(a, d) for a in f.args])
    if isinstance(f, Or):
        return Or(*[_relax(a, d) for a in f.args])
    return f


def substitute(f: Formula, name: str, term: LinearTerm) -> Formula:
    """Substitute and fold ground atoms (formula assumed in NNF)."""
    if isinstance(f, Const):
        return f
    if isinstance(f, (Le, Eq, Div)) or (isinstance(f, Not) and isinstance(f.arg, Div)):
        lit = _to_lit(f)
        if name not in _lit_vars(lit):
            return f
        n = _norm(_subst_lit(lit, name, term))
        if n is True:
            return TRUE
        if n is False:
            return FALSE
        return _from_lit(n)
    if isinstance(f, And):
        args = []
        for a in f.args:
            s = substitute(a, name, term)
            if s == FALSE:
                return FALSE
            if s != TRUE:
                args.append(s)
        if not args:
            return TRUE
        return args[0] if len(args) == 1 else And(*args)
    if isinstance(f, Or):
        args = []
        for a in f.args:
            s = substitute(a, name, term)
            if s == TRUE:
                return TRUE
            if s != FALSE:
                args.append(s)
        if not args:
            return FALSE
        return args[0] if len(args) == 1 else Or(*args)
    raise MalformedFormula(f"unexpected node {f!r}")


def _from_lit(lit) -> Formula:
    kind = lit[0]
    if kind == "le":
        return Le(lit[1], 0)
    if kind == "eq":
        return Eq(lit[1], 0)
    if kind == "ne":
        return Or(Le(lit[1] + 1, 0), Le(-lit[1] + 1, 0))
    if kind == "dv":
        return Div(lit[1], lit[2])
    return Not(Div(lit[1], lit[2]))


def _components(phi: Formula) -> list[Formula]:
    """Split a top-level conjunction into variable-disjoint groups."""
    parts = list(phi.args) if isinstance(phi, And) else [phi]
    flat = []
    while parts:
        p = parts.pop()
        if isinstance(p, And):
            parts.extend(p.args)
        else:
            flat.append(p)
    flat.reverse()
    parent: dict = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, p in enumerate(flat):
        parent[("f", i)] = ("f", i)
        for v in free_vars(p):
            parent.setdefault(("v", v), ("v", v))
            ra, rb = find(("f", i)), find(("v", v))
            if ra != rb:
                parent[ra] = rb
    groups: dict = {}
    for i, p in enumerate(flat):
        groups.setdefault(find(("f", i)), []).append(p)
    return [And(*g) if len(g) > 1 else g[0] for g in groups.values()]


def _check_wellformed(phi):
    if isinstance(phi, (Le, Eq, Div, Const)):
        return
    if isinstance(phi, Not):
        _check_wellformed(phi.arg)
        return
    if isinstance(phi, (And, Or)):
        for a in phi.args:
            if not isinstance(a, Formula):
                raise MalformedFormula(f"non-formula argument {a!r}")
            _check_wellformed(a)
        return
    raise MalformedFormula(f"malformed formula node {phi!r}")


def solve(phi: Formula, config: SolveConfig = SolveConfig()) -> SolveResult:
    """Satisfiability of phi with its free variables read existentially.

    With ``witness_box`` set, variables are restricted to [-box, box], which
    makes every layer exhaustive.
    """
    _check_wellformed(phi)
    names = free_vars(phi)
    if config.witness_box is not None:
        B = config.witness_box
        phi = And(phi, *[Le(LinearTerm.var(v), B) for v in sorted(names)],
                  *[Le(-B, LinearTerm.var(v)) for v in sorted(names)])
    phi = nnf(phi)
    valuation: dict = {}
    unknown = None
    cooper = _Cooper()
    for comp in _components(phi):
        res = _Search(config, cooper).search([comp], [])
        if isinstance(res, Unsat):
            return UNSAT
        if isinstance(res, Unknown):
            unknown = unknown or res
            continue
        sol = res.valuation
        if config.deterministic and config.minimize_witness:
            sol = _canonical_witness(comp, sol, config, cooper)
        valuation.update(sol)
    if unknown is not None:
        return unknown
    valuation = {v: valuation.get(v, 0) for v in sorted(names)}
    if not evaluate(phi, valuation):
        raise SolverInternalError(f"witness {valuation} does not satisfy the formula")
    return Sat(valuation)


def _canonical_witness(comp: Formula, sol: dict, config: SolveConfig, cooper: _Cooper) -> dict:
    """Shrink a witness to the lexicographically smallest by absolute value.

    Each probe adds box constraints, so divisor enumeration becomes finite;
    if a probe still comes back UNKNOWN the witness found so far is kept.
    """
    fixed = [comp]
    for n in sorted(free_vars(comp)):
        v = LinearTerm.var(n)
        lo, hi = 0, abs(sol.get(n, 0))
        while lo < hi:
            mid = (lo + hi) // 2
            res = _Search(config, cooper).search(fixed + [Le(v, mid), Le(-mid, v)], [])
            if isinstance(res, Unknown):
                return sol
            if isinstance(res, Sat):
                hi = mid
            else:
                lo = mid + 1
        for cand in (lo, -lo):
            res = _Search(config, cooper).search(fixed + [Eq(v, cand)], [])
            if isinstance(res, Unknown):
                return sol
            if isinstance(res, Sat):
                fixed.append(Eq(v, cand))
                sol = dict(res.valuation)
                sol[n] = cand
                break
        else:
            raise SolverInternalError("canonical witness search lost satisfiability")
    return sol


def solve_conjunction(literals: Iterable[Formula], config: SolveConfig = SolveConfig()) -> SolveResult:
    return solve(And(*literals), config)
