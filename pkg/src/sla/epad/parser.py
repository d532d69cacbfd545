"""Infix text syntax for formulas.

    3*x %= 3 mod y & 5*y %= 7 mod x & 2*x = y - 18
    !(2 | x) or x <= -1

Comparisons are ``<= < >= > = !=``; ``d | e`` is divisibility; ``&`` binds
tighter than ``or``; ``!`` negates.  Products need a constant factor.
"""

from __future__ import annotations

import re

from .formula import (FALSE, TRUE, Congruent, Div, Eq, Formula, Ge, Gt, Le, LinearTerm, Lt, Ne,
                      Not, conj, disj)


class FormulaSyntaxError(ValueError):
    def __init__(self, msg, text, pos):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.column = line, col


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(<=|>=|!=|%=|[-+*()|&!<>=]))")
_KEYWORDS = {"or", "mod", "and", "true", "false"}
_RELS = {"<=": Le, "<": Lt, ">=": Ge, ">": Gt, "=": Eq, "!=": Ne}


def _tokenize(text):
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        if text[pos] == "#":
            nl = text.find("\n", pos)
            pos = len(text) if nl < 0 else nl
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("int", int(m.group(1)), start))
        elif m.group(2):
            w = m.group(2)
            out.append(("kw" if w in _KEYWORDS else "var", w, start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("eof", None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def is_(self, kind, val=None):
        t = self.peek()
        return t[0] == kind and (val is None or t[1] == val)

    def expect(self, kind, val=None):
        if not self.is_(kind, val):
            t = self.peek()
            want = val if val is not None else kind
            raise FormulaSyntaxError(f"expected {want!r}, found {t[1]!r}", self.text, t[2])
        return self.take()

    def fail(self, msg):
        raise FormulaSyntaxError(msg, self.text, self.peek()[2])

    # formula level
    def formula(self) -> Formula:
        parts = [self.conjunction()]
        while self.is_("kw", "or"):
            self.take()
            parts.append(self.conjunction())
        return disj(parts) if len(parts) > 1 else parts[0]

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.is_("op", "&") or self.is_("kw", "and"):
            self.take()
            parts.append(self.unary())
        return conj(parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Formula:
        if self.is_("op", "!"):
            self.take()
            return Not(self.unary())
        if self.is_("kw", "true"):
            self.take()
            return TRUE
        if self.is_("kw", "false"):
            self.take()
            return FALSE
        if self.is_("op", "("):
            save = self.i
            try:
                return self.atom()
            except FormulaSyntaxError:
                self.i = save
            self.take()
            f = self.formula()
            self.expect("op", ")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        lhs = self.term()
        t = self.peek()
        if t[0] != "op":
            self.fail(f"expected a comparison, found {t[1]!r}")
        op = t[1]
        if op in _RELS:
            self.take()
            return _RELS[op](lhs, self.term())
        if op == "|":
            self.take()
            return Div(lhs, self.term())
        if op == "%=":
            self.take()
            rhs = self.term()
            self.expect("kw", "mod")
            return Congruent(lhs, rhs, self.term())
        self.fail(f"expected a comparison, found {op!r}")

    # term level
    def term(self) -> LinearTerm:
        sign = 1
        if self.is_("op", "-"):
            self.take()
            sign = -1
        elif self.is_("op", "+"):
            self.take()
        acc = self.product() * sign
        while self.is_("op", "+") or self.is_("op", "-"):
            op = self.take()[1]
            p = self.product()
            acc = acc + p if op == "+" else acc - p
        return acc

    def product(self) -> LinearTerm:
        acc = self.factor()
        while self.is_("op", "*"):
            star = self.take()
            rhs = self.factor()
            if acc.is_constant:
                acc = rhs * acc.constant
            elif rhs.is_constant:
                acc = acc * rhs.constant
            else:
                raise FormulaSyntaxError("nonlinear product", self.text, star[2])
        return acc

    def factor(self) -> LinearTerm:
        t = self.peek()
        if t[0] == "int":
            self.take()
            # allow juxtaposition like 3x
            if self.is_("var"):
                return LinearTerm.var(self.take()[1], t[1])
            return LinearTerm.const(t[1])
        if t[0] == "var":
            self.take()
            return LinearTerm.var(t[1])
        if t == ("op", "-", t[2]):
            self.take()
            return -self.factor()
        if self.is_("op", "("):
            self.take()
            inner = self.term()
            self.expect("op", ")")
            return inner
        self.fail(f"expected a term, found {t[1]!r}")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if not p.is_("eof"):
        p.fail(f"trailing input {p.peek()[1]!r}")
    return f
