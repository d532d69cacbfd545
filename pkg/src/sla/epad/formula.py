"""Quantifier-free formulas over (Z, 0, 1, +, |).

Free variables are read as existentially quantified.  Atoms are ``a <= b``,
``a = b`` and ``d | e``; ``0 | e`` holds exactly when ``e = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union


class UnassignedVariable(KeyError):
    pass


class LinearTerm:
    """An integer linear combination of variables plus a constant."""

    __slots__ = ("coeffs", "constant", "_hash")

    def __init__(self, coeffs: Mapping[str, int] | Iterable = (), constant: int = 0):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[str, int] = {}
        for v, c in items:
            acc[v] = acc.get(v, 0) + c
        self.coeffs = tuple(sorted((v, c) for v, c in acc.items() if c))
        self.constant = constant
        self._hash = None

    @classmethod
    def const(cls, c: int) -> "LinearTerm":
        return cls((), c)

    @classmethod
    def var(cls, name: str, coeff: int = 1) -> "LinearTerm":
        return cls({name: coeff}, 0)

    @staticmethod
    def lift(x: "TermLike") -> "LinearTerm":
        if isinstance(x, LinearTerm):
            return x
        if isinstance(x, int):
            return LinearTerm.const(x)
        if isinstance(x, str):
            return LinearTerm.var(x)
        raise TypeError(f"cannot make a term from {x!r}")

    @property
    def variables(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, name: str) -> int:
        for v, c in self.coeffs:
            if v == name:
                return c
        return 0

    def __add__(self, other):
        other = LinearTerm.lift(other)
        return LinearTerm(list(self.coeffs) + list(other.coeffs), self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self):
        return LinearTerm([(v, -c) for v, c in self.coeffs], -self.constant)

    def __sub__(self, other):
        return self + (-LinearTerm.lift(other))

    def __rsub__(self, other):
        return LinearTerm.lift(other) - self

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return LinearTerm([(v, c * k) for v, c in self.coeffs], self.constant * k)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LinearTerm) and self.coeffs == other.coeffs and self.constant == other.constant

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.coeffs, self.constant))
        return self._hash

    def evaluate(self, v: Mapping[str, int]) -> int:
        total = self.constant
        for name, c in self.coeffs:
            try:
                total += c * v[name]
            except KeyError:
                raise UnassignedVariable(name) from None
        return total

    def substitute(self, name: str, term: "LinearTerm") -> "LinearTerm":
        c = self.coeff(name)
        if not c:
            return self
        rest = LinearTerm([(v, k) for v, k in self.coeffs if v != name], self.constant)
        return rest + term * c

    def __str__(self):
        parts = []
        for v, c in self.coeffs:
            if c == 1:
                s = v
            elif c == -1:
                s = f"-{v}"
            else:
                s = f"{c}*{v}"
            parts.append(s)
        if self.constant or not parts:
            parts.append(str(self.constant))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"LinearTerm({self})"


TermLike = Union[LinearTerm, int, str]


class Formula:
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Le(Formula):
    lhs: LinearTerm
    rhs: LinearTerm

    def __init__(self, lhs: TermLike, rhs: TermLike):
        object.__setattr__(self, "lhs", LinearTerm.lift(lhs))
        object.__setattr__(self, "rhs", LinearTerm.lift(rhs))

    def __str__(self):
        return f"{self.lhs} <= {self.rhs}"


@dataclass(frozen=True)
class Eq(Formula):
    lhs: LinearTerm
    rhs: LinearTerm

    def __init__(self, lhs: TermLike, rhs: TermLike):
        object.__setattr__(self, "lhs", LinearTerm.lift(lhs))
        object.__setattr__(self, "rhs", LinearTerm.lift(rhs))

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class Div(Formula):
    """``divisor | dividend``."""

    divisor: LinearTerm
    dividend: LinearTerm

    def __init__(self, divisor: TermLike, dividend: TermLike):
        object.__setattr__(self, "divisor", LinearTerm.lift(divisor))
        object.__setattr__(self, "dividend", LinearTerm.lift(dividend))

    def __str__(self):
        return f"({self.divisor}) | ({self.dividend})"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"!({self.arg})"


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __init__(self, *args):
        if len(args) == 1 and not isinstance(args[0], Formula):
            args = tuple(args[0])
        object.__setattr__(self, "args", tuple(args))

    def __str__(self):
        if not self.args:
            return "true"
        return " & ".join(f"({a})" for a in self.args)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __init__(self, *args):
        if len(args) == 1 and not isinstance(args[0], Formula):
            args = tuple(args[0])
        object.__setattr__(self, "args", tuple(args))

    def __str__(self):
        if not self.args:
            return "false"
        return " or ".join(f"({a})" for a in self.args)


Atom = (Le, Eq, Div)


def Lt(a, b):
    return Le(LinearTerm.lift(a) + 1, b)


def Ge(a, b):
    return Le(b, a)


def Gt(a, b):
    return Lt(b, a)


def Ne(a, b):
    return Not(Eq(a, b))


def Congruent(a, b, m):
    """``a %= b mod m``, i.e. m | a - b."""
    return Div(m, LinearTerm.lift(a) - LinearTerm.lift(b))


def conj(fs: Iterable[Formula]) -> Formula:
    fs = [f for f in fs if f != TRUE]
    if any(f == FALSE for f in fs):
        return FALSE
    if not fs:
        return TRUE
    return fs[0] if len(fs) == 1 else And(*fs)


def disj(fs: Iterable[Formula]) -> Formula:
    fs = [f for f in fs if f != FALSE]
    if any(f == TRUE for f in fs):
        return TRUE
    if not fs:
        return FALSE
    return fs[0] if len(fs) == 1 else Or(*fs)


def divides(d: int, e: int) -> bool:
    if d == 0:
        return e == 0
    return e % d == 0


def evaluate(phi: Formula, v: Mapping[str, int]) -> bool:
    if isinstance(phi, Const):
        return phi.value
    if isinstance(phi, Le):
        return phi.lhs.evaluate(v) <= phi.rhs.evaluate(v)
    if isinstance(phi, Eq):
        return phi.lhs.evaluate(v) == phi.rhs.evaluate(v)
    if isinstance(phi, Div):
        return divides(phi.divisor.evaluate(v), phi.dividend.evaluate(v))
    if isinstance(phi, Not):
        return not evaluate(phi.arg, v)
    if isinstance(phi, And):
        return all(evaluate(a, v) for a in phi.args)
    if isinstance(phi, Or):
        return any(evaluate(a, v) for a in phi.args)
    raise TypeError(f"malformed formula node {phi!r}")


def free_vars(phi: Formula) -> set[str]:
    if isinstance(phi, Const):
        return set()
    if isinstance(phi, (Le, Eq)):
        return phi.lhs.variables | phi.rhs.variables
    if isinstance(phi, Div):
        return phi.divisor.variables | phi.dividend.variables
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    if isinstance(phi, (And, Or)):
        out = set()
        for a in phi.args:
            out |= free_vars(a)
        return out
    raise TypeError(f"malformed formula node {phi!r}")


def negate_literal(phi: Formula) -> Formula:
    """Push one negation through an atom; negated divisibility stays a literal."""
    if isinstance(phi, Le):
        return Le(phi.rhs + 1, phi.lhs)
    if isinstance(phi, Eq):
        return Or(Le(phi.lhs + 1, phi.rhs), Le(phi.rhs + 1, phi.lhs))
    if isinstance(phi, Div):
        return Not(phi)
    if isinstance(phi, Not):
        return phi.arg
    if isinstance(phi, Const):
        return Const(not phi.value)
    if isinstance(phi, And):
        return Or(*[Not(a) for a in phi.args])
    if isinstance(phi, Or):
        return And(*[Not(a) for a in phi.args])
    raise TypeError(f"malformed formula node {phi!r}")


def nnf(phi: Formula) -> Formula:
    if isinstance(phi, (Const, Le, Eq, Div)):
        return phi
    if isinstance(phi, Not):
        inner = phi.arg
        if isinstance(inner, Div):
            return phi
        return nnf(negate_literal(inner))
    if isinstance(phi, And):
        return conj(nnf(a) for a in phi.args)
    if isinstance(phi, Or):
        return disj(nnf(a) for a in phi.args)
    raise TypeError(f"malformed formula node {phi!r}")


def to_dnf(phi: Formula) -> list[list[Formula]]:
    """Disjunctive normal form as a list of conjunctions of literals."""
    phi = nnf(phi)

    def go(f):
        if isinstance(f, Const):
            return [[]] if f.value else []
        if isinstance(f, (Le, Eq, Div, Not)):
            return [[f]]
        if isinstance(f, Or):
            out = []
            for a in f.args:
                out.extend(go(a))
            return out
        if isinstance(f, And):
            out = [[]]
            for a in f.args:
                out = [c + d for c in out for d in go(a)]
            return out
        raise TypeError(f"malformed formula node {f!r}")

    return go(phi)
