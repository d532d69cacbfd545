"""Arithmetic progressions, piecewise-affine maps and n-dimensional linear sets.

A piece of a :class:`PiecewiseAffineMap` lives on a progression
``{base + step*t : 0 <= t < count}`` and sends the point with parameter ``t``
to ``(target, coeff*t + offset)``.  Parameterising by ``t`` rather than by
the point itself keeps maps such as ``x -> (x - 1)/2`` integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional, Sequence

from .atoms import Element, OrbitFiniteSet, canonicalize

INF = None  # count of an infinite progression


def lcm(*nums: int) -> int:
    out = 1
    for n in nums:
        n = abs(n)
        if n == 0:
            return 0
        out = out * n // gcd(out, n)
    return out


def egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> Optional[tuple[int, int]]:
    """Solve x = a1 (mod m1), x = a2 (mod m2) for positive moduli.

    Returns ``(a, m)`` with 0 <= a < m = lcm(m1, m2), or None if incompatible.
    """
    g, p, _ = egcd(m1, m2)
    if (a2 - a1) % g:
        return None
    m = m1 // g * m2
    a = (a1 + (a2 - a1) // g * p % (m2 // g) * m1) % m
    return a, m


@dataclass(frozen=True)
class Progression:
    base: int
    step: int
    count: Optional[int] = INF

    def __post_init__(self):
        if self.step == 0:
            raise ValueError("progression step must be nonzero")
        if self.count is not None and self.count < 1:
            raise ValueError("progression count must be >= 1")

    def __str__(self):
        cnt = "inf" if self.count is None else self.count
        return f"({self.base}, {self.step}, {cnt})"

    @property
    def infinite(self) -> bool:
        return self.count is None

    @property
    def last(self) -> Optional[int]:
        if self.count is None:
            return None
        return self.base + self.step * (self.count - 1)

    @property
    def lo(self) -> Optional[int]:
        """Least element, or None when unbounded below."""
        if self.step > 0:
            return self.base
        return self.last

    @property
    def hi(self) -> Optional[int]:
        if self.step < 0:
            return self.base
        return self.last

    def at(self, t: int) -> int:
        return self.base + self.step * t

    def param(self, x: int) -> Optional[int]:
        """The parameter t with at(t) == x, or None if x is not a member."""
        d = x - self.base
        if d % self.step:
            return None
        t = d // self.step
        if t < 0 or (self.count is not None and t >= self.count):
            return None
        return t

    def __contains__(self, x: int) -> bool:
        return self.param(x) is not None

    def elements(self, limit: Optional[int] = None) -> list[int]:
        n = self.count if self.count is not None else limit
        if n is None:
            raise ValueError("infinite progression needs a limit")
        if limit is not None:
            n = min(n, limit)
        return [self.base + self.step * t for t in range(n)]

    def shift(self, d: int) -> "Progression":
        return Progression(self.base + d, self.step, self.count)


def first_two(p: Optional[Progression]) -> list[int]:
    if p is None:
        return []
    return p.elements(2)


def progression_intersect(p: Progression, q: Progression) -> Optional[Progression]:
    """Exact intersection of two progressions (None when empty).

    The result is ascending whenever it has a least element.
    """
    sol = crt_pair(p.base % abs(p.step), abs(p.step), q.base % abs(q.step), abs(q.step))
    if sol is None:
        return None
    a, m = sol
    los = [v for v in (p.lo, q.lo) if v is not None]
    his = [v for v in (p.hi, q.hi) if v is not None]
    lo = max(los) if los else None
    hi = min(his) if his else None
    if lo is not None:
        x = lo + (a - lo) % m
        if hi is not None:
            if x > hi:
                return None
            return Progression(x, m, (hi - x) // m + 1)
        return Progression(x, m, INF)
    x = hi - (hi - a) % m
    return Progression(x, -m, INF)


@dataclass(frozen=True)
class Piece:
    prog: Progression
    target: str
    coeff: int = 0
    offset: int = 0

    def value_at(self, t: int) -> int:
        return self.coeff * t + self.offset

    def __str__(self):
        return f"{self.prog} -> {self.target} t*{self.coeff}{self.offset:+d}"


class MapStructureError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseAffineMap:
    source: str
    pieces: tuple[Piece, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    def locate(self, x: int) -> tuple[Piece, int]:
        found = None
        for pc in self.pieces:
            t = pc.prog.param(x)
            if t is not None:
                if found is not None:
                    raise MapStructureError(f"map from {self.source}: overlap at x = {x}")
                found = (pc, t)
        if found is None:
            raise MapStructureError(f"map from {self.source}: gap at x = {x}")
        return found

    def targets(self) -> set[str]:
        return {pc.target for pc in self.pieces}

    def steps(self) -> list[int]:
        return [pc.prog.step for pc in self.pieces]

    def endpoints(self) -> list[int]:
        pts = []
        for pc in self.pieces:
            pts.append(pc.prog.base)
            if pc.prog.last is not None:
                pts.append(pc.prog.last)
        return pts


def pw_eval(m: PiecewiseAffineMap, x: int, universe: OrbitFiniteSet) -> Element:
    k = universe.char(m.source)
    if k >= 1:
        x %= k
    pc, t = m.locate(x)
    return canonicalize(Element(pc.target, pc.value_at(t)), universe)


def check_window(maps: Sequence[PiecewiseAffineMap], extra_periods: Iterable[int] = ()) -> range:
    """A window of arguments that exhausts every piecewise-affine behaviour.

    Outside the hull of all finite endpoints each piece is a one-sided residue
    class, so any affine/congruence property that holds on three periods on
    both sides of the hull holds everywhere.
    """
    pts = [p for m in maps for p in m.endpoints()] or [0]
    L = lcm(*[s for m in maps for s in m.steps()], *[e for e in extra_periods if e]) or 1
    return range(min(pts) - 3 * L, max(pts) + 3 * L + 1)


def identity_map(source: str, target: Optional[str] = None) -> PiecewiseAffineMap:
    target = source if target is None else target
    return PiecewiseAffineMap(source, (
        Piece(Progression(0, 1), target, 1, 0),
        Piece(Progression(-1, -1), target, -1, -1),
    ))


def constant_map(source: str, target: str, value: int = 0, source_char: int = 0) -> PiecewiseAffineMap:
    if source_char >= 1:
        return PiecewiseAffineMap(source, (Piece(Progression(0, 1, source_char), target, 0, value),))
    return PiecewiseAffineMap(source, (
        Piece(Progression(0, 1), target, 0, value),
        Piece(Progression(-1, -1), target, 0, value),
    ))


def affine_on_z(source: str, target: str, a: int, b: int) -> PiecewiseAffineMap:
    """The map x -> (target, a*x + b) on all of Z."""
    return PiecewiseAffineMap(source, (
        Piece(Progression(0, 1), target, a, b),
        Piece(Progression(-1, -1), target, -a, b - a),
    ))


# --------------------------------------------------------------------------
# n-dimensional linear sets (used for NFA transition relations only)


@dataclass(frozen=True)
class LinearSet:
    base: tuple[int, ...]
    periods: tuple[tuple[int, ...], ...] = ()


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class LinearSetUnion:
    dimension: int
    components: tuple[LinearSet, ...] = ()

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, LinearSet) else LinearSet(tuple(c[0]), tuple(tuple(p) for p in c[1]))
            for c in self.components
        )
        for c in comps:
            if len(c.base) != self.dimension or any(len(p) != self.dimension for p in c.periods):
                raise DimensionMismatch(f"component {c} does not have dimension {self.dimension}")
        object.__setattr__(self, "components", comps)


def lsu_is_empty(r: LinearSetUnion) -> bool:
    return not r.components


def lsu_union(r1: LinearSetUnion, r2: LinearSetUnion) -> LinearSetUnion:
    if r1.dimension != r2.dimension:
        raise DimensionMismatch(f"{r1.dimension} != {r2.dimension}")
    return LinearSetUnion(r1.dimension, r1.components + r2.components)


def lsu_member(r: LinearSetUnion, v: Sequence[int]) -> bool:
    """Membership, decided by the complete linear layer of the EPAD solver."""
    from .epad.formula import Eq, Le, LinearTerm, conj
    from .epad.solver import Sat, solve_conjunction

    v = tuple(v)
    if len(v) != r.dimension:
        raise DimensionMismatch(f"vector of length {len(v)} for dimension {r.dimension}")
    for comp in r.components:
        names = [f"n{i}" for i in range(len(comp.periods))]
        lits = [Le(LinearTerm.const(0), LinearTerm.var(n)) for n in names]
        for d in range(r.dimension):
            lhs = LinearTerm({n: p[d] for n, p in zip(names, comp.periods)}, comp.base[d])
            lits.append(Eq(lhs, LinearTerm.const(v[d])))
        if isinstance(solve_conjunction(lits), Sat):
            return True
    return False
