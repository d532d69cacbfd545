"""Two-sided ultimately periodic subsets of Z (the one-dimensional semilinear sets).

A :class:`PeriodicSet1D` is described by a left tail (below ``lo``), an
explicit window ``[lo, hi)`` and a right tail (``hi`` and above).  Each tail is
a set of residues modulo its period; a tail with no residues is empty.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional

from .semilinear import INF, Progression, lcm


@lru_cache(maxsize=4096)
def _min_period(period: int, residues: frozenset) -> tuple[int, frozenset]:
    if not residues:
        return 1, frozenset()
    for d in range(1, period + 1):
        if period % d:
            continue
        reduced = frozenset(r % d for r in residues)
        if all((r % d in reduced) == (r in residues) for r in range(period)):
            return d, reduced
    return period, residues


@dataclass(frozen=True, eq=False)
class PeriodicSet1D:
    left_period: int
    left_residues: frozenset
    lo: int
    window: frozenset
    hi: int
    right_period: int
    right_residues: frozenset

    def __post_init__(self):
        lp, lr = self.left_period, frozenset(self.left_residues)
        rp, rr = self.right_period, frozenset(self.right_residues)
        # period 0 encodes "empty beyond the threshold"
        if lp == 0:
            lp, lr = 1, frozenset()
        if rp == 0:
            rp, rr = 1, frozenset()
        if lp < 0 or rp < 0:
            raise ValueError("periods must be natural numbers")
        if self.hi < self.lo:
            raise ValueError("window must satisfy lo <= hi")
        lp, lr = _min_period(lp, frozenset(r % lp for r in lr))
        rp, rr = _min_period(rp, frozenset(r % rp for r in rr))
        win = frozenset(x for x in self.window if self.lo <= x < self.hi)
        lo, hi = self.lo, self.hi
        while lo < hi and ((lo % lp) in lr) == (lo in win):
            lo += 1
        while hi > lo and (((hi - 1) % rp) in rr) == ((hi - 1) in win):
            hi -= 1
        if lo == hi:
            win = frozenset()
        else:
            win = frozenset(x for x in win if lo <= x < hi)
        for name, val in (("left_period", lp), ("left_residues", lr), ("lo", lo), ("window", win),
                          ("hi", hi), ("right_period", rp), ("right_residues", rr)):
            object.__setattr__(self, name, val)

    # -- construction ---------------------------------------------------

    @classmethod
    def empty(cls) -> "PeriodicSet1D":
        return cls(1, frozenset(), 0, frozenset(), 0, 1, frozenset())

    @classmethod
    def full(cls) -> "PeriodicSet1D":
        return cls(1, frozenset({0}), 0, frozenset(), 0, 1, frozenset({0}))

    @classmethod
    def finite(cls, xs: Iterable[int]) -> "PeriodicSet1D":
        xs = frozenset(xs)
        if not xs:
            return cls.empty()
        return cls(1, frozenset(), min(xs), xs, max(xs) + 1, 1, frozenset())

    @classmethod
    def residue(cls, a: int, m: int) -> "PeriodicSet1D":
        """{x : x = a (mod m)}; m = 0 gives the singleton {a}."""
        if m == 0:
            return cls.finite([a])
        m = abs(m)
        r = frozenset({a % m})
        return cls(m, r, 0, frozenset(), 0, m, r)

    @classmethod
    def interval(cls, lo: Optional[int], hi: Optional[int]) -> "PeriodicSet1D":
        """The integers in [lo, hi] (None = unbounded)."""
        if lo is not None and hi is not None:
            return cls.finite(range(lo, hi + 1)) if lo <= hi else cls.empty()
        if lo is None and hi is None:
            return cls.full()
        if lo is None:
            return cls(1, frozenset({0}), hi + 1, frozenset(), hi + 1, 1, frozenset())
        return cls(1, frozenset(), lo, frozenset(), lo, 1, frozenset({0}))

    @classmethod
    def from_progression(cls, p: Optional[Progression]) -> "PeriodicSet1D":
        if p is None:
            return cls.empty()
        if p.count is not INF:
            return cls.finite(p.elements())
        s = abs(p.step)
        r = frozenset({p.base % s})
        if p.step > 0:
            return cls(1, frozenset(), p.base, frozenset(), p.base, s, r)
        return cls(s, r, p.base + 1, frozenset(), p.base + 1, 1, frozenset())

    @classmethod
    def linear_congruence(cls, a: int, b: int, c: int) -> "PeriodicSet1D":
        """{m : a + b*m = 0 (mod c)}; c = 0 means exact equality."""
        if c == 0:
            if b == 0:
                return cls.full() if a == 0 else cls.empty()
            return cls.finite([-a // b]) if a % b == 0 else cls.empty()
        c = abs(c)
        from math import gcd
        g = gcd(b, c)
        if a % g:
            return cls.empty()
        c2 = c // g
        if c2 == 1:
            return cls.full()
        inv = pow((b // g) % c2, -1, c2)
        return cls.residue((-a // g) * inv, c2)

    @classmethod
    def affine_ge(cls, a: int, b: int) -> "PeriodicSet1D":
        """{m : a + b*m >= 0}."""
        if b == 0:
            return cls.full() if a >= 0 else cls.empty()
        if b > 0:
            return cls.interval(-(a // b), None)  # m >= ceil(-a/b)
        return cls.interval(None, a // (-b))

    # -- queries --------------------------------------------------------

    def __contains__(self, x: int) -> bool:
        if x < self.lo:
            return (x % self.left_period) in self.left_residues
        if x >= self.hi:
            return (x % self.right_period) in self.right_residues
        return x in self.window

    def member(self, x: int) -> bool:
        return x in self

    def is_empty(self) -> bool:
        return not self.window and not self.left_residues and not self.right_residues

    def _span(self) -> tuple[int, int]:
        P = lcm(self.left_period, self.right_period)
        return self.lo - P, self.hi + P

    def min_positive(self) -> Optional[int]:
        top = max(self.hi, 1) + self.right_period
        for x in range(1, top + 1):
            if x in self:
                return x
        return None

    def smallest_magnitude(self) -> Optional[int]:
        """Member of least absolute value, ties broken toward nonnegative."""
        bound = max(abs(self.lo), abs(self.hi)) + max(self.left_period, self.right_period) + 1
        for k in range(bound + 1):
            if k in self:
                return k
            if -k in self:
                return -k
        return None

    def members_in(self, lo: int, hi: int) -> list[int]:
        return [x for x in range(lo, hi + 1) if x in self]

    def __eq__(self, other):
        if not isinstance(other, PeriodicSet1D):
            return NotImplemented
        a, b = self._span()
        c, d = other._span()
        P = lcm(self.left_period, self.right_period, other.left_period, other.right_period)
        return all((x in self) == (x in other) for x in range(min(a, c) - P, max(b, d) + P + 1))

    def __hash__(self):
        return hash((self.left_period, self.left_residues, self.right_period, self.right_residues))

    # -- boolean algebra ------------------------------------------------

    def _combine(self, other: "PeriodicSet1D", op: Callable[[bool, bool], bool]) -> "PeriodicSet1D":
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        lp = lcm(self.left_period, other.left_period)
        rp = lcm(self.right_period, other.right_period)
        lr = frozenset(
            r for r in range(lp)
            if op((r % self.left_period) in self.left_residues, (r % other.left_period) in other.left_residues)
        )
        rr = frozenset(
            r for r in range(rp)
            if op((r % self.right_period) in self.right_residues, (r % other.right_period) in other.right_residues)
        )
        win = frozenset(x for x in range(lo, hi) if op(x in self, x in other))
        return PeriodicSet1D(lp, lr, lo, win, hi, rp, rr)

    @classmethod
    def union_all(cls, sets: Iterable["PeriodicSet1D"]) -> "PeriodicSet1D":
        """Union of many sets in one pass over their common period and window."""
        sets = [x for x in sets if not x.is_empty()]
        if not sets:
            return cls.empty()
        if len(sets) == 1:
            return sets[0]
        lo = min(x.lo for x in sets)
        hi = max(x.hi for x in sets)
        lp = lcm(*(x.left_period for x in sets))
        rp = lcm(*(x.right_period for x in sets))
        lr = frozenset(r for r in range(lp)
                       if any((r % x.left_period) in x.left_residues for x in sets))
        rr = frozenset(r for r in range(rp)
                       if any((r % x.right_period) in x.right_residues for x in sets))
        win = frozenset(v for v in range(lo, hi) if any(v in x for x in sets))
        return cls(lp, lr, lo, win, hi, rp, rr)

    def union(self, other):
        return self._combine(other, lambda a, b: a or b)

    def intersect(self, other):
        return self._combine(other, lambda a, b: a and b)

    def difference(self, other):
        return self._combine(other, lambda a, b: a and not b)

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def complement(self) -> "PeriodicSet1D":
        return PeriodicSet1D(
            self.left_period, frozenset(range(self.left_period)) - self.left_residues,
            self.lo, frozenset(range(self.lo, self.hi)) - self.window, self.hi,
            self.right_period, frozenset(range(self.right_period)) - self.right_residues,
        )

    __invert__ = complement

    def shift(self, d: int) -> "PeriodicSet1D":
        """{x + d : x in self}."""
        return PeriodicSet1D(
            self.left_period, frozenset((r + d) % self.left_period for r in self.left_residues),
            self.lo + d, frozenset(x + d for x in self.window), self.hi + d,
            self.right_period, frozenset((r + d) % self.right_period for r in self.right_residues),
        )

    def negate(self) -> "PeriodicSet1D":
        """{-x : x in self}."""
        return PeriodicSet1D(
            self.right_period, frozenset((-r) % self.right_period for r in self.right_residues) if self.right_period else frozenset(),
            1 - self.hi, frozenset(-x for x in self.window), 1 - self.lo,
            self.left_period, frozenset((-r) % self.left_period for r in self.left_residues) if self.left_period else frozenset(),
        )

    def affine_image(self, scale: int, offset: int) -> "PeriodicSet1D":
        """{offset + scale*m : m in self} for nonzero scale."""
        if scale == 0:
            raise ValueError("scale must be nonzero")
        if scale < 0:
            return self.negate().affine_image(-scale, offset)
        L = scale
        lp, rp = self.left_period * L, self.right_period * L
        lr = frozenset((offset + L * r) % lp for r in self.left_residues)
        rr = frozenset((offset + L * r) % rp for r in self.right_residues)
        return PeriodicSet1D(
            lp, lr, offset + L * self.lo,
            frozenset(offset + L * x for x in self.window),
            offset + L * self.hi, rp, rr,
        )

    def preimage_affine(self, scale: int, offset: int) -> "PeriodicSet1D":
        """{m : offset + scale*m in self} for scale >= 1."""
        L = scale
        lo = (self.lo - 1 - offset) // L + 1  # m < lo  =>  offset + L*m < self.lo
        hi = -((offset - self.hi) // L)  # m >= hi  =>  offset + L*m >= self.hi
        lp = self.left_period
        rp = self.right_period
        lr = frozenset(m for m in range(lp) if ((offset + L * m) % lp) in self.left_residues)
        rr = frozenset(m for m in range(rp) if ((offset + L * m) % rp) in self.right_residues)
        win = frozenset(m for m in range(lo, hi) if (offset + L * m) in self)
        return PeriodicSet1D(lp, lr, lo, win, hi, rp, rr)

    # -- decomposition and text -----------------------------------------

    def to_progressions(self) -> list[Progression]:
        """Disjoint progressions whose union is this set."""
        out = []
        for r in sorted(self.right_residues):
            x = self.hi + (r - self.hi) % self.right_period
            out.append(Progression(x, self.right_period, INF))
        for r in sorted(self.left_residues):
            x = self.lo - 1 - (self.lo - 1 - r) % self.left_period
            out.append(Progression(x, -self.left_period, INF))
        run = []
        for x in sorted(self.window):
            if run and x != run[-1] + 1:
                out.append(Progression(run[0], 1, len(run)))
                run = []
            run.append(x)
        if run:
            out.append(Progression(run[0], 1, len(run)))
        return out

    def __str__(self):
        def tail(p, rs):
            return f"{p}:{{{','.join(map(str, sorted(rs)))}}}"
        return (f"periodic(left={tail(self.left_period, self.left_residues)}@{self.lo}, "
                f"window=[{','.join(map(str, sorted(self.window)))}], "
                f"right={tail(self.right_period, self.right_residues)}@{self.hi})")

    __repr__ = __str__

    @classmethod
    def parse(cls, text: str) -> "PeriodicSet1D":
        m = _PERIODIC_RE.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"not a periodic set: {text!r}")

        def ints(s):
            return frozenset(int(v) for v in s.split(",") if v.strip())

        return cls(int(m["lp"]), ints(m["lr"]), int(m["lo"]), ints(m["win"]), int(m["hi"]),
                   int(m["rp"]), ints(m["rr"]))


_PERIODIC_RE = re.compile(
    r"periodic\(\s*left=(?P<lp>\d+):\{(?P<lr>[-\d,\s]*)\}@(?P<lo>-?\d+)\s*,"
    r"\s*window=\[(?P<win>[-\d,\s]*)\]\s*,"
    r"\s*right=(?P<rp>\d+):\{(?P<rr>[-\d,\s]*)\}@(?P<hi>-?\d+)\s*\)"
)


# functional aliases
def ps_member(s: PeriodicSet1D, x: int) -> bool:
    return x in s


def ps_union(a, b):
    return a.union(b)


def ps_intersect(a, b):
    return a.intersect(b)


def ps_complement(a):
    return a.complement()


def ps_shift(a, d):
    return a.shift(d)


def ps_min_positive(a):
    return a.min_positive()


def ps_is_empty(a):
    return a.is_empty()
