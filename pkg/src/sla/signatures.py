"""Finite descriptions of equivariant equivalence relations on state spaces.

A signature ``(sim, diff, char)`` partitions the state orbits into classes,
gives each class a collapse modulus ``char`` and each pair of related orbits
an offset ``diff``.  It denotes the equivalence generated by

    (tau, i) ~ (tau, i + char(class))      (tau, i) ~ (sigma, i + diff(tau, sigma))

so ``e1 ~ e2`` iff the orbits are related and ``value(e2) - value(e1)`` is
``diff(orbit(e1), orbit(e2))`` modulo the class char (mod 0 is equality).

Internally each orbit gets an offset relative to its class representative
(the least orbit id), ``off[tau] = diff(rep, tau)``, and an element's
position in its class is ``value - off[orbit]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .atoms import Element, OrbitFiniteSet, canonicalize
from .automata import EquivariantDFA, validate
from .periodic import PeriodicSet1D
from .semilinear import (PiecewiseAffineMap, Piece, Progression, crt_pair, lcm, pw_eval)


class InvalidSignature(ValueError):
    pass


class NotACongruence(ValueError):
    pass


class RefinementInconsistency(AssertionError):
    pass


def _mod(x: int, c: int) -> int:
    return x % c if c else x


class EquivalenceSignature:
    __slots__ = ("classes", "chars", "diffs", "_cls", "_off", "_problems")

    def __init__(self, classes: Iterable[Iterable[str]], chars: Iterable[int],
                 diffs: Mapping[tuple, int] = ()):
        classes = [tuple(sorted(c)) for c in classes]
        chars = list(chars)
        if len(chars) != len(classes):
            raise InvalidSignature(f"{len(classes)} classes but {len(chars)} chars")
        order = sorted(range(len(classes)), key=lambda i: classes[i][0] if classes[i] else "")
        self.classes = tuple(classes[i] for i in order)
        self.chars = tuple(chars[i] for i in order)
        self.diffs = dict(diffs)
        self._cls = {}
        self._problems = []
        for ci, c in enumerate(self.classes):
            for tau in c:
                if tau in self._cls:
                    self._problems.append(f"orbit {tau!r} appears in two classes")
                self._cls[tau] = ci
        self._off = self._offsets()

    # -- construction helpers ---------------------------------------------

    @classmethod
    def from_offsets(cls, classes, chars, offsets: Mapping[str, int]) -> "EquivalenceSignature":
        diffs = {}
        for c, ch in zip(classes, chars):
            c = sorted(c)
            for tau in c[1:]:
                diffs[c[0], tau] = _mod(offsets.get(tau, 0) - offsets.get(c[0], 0), ch)
        return cls(classes, chars, diffs)

    @classmethod
    def identity(cls, states: OrbitFiniteSet) -> "EquivalenceSignature":
        return cls([[o.id] for o in states], [o.characteristic for o in states], {})

    @classmethod
    def by_acceptance(cls, d: EquivariantDFA) -> "EquivalenceSignature":
        """The length-0 equivalence: accepting vs rejecting, everything collapsed."""
        acc = [t for t in d.states.ids if t in d.accepting]
        rej = [t for t in d.states.ids if t not in d.accepting]
        classes = [c for c in (acc, rej) if c]
        return cls.from_offsets(classes, [1] * len(classes), {})

    def _offsets(self) -> dict:
        off = {}
        adj: dict = {}
        for (a, b), v in self.diffs.items():
            adj.setdefault(a, []).append((b, v))
            adj.setdefault(b, []).append((a, -v))
        for ci, c in enumerate(self.classes):
            if not c:
                continue
            off[c[0]] = 0
            queue = deque([c[0]])
            while queue:
                a = queue.popleft()
                for b, v in adj.get(a, ()):
                    if b not in off and self._cls.get(b) == ci:
                        off[b] = off[a] + v
                        queue.append(b)
            for tau in c:
                if tau not in off:
                    self._problems.append(f"no diff connects {tau!r} to {c[0]!r}")
                    off[tau] = 0
        return off

    # -- queries ----------------------------------------------------------

    def class_index(self, tau: str) -> int:
        return self._cls[tau]

    def rep(self, tau: str) -> str:
        return self.classes[self._cls[tau]][0]

    def char_of(self, tau: str) -> int:
        return self.chars[self._cls[tau]]

    def offset(self, tau: str) -> int:
        return self._off[tau]

    def related(self, tau: str, sigma: str) -> bool:
        return self._cls[tau] == self._cls[sigma]

    def diff(self, tau: str, sigma: str) -> int:
        return _mod(self._off[sigma] - self._off[tau], self.char_of(tau))

    def position(self, e: Element) -> tuple[int, int]:
        """(class index, position) with e1 ~ e2 iff positions agree."""
        ci = self._cls[e.orbit]
        return ci, _mod(e.value - self._off[e.orbit], self.chars[ci])

    def __eq__(self, other):
        if not isinstance(other, EquivalenceSignature):
            return NotImplemented
        if self.classes != other.classes or self.chars != other.chars:
            return False
        return all(self.diff(c[0], t) == other.diff(c[0], t) for c in self.classes for t in c)

    def __hash__(self):
        return hash((self.classes, self.chars))

    def __repr__(self):
        return f"EquivalenceSignature({self.classes}, {self.chars}, {self.diffs})"


def check_signature(phi: EquivalenceSignature, states: OrbitFiniteSet) -> list[str]:
    diags = list(phi._problems)
    ids = set(states.ids)
    seen = set(phi._cls)
    for tau in sorted(seen - ids):
        diags.append(f"class member {tau!r} is not a state orbit")
    for tau in sorted(ids - seen):
        diags.append(f"state orbit {tau!r} is in no class")
    for ci, c in enumerate(phi.classes):
        ch = phi.chars[ci]
        if not isinstance(ch, int) or ch < 0:
            diags.append(f"class {list(c)}: char {ch!r} is not a natural number")
            continue
        for tau in c:
            if tau not in ids:
                continue
            k = states.char(tau)
            if (ch == 0 and k != 0) or (ch and k % ch):
                diags.append(f"class {list(c)}: orbit {tau} has characteristic {k}, not 0 mod {ch}")
    for (a, b), v in phi.diffs.items():
        if a not in phi._cls or b not in phi._cls:
            continue
        if not phi.related(a, b):
            diags.append(f"diff given for unrelated orbits ({a}, {b})")
            continue
        ch = phi.char_of(a)
        if _mod(phi._off[b] - phi._off[a] - v, ch) != 0:
            if a == b:
                diags.append(f"diff({a}, {a}) = {v} is not 0 mod {ch}")
            else:
                diags.append(f"cocycle violated at ({a}, {b}): diff {v} inconsistent mod {ch}")
    return diags


def _require_valid(phi, states):
    diags = check_signature(phi, states)
    if diags:
        raise InvalidSignature("; ".join(diags))


def equiv(phi: EquivalenceSignature, e1: Element, e2: Element) -> bool:
    if not phi.related(e1.orbit, e2.orbit):
        return False
    return phi.position(e1) == phi.position(e2)


def is_nontrivial(phi: EquivalenceSignature, states: OrbitFiniteSet) -> bool:
    for ci, c in enumerate(phi.classes):
        if len(c) >= 2:
            return True
        k = states.char(c[0])
        if phi.chars[ci] != k:
            return True
    return False


def respects_accepting(phi: EquivalenceSignature, d: EquivariantDFA) -> bool:
    return all(len({t in d.accepting for t in c}) <= 1 for c in phi.classes)


# --------------------------------------------------------------------------
# shift sets


def _z_pieces(m: PiecewiseAffineMap, k: int) -> list[tuple]:
    """Pieces as (base, step, count, target, coeff, offset) covering all of Z.

    A map out of a finite orbit Z_k is constant on residue classes mod k, so
    each point of [0, k) becomes two one-sided classes with a constant value.
    """
    if k == 0:
        return [(pc.prog.base, pc.prog.step, pc.prog.count, pc.target, pc.coeff, pc.offset)
                for pc in m.pieces]
    out = []
    for pc in m.pieces:
        for t in range(pc.prog.count):
            x = pc.prog.at(t)
            v = pc.value_at(t)
            out.append((x, k, None, pc.target, 0, v))
            out.append((x - k, -k, None, pc.target, 0, v))
    return out


def _bounds(base, step, count):
    if count is None:
        return (base, None) if step > 0 else (None, base)
    last = base + step * (count - 1)
    return min(base, last), max(base, last)


@lru_cache(maxsize=65536)
def _pair_cases(P, Q) -> tuple:
    return tuple(_iter_pair_cases(P, Q))


def _iter_pair_cases(P, Q):
    """Split the shifts D = r + L*m for a piece pair into affine cases.

    Each case is (r, L, regime, nonempty, several, tp, tq, slack0, slack1).
    ``regime`` is a list of (a, b) meaning a + b*m >= 0; ``nonempty`` and
    ``several`` are such pairs, or None when always true.  slack0 and slack1
    are (a, b) giving the value gap at the first two overlapping arguments,
    before the target offset is subtracted.
    """
    bx, sx, nx, tp, ap, cp = P
    by, sy, ny, tq, aq, cq = Q
    L = lcm(sx, sy)
    xlo, xhi = _bounds(bx, sx, nx)
    ylo, yhi = _bounds(by, sy, ny)
    for r in range(L):
        sol = crt_pair(bx % abs(sx), abs(sx), (by - r) % abs(sy), abs(sy))
        if sol is None:
            continue
        ar = sol[0]
        # max(xlo, ylo - D) is xlo iff D >= ylo - xlo; dually for the upper end
        lo_choices = [("x", [])] if ylo is None else (
            [("y", [])] if xlo is None else
            [("x", [(r - (ylo - xlo), L)]), ("y", [((ylo - xlo) - r - 1, -L)])])
        hi_choices = [("x", [])] if yhi is None else (
            [("y", [])] if xhi is None else
            [("x", [((yhi - xhi) - r, -L)]), ("y", [(r - (yhi - xhi) - 1, L)])])
        for lk, lcon in lo_choices:
            for hk, hcon in hi_choices:
                regime = lcon + hcon
                if _conds_bounds(regime) is False:
                    continue

                def lo(m, lk=lk):
                    if lk == "x":
                        return xlo
                    return None if ylo is None else ylo - r - L * m

                def hi(m, hk=hk):
                    if hk == "x":
                        return xhi
                    return None if yhi is None else yhi - r - L * m

                def first(m):
                    l, h = lo(m), hi(m)
                    if l is not None:
                        return l + (ar - l) % L, L
                    if h is not None:
                        return h - (h - ar) % L, -L
                    return ar, L

                def count(m):
                    l, h = lo(m), hi(m)
                    if l is None or h is None:
                        return None
                    x0 = l + (ar - l) % L
                    return (h - x0) // L + 1

                def slack(i, m):
                    u = (i + r + L * m - by) // sy
                    t = (i - bx) // sx
                    return aq * u + cq - ap * t - cp

                n0, n1 = count(0), count(1)
                if n0 is None:
                    nonempty = several = None
                else:
                    nonempty, several = (n0 - 1, n1 - n0), (n0 - 2, n1 - n0)
                x00, st0 = first(0)
                x01, _ = first(1)
                h0 = (slack(x00, 0), slack(x01, 1))
                h1 = (slack(x00 + st0, 0), slack(x01 + st0, 1))
                yield (r, L, regime, nonempty, several, tp, tq,
                       (h0[0], h0[1] - h0[0]), (h1[0], h1[1] - h1[0]))


def _conds_bounds(conds):
    """Bounds (lo, hi) of {m : a + b*m >= 0 for every (a, b)}; None = unbounded,
    False when some condition has no solution at all."""
    lo = hi = None
    for a, b in conds:
        if b == 0:
            if a < 0:
                return False
        elif b > 0:
            v = -(a // b)
            lo = v if lo is None else max(lo, v)
        else:
            v = a // (-b)
            hi = v if hi is None else min(hi, v)
    if lo is not None and hi is not None and lo > hi:
        return False
    return lo, hi


def _conds_set(conds) -> PeriodicSet1D:
    bounds = _conds_bounds(conds)
    if bounds is False:
        return PeriodicSet1D.empty()
    return PeriodicSet1D.interval(*bounds)


def _pair_bad_sets(P, Q, phi: EquivalenceSignature):
    """Sets of shifts D for which piece P of f and piece Q of g witness a violation."""
    related = phi.related(P[3], Q[3])
    if related and phi.char_of(P[3]) == 1:
        return
    for r, L, regime, nonempty, several, tp, tq, s0, s1 in _pair_cases(P, Q):
        conds = regime + ([nonempty] if nonempty else [])
        if _conds_bounds(conds) is False:
            continue
        hit = _conds_set(conds)
        if related:
            c = phi.char_of(tp)
            td = phi.diff(tp, tq)
            ok0 = PeriodicSet1D.linear_congruence(s0[0] - td, s0[1], c)
            ok1 = PeriodicSet1D.linear_congruence(s1[0] - td, s1[1], c)
            many = _conds_set([several]) if several else PeriodicSet1D.full()
            hit = hit & ~(ok0 & ((~many) | ok1))
            if hit.is_empty():
                continue
        yield hit.affine_image(L, r)


def _pair_bad_set(P, Q, phi: EquivalenceSignature) -> PeriodicSet1D:
    return PeriodicSet1D.union_all(_pair_bad_sets(P, Q, phi))


def _tabulated_shift_set(f, g, kf, kg, phi, states) -> PeriodicSet1D:
    K = lcm(kf, kg)
    fv = [phi.position(pw_eval(f, i, states)) for i in range(kf)]
    gv = [phi.position(pw_eval(g, i, states)) for i in range(kg)]
    good = [D for D in range(K) if all(fv[i % kf] == gv[(i + D) % kg] for i in range(K))]
    out = PeriodicSet1D.empty()
    for D in good:
        out = out | PeriodicSet1D.residue(D, K)
    return out


def shift_set(f: PiecewiseAffineMap, g: PiecewiseAffineMap, phi: EquivalenceSignature,
              states: OrbitFiniteSet) -> PeriodicSet1D:
    """Exact set of D with f(tau, i) ~ g(sigma, i + D) for every integer i."""
    kf, kg = states.char(f.source), states.char(g.source)
    if kf and kg:
        return _tabulated_shift_set(f, g, kf, kg, phi, states)
    bad = [b for P in _z_pieces(f, kf) for Q in _z_pieces(g, kg) for b in _pair_bad_sets(P, Q, phi)]
    return ~PeriodicSet1D.union_all(bad)


def shift_holds(f, g, phi, states, D: int, window: Iterable[int]) -> bool:
    """Direct check of the shift condition for one D over explicit arguments."""
    return all(equiv(phi, pw_eval(f, i, states), pw_eval(g, i + D, states)) for i in window)


# --------------------------------------------------------------------------
# congruences, quotients and refinement


def is_congruence(d: EquivariantDFA, phi: EquivalenceSignature) -> bool:
    _require_valid(phi, d.states)
    cache: dict = {}

    def S(tau, sigma, alpha):
        key = (tau, sigma, alpha)
        if key not in cache:
            cache[key] = shift_set(d.map_for(tau, alpha), d.map_for(sigma, alpha), phi, d.states)
        return cache[key]

    for tau in d.states.ids:
        c = phi.char_of(tau)
        if c == 0:
            continue
        for alpha in d.alphabet.ids:
            if c not in S(tau, tau, alpha):
                return False
    for cl in phi.classes:
        rho = cl[0]
        for sigma in cl[1:]:
            for alpha in d.alphabet.ids:
                if phi.diff(rho, sigma) not in S(rho, sigma, alpha):
                    return False
    return True


class QuotientMap:
    """The element map (tau, x) -> (class, (x - off[tau]) mod char)."""

    def __init__(self, phi: EquivalenceSignature, quotient_states: OrbitFiniteSet):
        self.phi = phi
        self.states = quotient_states

    def __call__(self, e: Element) -> Element:
        return canonicalize(Element(self.phi.rep(e.orbit), e.value - self.phi.offset(e.orbit)),
                            self.states)

    def describe(self) -> dict:
        return {tau: (self.phi.rep(tau), self.phi.offset(tau), self.phi.char_of(tau))
                for cl in self.phi.classes for tau in cl}


def quotient(d: EquivariantDFA, phi: EquivalenceSignature, check: bool = True):
    """The quotient automaton, one orbit per class named after its least orbit id."""
    _require_valid(phi, d.states)
    if check:
        if not respects_accepting(phi, d):
            raise NotACongruence("signature mixes accepting and rejecting orbits")
        if not is_congruence(d, phi):
            raise NotACongruence("signature is not a congruence of the automaton")
    from .atoms import Orbit
    qstates = OrbitFiniteSet(Orbit(cl[0], ch) for cl, ch in zip(phi.classes, phi.chars))
    f = QuotientMap(phi, qstates)
    trans = {}
    for cl, c in zip(phi.classes, phi.chars):
        rho = cl[0]
        for alpha in d.alphabet.ids:
            m = d.map_for(rho, alpha)
            if c >= 1:
                pieces = []
                for y in range(c):
                    e = f(pw_eval(m, y, d.states))
                    pieces.append(Piece(Progression(y, 1, 1), e.orbit, 0, e.value))
            else:
                pieces = [Piece(pc.prog, phi.rep(pc.target), pc.coeff, pc.offset - phi.offset(pc.target))
                          for pc in m.pieces]
            trans[rho, alpha] = PiecewiseAffineMap(rho, tuple(pieces))
    accepting = {phi.rep(t) for t in d.accepting}
    out = EquivariantDFA(qstates, d.alphabet, trans, f(d.initial), accepting, d.name)
    return out, f


def refine(d: EquivariantDFA, phi: EquivalenceSignature) -> EquivalenceSignature:
    """One step of partition refinement: equivalence up to one more letter."""
    _require_valid(phi, d.states)
    ids = d.states.ids
    E: dict = {}
    for tau in ids:
        for sigma in ids:
            if not phi.related(tau, sigma):
                continue
            c = phi.char_of(tau)
            s = PeriodicSet1D.residue(phi.diff(tau, sigma), c)
            for alpha in d.alphabet.ids:
                s = s & shift_set(d.map_for(tau, alpha), d.map_for(sigma, alpha), phi, d.states)
                if s.is_empty():
                    break
            E[tau, sigma] = s
    new_char = {}
    for tau in ids:
        mp = E[tau, tau].min_positive()
        new_char[tau] = mp if mp is not None else 0
    classes: list[list[str]] = []
    placed = set()
    for tau in ids:
        if tau in placed:
            continue
        cl = [s for s in ids if (tau, s) in E and not E[tau, s].is_empty()]
        for s in cl:
            if s in placed:
                raise RefinementInconsistency(f"orbit {s} related to two classes")
            if new_char[s] != new_char[tau]:
                raise RefinementInconsistency(f"chars differ inside a class: {tau}, {s}")
            for s2 in cl:
                if E[s, s2].is_empty():
                    raise RefinementInconsistency(f"relation not transitive at {s}, {s2}")
        placed.update(cl)
        classes.append(cl)
    chars, diffs = [], {}
    for cl in classes:
        rho = min(cl)
        chars.append(new_char[rho])
        for s in cl:
            if s != rho:
                diffs[rho, s] = E[rho, s].smallest_magnitude()
    out = EquivalenceSignature(classes, chars, diffs)
    diags = check_signature(out, d.states)
    if diags:
        raise RefinementInconsistency("; ".join(diags))
    return out


def refinement_chain(d: EquivariantDFA, steps: int) -> list[EquivalenceSignature]:
    chain = [EquivalenceSignature.by_acceptance(d)]
    for _ in range(steps):
        chain.append(refine(d, chain[-1]))
    return chain
