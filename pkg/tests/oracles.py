"""Brute-force reference implementations used by the tests.

None of these reuse the decision procedures under test: they enumerate.
"""

from __future__ import annotations

import itertools
import random
from math import gcd
from pathlib import Path

import numpy as np

from sla.atoms import Element
from sla.automata import step
from sla.epad import And, Div, Eq, Le, LinearTerm, Not
from sla.semilinear import lcm, pw_eval

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_files():
    return sorted(CORPUS.glob("*.aut"))


# --------------------------------------------------------------------------
# words


def accepted_words(d, letters, max_len):
    """Yield (word, accepted) for every word over ``letters`` up to max_len,
    running the automaton once per prefix."""
    stack = [((), d.initial)]
    while stack:
        word, q = stack.pop()
        yield word, q.orbit in d.accepting
        if len(word) < max_len:
            for a in letters:
                stack.append((word + (a,), step(d, q, a)))


def letter_sample(d, values=range(-2, 3)):
    out = []
    for o in d.alphabet:
        vals = sorted({v % o.characteristic for v in values}) if o.characteristic else list(values)
        out += [Element(o.id, v) for v in vals]
    return out


def language_table(d, letters, max_len):
    return dict(accepted_words(d, letters, max_len))


def in_diffk(word, K) -> bool:
    return all((word[i + 1].value - word[i].value) in K for i in range(len(word) - 1))


# --------------------------------------------------------------------------
# shift sets


def shift_set_by_table(f, g, phi, states, deltas, margin):
    """D -> [for all i: f(i) ~ g(i + D)] over a window padded by ``margin``
    around every breakpoint and shift."""
    pts = f.endpoints() + g.endpoints() + [0]
    span = max(abs(D) for D in deltas)
    lo, hi = min(pts) - span - margin, max(pts) + span + margin

    def table(m, a, b):
        keys = [(phi.class_index(e.orbit), phi.position(e)[1])
                for e in (pw_eval(m, i, states) for i in range(a, b + 1))]
        return np.array(keys, dtype=np.int64).reshape(-1, 2)

    fk = table(f, lo, hi)
    gk = table(g, lo - span, hi + span)
    n = hi - lo + 1
    return {D: bool(np.array_equal(fk, gk[span + D: span + D + n])) for D in deltas}


def pieces_lcm(f, g, phi, states, tau, sigma):
    steps = [abs(s) for s in f.steps() + g.steps()]
    steps += [c for c in phi.chars if c] + [states.char(tau), states.char(sigma)]
    return lcm(*[s for s in steps if s]) or 1


# --------------------------------------------------------------------------
# signatures


def random_signature(rng: random.Random, states):
    """A valid signature: random partition, a char dividing every finite
    member characteristic, random offsets."""
    ids = list(states.ids)
    rng.shuffle(ids)
    classes = []
    while ids:
        k = rng.randint(1, len(ids))
        classes.append(ids[:k])
        ids = ids[k:]
    chars, offsets = [], {}
    for cl in classes:
        g = 0
        for t in cl:
            g = gcd(g, states.char(t))
        if g:
            ch = rng.choice([c for c in range(1, g + 1) if g % c == 0])
        else:
            ch = rng.choice([0, 0, 1, 2, 3, rng.randint(1, 12)])
        chars.append(ch)
        for t in cl:
            offsets[t] = rng.randint(-10, 10)
    from sla.signatures import EquivalenceSignature
    return EquivalenceSignature.from_offsets(classes, chars, offsets)


def related_by_generators(phi, states, e1: Element, e2: Element, window: int = 80) -> bool:
    """Reachability from e1 to e2 under the generating moves
    (tau, i) -> (tau, i +- char) and (tau, i) -> (sigma, i + diff(tau, sigma)),
    restricted to values in [-window, window]."""
    from collections import deque

    from sla.atoms import canonicalize

    moves = {}
    for (a, b), v in phi.diffs.items():
        moves.setdefault(a, []).append((b, v))
        moves.setdefault(b, []).append((a, -v))
    start = canonicalize(e1, states)
    goal = canonicalize(e2, states)
    seen = {start}
    queue = deque([start])
    while queue:
        e = queue.popleft()
        if e == goal:
            return True
        c = phi.char_of(e.orbit)
        nxt = [(e.orbit, e.value + c), (e.orbit, e.value - c)] if c else []
        nxt += [(b, e.value + v) for b, v in moves.get(e.orbit, ())]
        for orbit, val in nxt:
            if abs(val) > window:
                continue
            n = canonicalize(Element(orbit, val), states)
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return False


# --------------------------------------------------------------------------
# EPAD


VARS = ("x", "y", "z")


def random_literal(rng: random.Random, names, coef=5, const=30, moduli=(2, 3, 4, 5, 6)):
    k = rng.randint(1, len(names))
    used = rng.sample(list(names), k)
    t = LinearTerm({v: rng.choice([c for c in range(-coef, coef + 1) if c]) for v in used},
                   rng.randint(-const, const))
    kind = rng.random()
    if kind < 0.4:
        return Le(t, 0)
    if kind < 0.55:
        return Eq(t, 0)
    if kind < 0.85:
        return Div(rng.choice(moduli), t)
    return Not(Div(rng.choice(moduli), t))


def random_conjunction(rng: random.Random, names=VARS, n_lits=(1, 5), **kw):
    return And(*[random_literal(rng, names, **kw) for _ in range(rng.randint(*n_lits))])


def _lit_mask(lit, cols):
    """Evaluate a literal on numpy columns; cols maps var -> array."""
    neg = isinstance(lit, Not)
    a = lit.arg if neg else lit
    if isinstance(a, Div):
        t = a.dividend
    else:
        t = a.lhs - a.rhs
    size = len(next(iter(cols.values())))
    val = np.full(size, t.constant, dtype=np.int64)
    for v, c in t.coeffs:
        val = val + c * cols[v]
    if isinstance(a, Le):
        out = val <= 0
    elif isinstance(a, Eq):
        out = val == 0
    else:
        m = abs(a.divisor.constant)
        out = (val % m == 0) if m else (val == 0)
    return ~out if neg else out


_GRIDS: dict = {}


def _grid(box):
    if box not in _GRIDS:
        rng = np.arange(-box, box + 1, dtype=np.int64)
        X, Y = np.meshgrid(rng, rng, indexing="ij")
        _GRIDS.clear()
        _GRIDS[box] = (X.ravel(), Y.ravel())
    return _GRIDS[box]


def box_satisfiable(conj, box: int) -> bool:
    """Exhaustive search of the conjunction over [-box, box]^vars.

    Two variables are enumerated as a grid; a third is resolved exactly per
    grid point from its bounds, equalities and residues.
    """
    lits = list(conj.args)
    names = sorted({v for lit in lits for v in _term(lit).variables})
    X, Y = _grid(box)
    if len(names) <= 2:
        names = names + [n for n in ("_a", "_b") if n not in names][: 2 - len(names)]
        cols = {names[0]: X, names[1]: Y}
        mask = np.ones(X.size, dtype=bool)
        for lit in lits:
            mask &= _lit_mask(lit, cols)
            if not mask.any():
                return False
        return bool(mask.any())
    assert len(names) == 3
    x, y, z = names
    cols = {x: X, y: Y}
    lo = np.full(X.size, -box, dtype=np.int64)
    hi = np.full(X.size, box, dtype=np.int64)
    alive = np.ones(X.size, dtype=bool)
    residue_lits = []
    for lit in lits:
        t = _term(lit)
        a = dict(t.coeffs).get(z, 0)
        if a == 0:
            alive &= _lit_mask(lit, cols)
            continue
        rest = np.full(X.size, t.constant, dtype=np.int64)
        for v, c in t.coeffs:
            if v != z:
                rest = rest + c * cols[v]
        base = lit.arg if isinstance(lit, Not) else lit
        if isinstance(base, Le):
            # a*z + rest <= 0
            if a > 0:
                hi = np.minimum(hi, np.floor_divide(-rest, a))
            else:
                lo = np.maximum(lo, -np.floor_divide(-rest, -a))
        elif isinstance(base, Eq):
            ok = (-rest) % a == 0
            alive &= ok
            v = np.where(ok, (-rest) // a, 0)
            lo = np.maximum(lo, v)
            hi = np.minimum(hi, v)
        else:
            residue_lits.append((lit, a, rest))
    alive &= lo <= hi
    if not alive.any():
        return False
    M = 1
    for lit, a, rest in residue_lits:
        base = lit.arg if isinstance(lit, Not) else lit
        M = lcm(M, abs(base.divisor.constant))
    found = np.zeros(X.size, dtype=bool)
    for r in range(M):
        z0 = lo + np.mod(r - lo, M)
        ok = alive & (z0 <= hi)
        for lit, a, rest in residue_lits:
            base = lit.arg if isinstance(lit, Not) else lit
            m = abs(base.divisor.constant)
            sat = (a * r + rest) % m == 0
            ok &= ~sat if isinstance(lit, Not) else sat
        found |= ok
        if found.any():
            return True
    return False


def _term(lit):
    a = lit.arg if isinstance(lit, Not) else lit
    return a.dividend if isinstance(a, Div) else a.lhs - a.rhs


def scan_displayed_system(bound: int):
    """All (x, y) with |x|, |y| <= bound and 3x = 3 (mod y), 5y = 7 (mod x), 2x = y - 18.
    Divisibility by 0 means equality."""
    out = []
    for xv in range(-bound, bound + 1):
        ys = np.arange(-bound, bound + 1, dtype=np.int64)
        ok = 2 * xv == ys - 18
        a = 3 * xv - 3
        ok &= np.where(ys == 0, a == 0, np.mod(a, np.where(ys == 0, 1, ys)) == 0)
        b = 5 * ys - 7
        ok &= (b == 0) if xv == 0 else (np.mod(b, xv) == 0)
        out += [(xv, int(yv)) for yv in ys[ok]]
    return out


def words_up_to(letters, n):
    for k in range(n + 1):
        yield from itertools.product(letters, repeat=k)
