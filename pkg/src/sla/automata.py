"""Equivariant DFAs and NFAs over the integer atoms.

A DFA stores one piecewise-affine map per (state orbit, letter orbit).  The
map is read in difference coordinates: reading letter ``(alpha, v)`` in
state ``(tau, x)`` evaluates the map at ``x - v`` and translates the result
back by ``v``.  This is the translation-equivariant lift of the transition
on the representative letter ``(alpha, 0)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .atoms import Element, OrbitFiniteSet, UnknownOrbit, act, canonicalize, is_canonical
from .semilinear import (LinearSetUnion, MapStructureError, PiecewiseAffineMap, Piece,
                         check_window, pw_eval)

Letter = Element
Word = list


class MissingTransition(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class EquivariantDFA:
    states: OrbitFiniteSet
    alphabet: OrbitFiniteSet
    transitions: dict
    initial: Element
    accepting: frozenset
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "transitions", dict(self.transitions))

    def __eq__(self, other):
        if not isinstance(other, EquivariantDFA):
            return NotImplemented
        return (self.states == other.states and self.alphabet == other.alphabet
                and self.transitions == other.transitions and self.initial == other.initial
                and self.accepting == other.accepting)

    __hash__ = None

    def map_for(self, tau: str, alpha: str) -> PiecewiseAffineMap:
        try:
            return self.transitions[tau, alpha]
        except KeyError:
            raise MissingTransition((tau, alpha)) from None


@dataclass(frozen=True, eq=False)
class EquivariantNFA:
    """Relations per orbit triple (tau, alpha, sigma), each a 2-dimensional
    linear-set union over (value(a) - value(q), value(p) - value(q))."""

    states: OrbitFiniteSet
    alphabet: OrbitFiniteSet
    relations: dict
    initial: frozenset
    accepting: frozenset
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "relations", dict(self.relations))

    def __eq__(self, other):
        if not isinstance(other, EquivariantNFA):
            return NotImplemented
        return (self.states == other.states and self.alphabet == other.alphabet
                and self.relations == other.relations and self.initial == other.initial
                and self.accepting == other.accepting)

    __hash__ = None


def step(d: EquivariantDFA, q: Element, a: Letter) -> Element:
    d.states[q.orbit]
    ell = d.alphabet.char(a.orbit)
    v = a.value % ell if ell else a.value
    m = d.map_for(q.orbit, a.orbit)
    out = pw_eval(m, q.value - v, d.states)
    return act(out, v, d.states)


def run(d: EquivariantDFA, word: Iterable[Letter], start: Optional[Element] = None) -> Element:
    q = d.initial if start is None else start
    for a in word:
        q = step(d, q, a)
    return q


def accepts(d: EquivariantDFA, word: Iterable[Letter]) -> bool:
    return run(d, word).orbit in d.accepting


def successors(auto, tau: str) -> set[str]:
    if isinstance(auto, EquivariantNFA):
        return {s for (t, _, s), r in auto.relations.items() if t == tau and r.components}
    out = set()
    for alpha in auto.alphabet.ids:
        out |= auto.map_for(tau, alpha).targets()
    return out


def reachability_chain(auto, initial: Optional[Iterable[str]] = None) -> list[frozenset]:
    """The chain Q0 <= Q1 <= ... of orbit sets, up to and including the fixpoint."""
    if initial is None:
        initial = auto.initial if isinstance(auto, EquivariantNFA) else {auto.initial.orbit}
    cur = frozenset(initial)
    chain = [cur]
    while True:
        nxt = set(cur)
        for tau in cur:
            nxt |= successors(auto, tau)
        nxt = frozenset(nxt)
        if nxt == cur:
            return chain
        chain.append(nxt)
        cur = nxt


def reachable_orbits(auto, initial: Optional[Iterable[str]] = None) -> frozenset:
    return reachability_chain(auto, initial)[-1]


def is_empty(auto) -> bool:
    return not (reachable_orbits(auto) & auto.accepting)


def find_word(d: EquivariantDFA) -> Optional[list[Letter]]:
    """A concrete accepted word, or None when the language is empty."""
    start = d.initial.orbit
    parent: dict = {start: None}
    queue = deque([start])
    goal = start if start in d.accepting else None
    while queue and goal is None:
        tau = queue.popleft()
        for alpha in d.alphabet.ids:
            for pc in d.map_for(tau, alpha).pieces:
                if pc.target not in parent:
                    parent[pc.target] = (tau, alpha, pc)
                    if pc.target in d.accepting:
                        goal = pc.target
                        break
                    queue.append(pc.target)
            if goal is not None:
                break
    if goal is None:
        return None
    path = []
    node = goal
    while parent[node] is not None:
        tau, alpha, pc = parent[node]
        path.append((alpha, pc))
        node = tau
    path.reverse()
    word = []
    q = d.initial
    for alpha, pc in path:
        ell = d.alphabet.char(alpha)
        y = pc.prog.base
        v = q.value - y
        if ell:
            v %= ell
        a = Element(alpha, v)
        q = step(d, q, a)
        if q.orbit != pc.target:
            raise MapStructureError(f"piece {pc} did not fire as expected")
        word.append(a)
    return word


def trim(d: EquivariantDFA) -> EquivariantDFA:
    keep = reachable_orbits(d)
    if keep == frozenset(d.states.ids):
        return d
    trans = {(t, a): m for (t, a), m in d.transitions.items() if t in keep}
    return EquivariantDFA(d.states.restrict(keep), d.alphabet, trans, d.initial,
                          d.accepting & keep, d.name)


def _coverage_points(m: PiecewiseAffineMap, k: int, extra=()) -> range:
    if k >= 1:
        return range(k)
    return check_window([m], extra)


def validate_map(m: PiecewiseAffineMap, states: OrbitFiniteSet, letter_char: int = 0,
                 label: str = "") -> list[str]:
    diags = []
    where = f"transition {label}: " if label else ""
    try:
        k = states.char(m.source)
    except UnknownOrbit:
        return [f"{where}unknown source orbit {m.source!r}"]
    for pc in m.pieces:
        if pc.target not in states:
            diags.append(f"{where}piece {pc} targets unknown orbit {pc.target!r}")
        if k >= 1:
            p = pc.prog
            if p.infinite or min(p.base, p.last) < 0 or max(p.base, p.last) >= k:
                diags.append(f"{where}piece {p} leaves the residue range [0, {k})")
    if diags:
        return diags
    for x in _coverage_points(m, k, (letter_char,)):
        try:
            m.locate(x)
        except MapStructureError as e:
            diags.append(f"{where}{str(e).split(': ', 1)[-1]}")
            return diags
    if letter_char >= 1:
        for x in _coverage_points(m, k, (letter_char,)):
            lhs = pw_eval(m, x + letter_char, states)
            rhs = act(pw_eval(m, x, states), letter_char, states)
            if lhs != rhs:
                diags.append(f"{where}does not commute with translation by {letter_char} at x = {x}"
                             f" ({lhs} != {rhs})")
                break
    return diags


def validate(d) -> list[str]:
    if isinstance(d, EquivariantNFA):
        return _validate_nfa(d)
    diags = []
    if d.initial.orbit not in d.states:
        diags.append(f"initial element {d.initial} is not in a state orbit")
    elif not is_canonical(d.initial, d.states):
        diags.append(f"initial element {d.initial} is not canonical")
    for f in sorted(d.accepting - set(d.states.ids)):
        diags.append(f"accepting orbit {f!r} is not a state orbit")
    for key in d.transitions:
        if key[0] not in d.states or key[1] not in d.alphabet:
            diags.append(f"transition {key} mentions unknown orbits")
    for tau in d.states.ids:
        for alpha in d.alphabet.ids:
            m = d.transitions.get((tau, alpha))
            if m is None:
                diags.append(f"missing transition for ({tau}, {alpha})")
                continue
            if m.source != tau:
                diags.append(f"transition ({tau}, {alpha}) has source {m.source!r}")
                continue
            diags.extend(validate_map(m, d.states, d.alphabet.char(alpha), f"({tau}, {alpha})"))
    return diags


def _validate_nfa(n: EquivariantNFA) -> list[str]:
    diags = []
    for f in sorted((n.accepting | n.initial) - set(n.states.ids)):
        diags.append(f"orbit {f!r} is not a state orbit")
    for (t, a, s), r in n.relations.items():
        if t not in n.states or s not in n.states or a not in n.alphabet:
            diags.append(f"relation {(t, a, s)} mentions unknown orbits")
        if r.dimension != 2:
            diags.append(f"relation {(t, a, s)} has dimension {r.dimension}, expected 2")
    return diags


def nfa_has_transition(n: EquivariantNFA, q: Element, a: Letter, p: Element) -> bool:
    """(q, a, p) is a transition iff some integer lifts of the three values
    have their differences in the orbit triple's relation."""
    from .epad import And, Eq, Le, LinearTerm, Sat, solve

    r = n.relations.get((q.orbit, a.orbit, p.orbit))
    if r is None or not r.components:
        return False
    kq, ka, kp = n.states.char(q.orbit), n.alphabet.char(a.orbit), n.states.char(p.orbit)

    def lifted(name, val, k):
        return LinearTerm({name: k}, val) if k else LinearTerm.const(val)

    qv, av, pv = lifted("jq", q.value, kq), lifted("ja", a.value, ka), lifted("jp", p.value, kp)
    for comp in r.components:
        names = [f"n{i}" for i in range(len(comp.periods))]
        lits = [Le(0, nm) for nm in names]
        for dim, target in enumerate((av - qv, pv - qv)):
            lhs = LinearTerm({nm: per[dim] for nm, per in zip(names, comp.periods)}, comp.base[dim])
            lits.append(Eq(lhs, target))
        if isinstance(solve(And(*lits)), Sat):
            return True
    return False


def isomorphic(d1: EquivariantDFA, d2: EquivariantDFA, letter_values: Sequence[int] = range(-3, 4)) -> Optional[dict]:
    """Find an orbit bijection with per-orbit offsets that commutes with the
    transitions (checked over each map's exhaustive window); None if none.

    The bijection is grown from the initial states, so both automata should
    be trimmed first: an unreachable orbit makes the answer None."""
    if d1.alphabet != d2.alphabet or len(d1.states) != len(d2.states):
        return None
    c0 = d2.initial.value - d1.initial.value
    iso = {d1.initial.orbit: (d2.initial.orbit, c0)}
    queue = deque([d1.initial.orbit])

    def h(e: Element) -> Element:
        tgt, c = iso[e.orbit]
        return canonicalize(Element(tgt, e.value + c), d2.states)

    while queue:
        tau = queue.popleft()
        tau2, _ = iso[tau]
        if d1.states.char(tau) != d2.states.char(tau2):
            return None
        for alpha in d1.alphabet.ids:
            m = d1.map_for(tau, alpha)
            for x in _coverage_points(m, d1.states.char(tau), (d1.alphabet.char(alpha),)):
                q = Element(tau, x)
                for v in letter_values:
                    a = canonicalize(Element(alpha, v), d1.alphabet)
                    r1 = step(d1, q, a)
                    r2 = step(d2, h(q), a)
                    if r1.orbit not in iso:
                        iso[r1.orbit] = (r2.orbit, r2.value - r1.value)
                        queue.append(r1.orbit)
                    if h(r1) != r2:
                        return None
    targets = [t for t, _ in iso.values()]
    if len(set(targets)) != len(targets):
        return None
    if set(iso) != set(d1.states.ids):
        return None
    for tau, (tau2, _) in iso.items():
        if (tau in d1.accepting) != (tau2 in d2.accepting):
            return None
    return iso
