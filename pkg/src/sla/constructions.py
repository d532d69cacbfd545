"""Generators: the difference-language automaton, the binary-prefix automaton,
two-counter machines with their Goedel coding, and random automata for tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from .atoms import Element, Orbit, OrbitFiniteSet
from .automata import EquivariantDFA
from .periodic import PeriodicSet1D
from .semilinear import (PiecewiseAffineMap, Piece, Progression, constant_map, pw_eval)


def _pieces_for(s: PeriodicSet1D, target: str, value: int = 0) -> list[Piece]:
    return [Piece(p, target, 0, value) for p in s.to_progressions()]


def gen_diffk(K: PeriodicSet1D) -> EquivariantDFA:
    """Words x1..xn over Z whose consecutive differences x_i - x_(i-1) lie in K."""
    states = OrbitFiniteSet([Orbit("eps", 1), Orbit("int", 0), Orbit("bot", 1)])
    alphabet = OrbitFiniteSet([Orbit("z", 0)])
    # in difference coordinates the map sees state - letter, so it tests -K
    neg = K.affine_image(-1, 0)
    trans = {
        ("eps", "z"): constant_map("eps", "int", 0, 1),
        ("int", "z"): PiecewiseAffineMap("int", tuple(_pieces_for(neg, "int") + _pieces_for(~neg, "bot"))),
        ("bot", "z"): constant_map("bot", "bot", 0, 1),
    }
    return EquivariantDFA(states, alphabet, trans, Element("eps", 0), {"eps", "int"}, "diffk")


def gen_binprefix() -> EquivariantDFA:
    """start(i) followed by bits accepted iff the bits are a prefix of i in
    binary, least significant bit first; letters are read relative to their value."""
    states = OrbitFiniteSet([Orbit("eps", 1), Orbit("int", 0), Orbit("bot", 1)])
    alphabet = OrbitFiniteSet([Orbit("start", 0), Orbit("zero", 0), Orbit("one", 0)])

    def halving(sigma):
        # d = state - letter value; d - sigma even -> (d - sigma)/2, else bot
        if sigma == 0:
            good = [Piece(Progression(0, 2), "int", 1, 0), Piece(Progression(-2, -2), "int", -1, -1)]
            bad = [Piece(Progression(1, 2), "bot"), Piece(Progression(-1, -2), "bot")]
        else:
            good = [Piece(Progression(1, 2), "int", 1, 0), Piece(Progression(-1, -2), "int", -1, -1)]
            bad = [Piece(Progression(0, 2), "bot"), Piece(Progression(-2, -2), "bot")]
        return PiecewiseAffineMap("int", tuple(good + bad))

    trans = {
        ("eps", "start"): constant_map("eps", "int", 0, 1),
        ("eps", "zero"): constant_map("eps", "bot", 0, 1),
        ("eps", "one"): constant_map("eps", "bot", 0, 1),
        ("int", "start"): constant_map("int", "bot", 0, 0),
        ("int", "zero"): halving(0),
        ("int", "one"): halving(1),
    }
    for a in alphabet.ids:
        trans["bot", a] = constant_map("bot", "bot", 0, 1)
    return EquivariantDFA(states, alphabet, trans, Element("eps", 0), {"int"}, "binprefix")


def binprefix_word(i: int, bits: str) -> list[Element]:
    return [Element("start", i)] + [Element("one" if b == "1" else "zero", 0) for b in bits]


# --------------------------------------------------------------------------
# two-counter machines


@dataclass(frozen=True)
class CmConfig:
    state: int
    c1: int
    c2: int

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("counters are natural numbers")


@dataclass(frozen=True)
class Inc:
    counter: int
    next: int


@dataclass(frozen=True)
class Dec:
    counter: int
    next: int
    if_zero: int


@dataclass(frozen=True)
class Halt:
    pass


class InvalidMachine(ValueError):
    pass


@dataclass(frozen=True)
class CounterMachine:
    program: tuple

    def __post_init__(self):
        object.__setattr__(self, "program", tuple(self.program))
        n = len(self.program)
        if n == 0:
            raise InvalidMachine("empty program")
        for i, ins in enumerate(self.program):
            if isinstance(ins, (Inc, Dec)):
                if ins.counter not in (1, 2):
                    raise InvalidMachine(f"state {i}: counter must be 1 or 2")
                targets = [ins.next] + ([ins.if_zero] if isinstance(ins, Dec) else [])
                if any(not 0 <= t < n for t in targets):
                    raise InvalidMachine(f"state {i}: jump out of range")
            elif not isinstance(ins, Halt):
                raise InvalidMachine(f"state {i}: unknown instruction {ins!r}")

    @property
    def n(self) -> int:
        return len(self.program)

    @classmethod
    def parse(cls, text: str) -> "CounterMachine":
        """One instruction per line: ``inc 1 -> 2``, ``dec 2 -> 3 else 0``, ``halt``."""
        prog = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            w = line.replace("->", " ").split()
            try:
                if w[0] == "halt" and len(w) == 1:
                    prog.append(Halt())
                elif w[0] == "inc" and len(w) == 3:
                    prog.append(Inc(int(w[1]), int(w[2])))
                elif w[0] == "dec" and len(w) == 5 and w[3] == "else":
                    prog.append(Dec(int(w[1]), int(w[2]), int(w[4])))
                else:
                    raise ValueError
            except ValueError:
                raise InvalidMachine(f"line {lineno}: cannot read instruction {raw.strip()!r}") from None
        return cls(prog)

    def render(self) -> str:
        out = []
        for ins in self.program:
            if isinstance(ins, Halt):
                out.append("halt")
            elif isinstance(ins, Inc):
                out.append(f"inc {ins.counter} -> {ins.next}")
            else:
                out.append(f"dec {ins.counter} -> {ins.next} else {ins.if_zero}")
        return "\n".join(out) + "\n"


def cm_step(m: CounterMachine, c: CmConfig) -> CmConfig:
    ins = m.program[c.state]
    if isinstance(ins, Halt):
        return c
    cnt = [c.c1, c.c2]
    if isinstance(ins, Inc):
        cnt[ins.counter - 1] += 1
        return CmConfig(ins.next, *cnt)
    if cnt[ins.counter - 1] == 0:
        return CmConfig(ins.if_zero, *cnt)
    cnt[ins.counter - 1] -= 1
    return CmConfig(ins.next, *cnt)


def cm_run(m: CounterMachine, c: CmConfig, steps: int) -> CmConfig:
    for _ in range(steps):
        c = cm_step(m, c)
    return c


class InvalidCode(ValueError):
    pass


def godel_encode(m: CounterMachine, c: CmConfig) -> int:
    if not 0 <= c.state < m.n:
        raise ValueError(f"state {c.state} out of range")
    return m.n * (2 ** c.c1 * 3 ** c.c2) + c.state


def godel_decode(m: CounterMachine, code: int) -> CmConfig:
    n = m.n
    i = code % n
    q = (code - i) // n
    if q < 1:
        raise InvalidCode(f"{code} is not a configuration code")
    j = k = 0
    while q % 2 == 0:
        q //= 2
        j += 1
    while q % 3 == 0:
        q //= 3
        k += 1
    if q != 1:
        raise InvalidCode(f"{code} is not a configuration code")
    return CmConfig(i, j, k)


def gen_cm_successor_map(m: CounterMachine, orbit: str = "int") -> PiecewiseAffineMap:
    """g with g(code(c)) = code(cm_step(c)); identity below n.

    For x >= n, write x = i + n*q.  The state is x mod n and the zero tests
    depend on q mod 6, so pieces are the classes of x mod 6n above n.
    """
    n = m.n
    pieces = [Piece(Progression(n - 1, -1), orbit, -1, n - 1)]
    for i, ins in enumerate(m.program):
        for r in range(1, 7):
            base = i + n * r
            step = 6 * n
            # x - i = n*r + 6n*t
            if isinstance(ins, Halt):
                coeff, off = step, base
            elif isinstance(ins, Inc):
                f = 2 if ins.counter == 1 else 3
                coeff, off = f * step, f * n * r + ins.next
            else:
                f = 2 if ins.counter == 1 else 3
                if r % f == 0:
                    coeff, off = step // f, n * r // f + ins.next
                else:
                    coeff, off = step, n * r + ins.if_zero
            pieces.append(Piece(Progression(base, step), orbit, coeff, off))
    return PiecewiseAffineMap(orbit, tuple(pieces))


def _carve(pieces: Sequence[Piece], hits: dict) -> list[Piece]:
    """Split pieces so that each x in ``hits`` becomes a singleton piece to hits[x]."""
    out = []
    for pc in pieces:
        p = pc.prog
        ts = sorted(t for t in (p.param(x) for x in hits) if t is not None)
        start = 0
        for t0 in ts:
            if t0 > start:
                out.append(Piece(Progression(p.at(start), p.step, t0 - start), pc.target, pc.coeff,
                                 pc.offset + pc.coeff * start))
            x = p.at(t0)
            out.append(Piece(Progression(x, 1, 1), hits[x][0], 0, hits[x][1]))
            start = t0 + 1
        if p.count is None or start < p.count:
            cnt = None if p.count is None else p.count - start
            out.append(Piece(Progression(p.at(start), p.step, cnt), pc.target, pc.coeff,
                             pc.offset + pc.coeff * start))
    return out


def gen_cm_constant_word_dfa(m: CounterMachine, x: CmConfig, y: CmConfig) -> EquivariantDFA:
    """Accepts the constant word 0^k iff the machine goes from x to y in exactly k steps.

    The integer state tracks the code of the current configuration relative
    to the letters read; ``top`` marks "the current code is f(y)" and keeps
    tracking from there, since its successor code g(f(y)) is a constant.
    """
    g = gen_cm_successor_map(m, "int")
    fy = godel_encode(m, y)
    states = OrbitFiniteSet([Orbit("eps", 1), Orbit("int", 0), Orbit("top", 1)])
    alphabet = OrbitFiniteSet([Orbit("z", 0)])
    universe = states

    def after(code: int) -> Piece:
        nxt = pw_eval(g, code, universe).value
        if nxt == fy:
            return Piece(Progression(0, 1, 1), "top", 0, 0)
        return Piece(Progression(0, 1, 1), "int", 0, nxt)

    hits = {}
    for pc in g.pieces:
        # solve coeff*t + offset = fy on this piece
        if pc.coeff == 0:
            raise InvalidMachine("successor map has a constant piece")
        num = fy - pc.offset
        if num % pc.coeff == 0:
            t = num // pc.coeff
            if t >= 0 and (pc.prog.count is None or t < pc.prog.count):
                hits[pc.prog.at(t)] = ("top", 0)
    int_map = PiecewiseAffineMap("int", tuple(_carve(g.pieces, hits)))
    trans = {
        ("eps", "z"): PiecewiseAffineMap("eps", (after(godel_encode(m, x)),)),
        ("int", "z"): int_map,
        ("top", "z"): PiecewiseAffineMap("top", (after(fy),)),
    }
    accepting = {"top"} | ({"eps"} if x == y else set())
    return EquivariantDFA(states, alphabet, trans, Element("eps", 0), accepting, "cm-constant-word")


# small fixed machines used by tests and demos
MACHINES = {
    # counts c1 up twice then halts
    "inc2": CounterMachine.parse("inc 1 -> 1\ninc 1 -> 2\nhalt\n"),
    # moves c1 into c2, then halts
    "transfer": CounterMachine.parse("dec 1 -> 1 else 2\ninc 2 -> 0\nhalt\n"),
    # loops forever incrementing c1 and c2 alternately
    "pump": CounterMachine.parse("inc 1 -> 1\ninc 2 -> 0\n"),
}


# --------------------------------------------------------------------------
# random instances


def _random_value(rng: random.Random, k: int, spread: int = 6) -> int:
    return rng.randrange(k) if k else rng.randint(-spread, spread)


def random_finite_map(rng: random.Random, source: str, k: int, states: OrbitFiniteSet,
                      letter_char: int = 0) -> PiecewiseAffineMap:
    """A tabulated map out of Z_k; commutes with +letter_char when that is finite."""
    table: dict = {}
    step = letter_char % k if letter_char else 0
    for x0 in range(k):
        if x0 in table:
            continue
        cycle = [x0]
        if step:
            y = (x0 + step) % k
            while y != x0:
                cycle.append(y)
                y = (y + step) % k
        period = len(cycle) * letter_char
        # a target must absorb a full cycle of translations
        allowed = [o for o in states if not period or (o.characteristic and period % o.characteristic == 0)]
        if not allowed:
            raise ValueError(f"no target orbit has characteristic dividing {period}")
        tgt = rng.choice(allowed)
        v = _random_value(rng, tgt.characteristic)
        for s, y in enumerate(cycle):
            table[y] = (tgt.id, v + s * letter_char)
    pieces = []
    for x in range(k):
        tgt, v = table[x]
        kk = states.char(tgt)
        pieces.append(Piece(Progression(x, 1, 1), tgt, 0, v % kk if kk else v))
    return PiecewiseAffineMap(source, tuple(pieces))


def random_z_map(rng: random.Random, source: str, states: OrbitFiniteSet, max_step: int = 6,
                 spread: int = 8) -> PiecewiseAffineMap:
    """A map on Z: residue classes below a, finite progressions on [a, b), residue classes from b."""
    a = rng.randint(-spread, spread)
    b = a + rng.randint(0, spread)
    pieces = []

    def target_piece(prog):
        tgt = rng.choice(list(states))
        coeff = rng.randint(-3, 3)
        off = _random_value(rng, tgt.characteristic, spread)
        return Piece(prog, tgt.id, coeff, off)

    s = rng.randint(1, max_step)
    for r in range(s):
        pieces.append(target_piece(Progression(a - 1 - r, -s)))
    s = rng.randint(1, max_step)
    for r in range(s):
        pieces.append(target_piece(Progression(b + r, s)))
    if b > a:
        s = rng.randint(1, max_step)
        for r in range(min(s, b - a)):
            cnt = len(range(a + r, b, s))
            pieces.append(target_piece(Progression(a + r, s, cnt)))
    return PiecewiseAffineMap(source, tuple(pieces))


def random_orbits(rng: random.Random, count: int, max_char: int = 12, finite_only: bool = True,
                  prefix: str = "q") -> OrbitFiniteSet:
    out = []
    for i in range(count):
        if finite_only or rng.random() < 0.5:
            out.append(Orbit(f"{prefix}{i}", rng.randint(1, max_char)))
        else:
            out.append(Orbit(f"{prefix}{i}", 0))
    return OrbitFiniteSet(out)


def random_finite_dfa(rng: random.Random, n_states: int = 3, n_letters: int = 2, max_char: int = 12,
                      finite_letters: bool = True) -> EquivariantDFA:
    """Random DFA whose state orbits all have finite characteristic."""
    states = random_orbits(rng, n_states, max_char)
    letters = []
    for i in range(n_letters):
        # a finite letter characteristic must be a multiple of some state
        # characteristic, or no commuting map exists
        ell = rng.choice([0, 0, rng.choice(list(states)).characteristic * rng.randint(1, 2)]) if finite_letters else 0
        letters.append(Orbit(f"a{i}", ell))
    alphabet = OrbitFiniteSet(letters)
    trans = {}
    for o in states:
        for a in alphabet:
            trans[o.id, a.id] = random_finite_map(rng, o.id, o.characteristic, states, a.characteristic)
    init = rng.choice(list(states))
    initial = Element(init.id, rng.randrange(init.characteristic))
    accepting = {o.id for o in states if rng.random() < 0.5}
    return EquivariantDFA(states, alphabet, trans, initial, accepting, "random")


def random_dfa(rng: random.Random, n_states: int = 3, n_letters: int = 1, max_char: int = 6,
               max_step: int = 3, spread: int = 4) -> EquivariantDFA:
    """Random DFA mixing Z orbits and finite orbits, over Z letter orbits."""
    states = random_orbits(rng, n_states, max_char, finite_only=False)
    alphabet = OrbitFiniteSet(Orbit(f"a{i}", 0) for i in range(n_letters))
    trans = {}
    for o in states:
        for a in alphabet:
            if o.characteristic:
                trans[o.id, a.id] = random_finite_map(rng, o.id, o.characteristic, states)
            else:
                trans[o.id, a.id] = random_z_map(rng, o.id, states, max_step, spread)
    init = rng.choice(list(states))
    initial = Element(init.id, rng.randrange(init.characteristic) if init.characteristic else 0)
    accepting = {o.id for o in states if rng.random() < 0.5}
    return EquivariantDFA(states, alphabet, trans, initial, accepting, "random")


def duplicate_orbit(d: EquivariantDFA, tau: str, shift: int = 0, new_id: Optional[str] = None) -> EquivariantDFA:
    """Add a redundant copy of orbit tau whose elements are those of tau
    translated by ``shift``; the initial state is moved into the copy."""
    new_id = new_id or f"{tau}_copy"
    k = d.states.char(tau)
    states = OrbitFiniteSet(list(d.states) + [Orbit(new_id, k)])
    trans = dict(d.transitions)
    for a in d.alphabet.ids:
        m = d.map_for(tau, a)
        pieces = []
        for pc in m.pieces:
            pr = pc.prog
            if k:
                # tabulate on the shifted residues
                for t in range(pr.count):
                    x = (pr.at(t) + shift) % k
                    pieces.append(Piece(Progression(x, 1, 1), pc.target, 0, pc.value_at(t)))
            else:
                pieces.append(Piece(pr.shift(shift), pc.target, pc.coeff, pc.offset))
        trans[new_id, a] = PiecewiseAffineMap(new_id, tuple(sorted(pieces, key=lambda p: p.prog.base) if k else pieces))
    initial = d.initial
    if initial.orbit == tau:
        v = initial.value + shift
        initial = Element(new_id, v % k if k else v)
    accepting = set(d.accepting) | ({new_id} if tau in d.accepting else set())
    return EquivariantDFA(states, d.alphabet, trans, initial, accepting, d.name + "+dup")
