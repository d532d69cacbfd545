"""Plain-text formats for automata, signatures and words.

Automaton files are line oriented; ``#`` starts a comment::

    orbit eps char 1
    orbit int char 0
    letter a char 0
    initial eps 0
    accept int
    trans eps on a:
      piece base=0 step=1 count=1 -> int t*0+0
    trans int on a:
      piece base=0 step=1 count=inf -> int t*1+0
      piece base=-1 step=-1 count=inf -> int t*-1-1

Pieces may also follow the colon on the header line, separated by ``;``.
A piece maps the t-th element of its progression to ``t*A+B``.

NFA files start with ``kind nfa``; ``initial`` lists orbits and each
relation component is a line
``rel q on a -> p: base=(b1,b2) periods=(u1,u2) (v1,v2)``.
"""

from __future__ import annotations

import re
from typing import Optional

from .atoms import Element, Orbit, OrbitFiniteSet
from .automata import EquivariantDFA, EquivariantNFA
from .semilinear import LinearSet, LinearSetUnion, Piece, PiecewiseAffineMap, Progression


class TextFormatError(ValueError):
    def __init__(self, msg: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + msg)
        self.line, self.column = line, column


_ID = r"[A-Za-z_][A-Za-z_0-9.']*"
_PIECE = re.compile(
    r"piece\s+base=(-?\d+)\s+step=(-?\d+)\s+count=(\d+|inf)\s*->\s*(" + _ID + r")\s+"
    r"(?:t\*(-?\d+)\s*([+-]\s*\d+)?|(-?\d+))\s*$")
_TRANS = re.compile(r"trans\s+(" + _ID + r")\s+on\s+(" + _ID + r")\s*:(.*)$")
_REL = re.compile(r"rel\s+(" + _ID + r")\s+on\s+(" + _ID + r")\s*->\s*(" + _ID + r")\s*:\s*"
                  r"base=\((-?\d+),\s*(-?\d+)\)\s*(?:periods=((?:\s*\(-?\d+,\s*-?\d+\))*))?\s*$")
_PAIR = re.compile(r"\((-?\d+),\s*(-?\d+)\)")


def _parse_piece(text: str, lineno: int, col: int) -> Piece:
    m = _PIECE.match(text.strip())
    if not m:
        raise TextFormatError(f"malformed piece {text.strip()!r}", lineno, col)
    base, step, cnt, tgt = int(m[1]), int(m[2]), m[3], m[4]
    if m[7] is not None:
        coeff, off = 0, int(m[7])
    else:
        coeff = int(m[5])
        off = int(m[6].replace(" ", "")) if m[6] else 0
    try:
        prog = Progression(base, step, None if cnt == "inf" else int(cnt))
    except ValueError as e:
        raise TextFormatError(str(e), lineno, col) from None
    return Piece(prog, tgt, coeff, off)


def _decl(words, lineno, want):
    if len(words) != want:
        raise TextFormatError(f"{words[0]!r} takes {want - 1} arguments", lineno, 1)


def _int(tok, lineno, col):
    try:
        return int(tok)
    except ValueError:
        raise TextFormatError(f"expected an integer, found {tok!r}", lineno, col) from None


def parse_automaton(text: str):
    """Parse an automaton file into an EquivariantDFA or EquivariantNFA."""
    states, letters = [], []
    seen_ids: dict = {}
    kind = "dfa"
    name = ""
    initial = None
    accepting: list = []
    blocks: dict = {}
    rels: dict = {}
    current = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        if body.startswith("piece"):
            if current is None:
                raise TextFormatError("piece outside a trans block", lineno, col)
            blocks[current][1].append(_parse_piece(body, lineno, col))
            continue
        current = None
        words = body.split()
        head = words[0]
        if head in ("orbit", "letter"):
            if len(words) != 4 or words[2] != "char":
                raise TextFormatError(f"expected '{head} ID char K'", lineno, col)
            oid = words[1]
            if oid in seen_ids:
                raise TextFormatError(f"duplicate orbit id {oid!r} (first declared on line {seen_ids[oid]})",
                                      lineno, col + len(head) + 1)
            seen_ids[oid] = lineno
            k = _int(words[3], lineno, col)
            if k < 0:
                raise TextFormatError("characteristic must be >= 0", lineno, col)
            (states if head == "orbit" else letters).append(Orbit(oid, k))
        elif head == "kind":
            _decl(words, lineno, 2)
            if words[1] not in ("dfa", "nfa"):
                raise TextFormatError(f"unknown kind {words[1]!r}", lineno, col)
            kind = words[1]
        elif head == "name":
            name = body[len("name"):].strip()
        elif head == "initial":
            if kind == "dfa":
                _decl(words, lineno, 3)
                initial = Element(words[1], _int(words[2], lineno, col))
            else:
                initial = words[1:]
        elif head == "accept":
            accepting.extend(words[1:])
        elif head == "trans":
            m = _TRANS.match(body)
            if not m:
                raise TextFormatError("expected 'trans ORBIT on LETTER:'", lineno, col)
            key = (m[1], m[2])
            if key in blocks:
                raise TextFormatError(f"duplicate transition block for {key}", lineno, col)
            blocks[key] = (lineno, [])
            rest = m[3].strip()
            if rest:
                for part in rest.split(";"):
                    if part.strip():
                        blocks[key][1].append(_parse_piece(part, lineno, col + m.start(3)))
            current = key
        elif head == "rel":
            m = _REL.match(body)
            if not m:
                raise TextFormatError("expected 'rel Q on A -> P: base=(x,y) periods=...'", lineno, col)
            key = (m[1], m[2], m[3])
            periods = tuple((int(a), int(b)) for a, b in _PAIR.findall(m[6] or ""))
            rels.setdefault(key, []).append(LinearSet((int(m[4]), int(m[5])), periods))
        else:
            raise TextFormatError(f"unknown declaration {head!r}", lineno, col)

    try:
        st = OrbitFiniteSet(states)
        al = OrbitFiniteSet(letters)
    except ValueError as e:
        raise TextFormatError(str(e)) from None
    if not states:
        raise TextFormatError("no state orbits declared")
    if initial is None:
        raise TextFormatError("missing 'initial' declaration")
    for f in accepting:
        if f not in st:
            raise TextFormatError(f"accepting orbit {f!r} is not a declared state orbit")

    if kind == "nfa":
        for (q, a, p) in rels:
            if q not in st or p not in st or a not in al:
                raise TextFormatError(f"relation {(q, a, p)} mentions undeclared orbits")
        relations = {k: LinearSetUnion(2, tuple(v)) for k, v in rels.items()}
        return EquivariantNFA(st, al, relations, frozenset(initial), frozenset(accepting), name)

    if rels:
        raise TextFormatError("'rel' lines need 'kind nfa'")
    trans = {}
    for (tau, alpha), (lineno, pieces) in blocks.items():
        if tau not in st:
            raise TextFormatError(f"transition block for undeclared state orbit {tau!r}", lineno, 1)
        if alpha not in al:
            raise TextFormatError(f"transition block for undeclared letter orbit {alpha!r}", lineno, 1)
        trans[tau, alpha] = PiecewiseAffineMap(tau, tuple(pieces))
    for tau in st.ids:
        for alpha in al.ids:
            if (tau, alpha) not in trans:
                raise TextFormatError(f"missing transition block for ({tau}, {alpha})")
    if initial.orbit not in st:
        raise TextFormatError(f"initial orbit {initial.orbit!r} is not declared")
    return EquivariantDFA(st, al, trans, initial, frozenset(accepting), name)


def _render_piece(pc: Piece) -> str:
    p = pc.prog
    cnt = "inf" if p.count is None else str(p.count)
    return f"piece base={p.base} step={p.step} count={cnt} -> {pc.target} t*{pc.coeff}{pc.offset:+d}"


def render_automaton(d) -> str:
    out = []
    if d.name:
        out.append(f"name {d.name}")
    if isinstance(d, EquivariantNFA):
        out.append("kind nfa")
    for o in d.states:
        out.append(f"orbit {o.id} char {o.characteristic}")
    for o in d.alphabet:
        out.append(f"letter {o.id} char {o.characteristic}")
    if isinstance(d, EquivariantNFA):
        out.append("initial " + " ".join(sorted(d.initial)))
    else:
        out.append(f"initial {d.initial.orbit} {d.initial.value}")
    acc = [o.id for o in d.states if o.id in d.accepting]
    out.append("accept" + "".join(f" {a}" for a in acc))
    if isinstance(d, EquivariantNFA):
        for (q, a, p), r in d.relations.items():
            for comp in r.components:
                per = " ".join(f"({u},{v})" for u, v in comp.periods)
                out.append(f"rel {q} on {a} -> {p}: base=({comp.base[0]},{comp.base[1]})"
                           + (f" periods={per}" if per else ""))
        return "\n".join(out) + "\n"
    for tau in d.states.ids:
        for alpha in d.alphabet.ids:
            m = d.transitions.get((tau, alpha))
            if m is None:
                continue
            out.append(f"trans {tau} on {alpha}:")
            out.extend("  " + _render_piece(pc) for pc in m.pieces)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# words and configurations


def parse_word(text: str) -> list[Element]:
    word = []
    for tok in text.replace(",", " ").split():
        orbit, sep, val = tok.rpartition(":")
        if not sep or not orbit:
            raise TextFormatError(f"letter {tok!r} is not of the form orbit:value")
        try:
            word.append(Element(orbit, int(val)))
        except ValueError:
            raise TextFormatError(f"letter {tok!r} has a non-integer value") from None
    return word


def render_word(word) -> str:
    return " ".join(f"{a.orbit}:{a.value}" for a in word)


def parse_element(text: str) -> Element:
    w = parse_word(text)
    if len(w) != 1:
        raise TextFormatError(f"expected one orbit:value element, got {text!r}")
    return w[0]


# --------------------------------------------------------------------------
# signatures


_SIG = re.compile(r"\s*sim\s*=\s*\{(.*?)\}\s*;\s*char\s*=\s*\{(.*?)\}\s*(?:;\s*diff\s*=\s*\{(.*?)\}\s*)?;?\s*$",
                  re.S)


def parse_signature(text: str):
    from .signatures import EquivalenceSignature

    m = _SIG.match(text)
    if not m:
        raise TextFormatError("expected 'sim={[..],..}; char={..}; diff={(a,b):d,..}'")
    classes = [[t.strip() for t in grp.split(",") if t.strip()] for grp in re.findall(r"\[(.*?)\]", m[1])]
    try:
        chars = [int(c) for c in m[2].split(",") if c.strip()]
    except ValueError:
        raise TextFormatError(f"bad char list {m[2]!r}") from None
    diffs = {}
    for a, b, v in re.findall(r"\(\s*(" + _ID + r")\s*,\s*(" + _ID + r")\s*\)\s*:\s*(-?\d+)", m[3] or ""):
        diffs[a, b] = int(v)
    return EquivalenceSignature(classes, chars, diffs)


def render_signature(phi) -> str:
    sim = ",".join("[" + ",".join(c) + "]" for c in phi.classes)
    chars = ",".join(str(c) for c in phi.chars)
    diff = ",".join(f"({a},{b}):{v}" for (a, b), v in sorted(phi.diffs.items()))
    return f"sim={{{sim}}}; char={{{chars}}}; diff={{{diff}}}"


def parse_config(text: str):
    """A counter-machine configuration written ``state,c1,c2``."""
    from .constructions import CmConfig

    parts = text.replace(" ", "").split(",")
    if len(parts) != 3:
        raise TextFormatError(f"expected 'state,c1,c2', got {text!r}")
    try:
        return CmConfig(*(int(p) for p in parts))
    except ValueError as e:
        raise TextFormatError(f"bad configuration {text!r}: {e}") from None


def read_text(path: str, stdin=None) -> str:
    if path == "-":
        import sys
        return (stdin or sys.stdin).read()
    with open(path) as fh:
        return fh.read()


def write_text(path: Optional[str], text: str, stdout=None):
    import sys
    if path in (None, "-"):
        (stdout or sys.stdout).write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
