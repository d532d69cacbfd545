"""Regenerate the generated part of corpus/ (handwritten files are left alone)."""

from pathlib import Path

from sla.atoms import Element, Orbit, OrbitFiniteSet
from sla.automata import EquivariantDFA, validate
from sla.constructions import (MACHINES, CmConfig, cm_run, duplicate_orbit, gen_binprefix,
                               gen_cm_constant_word_dfa, gen_diffk)
from sla.periodic import PeriodicSet1D
from sla.semilinear import Piece, PiecewiseAffineMap, Progression, constant_map, identity_map
from sla.textio import render_automaton

OUT = Path(__file__).resolve().parent.parent / "corpus"


def z3_with_sink():
    # a Z_3 orbit stepping 0 -> 1 -> 2 -> sink, accepting on the Z_3 orbit
    states = OrbitFiniteSet([Orbit("p", 3), Orbit("r", 1)])
    letters = OrbitFiniteSet([Orbit("a", 0)])
    m = PiecewiseAffineMap("p", (Piece(Progression(0, 1, 1), "p", 0, 1),
                                 Piece(Progression(1, 1, 1), "p", 0, 2),
                                 Piece(Progression(2, 1, 1), "r", 0, 0)))
    trans = {("p", "a"): m, ("r", "a"): constant_map("r", "r", 0, 1)}
    return EquivariantDFA(states, letters, trans, Element("p", 0), {"p"}, "z3-sink")


def identity_z():
    states = OrbitFiniteSet([Orbit("q", 0)])
    letters = OrbitFiniteSet([Orbit("a", 0)])
    return EquivariantDFA(states, letters, {("q", "a"): identity_map("q")}, Element("q", 0), {"q"},
                          "identity-z")


def corpus():
    odds = gen_diffk(PeriodicSet1D.residue(1, 2))
    yield "binprefix", gen_binprefix()
    yield "diffk_odds", odds
    yield "diffk_mod3", gen_diffk(PeriodicSet1D.residue(0, 3) | PeriodicSet1D.finite([1]))
    yield "dup_diffk_odds", duplicate_orbit(odds, "int", 3)
    yield "dup_z3", duplicate_orbit(z3_with_sink(), "p", 1)
    yield "identity_z", identity_z()
    x = CmConfig(0, 1, 0)
    for name, m in MACHINES.items():
        yield f"cm_{name}", gen_cm_constant_word_dfa(m, x, cm_run(m, x, 3))


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    for name, d in corpus():
        assert not validate(d), name
        (OUT / f"{name}.aut").write_text(render_automaton(d))
        print(f"wrote corpus/{name}.aut")
