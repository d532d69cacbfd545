"""Minimize a few corpus automata and watch partition refinement diverge on binprefix."""

from pathlib import Path

from sla.minimize import is_minimal, minimize, partition_refinement
from sla.textio import parse_automaton, render_signature

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load(name):
    return parse_automaton((CORPUS / name).read_text())


for name in ("dup_diffk_odds.aut", "dup_z3.aut", "identity_z.aut"):
    d = load(name)
    m, trace = minimize(d)
    before = [(o.id, o.characteristic) for o in d.states]
    after = [(o.id, o.characteristic) for o in m.states]
    print(f"{name}: {before} -> {after} in {len(trace.steps)} merge(s)")
    for sig, _ in trace.steps:
        print("   merged by", render_signature(sig))
    print("   minimal now:", is_minimal(m).status)

print()
print("binprefix: length-n equivalence keeps splitting the int orbit")
tr = partition_refinement(load("binprefix.aut"), 8)
for n, phi in enumerate(tr.signatures):
    print(f"  n={n}  classes={len(phi.classes)}  chars={phi.chars}")
print("  stabilized:", tr.stabilized)
print("  congruence search within the default char cap:", is_minimal(load("binprefix.aut")).status)
