"""Counter machines as automata over (Z, +1), and the small divisibility system."""

from sla.atoms import Element
from sla.automata import accepts
from sla.constructions import MACHINES, CmConfig, cm_run, gen_cm_constant_word_dfa, godel_encode
from sla.epad import parse_formula, solve

x = CmConfig(0, 1, 0)
for name, m in sorted(MACHINES.items()):
    y = cm_run(m, x, 3)
    d = gen_cm_constant_word_dfa(m, x, y)
    hits = [k for k in range(12) if accepts(d, [Element("z", 0)] * k)]
    print(f"{name}: x={x} y={y} code(x)={godel_encode(m, x)}")
    print(f"   0^m accepted for m in {hits}")

f = parse_formula("3*x %= 3 mod y & 5*y %= 7 mod x & 2*x = y - 18")
print()
print("3x = 3 mod y, 5y = 7 mod x, 2x = y - 18  ->", solve(f))
