"""Existential Presburger arithmetic with divisibility."""

from .formula import (FALSE, TRUE, And, Congruent, Const, Div, Eq, Formula, Ge, Gt, Le, LinearTerm,
                      Lt, Ne, Not, Or, conj, disj, evaluate, free_vars, nnf, to_dnf)
from .solver import SolveConfig, Sat, SolveResult, Unknown, Unsat, solve, solve_conjunction
from .parser import FormulaSyntaxError, parse_formula

__all__ = [
    "FALSE", "TRUE", "And", "Congruent", "Const", "Div", "Eq", "Formula", "Ge", "Gt", "Le",
    "LinearTerm", "Lt", "Ne", "Not", "Or", "conj", "disj", "evaluate", "free_vars", "nnf", "to_dnf",
    "SolveConfig", "Sat", "SolveResult", "Unknown", "Unsat", "solve", "solve_conjunction",
    "FormulaSyntaxError", "parse_formula",
]
