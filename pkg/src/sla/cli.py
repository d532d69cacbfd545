"""Command-line front end: ``sla <command> ...``.

Exit codes: 0 affirmative or success, 1 negative, 2 unknown, 3 input error.
Reports are ``key=value`` lines on stdout.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .automata import (EquivariantDFA, EquivariantNFA, accepts, find_word, is_empty,
                       reachability_chain, run, validate)
from .epad import FormulaSyntaxError, Sat, SolveConfig, Unknown, parse_formula, solve
from .textio import (TextFormatError, parse_automaton, parse_config, parse_word, read_text,
                     render_automaton, render_signature, render_word, write_text)

OK, NO, UNKNOWN, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


def _emit(out, **kv):
    for k, v in kv.items():
        out.write(f"{k}={v}\n")


def _load(path, stdin, want_dfa=True, check=True):
    try:
        d = parse_automaton(read_text(path, stdin))
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except TextFormatError as e:
        raise InputError(f"{path}: {e}") from None
    if want_dfa and not isinstance(d, EquivariantDFA):
        raise InputError(f"{path}: this command needs a deterministic automaton")
    if check:
        diags = validate(d)
        if diags:
            raise InputError("\n".join(f"{path}: {msg}" for msg in diags))
    return d


def _config(args) -> SolveConfig:
    return SolveConfig(char_search_cap=args.cap, deterministic=True)


# --------------------------------------------------------------------------
# commands


def cmd_check(args, out, stdin):
    d = _load(args.file, stdin, want_dfa=False, check=False)
    diags = validate(d)
    for msg in diags:
        out.write(f"diagnostic={msg}\n")
    kind = "nfa" if isinstance(d, EquivariantNFA) else "dfa"
    _emit(out, kind=kind, orbits=len(d.states), letters=len(d.alphabet),
          valid="yes" if not diags else "no")
    return OK if not diags else NO


def cmd_accepts(args, out, stdin):
    d = _load(args.file, stdin)
    try:
        word = parse_word(args.word)
    except TextFormatError as e:
        raise InputError(str(e)) from None
    for a in word:
        if a.orbit not in d.alphabet:
            raise InputError(f"letter orbit {a.orbit!r} is not in the alphabet")
    final = run(d, word)
    ok = final.orbit in d.accepting
    _emit(out, accepted="yes" if ok else "no", final=f"{final.orbit}:{final.value}")
    return OK if ok else NO


def cmd_empty(args, out, stdin):
    d = _load(args.file, stdin, want_dfa=False)
    chain = reachability_chain(d)
    empty = is_empty(d)
    _emit(out, empty="yes" if empty else "no", iterations=len(chain) - 1,
          reachable=",".join(sorted(chain[-1])))
    return OK if empty else NO


def cmd_find_word(args, out, stdin):
    d = _load(args.file, stdin)
    w = find_word(d)
    if w is None:
        _emit(out, found="no")
        return NO
    _emit(out, found="yes", length=len(w), word=render_word(w))
    return OK


def _report_lines(report):
    return [f"candidate={line}" for line in report.lines()]


def cmd_is_minimal(args, out, stdin):
    from .minimize import is_minimal

    d = _load(args.file, stdin)
    res = is_minimal(d, _config(args))
    for line in _report_lines(res.report):
        out.write(line + "\n")
    _emit(out, minimal=res.status.lower())
    if res.signature is not None:
        _emit(out, witness=render_signature(res.signature))
    return {"YES": OK, "NO": NO, "UNKNOWN": UNKNOWN}[res.status]


def cmd_minimize(args, out, stdin):
    from .minimize import minimize

    d = _load(args.file, stdin)
    m, trace = minimize(d, _config(args))
    lines = [f"round={i + 1} signature={render_signature(sig)} orbits={len(q.states)}"
             for i, (sig, q) in enumerate(trace.steps)]
    status = "within-bounds" if trace.minimal_within_bounds else "minimal"
    lines += [f"rounds={len(trace.steps)}", f"orbits={len(m.states)}", f"status={status}"]
    text = render_automaton(m)
    if args.output in (None, "-"):
        out.write(text)
        err = sys.stderr
        for line in lines:
            err.write(line + "\n")
    else:
        write_text(args.output, text)
        for line in lines:
            out.write(line + "\n")
    if args.report:
        write_text(args.report, "\n".join(lines) + "\n")
    return UNKNOWN if trace.minimal_within_bounds else OK


def cmd_refine(args, out, stdin):
    from .minimize import partition_refinement

    d = _load(args.file, stdin)
    if args.steps < 0:
        raise InputError("--steps must be >= 0")
    tr = partition_refinement(d, args.steps)
    for n, phi in enumerate(tr.signatures):
        classes = "{" + ",".join("[" + ",".join(c) + "]" for c in phi.classes) + "}"
        chars = ",".join(str(c) for c in phi.chars)
        out.write(f"step={n} orbits={len(phi.classes)} classes={classes} chars={chars}\n")
    _emit(out, stabilized="yes" if tr.stabilized else "no")
    return OK


def cmd_gen(args, out, stdin):
    from . import constructions as C
    from .periodic import PeriodicSet1D

    if args.name == "binprefix":
        d = C.gen_binprefix()
    elif args.name == "diffk":
        if args.set:
            try:
                K = PeriodicSet1D.parse(args.set)
            except ValueError as e:
                raise InputError(str(e)) from None
        else:
            K = PeriodicSet1D.empty()
            if args.mod:
                for r in args.residues or []:
                    K = K | PeriodicSet1D.residue(r, args.mod)
            if args.values:
                K = K | PeriodicSet1D.finite(args.values)
        d = C.gen_diffk(K)
    else:
        if args.program:
            try:
                m = C.CounterMachine.parse(read_text(args.program, stdin))
            except (OSError, ValueError) as e:
                raise InputError(str(e)) from None
        elif args.machine in C.MACHINES:
            m = C.MACHINES[args.machine]
        else:
            raise InputError(f"unknown machine {args.machine!r}; known: {', '.join(sorted(C.MACHINES))}")
        try:
            x, y = parse_config(args.source), parse_config(args.target)
            d = C.gen_cm_constant_word_dfa(m, x, y)
        except (TextFormatError, ValueError) as e:
            raise InputError(str(e)) from None
    write_text(args.output, render_automaton(d), out)
    return OK


def cmd_epad(args, out, stdin):
    try:
        phi = parse_formula(read_text(args.file, stdin))
    except OSError as e:
        raise InputError(f"{args.file}: {e.strerror}") from None
    except FormulaSyntaxError as e:
        raise InputError(f"{args.file}: {e}") from None
    cfg = SolveConfig(char_search_cap=args.cap, witness_box=args.box, deterministic=True)
    res = solve(phi, cfg)
    if isinstance(res, Sat):
        _emit(out, result="sat")
        for k in sorted(res.valuation):
            out.write(f"{k}={res.valuation[k]}\n")
        return OK
    if isinstance(res, Unknown):
        _emit(out, result="unknown", reason=res.reason, cap=res.cap)
        return UNKNOWN
    _emit(out, result="unsat")
    return NO


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sla", description="Automata over the integer atoms.")
    p.add_argument("--version", action="version", version=f"sla {__version__}")
    p.add_argument("--deterministic", action="store_true",
                   help="fix candidate and branch order (always on; kept for scripts)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("check", cmd_check, "validate an automaton file")
    sp.add_argument("file")
    sp = add("accepts", cmd_accepts, "run a word, exit 0 iff accepted")
    sp.add_argument("file")
    sp.add_argument("word", help="space separated orbit:value letters")
    sp = add("empty", cmd_empty, "exit 0 iff the language is empty")
    sp.add_argument("file")
    sp = add("find-word", cmd_find_word, "print an accepted word")
    sp.add_argument("file")
    for name, fn, help_ in (("minimize", cmd_minimize, "quotient until no congruence remains"),
                            ("is-minimal", cmd_is_minimal, "exit 0 minimal, 1 not, 2 unknown")):
        sp = add(name, fn, help_)
        sp.add_argument("file")
        sp.add_argument("--cap", type=int, default=64, help="char search cap for Z classes")
        if name == "minimize":
            sp.add_argument("-o", "--output")
            sp.add_argument("--report", help="write the key=value report here")
    sp = add("refine", cmd_refine, "partition refinement table")
    sp.add_argument("file")
    sp.add_argument("--steps", type=int, required=True)

    sp = add("gen", cmd_gen, "emit a generated automaton")
    sp.add_argument("name", choices=["diffk", "binprefix", "cm2"])
    sp.add_argument("-o", "--output")
    sp.add_argument("--set", help="diffk: periodic set text")
    sp.add_argument("--mod", type=int, help="diffk: modulus for --residues")
    sp.add_argument("--residues", type=int, nargs="*", help="diffk: residues mod --mod")
    sp.add_argument("--values", type=int, nargs="*", help="diffk: extra finite members")
    sp.add_argument("--machine", default="inc2", help="cm2: built-in machine name")
    sp.add_argument("--program", help="cm2: counter machine program file")
    sp.add_argument("--from", dest="source", default="0,0,0", help="cm2: start config state,c1,c2")
    sp.add_argument("--to", dest="target", default="0,1,0", help="cm2: goal config state,c1,c2")

    ep = add("epad", None, "existential Presburger with divisibility")
    esub = ep.add_subparsers(dest="epad_command", required=True)
    sp = esub.add_parser("solve", help="decide a formula file")
    sp.set_defaults(fn=cmd_epad)
    sp.add_argument("file")
    sp.add_argument("--cap", type=int, default=64)
    sp.add_argument("--box", type=int, help="search witnesses with |x| <= BOX only")
    return p


def main(argv=None, stdout=None, stdin=None) -> int:
    out = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else OK
    try:
        return args.fn(args, out, stdin)
    except InputError as e:
        sys.stderr.write(f"sla: {e}\n")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
