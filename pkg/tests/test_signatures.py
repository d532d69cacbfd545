import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from sla.atoms import Element, Orbit, OrbitFiniteSet, act
from sla.automata import accepts, run, step
from sla.constructions import duplicate_orbit, random_dfa, random_finite_dfa, random_z_map
from sla.minimize import set_partitions
from sla.signatures import (EquivalenceSignature, InvalidSignature, NotACongruence,
                            check_signature, equiv, is_congruence, is_nontrivial, quotient,
                            refine, refinement_chain, respects_accepting, shift_holds, shift_set)
from sla.textio import parse_automaton

from oracles import (CORPUS, accepted_words, letter_sample, pieces_lcm, related_by_generators,
                     shift_set_by_table)


def load(name):
    return parse_automaton((CORPUS / name).read_text())


def random_signature(rng, states):
    ids = list(states.ids)
    parts = list(set_partitions(ids))
    classes = rng.choice(parts)
    chars, offsets = [], {}
    for cl in classes:
        ks = [states.char(t) for t in cl]
        fin = [k for k in ks if k]
        if not fin:
            ch = rng.choice([0, 0, rng.randint(1, 6)])
        else:
            from math import gcd
            g = 0
            for k in fin:
                g = gcd(g, k)
            ch = rng.choice([c for c in range(1, g + 1) if g % c == 0])
        chars.append(ch)
        for t in cl:
            offsets[t] = rng.randint(-8, 8)
    return EquivalenceSignature.from_offsets(classes, chars, offsets)


def random_states(rng, n=3):
    return OrbitFiniteSet(Orbit(f"s{i}", rng.choice([0, 0, 2, 3, 4, 6])) for i in range(n))


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_equiv_matches_generated_relation(seed):
    rng = random.Random(seed)
    S = random_states(rng)
    phi = random_signature(rng, S)
    assert check_signature(phi, S) == []
    elems = [act(Element(t, v), 0, S) for t in S.ids for v in range(-6, 7)]
    for e1 in elems:
        for e2 in rng.sample(elems, 8):
            assert equiv(phi, e1, e2) == related_by_generators(phi, S, e1, e2, window=60)


def test_signature_diagnostics():
    S = OrbitFiniteSet.of(a=4, b=6, z=0)
    assert check_signature(EquivalenceSignature([["a", "b"]], [2], {("a", "b"): 1}), S) == \
        ["state orbit 'z' is in no class"]
    with pytest.raises(InvalidSignature, match="classes but"):
        EquivalenceSignature([["a"], ["b"]], [4])
    msgs = check_signature(EquivalenceSignature([["a", "b"], ["z"]], [4, 0], {("a", "b"): 1}), S)
    assert any("not 0 mod 4" in m for m in msgs)
    msgs = check_signature(EquivalenceSignature([["a"], ["b"], ["z"]], [4, 6, 0], {("a", "b"): 1}), S)
    assert any("unrelated" in m for m in msgs)
    msgs = check_signature(EquivalenceSignature([["a", "b"], ["z"]], [2, 0], {}), S)
    assert any("no diff connects" in m for m in msgs)
    msgs = check_signature(EquivalenceSignature([["a", "b"], ["z"]], [2, 0],
                                                {("a", "b"): 1, ("b", "a"): 0}), S)
    assert any("cocycle" in m for m in msgs)


def test_identity_and_acceptance_signatures():
    d = load("diffk_odds.aut")
    ident = EquivalenceSignature.identity(d.states)
    assert not is_nontrivial(ident, d.states)
    assert is_congruence(d, ident)
    acc = EquivalenceSignature.by_acceptance(d)
    assert acc.classes == (("bot",), ("eps", "int")) and acc.chars == (1, 1)
    assert respects_accepting(acc, d) and is_nontrivial(acc, d.states)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_shift_set_matches_table(seed):
    rng = random.Random(seed)
    S = OrbitFiniteSet([Orbit("u", 0), Orbit("v", 0), Orbit("w", rng.choice([2, 3, 4]))])
    f = random_z_map(rng, "u", S, max_step=3, spread=5)
    g = random_z_map(rng, "v", S, max_step=3, spread=5)
    phi = random_signature(rng, S)
    deltas = range(-30, 31)
    margin = 3 * pieces_lcm(f, g, phi, S, "u", "v")
    want = shift_set_by_table(f, g, phi, S, deltas, margin)
    got = shift_set(f, g, phi, S)
    assert {D for D in deltas if D in got} == {D for D in deltas if want[D]}


def test_shift_holds_on_window():
    d = load("diffk_odds.aut")
    phi = EquivalenceSignature.identity(d.states)
    m = d.map_for("int", "z")
    assert shift_holds(m, m, phi, d.states, 0, range(-10, 10))
    S = shift_set(m, m, phi, d.states)
    assert 2 in S and 1 not in S and 0 in S


def congruence_violation(d, phi, values=range(-6, 7)):
    letters = letter_sample(d, range(-4, 5))
    elems = [act(Element(t, v), 0, d.states) for t in d.states.ids for v in values]
    for e1, e2 in itertools.product(elems, repeat=2):
        if equiv(phi, e1, e2):
            for a in letters:
                if not equiv(phi, step(d, e1, a), step(d, e2, a)):
                    return (e1, e2, a)
    return None


@pytest.mark.parametrize("seed", range(25))
def test_is_congruence_against_sampling(seed):
    rng = random.Random(seed)
    d = random_finite_dfa(rng, n_states=3, n_letters=1, max_char=4) if seed % 2 else \
        random_dfa(rng, n_states=2, n_letters=1, max_char=4)
    phi = random_signature(rng, d.states)
    ok = is_congruence(d, phi)
    if ok:
        assert congruence_violation(d, phi) is None
    else:
        assert congruence_violation(d, phi, range(-30, 31)) is not None


def test_quotient_of_duplicate():
    d = load("dup_diffk_odds.aut")
    phi = EquivalenceSignature.from_offsets([["bot"], ["eps"], ["int", "int_copy"]], [1, 1, 0],
                                            {"int": 0, "int_copy": 3})
    if not is_congruence(d, phi):
        phi = EquivalenceSignature.from_offsets([["bot"], ["eps"], ["int", "int_copy"]], [1, 1, 0],
                                                {"int": 0, "int_copy": -3})
    assert is_congruence(d, phi)
    q, f = quotient(d, phi)
    assert len(q.states) == 3
    letters = letter_sample(d, range(-3, 4))
    for word, acc in accepted_words(d, letters, 3):
        assert accepts(q, word) == acc
        assert run(q, word) == f(run(d, word))


def test_quotient_rejects_bad_signature():
    d = load("diffk_odds.aut")
    phi = EquivalenceSignature([["bot"], ["eps"], ["int"]], [1, 1, 1], {})
    with pytest.raises(NotACongruence):
        quotient(d, phi)
    mixed = EquivalenceSignature.from_offsets([["bot", "eps"], ["int"]], [1, 0], {})
    with pytest.raises(NotACongruence, match="accepting"):
        quotient(d, mixed)


def n_equivalent(d, e1, e2, n, letters):
    w1 = dict(accepted_words_from(d, e1, letters, n))
    w2 = dict(accepted_words_from(d, e2, letters, n))
    return w1 == w2


def accepted_words_from(d, q0, letters, n):
    stack = [((), q0)]
    while stack:
        w, q = stack.pop()
        yield w, q.orbit in d.accepting
        if len(w) < n:
            for a in letters:
                stack.append((w + (a,), step(d, q, a)))


@pytest.mark.parametrize("seed", range(10))
def test_refinement_chain_is_language_equivalence(seed):
    rng = random.Random(100 + seed)
    d = random_finite_dfa(rng, n_states=3, n_letters=1, max_char=3, finite_letters=False) \
        if seed % 2 else random_dfa(rng, n_states=2, n_letters=1, max_char=3, max_step=2, spread=3)
    chain = refinement_chain(d, 2)
    letters = letter_sample(d, range(-14, 15))
    elems = [act(Element(t, v), 0, d.states) for t in d.states.ids for v in range(-3, 4)]
    for n, phi in enumerate(chain):
        for e1, e2 in itertools.product(elems, repeat=2):
            assert equiv(phi, e1, e2) == n_equivalent(d, e1, e2, n, letters)
        if n:
            # refinement: n-equivalence implies (n-1)-equivalence
            for e1, e2 in itertools.product(elems, repeat=2):
                if equiv(phi, e1, e2):
                    assert equiv(chain[n - 1], e1, e2)


def test_refine_on_binary_prefixes():
    d = load("binprefix.aut")
    chain = refinement_chain(d, 4)
    assert [sorted(phi.chars) for phi in chain[1:]] == [[1, 1, 2 ** n] for n in range(1, 5)]


def test_refine_fixpoint_is_a_congruence():
    d = duplicate_orbit(load("diffk_odds.aut"), "int", 3)
    phi = EquivalenceSignature.by_acceptance(d)
    for _ in range(6):
        nxt = refine(d, phi)
        if nxt == phi:
            break
        phi = nxt
    assert refine(d, phi) == phi
    assert is_congruence(d, phi)
