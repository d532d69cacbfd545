import pytest
from hypothesis import given, strategies as st

from sla.atoms import Element, OrbitFiniteSet
from sla.semilinear import (DimensionMismatch, LinearSet, LinearSetUnion, MapStructureError, Piece,
                            PiecewiseAffineMap, Progression, affine_on_z, check_window,
                            constant_map, crt_pair, egcd, first_two, identity_map, lcm,
                            lsu_is_empty, lsu_member, lsu_union, progression_intersect, pw_eval)

U = OrbitFiniteSet.of(z=0, f=5, one=1)


def test_lcm_conventions():
    assert lcm() == 1
    assert lcm(4, 6) == 12
    assert lcm(-4, 6) == 12
    assert lcm(3, 0) == 0


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_egcd_bezout(a, b):
    g, x, y = egcd(a, b)
    assert a * x + b * y == g
    if a or b:
        assert g != 0 and a % g == 0 and b % g == 0


@given(st.integers(0, 30), st.integers(1, 12), st.integers(0, 30), st.integers(1, 12))
def test_crt_against_enumeration(a1, m1, a2, m2):
    sol = crt_pair(a1, m1, a2, m2)
    hits = [x for x in range(lcm(m1, m2)) if x % m1 == a1 % m1 and x % m2 == a2 % m2]
    if sol is None:
        assert hits == []
    else:
        assert hits == [sol[0]] and sol[1] == lcm(m1, m2)


def test_progression_basics():
    p = Progression(3, -2, 4)
    assert p.elements() == [3, 1, -1, -3]
    assert p.lo == -3 and p.hi == 3 and p.last == -3
    assert p.param(-1) == 2 and p.param(0) is None and p.param(5) is None
    assert first_two(Progression(0, 5)) == [0, 5]
    with pytest.raises(ValueError):
        Progression(0, 0)
    with pytest.raises(ValueError):
        Progression(0, 1, 0)
    with pytest.raises(ValueError):
        Progression(0, 1).elements()


progs = st.builds(Progression, st.integers(-15, 15), st.integers(-6, 6).filter(bool),
                  st.one_of(st.none(), st.integers(1, 8)))


@given(progs, progs)
def test_intersection_matches_membership(p, q):
    r = progression_intersect(p, q)
    for x in range(-80, 81):
        want = x in p and x in q
        assert (r is not None and x in r) == want
    if r is not None and r.lo is not None:
        assert r.step > 0


def test_locate_reports_gaps_and_overlaps():
    gap = PiecewiseAffineMap("z", (Piece(Progression(0, 1), "z", 1, 0),))
    with pytest.raises(MapStructureError, match="gap"):
        gap.locate(-1)
    overlap = PiecewiseAffineMap("z", (Piece(Progression(0, 1), "z"), Piece(Progression(4, -1), "z")))
    with pytest.raises(MapStructureError, match="overlap"):
        overlap.locate(2)


def test_pw_eval_uses_parameter_and_canonicalizes():
    m = PiecewiseAffineMap("z", (Piece(Progression(10, 3), "f", 2, 1),
                                 Piece(Progression(9, -1), "z", 1, 0),
                                 Piece(Progression(11, 3), "z", 0, 0),
                                 Piece(Progression(12, 3), "z", 0, 0)))
    assert pw_eval(m, 16, U) == Element("f", (2 * 2 + 1) % 5)
    assert pw_eval(m, 7, U) == Element("z", 2)


def test_finite_source_reduced_mod_k():
    m = PiecewiseAffineMap("f", (Piece(Progression(0, 1, 5), "z", 1, 100),))
    assert pw_eval(m, 7, U) == Element("z", 102)


@given(st.integers(-100, 100), st.integers(-4, 4), st.integers(-9, 9))
def test_standard_maps(x, a, b):
    assert pw_eval(identity_map("z"), x, U) == Element("z", x)
    assert pw_eval(affine_on_z("z", "z", a, b), x, U) == Element("z", a * x + b)
    assert pw_eval(constant_map("z", "f", 7), x, U) == Element("f", 2)
    assert pw_eval(constant_map("f", "z", 3, 5), x, U) == Element("z", 3)


def test_check_window_covers_hull_and_periods():
    m = PiecewiseAffineMap("z", (Piece(Progression(2, 3, 4), "z"),))
    w = check_window([m], [4])
    assert w.start == 2 - 36 and w.stop == 11 + 36 + 1


def test_linear_set_unions():
    r = LinearSetUnion(2, (LinearSet((0, 1), ((1, 1),)),))
    assert lsu_member(r, (5, 6)) and not lsu_member(r, (5, 5)) and not lsu_member(r, (-1, 0))
    assert lsu_is_empty(LinearSetUnion(2))
    both = lsu_union(r, LinearSetUnion(2, (((0, 0), ()),)))
    assert lsu_member(both, (0, 0))
    with pytest.raises(DimensionMismatch):
        LinearSetUnion(2, (LinearSet((0,), ()),))
    with pytest.raises(DimensionMismatch):
        lsu_member(r, (1, 2, 3))
