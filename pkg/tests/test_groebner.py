import pytest

from wildquot.errors import EmptyLocus, ResourceBudgetExceeded, RingMismatch
from wildquot.ff import make_field
from wildquot.groebner import (BUDGET_ENV, Ideal, buchberger, contains_one, default_budget,
                               dimension, ideal_dimension, ideal_membership, loci_equal,
                               locus_inclusion_report, normal_form, radical_membership)
from wildquot.poly import PolyRing

F3 = make_field(3, 1)
F81 = make_field(3, 4)
XY = PolyRing(F3, ("x", "y"), "lex")
CH = PolyRing(F3, ("x1", "x4", "u_t", "v_t"))


def I(ring, *texts):
    return Ideal(ring, [ring.parse(t) for t in texts])


def test_already_reduced_basis():
    G = buchberger(I(XY, "x", "y"))
    assert [str(g) for g in G.basis] == ["x", "y"]


def test_one_s_pair():
    G = buchberger(I(XY, "x - y", "y^2"))
    assert G.basis == [XY.parse("x - y"), XY.parse("y^2")]


def test_unit_ideal():
    G = buchberger(I(XY, "1"))
    assert G.is_unit() and G.basis == [XY.one()]
    with pytest.raises(EmptyLocus):
        ideal_dimension(G)


def test_basis_is_reduced_and_closed_under_s_pairs():
    R = PolyRing(F3, ("x", "y", "z"))
    G = buchberger(I(R, "x^2*y - z", "x*y^2 + z^2", "x*z - y"))
    lms = G.leading_monomials()
    for i, a in enumerate(lms):
        for j, b in enumerate(lms):
            if i != j:
                assert not all(p <= q for p, q in zip(a, b))
    for g in G.basis:
        assert g.lc() == F3.one()
    # every pairwise S-polynomial reduces to zero
    from wildquot.groebner import _Elem, _reduce, _spoly
    elems = [_Elem(g.terms, g.lm()) for g in G.basis]
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            assert not _reduce(_spoly(elems[i], elems[j], F3), elems, F3, R.key)


def test_deterministic():
    R = PolyRing(F81, ("x", "y", "z"))
    a = F81.gen()
    gens = [R.parse("x^3 - y*z"), R.gen("y") ** 2 - R.gen("z").scale(a), R.parse("x*y - z^2")]
    assert buchberger(Ideal(R, gens)).basis == buchberger(Ideal(R, gens)).basis


def test_membership():
    G = buchberger(I(XY, "x"))
    assert ideal_membership(XY.parse("x*y"), G)
    assert not ideal_membership(XY.parse("x + 1"), G)


def test_normal_form_idempotent():
    R = PolyRing(F3, ("x", "y", "z"))
    G = buchberger(I(R, "x^2 - y", "y^2 - z*x"))
    for t in ["x^5 + y^3*z", "x*y*z + 1", "z^4 - x^3*y"]:
        f = R.parse(t)
        nf = normal_form(f, G)
        assert normal_form(nf, G) == nf
        assert ideal_membership(f - nf, G)


def test_membership_closed_under_multiples():
    R = PolyRing(F3, ("x", "y", "z"))
    G = buchberger(I(R, "x*y - z", "y^2"))
    f = R.parse("x*y^2 - y*z")
    assert ideal_membership(f, G)
    assert ideal_membership(f * R.parse("x + z^2 + 1"), G)


def test_radical_membership():
    X = PolyRing(F3, ("x", "y"))
    assert radical_membership(X.gen("x"), I(X, "x^2"))
    assert not radical_membership(X.gen("y"), I(X, "x^2"))


def test_loci_equal_examples():
    X = PolyRing(F3, ("x", "y"))
    assert loci_equal(I(X, "x^2"), I(X, "x"))
    assert not loci_equal(I(X, "x"), I(X, "x", "y"))
    rep = locus_inclusion_report(I(X, "x"), I(X, "x", "y"))
    assert rep == {"I_in_rad_J": [True], "J_in_rad_I": [True, False]}


def test_loci_equal_is_an_equivalence_on_samples():
    X = PolyRing(F3, ("x", "y", "z"))
    A, B, C = I(X, "x^2", "y"), I(X, "x", "y^3"), I(X, "x*y", "x", "y^2 + x")
    for P in (A, B, C):
        assert loci_equal(P, P)
    assert loci_equal(A, B) and loci_equal(B, A)
    assert loci_equal(B, C) and loci_equal(A, C)


def test_dimension_of_coordinate_subspaces():
    assert dimension(I(CH, "x1", "v_t")) == 2
    assert dimension(I(CH, "x1")) == 3
    assert dimension(I(CH, "x1", "x4", "u_t", "v_t")) == 0


def test_dimension_of_curve():
    R = PolyRing(F81, ("x1", "x4", "u_t", "y"))
    b = F81.gen() + 1
    J = Ideal(R, [R.gen("x1"), R.gen("u_t"), R.gen("y") ** 3 + R.gen("x4").scale(b ** 6)])
    assert dimension(J) == 1


def test_budget_and_env(monkeypatch):
    R = PolyRing(F3, ("x", "y", "z"))
    J = I(R, "x^3 - y*z^2 + 1", "y^3 - x*z", "z^3 - x^2*y + x")
    with pytest.raises(ResourceBudgetExceeded):
        buchberger(J, budget=1)
    monkeypatch.setenv(BUDGET_ENV, "7")
    assert default_budget() == 7
    monkeypatch.setenv(BUDGET_ENV, "junk")
    assert default_budget() > 7


def test_contains_one_and_ring_checks():
    X = PolyRing(F3, ("x", "y"))
    assert contains_one(I(X, "x", "x + 1"))
    assert not contains_one(Ideal(X, []))
    with pytest.raises(RingMismatch):
        Ideal(X, [CH.gen("x1")])
    with pytest.raises(RingMismatch):
        radical_membership(CH.gen("x1"), I(X, "x"))


def test_jacobian_of_b0_hypersurface(b0_data):
    from wildquot.blowup import base_chart, jacobian_ideal
    J = jacobian_ideal(base_chart(b0_data["rel"]))
    R = J.ring
    for v in ("x1", "x2", "x3"):
        assert radical_membership(R.gen(v), J)
    assert not radical_membership(R.gen("x4"), J)
    # on the slice x1 = 0 the partials generate x2^9 - x3^2
    sl = Ideal(R, J.gens + [R.gen("x1")])
    assert ideal_membership(R.parse("x2^9 - x3^2"), buchberger(sl))
    assert dimension(J) == 1
