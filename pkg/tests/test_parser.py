import pytest

from wildquot.errors import PolySyntaxError, UnknownVariable
from wildquot.ff import make_field
from wildquot.parser import parse_constant, parse_poly, tokenize
from wildquot.poly import PolyRing, render

F3 = make_field(3, 1)
F81 = make_field(3, 4)
R = PolyRing(F3, ("x1", "x2", "x3", "x4"))
R81 = PolyRing(F81, ("x1", "x2", "x3", "x4"))
CH = PolyRing(F81, ("x1", "x4", "u_t", "y"))


def test_relation_leading_terms():
    f = parse_poly("x2^9 - x3^2 + x1^9*x4", R)
    assert len(f) == 3
    assert f.coeff((0, 0, 2, 0)) == F3.element(2)  # -1 == 2 mod 3


def test_zero_and_integers_mod_p():
    assert parse_poly("0", R).is_zero()
    assert parse_poly("4*x1", R) == R.gen("x1")
    assert parse_poly("3", R).is_zero()


def test_precedence():
    x1, x2 = R.gen("x1"), R.gen("x2")
    assert parse_poly("x1 + x2*x1^2", R) == x1 + x2 * x1 ** 2
    assert parse_poly("-x1^2", R) == -(x1 ** 2)
    assert parse_poly("(x1 + x2)^3", R) == x1 ** 3 + x2 ** 3
    assert parse_poly("x1^2^2", R) == x1 ** 4
    assert parse_poly("--x1", R) == x1


def test_trailing_operator_position():
    with pytest.raises(SyntaxError) as ei:
        parse_poly("x1 + ", R)
    assert ei.value.line == 1 and ei.value.column == 4


def test_errors_have_positions():
    with pytest.raises(PolySyntaxError) as ei:
        parse_poly("x1 +\n  x2 $", R)
    assert (ei.value.line, ei.value.column) == (2, 6)
    with pytest.raises(PolySyntaxError):
        parse_poly("x1 x2", R)  # juxtaposition is not multiplication
    with pytest.raises(PolySyntaxError):
        parse_poly("(x1 + x2", R)
    with pytest.raises(PolySyntaxError):
        parse_poly("x1^x2", R)
    with pytest.raises(PolySyntaxError):
        parse_poly("", R)


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        parse_poly("x9 + 1", R)


def test_named_constants():
    a = F81.gen()
    b = a + 1
    f = parse_poly("y^3 + b^6*x4", CH, {"a": a, "b": b})
    assert f.coeff((0, 1, 0, 0)) == b ** 6
    assert parse_constant("(1+alpha^2)^2", F81, {"alpha": a ** 3 - a}) == (1 + (a ** 3 - a) ** 2) ** 2


def test_tuple_literals_round_trip():
    a = F81.gen()
    f = R81.gen("x1").scale(a ** 5) - R81.gen("x2") ** 3
    assert parse_poly(render(f), R81) == f
    with pytest.raises(PolySyntaxError):
        parse_poly("(1,2,0,0,1)*x1", R81)


DISPLAYED = [
    "x2^9 - x3^2 + x1^9*x4",
    "x1^7*(u_t^9 + x4) - v_t^2",
    "x1^3*(u_t^9 + x4) - t_3^2",
    "x1*(u_t^9 + x4) - t_4^2",
    "x2^7*(1 + t_u^9*x4) - v_u^2",
    "alpha^3*b^2*x2^5 - b^4*x3^3 - b^10*x1^6*x4 + alpha*b^2*x1*x2^3*x3",
    "alpha^3*b^2*u_t^5 + b^4*y^3*x1 - b^10*x1*x4 + alpha*b^2*u_t^3*y*x1",
    "y^3 + b^6*x4",
]


@pytest.mark.parametrize("text", DISPLAYED)
def test_parse_print_parse_idempotent(text):
    names = sorted({t[1] for t in tokenize(text) if t[0] == "name"} - {"alpha", "b"})
    ring = PolyRing(F81, names)
    a = F81.gen() + 2
    consts = {"alpha": a ** 3 - a, "b": a * a}
    once = parse_poly(text, ring, consts)
    assert parse_poly(render(once), ring, consts) == once
