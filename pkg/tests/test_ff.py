import itertools

import pytest

from wildquot.errors import FieldMismatch, InfeasibleConstraint, NotPrime
from wildquot.ff import FieldElement, is_irreducible, make_field, sample_parameter


def els(F):
    return [F.element(c) for c in range(F.q)]


def test_prime_field_modulus_is_x(F3):
    assert F3.q == 3 and F3.k == 1
    assert F3.element(2) + F3.element(2) == F3.element(1)


def test_composite_characteristic_rejected():
    with pytest.raises(NotPrime):
        make_field(4, 1)


def test_modulus_is_irreducible_and_deterministic():
    for k in (2, 3, 4):
        F = make_field(3, k)
        assert is_irreducible(F.modulus, 3)
        assert make_field(3, k).modulus == F.modulus
    # seed 1 picks a different irreducible
    assert make_field(3, 2, 1).modulus != make_field(3, 2, 0).modulus


def test_frobenius_fixes_f9_pointwise(F9):
    for x in els(F9):
        assert x ** 9 == x


def test_multiplicative_group_order(F81):
    nonzero = [x for x in els(F81) if not x.is_zero()]
    assert len(nonzero) == 80
    assert all(x ** 80 == F81.one() for x in nonzero)


def test_f9_units_have_order_dividing_8(F9):
    for x in els(F9)[1:]:
        assert x ** 8 == F9.one()


def test_cube_of_sum_in_f3(F3):
    for a, b, c in itertools.product(els(F3), repeat=3):
        assert (a + b + c) ** 3 == a ** 3 + b ** 3 + c ** 3


@pytest.mark.parametrize("k", [1, 2])
def test_field_axioms_exhaustive(k):
    F = make_field(3, k)
    E = els(F)
    for x, y in itertools.product(E, repeat=2):
        assert x + y == y + x and x * y == y * x
        assert x - y + y == x
        if not y.is_zero():
            assert (x / y) * y == x
    for x, y, z in itertools.product(E, repeat=3):
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
    for x in E[1:]:
        assert x * x.inverse() == F.one()


@pytest.mark.parametrize("k", [1, 2])
def test_frobenius_automorphism_fixes_prime_field(k):
    F = make_field(3, k)
    E = els(F)
    for x, y in itertools.product(E, repeat=2):
        assert (x * y).frobenius() == x.frobenius() * y.frobenius()
        assert (x + y).frobenius() == x.frobenius() + y.frobenius()
    fixed = [x for x in E if x.frobenius() == x]
    assert sorted(x.code for x in fixed) == [0, 1, 2]


@pytest.mark.parametrize("k", [2, 3])
def test_alpha_vanishes_exactly_on_prime_field(k):
    F = make_field(3, k)
    for a in els(F):
        assert ((a ** 3 - a).is_zero()) == a.in_prime_subfield()


def test_division_by_zero(F9):
    with pytest.raises(ZeroDivisionError):
        F9.one() / F9.zero()


def test_field_mismatch(F9, F81):
    with pytest.raises(FieldMismatch):
        F9.one() + F81.one()


def test_sample_parameter_constraints(F3, F9):
    with pytest.raises(InfeasibleConstraint):
        sample_parameter(F3, "not_in_prime_subfield", 0)
    for s in range(20):
        e = sample_parameter(F9, "not_in_prime_subfield", s)
        assert not (e ** 3 - e).is_zero()
        assert not sample_parameter(F9, "nonzero", s).is_zero()
        assert sample_parameter(F9, "unconstrained", s) == sample_parameter(F9, "unconstrained", s)


def test_coeffs_and_render(F81):
    g = F81.gen()
    assert isinstance(g, FieldElement)
    assert g.coeffs == (0, 1, 0, 0)
    assert F81.render_code(g.code) == "(0,1,0,0)"
    assert all(0 <= c < 3 for c in (g ** 7).coeffs)
