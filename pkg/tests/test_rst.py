import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wildquot.errors import ExponentOutOfRange
from wildquot.rst import (CANONICAL, NOT_CANONICAL, TERMINAL, AgeVector, age, classify_cyclic,
                          cyclic_group, rst_classify)


def test_diagonal_c3_in_sl3():
    g = AgeVector(3, (1, 1, 1))
    res = rst_classify([g, g.inverse()])
    assert res.verdict == CANONICAL
    assert [a for _, a in res.ages] == [Fraction(1), Fraction(2)]
    assert classify_cyclic(3, (1, 1, 1)).verdict == CANONICAL


def test_a1_singularity():
    res = classify_cyclic(2, (1, 1))
    assert res.verdict == CANONICAL
    assert [a for _, a in res.ages] == [Fraction(1)]


def test_pseudo_reflection_reported():
    res = classify_cyclic(3, (1, 0, 0))
    assert res.verdict == NOT_CANONICAL
    assert age(AgeVector(3, (1, 0, 0))) == Fraction(1, 3)
    assert [str(v) for v in res.pseudo_reflections] == ["(1/3)(1, 0, 0)", "(1/3)(2, 0, 0)"]


def test_terminal_and_empty():
    # 1/5(1,2,3,4): smallest age is 2
    assert classify_cyclic(5, (1, 2, 3, 4)).verdict == TERMINAL
    assert rst_classify([]).verdict == TERMINAL
    ident = AgeVector(3, (0, 0, 0))
    assert rst_classify([ident]).ages == []
    assert rst_classify([ident], include_identity=True).ages == [(ident, Fraction(0))]


def test_age_is_exact_rational():
    a = age(AgeVector(7, (1, 2, 4)))
    assert isinstance(a, Fraction) and a == 1


@pytest.mark.parametrize("l,exps", [(3, (3, 0)), (3, (-1,)), (0, (0,))])
def test_exponent_out_of_range(l, exps):
    with pytest.raises(ExponentOutOfRange):
        AgeVector(l, exps)


def _random_vectors(n, seed=20):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        l = rng.randint(1, 30)
        d = rng.randint(1, 6)
        out.append(AgeVector(l, tuple(rng.randrange(l) for _ in range(d))))
    return out


def test_age_inverse_identity_on_1000_vectors():
    vecs = _random_vectors(1000)
    assert len(vecs) == 1000
    for v in vecs:
        nonzero = sum(1 for a in v.exps if a)
        assert age(v) + age(v.inverse()) == nonzero


def test_permutation_invariance():
    rng = random.Random(21)
    for v in _random_vectors(300, seed=22):
        e = list(v.exps)
        rng.shuffle(e)
        assert age(AgeVector(v.l, tuple(e))) == age(v)


_vec = st.integers(1, 12).flatmap(
    lambda l: st.lists(st.integers(0, l - 1), min_size=1, max_size=4).map(
        lambda e: AgeVector(l, tuple(e))))
_RANK = {NOT_CANONICAL: 0, CANONICAL: 1, TERMINAL: 2}


@settings(max_examples=300, derandomize=True, deadline=None)
@given(st.lists(_vec, max_size=6), _vec)
def test_classifier_monotone(elems, extra):
    before = rst_classify(elems).verdict
    after = rst_classify(elems + [extra]).verdict
    assert _RANK[after] <= _RANK[before]


def test_cyclic_group_and_faithfulness():
    g = AgeVector(6, (2, 4))
    assert not g.is_faithful_order()
    assert len(cyclic_group(g)) == 3
    assert str(g.power(2)) == "(1/6)(4, 2)"
    assert classify_cyclic(6, (2, 4)).unfaithful
