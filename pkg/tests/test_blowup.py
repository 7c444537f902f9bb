import pytest

from wildquot.blowup import (NEG_INF, ChartMap, base_chart, blowup_coordinate_center,
                             codim_regularity_check, composition_check, fold_ledger,
                             overlap_consistency, pullback_exceptional, strict_transform,
                             verify_singular_locus)
from wildquot.errors import (CenterNotInSingularLocus, InconsistentTower, NonCoordinateCenter,
                             ZeroPolynomial)
from wildquot.ff import make_field
from wildquot.groebner import Ideal
from wildquot.poly import PolyRing

F3 = make_field(3, 1)
R4 = PolyRing(F3, ("x1", "x2", "x3", "x4"))
NAMES = {"x1": ("W_{1,t}", {"x2": "u_t", "x3": "v_t"}),
         "x2": ("W_{1,u}", {"x1": "t_u", "x3": "v_u"}),
         "x3": ("W_{1,v}", {"x1": "t_v", "x2": "u_v"})}


def model_b0():
    # leading part of the b = 0 relation
    return R4.parse("x2^9 - x3^2 + x1^9*x4")


def test_three_charts_and_t_chart_map():
    step = blowup_coordinate_center(base_chart(model_b0()), ("x1", "x2", "x3"), "E1", 1, NAMES)
    assert [c.name for c in step.charts_out] == ["W_{1,t}", "W_{1,u}", "W_{1,v}"]
    assert step.center_codim == 3 and step.k_coefficient == 2
    t = step.chart("W_{1,t}")
    assert t.vars == ("x1", "u_t", "v_t", "x4")
    m = step.maps[0]
    assert m.images["x2"] == t.ring.parse("u_t*x1") and m.images["x3"] == t.ring.parse("v_t*x1")
    assert step.hypersurface_multiplicity == {"W_{1,t}": 2, "W_{1,u}": 2, "W_{1,v}": 2}
    assert t.hypersurface == t.ring.parse("x1^7*(u_t^9 + x4) - v_t^2")
    assert "x1" in m.describe()


def test_codim_two_center_names():
    step = blowup_coordinate_center(base_chart(model_b0()), ("x1", "x2", "x3"), "E1", 1, NAMES)
    t = step.chart("W_{1,t}")
    s2 = blowup_coordinate_center(t, ("x1", "v_t"), "E2", 2,
                                  {"x1": ("W_{2,t}", {"v_t": "t_2"})})
    c = s2.chart("W_{2,t}")
    assert s2.k_coefficient == 1
    assert s2.maps[0].images["v_t"] == c.ring.parse("t_2*x1")
    assert c.hypersurface == c.ring.parse("x1^5*(u_t^9 + x4) - t_2^2")
    assert s2.pullbacks["W_{2,t}"] == {"E1": {"E2": 1}}


def test_bad_centers():
    c = base_chart(model_b0())
    with pytest.raises(NonCoordinateCenter):
        blowup_coordinate_center(c, ("x1",), "E1")
    with pytest.raises(NonCoordinateCenter):
        blowup_coordinate_center(c, ("x1", "q"), "E1")
    smooth = base_chart(R4.parse("x1 + x2^2"))
    with pytest.raises(CenterNotInSingularLocus):
        blowup_coordinate_center(smooth, ("x2", "x3"), "E1", require_singular=True)
    step = blowup_coordinate_center(smooth, ("x2", "x3"), "E1")
    assert not step.center_in_singular_locus


def test_strict_transform_multiplicity_zero_and_zero_poly():
    c = base_chart(R4.parse("x4 + 1"))
    step = blowup_coordinate_center(c, ("x1", "x2"), "E1")
    assert set(step.hypersurface_multiplicity.values()) == {0}
    m = step.maps[0]
    with pytest.raises(ZeroPolynomial):
        strict_transform(R4.zero(), m, m.exceptional)


def test_bne0_leading_part_multiplicity_three():
    f = R4.parse("x2^5 - x3^3 - x1^6*x4 + x1*x2^3*x3")
    step = blowup_coordinate_center(base_chart(f), ("x1", "x2", "x3"), "E1", 1, NAMES)
    assert set(step.hypersurface_multiplicity.values()) == {3}


def test_pullback_of_divisor_missing_center():
    f = R4.parse("x2^9 - x3^2 + x1^9*x4")
    c = base_chart(f, exceptional={"D": R4.gen("x4")})
    step = blowup_coordinate_center(c, ("x1", "x2", "x3"), "E1", 1, NAMES)
    assert step.pullbacks["W_{1,t}"] == {"D": {"D": 1}}
    dec, local = pullback_exceptional({"D": R4.gen("x4")}, step.maps[0], "E1")
    assert dec == {"D": {"D": 1}} and "E1" in local


def test_fold_ledger_examples():
    b0 = fold_ledger([("E1", 2), ("E2", 1), ("E3", 1), ("E4", 1)],
                     [{}, {"E1": {"E2": 1}}, {"E2": {"E3": 1}}, {"E3": {"E4": 1}}], [2, 2, 2, 2])
    assert b0.final == {"E4": -3}
    bne0 = fold_ledger([("E1", 2), ("E2", 1)], [{}, {"E1": {"E1": 1, "E2": 1}}], [3, 2])
    assert bne0.final == {"E1": -1, "E2": -2}
    assert bne0.entries == {"E1": (2, -3), "E2": (3, -5)}
    toy = fold_ledger([("E1", 1)], [{}], [0])
    assert toy.final == {"E1": 1}
    with pytest.raises(InconsistentTower):
        fold_ledger([("E1", 1)], [], [0])
    with pytest.raises(InconsistentTower):
        fold_ledger([("E1", 2), ("E2", 1)], [{}, {}], [3, 2])  # E1 has no recorded pullback


def test_ledger_per_step_identity():
    # (K + X) on step i = pullback of step i-1 plus (k_i - m_i) E_i
    b0 = fold_ledger([("E1", 2), ("E2", 1)], [{}, {"E1": {"E2": 1}}], [2, 2])
    assert any("phi_2^*E1 = E2" in ln for ln in b0.lines)
    assert b0.lines[-1] == "K_X2 = phi^*K_X - E2"


def test_singular_locus_and_regularity_smooth():
    c = base_chart(R4.parse("x1 + x2^2"))
    assert codim_regularity_check(c) is NEG_INF
    step = blowup_coordinate_center(base_chart(model_b0()), ("x1", "x2", "x3"), "E1", 1, NAMES)
    t = step.chart("W_{1,t}")
    rep = verify_singular_locus(t, Ideal(t.ring, [t.ring.gen("x1"), t.ring.gen("v_t")]))
    assert rep["equal"]
    assert composition_check(t, model_b0())
    assert overlap_consistency(step.chart("W_{1,t}"), step.chart("W_{1,u}"))["agree_up_to_unit"]


def test_chart_map_checks_target():
    step = blowup_coordinate_center(base_chart(model_b0()), ("x1", "x2", "x3"), "E1", 1, NAMES)
    m = step.maps[1]
    assert isinstance(m, ChartMap) and m.target is step.chart("W_{1,u}")
    assert m.apply(R4.gen("x1")) == m.target.ring.parse("t_u*x2")
