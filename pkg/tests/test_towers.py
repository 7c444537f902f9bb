import pytest

from wildquot.errors import InconsistentTower
from wildquot.groebner import Ideal, dimension
from wildquot.towers import compose_pullbacks, locus_claims, run_tower, tower_plan


def test_b0_numbers(b0_data):
    t = b0_data["tower"]
    assert t.multiplicities == [2, 2, 2, 2]
    assert t.k_coefficients == [2, 1, 1, 1]
    assert t.pullbacks == [{}, {"E1": {"E2": 1}}, {"E2": {"E3": 1}}, {"E3": {"E4": 1}}]
    assert t.final_ledger == {"E4": -3}
    assert t.not_log_canonical()
    assert t.ledger.lines[-1] == "K_X4 = phi^*K_X - 3E4"


def test_b0_compressed_lines(b0_data):
    c = b0_data["tower"].compressed
    assert c["phi_prime_pullback_E1"] == {"E4": 1}
    assert c["K_line"] == {"E4": 5} and c["K_matches"]
    assert c["X_line"] == {"E4": -8} and c["X_matches"]


def test_b0_hidden_components(b0_data):
    hidden = b0_data["tower"].hidden
    for i, old in ((2, "E1"), (3, "E2"), (4, "E3")):
        assert any(h.startswith(f"step {i}: strict transform of {old} ") for h in hidden)


def test_bne0_numbers(bne0_data):
    t = bne0_data["tower"]
    assert t.multiplicities == [3, 2]
    assert t.k_coefficients == [2, 1]
    assert t.pullbacks == [{}, {"E1": {"E1": 1, "E2": 1}}]
    assert t.final_ledger == {"E1": -1, "E2": -2}
    assert t.not_log_canonical()
    assert t.hidden == []


@pytest.mark.parametrize("which", ["b0_data", "bne0_data"])
def test_all_checks_hold(which, request):
    t = request.getfixturevalue(which)["tower"]
    assert set(t.loci) == set(locus_claims(t.case))
    assert all(v["equal"] for v in t.loci.values())
    assert all(v["equal_up_to_unit"] for v in t.displays.values())
    assert all(t.compositions.values())
    assert all(v["X_misses_uncovered_part"] for v in t.exclusions.values())
    assert t.overlaps and all(o["agree_up_to_unit"] for o in t.overlaps)


def test_b0_final_charts_regularity(b0_data):
    # singular locus of the last charts is a curve
    assert b0_data["tower"].regularity == {"W_{4,t}": 1, "W_{4,u}": 1}


def test_bne0_singular_curve(bne0_data):
    t = bne0_data["tower"]
    ch = t.charts["W_{2,y}"]
    claimed = Ideal(ch.ring, [ch.ring.parse(g, bne0_data["consts"])
                              for g in ("x1", "u_t", "y^3 + b^6*x4")])
    assert dimension(claimed) == 1
    assert t.regularity["W_{2,y}"] == 1 and t.regularity["W_{2,w}"] is None


def test_partial_claim_is_rejected(b0_data):
    from wildquot.blowup import verify_singular_locus
    ch = b0_data["tower"].charts["W_{1,t}"]
    # V(x1, u_t) alone is not the singular locus of this chart
    bad = Ideal(ch.ring, [ch.ring.gen("x1"), ch.ring.gen("u_t")])
    assert not verify_singular_locus(ch, bad)["equal"]


def test_wrong_plan_gives_other_numbers(bne0_data):
    # the b=0 plan applied to the b!=0 relation does not reproduce the b=0 tower
    t = run_tower(bne0_data["rel"], "b0", bne0_data["consts"], checks=False)
    assert t.multiplicities != [2, 2, 2, 2]
    assert t.final_ledger != {"E4": -3}


def test_plan_needs_existing_chart(b0_data, monkeypatch):
    from wildquot import towers
    plan = towers.tower_plan("b0")
    bad = [plan[0], [towers.StepSpec("W_{9,t}", ("x1", "v_t"), plan[1][0].charts)]]
    monkeypatch.setattr(towers, "tower_plan", lambda case: bad)
    with pytest.raises(InconsistentTower):
        run_tower(b0_data["rel"], "b0", b0_data["consts"], checks=False)


def test_compose_and_plan():
    assert compose_pullbacks({"E1": 1}, [{"E1": {"E2": 1}}, {"E2": {"E3": 1}}]) == {"E3": 1}
    assert [len(s) for s in tower_plan("b0")] == [1, 2, 2, 2]
    with pytest.raises(ValueError):
        tower_plan("b1")


def test_as_dict_is_plain(b0_data):
    import json
    d = b0_data["tower"].as_dict()
    json.dumps(d, sort_keys=True)
    assert d["final_ledger"] == {"E4": -3}
