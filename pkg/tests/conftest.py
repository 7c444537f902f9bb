import pytest

from wildquot.ff import make_field, sample_parameter
from wildquot.groups import build_group
from wildquot.invariants import (fit_relation, minimal_generators,
                                 display_normalized_relation)
from wildquot.towers import run_tower


@pytest.fixture(scope="session")
def F3():
    return make_field(3, 1)


@pytest.fixture(scope="session")
def F9():
    return make_field(3, 2)


@pytest.fixture(scope="session")
def F81():
    return make_field(3, 4)


def _case_data(case, seed):
    F = make_field(3, 4)
    a = sample_parameter(F, "not_in_prime_subfield", seed)
    b = F.zero() if case == "b0" else sample_parameter(F, "nonzero", seed + 50_000)
    G = build_group(a, b)
    gs = minimal_generators(G, 12)
    fit = fit_relation(gs, 20)
    rel = display_normalized_relation(fit.relation, case, a, b)
    consts = {"a": a, "b": b, "alpha": a ** 3 - a}
    return {"F": F, "a": a, "b": b, "G": G, "gs": gs, "fit": fit, "rel": rel, "consts": consts}


@pytest.fixture(scope="session")
def b0_data():
    d = _case_data("b0", 0)
    d["tower"] = run_tower(d["rel"], "b0", d["consts"])
    return d


@pytest.fixture(scope="session")
def bne0_data():
    d = _case_data("bne0", 0)
    d["tower"] = run_tower(d["rel"], "bne0", d["consts"])
    return d
