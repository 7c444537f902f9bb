"""The two blow-up towers over the quotient hypersurface, driven by a plan.

A plan lists, per step, which chart gets blown up along which coordinate
center, how the new charts and variables are named, which charts are kept
(the open set the tower continues on) and, for discarded charts, which
coordinates cut out the part not covered by kept charts.  Everything
numeric (strict transforms, multiplicities, pullbacks, ledger) is computed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .blowup import (_apply_pullback, base_chart, blowup_coordinate_center, codim_regularity_check,
                     composition_check, excluded_chart_check, fold_ledger,
                     overlap_consistency, singular_locus_avoids, verify_singular_locus)
from .errors import InconsistentTower
from .groebner import Ideal
from .poly import Poly, PolyRing, divide_by_power, substitute

log = logging.getLogger(__name__)

BASE_VARS = ("x1", "x2", "x3", "x4")


@dataclass
class ChartSpec:
    exceptional: str
    name: str
    rename: dict
    kept: bool = True
    cover: tuple = ()  # for discarded charts: X must miss V(cover)


@dataclass
class StepSpec:
    source: str
    center: tuple
    charts: list


def _b0_plan(steps: int = 4) -> list:
    plan = [[StepSpec("W_0", ("x1", "x2", "x3"), [
        ChartSpec("x1", "W_{1,t}", {"x2": "u_t", "x3": "v_t"}),
        ChartSpec("x2", "W_{1,u}", {"x1": "t_u", "x3": "v_u"}),
        ChartSpec("x3", "W_{1,v}", {"x1": "t_v", "x2": "u_v"}, kept=False, cover=("t_v", "u_v")),
    ])]]
    for i in range(2, steps + 1):
        T = "v_t" if i == 2 else f"t_{i - 1}"
        U = "v_u" if i == 2 else f"u_{i - 1}"
        plan.append([
            StepSpec(f"W_{{{i - 1},t}}", ("x1", T), [
                ChartSpec("x1", f"W_{{{i},t}}", {T: f"t_{i}"}),
                ChartSpec(T, f"W_{{{i},t'}}", {"x1": f"s_{i}"}, kept=False, cover=(f"s_{i}",)),
            ]),
            StepSpec(f"W_{{{i - 1},u}}", ("x2", U), [
                ChartSpec("x2", f"W_{{{i},u}}", {U: f"u_{i}"}),
                ChartSpec(U, f"W_{{{i},u'}}", {"x2": f"r_{i}"}, kept=False, cover=(f"r_{i}",)),
            ]),
        ])
    return plan


def _bne0_plan() -> list:
    first = _b0_plan(1)[0]
    second = [
        StepSpec("W_{1,t}", ("x1", "v_t"), [
            ChartSpec("x1", "W_{2,y}", {"v_t": "y"}),
            ChartSpec("v_t", "W_{2,z}", {"x1": "z"}),
        ]),
        # points of the discarded chart with t_u != 0 sit over W_{1,t}, whose
        # blow-up is covered by the y- and z-charts
        StepSpec("W_{1,u}", ("x2", "v_u"), [
            ChartSpec("v_u", "W_{2,w}", {"x2": "w"}),
            ChartSpec("x2", "W_{2,u'}", {"v_u": "y_u"}, kept=False, cover=("y_u", "t_u")),
        ]),
    ]
    return [first, second]


def tower_plan(case: str) -> list:
    if case == "b0":
        return _b0_plan(4)
    if case == "bne0":
        return _bne0_plan()
    raise ValueError(f"unknown case {case!r}")


# singular-locus claims: chart -> ("locus", generators) or ("avoids", poly)
def locus_claims(case: str) -> dict:
    if case == "b0":
        claims = {"W_{1,t}": ("locus", ["x1", "v_t"]), "W_{1,u}": ("locus", ["x2", "v_u"])}
        for i in (2, 3):
            claims[f"W_{{{i},t}}"] = ("locus", ["x1", f"t_{i}"])
            claims[f"W_{{{i},u}}"] = ("locus", ["x2", f"u_{i}"])
        claims["W_{4,t}"] = ("locus", ["x1", "u_t^9 + x4", "t_4"])
        claims["W_{4,u}"] = ("locus", ["x2", "1 + t_u^9*x4", "u_4"])
        return claims
    return {
        "W_{1,t}": ("locus", ["x1", "v_t"]),
        "W_{1,u}": ("locus", ["x2", "v_u"]),
        "W_{2,y}": ("locus", ["x1", "u_t", "y^3 + b^6*x4"]),
        "W_{2,z}": ("avoids", "z"),
        "W_{2,w}": ("avoids", "t_u*w"),
    }


# -- displayed chart equations, rebuilt from the fitted relation -------------

def _split(rel: Poly, main: list, factor_exp: int):
    """Remove the main terms and divide the rest by x1^factor_exp."""
    R = rel.ring
    rest = {e: c for e, c in rel.terms.items() if e not in main}
    block = divide_by_power(Poly(R, rest), "x1", factor_exp)
    return {e: rel.terms.get(e, 0) for e in main}, block


def _eval_in(block: Poly, images: dict, ring: PolyRing) -> Poly:
    return substitute(block, images, ring)


def expected_displays(case: str, rel: Poly, charts: dict) -> dict:
    """Chart equations in the closed forms the tower is expected to have."""
    out = {}
    if case == "b0":
        main = [(0, 9, 0, 0), (0, 0, 2, 0), (9, 0, 0, 1)]
        _, H = _split(rel, main, 6)
        for name, ch in charts.items():
            R = ch.ring
            g = R.gen
            if name.endswith(",t}") and name != "W_0":
                i = int(name[3:name.index(",")])
                T = "v_t" if i == 1 else f"t_{i}"
                # h_t = x1^-6 H(x1, u_t x1)
                ht = divide_by_power(_eval_in(H, {"x1": g("x1"), "x2": g("u_t") * g("x1"),
                                                  "x3": R.zero(), "x4": R.zero()}, R), "x1", 6)
                out[name] = g("x1") ** (9 - 2 * i) * (g("u_t") ** 9 + g("x4") + g("x1") ** 3 * ht) - g(T) ** 2
            elif name.endswith(",u}"):
                i = int(name[3:name.index(",")])
                U = "v_u" if i == 1 else f"u_{i}"
                hu = divide_by_power(_eval_in(H, {"x1": g("t_u") * g("x2"), "x2": g("x2"),
                                                  "x3": R.zero(), "x4": R.zero()}, R), "x2", 6) * g("t_u") ** 6
                out[name] = g("x2") ** (9 - 2 * i) * (R.one() + g("t_u") ** 9 * g("x4") + g("x2") ** 3 * hu) - g(U) ** 2
        return out
    main = [(0, 5, 0, 0), (0, 0, 3, 0), (6, 0, 0, 1), (1, 3, 1, 0)]
    coeffs, Fb = _split(rel, main, 3)
    A, B, C, D = (rel.ring.base.element(coeffs[m]) for m in main)

    def f1(R, s1, s2, s3):
        # s1^-4 F(s1, s1 s2, s1 s3), evaluated after the substitution
        S = PolyRing(R.base, ("s1", "s2", "s3"))
        gs = S.gens()
        inner = divide_by_power(substitute(Fb, {"x1": gs[0], "x2": gs[0] * gs[1], "x3": gs[0] * gs[2],
                                                "x4": S.zero()}, S), "s1", 4)
        return substitute(inner, {"s1": s1, "s2": s2, "s3": s3}, R)

    def f2(R, s1, s2, s3):
        S = PolyRing(R.base, ("s1", "s2", "s3"))
        gs = S.gens()
        inner = divide_by_power(substitute(Fb, {"x1": gs[0] * gs[1], "x2": gs[0], "x3": gs[0] * gs[2],
                                                "x4": S.zero()}, S), "s1", 4)
        return substitute(inner, {"s1": s1, "s2": s2, "s3": s3}, R)

    for name, ch in charts.items():
        R = ch.ring
        g = R.gen
        if name == "W_{1,t}":
            x1, u, v, x4 = g("x1"), g("u_t"), g("v_t"), g("x4")
            out[name] = (u ** 5 * x1 ** 2).scale(A) + (v ** 3).scale(B) + (x1 ** 3 * x4).scale(C) \
                + (u ** 3 * v * x1 ** 2).scale(D) + x1 ** 4 * f1(R, x1, u, v)
        elif name == "W_{1,u}":
            x2, t, v, x4 = g("x2"), g("t_u"), g("v_u"), g("x4")
            out[name] = (x2 ** 2).scale(A) + (v ** 3).scale(B) + (t ** 6 * x2 ** 3 * x4).scale(C) \
                + (t * v * x2 ** 2).scale(D) + t ** 3 * x2 ** 4 * f2(R, x2, t, v)
        elif name == "W_{2,y}":
            x1, u, y, x4 = g("x1"), g("u_t"), g("y"), g("x4")
            out[name] = (u ** 5).scale(A) + (y ** 3 * x1).scale(B) + (x1 * x4).scale(C) \
                + (u ** 3 * y * x1).scale(D) + x1 ** 2 * f1(R, x1, u, y * x1)
        elif name == "W_{2,z}":
            z, u, v, x4 = g("z"), g("u_t"), g("v_t"), g("x4")
            out[name] = (u ** 5 * z ** 2).scale(A) + v.scale(B) + (z ** 3 * x4 * v).scale(C) \
                + (u ** 3 * z ** 2 * v).scale(D) + z ** 4 * v ** 2 * f1(R, z * v, u, v)
        elif name == "W_{2,w}":
            w, t, v, x4 = g("w"), g("t_u"), g("v_u"), g("x4")
            out[name] = (w ** 2).scale(A) + v.scale(B) + (t ** 6 * w ** 3 * x4 * v).scale(C) \
                + (t * w ** 2 * v).scale(D) + t ** 3 * w ** 4 * v ** 2 * f2(R, w * v, t, v)
    return out


# -- running a tower -------------------------------------------------------

@dataclass
class TowerResult:
    case: str
    steps: list = field(default_factory=list)  # per-step report dicts
    charts: dict = field(default_factory=dict)  # kept charts by name
    ledger: object = None
    multiplicities: list = field(default_factory=list)
    k_coefficients: list = field(default_factory=list)
    pullbacks: list = field(default_factory=list)
    loci: dict = field(default_factory=dict)
    displays: dict = field(default_factory=dict)
    overlaps: list = field(default_factory=list)
    compositions: dict = field(default_factory=dict)
    exclusions: dict = field(default_factory=dict)
    regularity: dict = field(default_factory=dict)
    hidden: list = field(default_factory=list)
    compressed: dict = field(default_factory=dict)

    @property
    def final_ledger(self) -> dict:
        return self.ledger.final

    def not_log_canonical(self) -> bool:
        m = self.ledger.min_coefficient()
        return m is not None and m < -1

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "multiplicities": self.multiplicities,
            "k_coefficients": self.k_coefficients,
            "pullbacks": self.pullbacks,
            "steps": self.steps,
            "singular_loci": self.loci,
            "displays": self.displays,
            "overlaps": self.overlaps,
            "compositions": self.compositions,
            "exclusions": self.exclusions,
            "regularity": self.regularity,
            "hidden_components": self.hidden,
            "compressed_lines": self.compressed,
            "ledger": self.ledger.as_dict(),
            "final_ledger": self.final_ledger,
        }


def compose_pullbacks(vec: dict, pullbacks) -> dict:
    for pull in pullbacks:
        vec = _apply_pullback(vec, pull)
    return vec


def compressed_b0_check(res: TowerResult) -> dict:
    """The one-line summary K_W4 = phi^*K_W0 + 2 phi'^*E1 + 3E4, X_4 = phi^*X - 2 phi'^*E1 - 6E4.

    phi' is the composite of steps 2..4; its pullback of E1 is recomputed
    from the per-step pullbacks and both lines are compared with the ledger.
    """
    pe1 = compose_pullbacks({"E1": 1}, res.pullbacks[1:])
    k_line = dict((n, 2 * c) for n, c in pe1.items())
    k_line["E4"] = k_line.get("E4", 0) + 3
    x_line = dict((n, -2 * c) for n, c in pe1.items())
    x_line["E4"] = x_line.get("E4", 0) - 6
    k_have = {n: k for n, (k, _) in res.ledger.entries.items() if k}
    x_have = {n: x for n, (_, x) in res.ledger.entries.items() if x}
    return {
        "phi_prime_pullback_E1": pe1,
        "K_line": k_line, "K_ledger": k_have, "K_matches": k_line == k_have,
        "X_line": x_line, "X_ledger": x_have, "X_matches": x_line == x_have,
    }


def _merge_pullbacks(parts: list) -> dict:
    merged: dict = {}
    for dec in parts:
        for old, sum_ in dec.items():
            tgt = merged.setdefault(old, {})
            for name, k in sum_.items():
                if name in tgt and tgt[name] != k:
                    raise InconsistentTower(f"pullback of {old} disagrees across charts on {name}")
                tgt[name] = k
    return merged


def _claim_ideal(ring: PolyRing, gens, constants) -> Ideal:
    return Ideal(ring, [ring.parse(g, constants) for g in gens])


def run_tower(relation: Poly, case: str, constants: dict | None = None,
              budget: int | None = None, checks: bool = True) -> TowerResult:
    """Run the planned tower on ``relation`` (a polynomial in x1..x4)."""
    F = relation.ring.base
    ring = PolyRing(F, BASE_VARS, "grevlex")
    f = Poly(ring, dict(relation.terms))
    plan = tower_plan(case)
    constants = dict(constants or {})
    res = TowerResult(case)
    live = {"W_0": base_chart(f, "W_0")}
    claims = locus_claims(case)
    for idx, step_specs in enumerate(plan, 1):
        E = f"E{idx}"
        new_live = {}
        decomps_kept, mults, step_rows = [], set(), []
        for spec in step_specs:
            src = live.get(spec.source)
            if src is None:
                raise InconsistentTower(f"step {idx} expects chart {spec.source}")
            names = {c.exceptional: (c.name, c.rename) for c in spec.charts}
            step = blowup_coordinate_center(src, spec.center, E, idx, names)
            for cs in spec.charts:
                ch = step.chart(cs.name)
                mult = step.hypersurface_multiplicity[cs.name]
                dec = step.pullbacks[cs.name]
                m = next(mp for mp in step.maps if mp.target is ch)
                row = {
                    "chart": cs.name, "source": spec.source, "center": list(spec.center),
                    "kept": cs.kept, "map": m.describe(), "equation": str(ch.hypersurface),
                    "multiplicity": mult,
                    "pullback": {o: dict(sorted(s.items())) for o, s in sorted(dec.items())},
                }
                if cs.kept:
                    new_live[cs.name] = ch
                    decomps_kept.append(dec)
                    mults.add(mult)
                else:
                    if checks:
                        cover = [ch.ring.parse(v) for v in cs.cover]
                        ok = excluded_chart_check(ch, cover, budget)
                        res.exclusions[cs.name] = {"cover": list(cs.cover), "X_misses_uncovered_part": ok}
                        row["X_misses_uncovered_part"] = ok
                    for old, s in dec.items():
                        if old in s:
                            res.hidden.append(f"step {idx}: strict transform of {old} lies only in discarded chart {cs.name}")
                step_rows.append(row)
            if not step.center_in_singular_locus:
                log.warning("step %d: center %s not in the singular locus of %s", idx, spec.center, spec.source)
        if len(mults) != 1:
            raise InconsistentTower(f"step {idx}: multiplicities differ across charts: {sorted(mults)}")
        mult = mults.pop()
        merged = _merge_pullbacks(decomps_kept)
        # a component seen in some kept chart is not hidden
        res.hidden = [h for h in res.hidden
                      if not any(h.startswith(f"step {idx}: strict transform of {o} ") for o, s in merged.items() if o in s)]
        codim = len(step_specs[0].center)
        if any(len(s.center) != codim for s in step_specs):
            raise InconsistentTower(f"step {idx}: centers of different codimension")
        res.multiplicities.append(mult)
        res.k_coefficients.append(codim - 1)
        res.pullbacks.append({o: dict(sorted(s.items())) for o, s in sorted(merged.items())})
        res.steps.append({"index": idx, "exceptional": E, "center_codim": codim,
                          "k_coefficient": codim - 1, "multiplicity": mult, "charts": step_rows})
        live = new_live
        res.charts.update(new_live)

    res.ledger = fold_ledger([(f"E{i}", k) for i, k in enumerate(res.k_coefficients, 1)],
                             res.pullbacks, res.multiplicities)
    if case == "b0" and len(plan) == 4:
        res.compressed = compressed_b0_check(res)
    if not checks:
        return res

    for name, ch in res.charts.items():
        res.compositions[name] = composition_check(ch, f)
    expected = expected_displays(case, f, res.charts)
    for name, want in expected.items():
        have = res.charts[name].hypersurface
        res.displays[name] = {"equal_up_to_unit": have.monic() == want.monic(), "equation": str(have)}
    for name, (kind, data) in claims.items():
        ch = res.charts[name]
        if kind == "locus":
            res.loci[name] = verify_singular_locus(ch, _claim_ideal(ch.ring, data, constants), budget)
        else:
            ok = singular_locus_avoids(ch, ch.ring.parse(data, constants), budget)
            res.loci[name] = {"chart": name, "singular_locus_avoids": data, "equal": ok}
    # overlaps among charts of the same level
    levels: dict = {}
    for name in res.charts:
        levels.setdefault(name[3:name.index(",")], []).append(name)
    for lvl in sorted(levels):
        names = sorted(levels[lvl])
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                res.overlaps.append(overlap_consistency(res.charts[names[i]], res.charts[names[j]]))
    for name in sorted(n for n in res.charts if n.startswith(f"W_{{{len(plan)},")):
        d = codim_regularity_check(res.charts[name], budget)
        res.regularity[name] = d
    return res
