"""Blow-ups of hypersurfaces along coordinate centers, chart by chart.

A chart is an affine 4-space with a hypersurface equation (the strict
transform living there), the local equations of the exceptional divisors
that meet it, and its monomial map down to the base coordinates.  Blowing
up the center V(c_1, ..., c_r) produces one chart per center variable e:
every other c_j is replaced by r_j * e.

Discrepancy bookkeeping follows adjunction: with
K_{W_i} = phi_i^* K_{W_{i-1}} + (r - 1) E_i and phi_i^* X_{i-1} = X_i + m E_i,
the coefficient of each divisor in K_{X_n} - phi^* K_X is the sum of its
K-part and its (negative) X-part.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (CenterNotInSingularLocus, EmptyLocus, InconsistentTower,
                     NonCoordinateCenter, ZeroPolynomial)
from .groebner import (Ideal, buchberger, contains_one, ideal_dimension,
                       radical_membership)
from .poly import (Poly, PolyRing, divide_by_power, partial_derivative,
                   substitute, vanishing_order)

log = logging.getLogger(__name__)


@dataclass
class Chart:
    name: str
    ring: PolyRing
    hypersurface: Poly
    exceptional_here: dict = field(default_factory=dict)  # divisor name -> local equation
    base_vars: tuple = ()
    base_exps: tuple = ()  # per base variable: exponent vector over chart variables
    factor: Poly | None = None  # pullback of the base equation = factor * hypersurface

    def __post_init__(self):
        if self.hypersurface.is_zero():
            raise ZeroPolynomial(f"chart {self.name} has a zero equation")
        for name, eq in self.exceptional_here.items():
            if eq.is_zero():
                raise ZeroPolynomial(f"exceptional divisor {name} has a zero local equation")

    @property
    def vars(self) -> tuple:
        return self.ring.vars

    def __repr__(self):
        return f"Chart({self.name}: {self.hypersurface})"


@dataclass
class ChartMap:
    source: Chart
    target: Chart
    images: dict  # source variable -> Poly in target ring
    exceptional: str

    def apply(self, f: Poly) -> Poly:
        return substitute(f, self.images, self.target.ring)

    def describe(self) -> str:
        src = ",".join(self.source.vars)
        img = ",".join(str(self.images[v]) for v in self.source.vars)
        return f"[{src}] -> [{img}]"


@dataclass
class BlowupStep:
    index: int
    source: str
    center_ideal: Ideal
    center_vars: tuple
    charts_out: list
    maps: list
    hypersurface_multiplicity: dict  # chart name -> multiplicity
    exceptional_name: str
    pullbacks: dict = field(default_factory=dict)  # chart name -> {old divisor: {new: coeff}}
    center_in_singular_locus: bool = True

    @property
    def center_codim(self) -> int:
        return len(self.center_vars)

    @property
    def k_coefficient(self) -> int:
        return self.center_codim - 1

    def chart(self, name) -> Chart:
        for c in self.charts_out:
            if c.name == name:
                return c
        raise KeyError(name)


def base_chart(f: Poly, name: str = "W_0", exceptional: Mapping | None = None) -> Chart:
    n = f.ring.nvars
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return Chart(name, f.ring, f, dict(exceptional or {}), f.ring.vars, ident, f.ring.one())


def jacobian_ideal(c: Chart) -> Ideal:
    f = c.hypersurface
    return Ideal(c.ring, [f] + [partial_derivative(f, v) for v in c.vars])


def _vanishes_on_coordinate_subspace(g: Poly, center_vars) -> bool:
    zero = {v: g.ring.zero() for v in center_vars}
    images = {v: zero.get(v, g.ring.gen(v)) for v in g.ring.vars}
    return substitute(g, images, g.ring).is_zero()


def center_in_singular_locus(c: Chart, center_vars) -> bool:
    """Every generator of the Jacobian ideal vanishes on the coordinate center."""
    return all(_vanishes_on_coordinate_subspace(g, center_vars) for g in jacobian_ideal(c).gens)


def default_chart_names(c: Chart, center_vars, e: str) -> tuple:
    name = f"{c.name}[{e}]"
    rename = {v: f"{v}_{e}" for v in center_vars if v != e}
    return name, rename


def strict_transform(f: Poly, m: ChartMap, e: str):
    """(strict transform, multiplicity) of f through m along the exceptional variable e."""
    if f.is_zero():
        raise ZeroPolynomial("strict transform of the zero polynomial")
    pulled = m.apply(f)
    if pulled.is_zero():
        raise ZeroPolynomial("pullback vanished identically")
    mult = vanishing_order(pulled, e)
    strict = divide_by_power(pulled, e, mult)
    # exactness by re-multiplication
    if strict * (m.target.ring.gen(e) ** mult) != pulled:
        raise InconsistentTower("strict transform does not re-multiply to the pullback")
    return strict, mult


def _monomial_parts(g: Poly):
    """(coefficient code, exponent) for a monomial, else None."""
    if len(g.terms) != 1:
        return None
    (e, c), = g.terms.items()
    return c, e


def pullback_exceptional(prev: Mapping, m: ChartMap, new_name: str) -> tuple:
    """Pull back exceptional local equations through one chart map.

    Returns ({old name: {divisor: coefficient}}, new local equations).  Each
    pulled-back equation must be a monomial: the power of the exceptional
    variable gives the new divisor's coefficient and any remaining variable
    is the strict transform of the old divisor.
    """
    e = m.exceptional
    decomposition = {}
    local = {new_name: m.target.ring.gen(e)}
    for old, g in prev.items():
        pulled = m.apply(g)
        parts = _monomial_parts(pulled)
        if parts is None:
            raise InconsistentTower(f"local equation of {old} is not monomial after pullback")
        _, exp = parts
        sum_ = {}
        rest = []
        for v, k in zip(m.target.vars, exp):
            if not k:
                continue
            if v == e:
                sum_[new_name] = sum_.get(new_name, 0) + k
            else:
                rest.append((v, k))
        if len(rest) > 1:
            raise InconsistentTower(f"{old} splits into several components")
        if rest:
            v, k = rest[0]
            sum_[old] = k
            local[old] = m.target.ring.gen(v)
        decomposition[old] = sum_
    return decomposition, local


def blowup_coordinate_center(c: Chart, center_vars: Sequence[str], new_divisor: str,
                             index: int = 1, names: Mapping | None = None,
                             require_singular: bool = False) -> BlowupStep:
    """Blow up chart ``c`` along V(center_vars): one output chart per center variable.

    ``names`` maps an exceptional variable to (chart name, {replaced var: new
    var}); missing entries get default names.
    """
    center_vars = tuple(center_vars)
    if len(center_vars) < 2:
        raise NonCoordinateCenter("a center needs at least two coordinates (one is a divisor)")
    for v in center_vars:
        if v not in c.ring:
            raise NonCoordinateCenter(f"{v!r} is not a coordinate of chart {c.name}")
    if len(set(center_vars)) != len(center_vars):
        raise NonCoordinateCenter("repeated center coordinate")
    in_sing = center_in_singular_locus(c, center_vars)
    if not in_sing:
        msg = f"center {center_vars} is not inside the singular locus of {c.name}"
        if require_singular:
            raise CenterNotInSingularLocus(msg)
        log.warning(msg)
    names = dict(names or {})
    charts, maps, mults, pulls = [], [], {}, {}
    for e in center_vars:
        cname, rename = names.get(e) or default_chart_names(c, center_vars, e)
        rename = dict(rename)
        for v in center_vars:
            if v != e and v not in rename:
                rename[v] = f"{v}_{e}"
        new_vars = tuple(rename.get(v, v) for v in c.vars)
        ring = PolyRing(c.ring.base, new_vars, c.ring.order)
        images = {}
        # exponent of each source variable's image over the new variables
        sub_exps = []
        for v in c.vars:
            if v in rename:
                images[v] = ring.gen(rename[v]) * ring.gen(e)
                ex = [0] * len(new_vars)
                ex[new_vars.index(rename[v])] += 1
                ex[new_vars.index(e)] += 1
            else:
                images[v] = ring.gen(v)
                ex = [0] * len(new_vars)
                ex[new_vars.index(v)] = 1
            sub_exps.append(ex)
        base_exps = tuple(
            tuple(sum(row[s] * sub_exps[s][k] for s in range(len(c.vars))) for k in range(len(new_vars)))
            for row in c.base_exps)
        placeholder = Chart(cname, ring, ring.one(), {}, c.base_vars, base_exps)
        m = ChartMap(c, placeholder, images, e)
        strict, mult = strict_transform(c.hypersurface, m, e)
        decomposition, local = pullback_exceptional(c.exceptional_here, m, new_divisor)
        factor = m.apply(c.factor if c.factor is not None else c.ring.one()) * (ring.gen(e) ** mult)
        chart = Chart(cname, ring, strict, local, c.base_vars, base_exps, factor)
        m.target = chart
        charts.append(chart)
        maps.append(m)
        mults[cname] = mult
        pulls[cname] = decomposition
    return BlowupStep(index, c.name, Ideal(c.ring, [c.ring.gen(v) for v in center_vars]),
                      center_vars, charts, maps, mults, new_divisor, pulls, in_sing)


# -- ledger ----------------------------------------------------------------

@dataclass
class DivisorLedger:
    entries: dict  # name -> (k_total, x_total)
    lines: list = field(default_factory=list)

    @property
    def final(self) -> dict:
        return {name: k + x for name, (k, x) in sorted(self.entries.items())}

    def min_coefficient(self):
        vals = list(self.final.values())
        return min(vals) if vals else None

    def as_dict(self) -> dict:
        return {
            "entries": {n: {"K": k, "X": x} for n, (k, x) in sorted(self.entries.items())},
            "final": self.final,
            "lines": list(self.lines),
        }


def _apply_pullback(vec: Mapping, pull: Mapping) -> dict:
    out = {}
    for name, coeff in vec.items():
        if name not in pull:
            raise InconsistentTower(f"no pullback recorded for {name}")
        for new, k in pull[name].items():
            out[new] = out.get(new, 0) + coeff * k
    return {n: c for n, c in out.items() if c}


def _fmt(vec: Mapping) -> str:
    vec = {n: c for n, c in vec.items() if c}
    if not vec:
        return "0"
    parts = []
    for n, c in sorted(vec.items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        parts.append(f"{sign} {'' if mag == 1 else mag}{n}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _plus(vec: Mapping) -> str:
    body = _fmt(vec)
    return "- " + body[1:] if body.startswith("-") else "+ " + body


def fold_ledger(steps: Sequence, pullbacks: Sequence[Mapping], multiplicities: Sequence[int]) -> DivisorLedger:
    """Accumulate K- and X-coefficients through the tower.

    ``steps`` supplies (exceptional name, k_coefficient) per step; the
    pullbacks give phi_i^* of every earlier divisor as a formal sum.
    """
    if not (len(steps) == len(pullbacks) == len(multiplicities)):
        raise InconsistentTower("steps, pullbacks and multiplicities differ in length")
    K: dict = {}
    X: dict = {}
    lines = []
    for i, ((name, kcoef), pull, mult) in enumerate(zip(steps, pullbacks, multiplicities), 1):
        if kcoef < 0 or mult < 0:
            raise InconsistentTower("negative coefficient in a blow-up step")
        K = _apply_pullback(K, pull)
        X = _apply_pullback(X, pull)
        K[name] = K.get(name, 0) + kcoef
        X[name] = X.get(name, 0) - mult
        K = {n: c for n, c in K.items() if c}
        X = {n: c for n, c in X.items() if c}
        pl = "; ".join(f"phi_{i}^*{old} = {_fmt(new)}" for old, new in sorted(pull.items()))
        lines.append(f"step {i}: K_W{i} = phi^*K_W0 {_plus(K)}")
        lines.append(f"step {i}: X_{i} = phi^*X - ({_fmt({n: -c for n, c in X.items()})})")
        lines.append(f"step {i}: K_W{i} + X_{i} = phi_{i}^*(K_W{i - 1} + X_{i - 1}) "
                     f"{_plus({name: kcoef - mult})}" + (f"  [{pl}]" if pl else ""))
    names = set(K) | set(X)
    entries = {n: (K.get(n, 0), X.get(n, 0)) for n in names}
    ledger = DivisorLedger(entries, lines)
    ledger.lines.append(f"K_X{len(steps)} = phi^*K_X {_plus(ledger.final)}")
    return ledger


# -- checks ----------------------------------------------------------------

def verify_singular_locus(c: Chart, claimed: Ideal, budget: int | None = None) -> dict:
    """Compare the singular locus of the chart hypersurface with a claimed locus."""
    J = jacobian_ideal(c)
    if claimed.ring != c.ring:
        raise ValueError("claimed locus lives in a different ring")
    claimed_in_sing = [radical_membership(g, claimed, budget) for g in J.gens]
    sing_in_claimed = [radical_membership(g, J, budget) for g in claimed.gens]
    return {
        "chart": c.name,
        "claimed": [str(g) for g in claimed.gens],
        "jacobian_vanishes_on_claimed": all(claimed_in_sing),
        "claimed_vanishes_on_singular_locus": all(sing_in_claimed),
        "equal": all(claimed_in_sing) and all(sing_in_claimed),
    }


def singular_locus_avoids(c: Chart, g: Poly, budget: int | None = None) -> bool:
    """Whether the singular locus of the chart misses V(g)."""
    J = jacobian_ideal(c)
    return contains_one(Ideal(c.ring, J.gens + [g]), budget)


NEG_INF = None  # sentinel dimension of an empty singular locus


def codim_regularity_check(c: Chart, budget: int | None = None):
    """Dimension of the singular locus, or NEG_INF (None) when the chart is smooth."""
    G = buchberger(jacobian_ideal(c), budget=budget)
    try:
        return ideal_dimension(G)
    except EmptyLocus:
        return NEG_INF


def composition_check(c: Chart, base_equation: Poly) -> bool:
    """Pullback of the base equation through the composite monomial map
    equals the recorded exceptional factor times the strict transform."""
    ring = c.ring
    images = {}
    for v, exps in zip(c.base_vars, c.base_exps):
        images[v] = ring.monomial(exps)
    pulled = substitute(base_equation, images, ring)
    return pulled == c.factor * c.hypersurface


def _integer_inverse(M):
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise InconsistentTower("chart map is not birational")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    inv = [row[n:] for row in A]
    if any(x.denominator != 1 for row in inv for x in row):
        raise InconsistentTower("chart map is not unimodular")
    return [[int(x) for x in row] for row in inv]


def transition_exponents(a: Chart, b: Chart):
    """Each variable of chart a as a Laurent monomial in the variables of b.

    Both charts map monomially to the same base: base = a^Ma = b^Mb, so
    a = base^(Ma^-1) = b^(Mb Ma^-1) in exponent notation.
    """
    if a.base_vars != b.base_vars:
        raise InconsistentTower("charts over different bases")
    n = len(a.base_vars)
    Ma = [list(r) for r in a.base_exps]  # rows: base vars, cols: a vars
    Mb = [list(r) for r in b.base_exps]
    if len(Ma[0]) != n or len(Mb[0]) != n:
        raise InconsistentTower("chart dimension differs from base dimension")
    inv = _integer_inverse(Ma)  # rows: a vars, cols: base vars
    return {av: tuple(sum(inv[i][j] * Mb[j][k] for j in range(n)) for k in range(n))
            for i, av in enumerate(a.vars)}


def _laurent_substitute(f: Poly, exps: Mapping, target: PolyRing):
    """f with variables replaced by Laurent monomials; returns (Poly, shift)."""
    F = target.base
    acc = {}
    for e, c in f.terms.items():
        ne = [0] * target.nvars
        for v, k in zip(f.ring.vars, e):
            if k:
                for j, x in enumerate(exps[v]):
                    ne[j] += k * x
        t = tuple(ne)
        s = F.add(acc.get(t, 0), c)
        if s:
            acc[t] = s
        else:
            acc.pop(t, None)
    if not acc:
        return target.zero(), (0,) * target.nvars
    shift = tuple(min(t[j] for t in acc) for j in range(target.nvars))
    return Poly(target, {tuple(x - s for x, s in zip(t, shift)): c for t, c in acc.items()}), shift


def _strip_monomial(f: Poly):
    n = f.ring.nvars
    g = tuple(min(e[j] for e in f.terms) for j in range(n))
    return Poly(f.ring, {tuple(x - y for x, y in zip(e, g)): c for e, c in f.terms.items()}), g


def overlap_consistency(a: Chart, b: Chart) -> dict:
    """Transport a's equation into b's coordinates and compare up to a unit monomial.

    On the overlap the variables that appear with negative exponents are
    inverted, so a monomial in them is a unit there.
    """
    exps = transition_exponents(a, b)
    moved, shift = _laurent_substitute(a.hypersurface, exps, b.ring)
    lhs, g1 = _strip_monomial(moved)
    rhs, g2 = _strip_monomial(b.hypersurface)
    units = {b.vars[j] for ex in exps.values() for j, x in enumerate(ex) if x < 0}
    ok = False
    scalar = None
    if lhs.terms and rhs.terms and set(lhs.terms) == set(rhs.terms):
        F = b.ring.base
        e0 = next(iter(rhs.terms))
        s = F.div(lhs.terms[e0], rhs.terms[e0])
        ok = all(lhs.terms[e] == F.mul(s, rhs.terms[e]) for e in rhs.terms)
        scalar = F.render_code(s)
    net = tuple(x + y - z for x, y, z in zip(shift, g1, g2))
    unit_ok = all(x == 0 or b.vars[j] in units for j, x in enumerate(net))
    return {"charts": [a.name, b.name], "agree_up_to_unit": ok and unit_ok,
            "unit_monomial": str(b.ring.monomial(tuple(max(x, 0) for x in net)))
            + ("" if all(x >= 0 for x in net) else " / " + str(b.ring.monomial(tuple(max(-x, 0) for x in net)))),
            "scalar": scalar, "inverted": sorted(units)}


def excluded_chart_check(c: Chart, cover: Sequence[Poly], budget: int | None = None) -> bool:
    """X meets none of the points of chart c outside the union of D(g), g in cover."""
    return contains_one(Ideal(c.ring, [c.hypersurface] + list(cover)), budget)
