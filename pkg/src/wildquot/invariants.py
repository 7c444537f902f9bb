"""Degree-bounded invariant theory for 3-dimensional matrix groups.

Invariants are found by exact linear algebra: in each degree the space of
forms fixed by every group generator is the common kernel of ``g - 1`` on the
monomial-coefficient space.  Generators of the invariant ring are selected
degree by degree, and the relation among four generators is recovered as the
lowest weighted-degree kernel vector of the substitution map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Sequence

from .errors import CapTooSmall, NoRelationFound
from .groups import Mat3, MatrixGroup
from .linalg import in_span, nullspace, rank, rref
from .poly import Poly, PolyRing, linear_combination, substitute

GEN_NAMES = ("x1", "x2", "x3", "x4", "x5", "x6")


def monomials(nvars: int, d: int) -> list:
    """Exponent vectors of total degree d, descending in grevlex."""
    out = []

    def rec(prefix, left, k):
        if k == 1:
            out.append(prefix + (left,))
            return
        for i in range(left, -1, -1):
            rec(prefix + (i,), left - i, k - 1)

    rec((), d, nvars)
    key = lambda e: (sum(e),) + tuple(-x for x in reversed(e))
    out.sort(key=key, reverse=True)
    return out


def weighted_monomials(weights: Sequence[int], d: int) -> list:
    """Exponent vectors e with sum(w_i e_i) == d."""
    out = []
    n = len(weights)

    def rec(i, prefix, left):
        if i == n - 1:
            if left % weights[i] == 0:
                out.append(prefix + (left // weights[i],))
            return
        for k in range(left // weights[i], -1, -1):
            rec(i + 1, prefix + (k,), left - k * weights[i])

    rec(0, (), d)
    return out


class FormSpace:
    """Degree-d forms of a ring as coordinate vectors over a fixed monomial list."""

    def __init__(self, ring: PolyRing, d: int):
        self.ring = ring
        self.degree = d
        self.monos = monomials(ring.nvars, d)
        self.index = {m: i for i, m in enumerate(self.monos)}

    def vector(self, f: Poly) -> list:
        v = [0] * len(self.monos)
        for e, c in f.terms.items():
            v[self.index[e]] = c
        return v

    def poly(self, v) -> Poly:
        return Poly(self.ring, {m: c for m, c in zip(self.monos, v) if c})


def _linear_images(g: Mat3, ring: PolyRing) -> list:
    gens = ring.gens()
    F = ring.base
    out = []
    for i in range(3):
        row = ring.zero()
        for j in range(3):
            c = g.e[3 * i + j]
            if c:
                row = row + gens[j].scale(F.element(c))
        out.append(row)
    return out


class _ActionCache:
    """Powers of the images of the coordinates under each generator."""

    def __init__(self, group_gens, ring):
        self.ring = ring
        self.images = [_linear_images(g, ring) for g in group_gens]
        self.powers = [[[ring.one()] for _ in range(3)] for _ in group_gens]

    def power(self, gi, var, k):
        cache = self.powers[gi][var]
        while len(cache) <= k:
            cache.append(cache[-1] * self.images[gi][var])
        return cache[k]

    def act_monomial(self, gi, e) -> Poly:
        out = self.ring.one()
        for var, k in enumerate(e):
            if k:
                out = out * self.power(gi, var, k)
        return out


def _group_generators(G: MatrixGroup):
    gens = [g for g in G.generators if not g.is_identity()]
    return gens


def default_ring(G: MatrixGroup, names=("x", "y", "z")) -> PolyRing:
    return PolyRing(G.field, names, "grevlex")


def invariant_space(G: MatrixGroup, d: int, ring: PolyRing | None = None,
                    cache: _ActionCache | None = None):
    """RREF basis (rows, pivots) of the degree-d invariants, columns in descending grevlex."""
    ring = ring or default_ring(G)
    space = FormSpace(ring, d)
    F = ring.base
    gens = _group_generators(G)
    n = len(space.monos)
    if not gens:
        rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return space, rows, list(range(n))
    cache = cache or _ActionCache(gens, ring)
    equations = []
    for gi in range(len(gens)):
        # column j holds (g - 1) applied to monomial j
        cols = []
        for j, m in enumerate(space.monos):
            v = space.vector(cache.act_monomial(gi, m))
            v[j] = F.sub(v[j], 1)
            cols.append(v)
        for i in range(n):
            equations.append([cols[j][i] for j in range(n)])
    kernel = nullspace(equations, F, n)
    if not kernel:
        return space, [], []
    rows, pivots = rref(kernel, F, n)
    return space, rows, pivots


def invariant_basis(G: MatrixGroup, d: int, ring: PolyRing | None = None) -> list:
    """Basis of the degree-d invariant forms, in reduced echelon form."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    space, rows, _ = invariant_space(G, d, ring)
    return [space.poly(r) for r in rows]


@dataclass
class Generator:
    name: str
    poly: Poly
    degree: int


@dataclass
class GeneratorSet:
    gens: list
    invariant_dims: dict = field(default_factory=dict)
    fitted_relation: Poly | None = None
    comparison: object = None

    @property
    def degrees(self) -> list:
        return [g.degree for g in self.gens]

    @property
    def polys(self) -> list:
        return [g.poly for g in self.gens]

    def names(self) -> list:
        return [g.name for g in self.gens]


class _ProductCache:
    """Products of generator powers, as polynomials in the original variables."""

    def __init__(self, polys, ring):
        self.polys = list(polys)
        self.ring = ring
        self.pows = [[ring.one()] for _ in self.polys]
        self.memo = {}

    def power(self, i, k):
        cache = self.pows[i]
        while len(cache) <= k:
            cache.append(cache[-1] * self.polys[i])
        return cache[k]

    def product(self, e) -> Poly:
        e = tuple(e)
        if e in self.memo:
            return self.memo[e]
        out = self.ring.one()
        for i, k in enumerate(e):
            if k:
                out = out * self.power(i, k)
        self.memo[e] = out
        return out


def minimal_generators(G: MatrixGroup, cap: int = 12, ring: PolyRing | None = None,
                       strict: bool = True) -> GeneratorSet:
    """Select invariant-ring generators up to degree ``cap``.

    In each degree the invariants are put in reduced echelon form (columns in
    descending grevlex); the rows whose pivot is not the leading monomial of
    an element of the subalgebra generated so far become new generators.
    Names x1, x2, ... follow increasing degree, ties broken by increasing
    leading monomial.

    Raises CapTooSmall (carrying the partial set) when ``strict`` is set and
    either a new generator is still required in degree ``cap`` itself or the
    generators found are algebraically dependent (Jacobian rank below the
    number of variables), so the Hilbert series is still short.
    """
    ring = ring or default_ring(G)
    F = ring.base
    gens_mats = _group_generators(G)
    action = _ActionCache(gens_mats, ring) if gens_mats else None
    picked: list = []  # (poly, degree)
    dims = {}
    last_new = 0
    for d in range(1, cap + 1):
        space, rows, pivots = invariant_space(G, d, ring, action)
        dims[d] = len(rows)
        if not rows:
            continue
        sub_vectors = []
        if picked:
            polys = [p for p, _ in picked]
            degs = [dg for _, dg in picked]
            pc = _ProductCache(polys, ring)
            for e in weighted_monomials(degs, d):
                sub_vectors.append(space.vector(pc.product(e)))
        sub_pivots = set(rref(sub_vectors, F, len(space.monos))[1]) if sub_vectors else set()
        new = [(r, pv) for r, pv in zip(rows, pivots) if pv not in sub_pivots]
        # lower pivot index = larger leading monomial: take ascending leading terms
        new.sort(key=lambda t: -t[1])
        for r, _ in new:
            picked.append((space.poly(r), d))
        if new:
            last_new = d
    gens = [Generator(GEN_NAMES[i], p, dg) for i, (p, dg) in enumerate(picked)]
    gs = GeneratorSet(gens, invariant_dims=dims)
    if strict and last_new == cap:
        raise CapTooSmall(f"new generators still appear in degree {cap}", partial=gs)
    # a finite group's invariant ring has the full dimension, so fewer than
    # nvars independent generators means the search stopped too early
    if strict and G.order > 1 and gens:
        r = generic_rank_check(gs, 5)
        if r < ring.nvars:
            raise CapTooSmall(f"generators up to degree {cap} span only {r} of "
                              f"{ring.nvars} dimensions", partial=gs)
        # nvars independent generators with no relation: the invariant ring
        # would be polynomial, which forces prod(degrees) == |G|
        if len(gens) == ring.nvars and prod(gs.degrees) != G.order:
            raise CapTooSmall(f"degrees {gs.degrees} of a polynomial invariant ring would "
                              f"multiply to |G| = {G.order}", partial=gs)
    return gs


def generator_ring(gs: GeneratorSet, order: str = "grevlex") -> PolyRing:
    base = gs.gens[0].poly.ring.base
    return PolyRing(base, gs.names(), order, weights=gs.degrees)


@dataclass
class RelationFit:
    relation: Poly
    weighted_degree: int
    kernel_dim: int
    exact: bool


def relation_kernel(gs: GeneratorSet, d: int):
    """Kernel of the substitution map in weighted degree d, as polynomials."""
    R = generator_ring(gs)
    ring = gs.gens[0].poly.ring
    F = ring.base
    monos = weighted_monomials(gs.degrees, d)
    if not monos:
        return R, []
    pc = _ProductCache(gs.polys, ring)
    images = [pc.product(e) for e in monos]
    space = FormSpace(ring, d)
    vecs = [space.vector(img) for img in images]
    n = len(monos)
    rows = [[vecs[j][i] for j in range(n)] for i in range(len(space.monos))]
    kernel = nullspace(rows, F, n)
    polys = [Poly(R, {m: c for m, c in zip(monos, v) if c}) for v in kernel]
    return R, polys


def fit_relation(gs: GeneratorSet, degree_cap: int = 20) -> RelationFit:
    """Lowest weighted-degree relation among the generators, made monic.

    Normalisation: leading coefficient 1 in the weighted grevlex order of
    the generator ring.  Exactness is checked by substituting back.
    """
    if not gs.gens:
        raise NoRelationFound("no generators")
    start = min(gs.degrees)
    for d in range(start, degree_cap + 1):
        R, kernel = relation_kernel(gs, d)
        if kernel:
            F = R.base
            reduced, _ = rref([[p.terms.get(m, 0) for m in _sorted_support(kernel, R)]
                               for p in kernel], F)
            support = _sorted_support(kernel, R)
            rel = Poly(R, {m: c for m, c in zip(support, reduced[0]) if c}).monic()
            exact = substitute_generators(rel, gs).is_zero()
            return RelationFit(rel, d, len(kernel), exact)
    raise NoRelationFound(f"no relation up to weighted degree {degree_cap}; raise the cap")


def _sorted_support(polys, R):
    support = set()
    for p in polys:
        support.update(p.terms)
    return sorted(support, key=R.key, reverse=True)


def substitute_generators(rel: Poly, gs: GeneratorSet) -> Poly:
    images = {g.name: g.poly for g in gs.gens}
    return substitute(rel, images, gs.gens[0].poly.ring)


def is_invariant(G: MatrixGroup, f: Poly) -> bool:
    from .groups import act_on_poly
    return all(act_on_poly(g, f) == f for g in G.elements)


def generic_rank_check(gs: GeneratorSet, trials: int = 20, seed: int = 0) -> int:
    """Max rank of the Jacobian of the generator map over random points."""
    import random
    from .poly import evaluate, partial_derivative
    if trials < 1:
        raise ValueError("need at least one trial")
    ring = gs.gens[0].poly.ring
    F = ring.base
    rng = random.Random(seed)
    jac = [[partial_derivative(g.poly, v) for v in ring.vars] for g in gs.gens]
    best = 0
    for _ in range(trials):
        pt = [F.element(rng.randrange(F.q)) for _ in ring.vars]
        rows = [[evaluate(entry, pt).code for entry in row] for row in jac]
        best = max(best, rank(rows, F, ring.nvars))
    return best


# -- comparison with the published hypersurface equations -------------------

# (exponents in x1..x4, coefficient expression, block); F and H terms carry
# the common factor x1^3 resp. x1^6 already multiplied in.
_DISPLAYS = {
    "b0": [
        ((0, 9, 0, 0), "1", "main"),
        ((0, 0, 2, 0), "-1", "main"),
        ((9, 0, 0, 1), "1", "main"),
        ((6, 6, 0, 0), "1+alpha^2", "H"),
        ((8, 5, 0, 0), "-alpha^2", "H"),
        ((12, 2, 0, 0), "(1+alpha^2)^2", "H"),
        ((14, 2, 0, 0), "alpha^2*(1+alpha^2)", "H"),
        ((16, 1, 0, 0), "alpha^4", "H"),
    ],
    "bne0": [
        ((0, 5, 0, 0), "alpha*b^2", "main"),
        ((0, 0, 3, 0), "-b^4", "main"),
        ((6, 0, 0, 1), "-b^10", "main"),
        ((1, 3, 1, 0), "alpha*b^2", "main"),
        ((3, 4, 0, 0), "c1", "F"),
        ((4, 2, 1, 0), "c2", "F"),
        ((5, 0, 2, 0), "c3", "F"),
        ((6, 3, 0, 0), "c4", "F"),
        ((7, 1, 1, 0), "c5", "F"),
        ((9, 3, 0, 0), "c6", "F"),
        ((10, 0, 1, 0), "c7", "F"),
    ],
}

# second printed form of the x2^5 coefficient
_ALTERNATES = {("bne0", (0, 5, 0, 0)): "alpha^3*b^2"}


@dataclass
class TermComparison:
    monomial: str
    block: str
    expected: str
    fitted: str
    status: str  # matched | mismatched | missing | flagged
    flag: str | None = None
    note: str = ""
    present: bool = True  # monomial occurs in the fitted relation
    vanishes: bool = False  # printed coefficient is 0 at this specialisation

    def as_dict(self) -> dict:
        return {"monomial": self.monomial, "block": self.block, "expected": self.expected,
                "fitted": self.fitted, "status": self.status, "flag": self.flag,
                "note": self.note, "present": self.present, "vanishes": self.vanishes}


@dataclass
class DisplayComparison:
    case: str
    normalization: dict
    gauge: dict
    terms: list
    extra: dict
    coefficients: dict
    relation: str

    def count(self, status) -> int:
        return sum(1 for t in self.terms if t.status == status)

    @property
    def flags(self) -> list:
        return sorted((t.monomial, t.flag) for t in self.terms if t.flag)

    @property
    def majority_mismatch(self) -> bool:
        """Shape disagreement: most display terms are absent or carry a wrong coefficient."""
        bad = sum(1 for t in self.terms
                  if (not t.present and not t.vanishes) or t.status == "mismatched")
        return 2 * bad > len(self.terms)

    @property
    def unflagged_all_matched(self) -> bool:
        return all(t.status == "matched" for t in self.terms if not t.flag)

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "normalization": self.normalization,
            "gauge": self.gauge,
            "terms": [t.as_dict() for t in self.terms],
            "extra": self.extra,
            "coefficients": self.coefficients,
            "relation": self.relation,
            "flags": [list(f) for f in self.flags],
            "majority_mismatch": self.majority_mismatch,
        }


def _mono_text(R: PolyRing, e) -> str:
    return str(R.monomial(e))


def display_normalization(case: str, a, b):
    """Generator scalings (x1..x4) and the anchor fixing the overall scale.

    The published relations are consistent with x1 = z, x4 the orbit product
    of x (monic), and, for b != 0, x2 = b*(monic cubic), x3 = alpha*b*(monic
    quintic).  For b = 0 all four generators are monic.
    """
    F = a.field
    alpha = a ** 3 - a
    if case == "b0" or b is None or b.code == 0 or alpha.code == 0:
        lam = [F.one()] * 4
    else:
        lam = [F.one(), b, alpha * b, F.one()]
    if case == "b0":
        anchor = ((0, 9, 0, 0), F.one())
    else:
        anchor = ((6, 0, 0, 1), -(b ** 10) if b is not None and b.code else F.one())
    return lam, anchor


def _rescale(rel: Poly, lam, anchor) -> Poly:
    """Rewrite rel in generators x_i' = lam_i * x_i and fix the overall scale."""
    R = rel.ring
    F = R.base
    inv = [F.div(1, l.code) for l in lam]
    terms = {}
    for e, c in rel.terms.items():
        s = c
        for i, k in enumerate(e):
            if k:
                s = F.mul(s, F.pow(inv[i], k))
        terms[e] = s
    out = Poly(R, terms)
    mono, target = anchor
    have = out.terms.get(mono, 0)
    if have and target.code:
        out = out.scale(F.element(F.div(target.code, have)))
    return out


def _weighted_outliers(monos, weights) -> set:
    degs = [sum(w * k for w, k in zip(weights, e)) for e in monos]
    counts = {}
    for d in degs:
        counts[d] = counts.get(d, 0) + 1
    mode = max(sorted(counts), key=lambda d: counts[d])
    return {e for e, d in zip(monos, degs) if d != mode}


def _x4_gauge(rel: Poly, keep: set, weights) -> tuple:
    """Shift x4 by decomposable invariants to clear terms outside ``keep``.

    Works when x4 enters the relation linearly through a single term
    x1^m * x4; any term x1^m * q(x1, x2, x3) with q of the degree of x4 can
    then be removed by replacing x4 with x4 + const * q.
    """
    R = rel.ring
    F = R.base
    with_x4 = [e for e in rel.terms if e[3]]
    if len(with_x4) != 1 or with_x4[0][3] != 1 or any(with_x4[0][1:3]):
        return rel, {}
    m = with_x4[0][0]
    c4 = rel.terms[with_x4[0]]
    shift = {}
    terms = dict(rel.terms)
    for e, c in rel.terms.items():
        if e[3] or e in keep or e[0] < m:
            continue
        q = (e[0] - m, e[1], e[2], 0)
        if sum(w * k for w, k in zip(weights, q)) != weights[3]:
            continue
        shift[q] = F.div(c, c4)
        del terms[e]
    if not shift:
        return rel, {}
    gauge = {_mono_text(R, q): F.render_code(v) for q, v in sorted(shift.items(), key=lambda t: R.key(t[0]), reverse=True)}
    return Poly(R, terms), gauge


def compare_with_paper(fitted: Poly, case: str, a, b=None) -> DisplayComparison:
    """Term-by-term comparison of a fitted relation with the published display.

    The relation is first rewritten in the published generator normalisation
    (see ``display_normalization``).  Terms absent from the display are listed
    under ``extra``; ``gauge`` lists the x4 shift by decomposables that would
    remove those of them it can (reported, not applied).  Display terms
    whose weighted degree differs from the rest of the display are flagged
    as homogeneity-inconsistent.  A coefficient that fails as printed but
    matches once alpha is replaced by alpha^3 is flagged as an alpha-power
    variant.  F's coefficients are free and reported as fitted values.
    """
    from .parser import parse_constant

    if case not in _DISPLAYS:
        raise ValueError(f"unknown case {case!r}")
    R = fitted.ring
    F = R.base
    alpha = a ** 3 - a
    consts = {"a": a, "alpha": alpha, "b": b if b is not None else F.zero()}
    display = _DISPLAYS[case]
    weights = list(R.weights or (1,) * R.nvars)
    if len(weights) != 4:
        weights = (weights + [1] * 4)[:4]
    lam, anchor = display_normalization(case, a, b)
    rel = _rescale(fitted, lam, anchor) if R.nvars == 4 else fitted
    keep = {e for e, _, _ in display}
    outliers = _weighted_outliers([e for e, _, _ in display], weights)
    gauge = {}
    if R.nvars == 4:
        _, gauge = _x4_gauge(rel, keep, weights)

    terms = []
    coeffs = {}
    for e, expr, block in display:
        text = _mono_text(R, e) if R.nvars == 4 else str(e)
        have = rel.terms.get(e, 0) if R.nvars == 4 else 0
        fitted_txt = F.render_code(have)
        flag = "homogeneity" if e in outliers else None
        if block == "F":
            coeffs[expr] = fitted_txt
            status = "matched"
            note = "free coefficient" + ("" if have else " (fitted value 0)")
            if flag:
                status = "flagged"
                note = "weighted degree differs from the other terms"
            terms.append(TermComparison(text, block, expr, fitted_txt, status, flag, note, bool(have)))
            continue
        want = parse_constant(expr, F, consts).code
        note = ""
        if have == want and not have:
            status = "matched"
            note = "printed coefficient vanishes here; term absent"
        elif have == want:
            status = "matched"
            alt = _ALTERNATES.get((case, e))
            if alt is not None:
                alt_val = parse_constant(alt, F, consts).code
                note = f"printed form {expr}" + ("" if alt_val == want else f"; alternative {alt} differs")
        else:
            status = "missing" if not have else "mismatched"
            alt = _ALTERNATES.get((case, e))
            if alt is not None and have and parse_constant(alt, F, consts).code == have:
                status = "matched"
                note = f"matches {alt}; printed {expr} does not"
                flag = flag or "alpha_power"
            elif have and "alpha" in expr:
                variant = expr.replace("alpha", "alpha^3")
                if parse_constant(variant, F, consts).code == have:
                    status = "flagged"
                    flag = flag or "alpha_power"
                    note = f"matches {variant}; printed {expr} does not"
        if flag == "homogeneity":
            status = "flagged"
            note = (note + "; " if note else "") + "weighted degree differs from the other terms"
            if R.nvars == 4:
                same = [_mono_text(R, f) for f, c in sorted(rel.terms.items(), key=lambda t: R.key(t[0]), reverse=True)
                        if f not in keep and c == want]
                if same:
                    note += "; unlisted fitted term " + ", ".join(same) + " carries the printed coefficient"
        terms.append(TermComparison(text, block, expr, fitted_txt, status, flag, note, bool(have),
                                    want == 0))

    extra = {}
    if R.nvars == 4:
        for e in sorted(rel.terms, key=R.key, reverse=True):
            if e not in keep:
                extra[_mono_text(R, e)] = F.render_code(rel.terms[e])
    norm = {
        "scalings": [F.render_code(l.code) for l in lam],
        "anchor": _mono_text(R, anchor[0]) if R.nvars == 4 else "",
        "anchor_coefficient": F.render_code(anchor[1].code),
    }
    return DisplayComparison(case, norm, gauge, terms, extra, coeffs, str(rel))


def display_normalized_relation(fitted: Poly, case: str, a, b=None) -> Poly:
    """The fitted relation rewritten in the published generator normalisation."""
    lam, anchor = display_normalization(case, a, b)
    return _rescale(fitted, lam, anchor)
