"""Buchberger's algorithm and the ideal-theoretic tests built on it.

Polynomials are handled internally as plain dicts (exponent tuple -> code)
so the inner reduction loop stays free of wrapper objects.  The leading
term of a dividend is tracked with a heap keyed on the ring's monomial key.
"""

from __future__ import annotations

import heapq
import logging
import os
from dataclasses import dataclass, field

from .errors import EmptyLocus, ResourceBudgetExceeded, RingMismatch
from .poly import Poly, PolyRing

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 20000
BUDGET_ENV = "WILDQUOT_GROEBNER_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", BUDGET_ENV, raw)
    return DEFAULT_BUDGET


@dataclass
class Ideal:
    ring: PolyRing
    gens: list

    def __post_init__(self):
        gens = []
        for g in self.gens:
            if not isinstance(g, Poly):
                g = self.ring.const(g)
            if g.ring != self.ring:
                raise RingMismatch("ideal generator from a different ring")
            if not g.is_zero():
                gens.append(g)
        self.gens = gens

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.gens)})"


@dataclass
class GroebnerBasis:
    ideal: Ideal
    basis: list
    order: str
    stats: dict = field(default_factory=dict)

    @property
    def ring(self) -> PolyRing:
        return self.basis[0].ring if self.basis else self.ideal.ring

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def leading_monomials(self) -> list:
        return [g.lm() for g in self.basis]


# -- internal helpers on raw term dicts ------------------------------------

def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_exp(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _lead(terms, key):
    return max(terms, key=key)


class _Elem:
    """Basis element: monic terms plus cached leading monomial."""

    __slots__ = ("terms", "lm")

    def __init__(self, terms, lm):
        self.terms = terms
        self.lm = lm


def _monic(terms, F, key):
    lm = _lead(terms, key)
    c = terms[lm]
    if c != 1:
        s = F.inv(c)
        terms = {e: F.mul(v, s) for e, v in terms.items()}
    return terms, lm


def _reduce(terms, basis, F, key, full=True):
    """Remainder of ``terms`` on division by ``basis`` (list of _Elem)."""
    p = dict(terms)
    rem = {}
    heap = [(tuple(-k for k in key(e)), e) for e in p]
    heapq.heapify(heap)
    queued = set(p)
    mul, add, neg = F.mul, F.add, F.neg_t
    while heap:
        _, e = heapq.heappop(heap)
        queued.discard(e)
        c = p.get(e)
        if not c:
            continue
        g = None
        for cand in basis:
            if _divides(cand.lm, e):
                g = cand
                break
        if g is None:
            rem[e] = c
            del p[e]
            if not full:
                # top reduction only: the rest is copied verbatim
                rem.update((k, v) for k, v in p.items() if v)
                return rem
            continue
        shift = _sub_exp(e, g.lm)
        f = neg[c]
        for ge, gc in g.terms.items():
            t = tuple(x + y for x, y in zip(ge, shift))
            v = add(p.get(t, 0), mul(f, gc))
            if v:
                p[t] = v
                if t not in queued:
                    queued.add(t)
                    heapq.heappush(heap, (tuple(-k for k in key(t)), t))
            else:
                p.pop(t, None)
    return rem


def _spoly(f: _Elem, g: _Elem, F):
    L = _lcm(f.lm, g.lm)
    sf, sg = _sub_exp(L, f.lm), _sub_exp(L, g.lm)
    out = {}
    for e, c in f.terms.items():
        out[tuple(x + y for x, y in zip(e, sf))] = c
    for e, c in g.terms.items():
        t = tuple(x + y for x, y in zip(e, sg))
        v = F.sub(out.get(t, 0), c)
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def _is_const(exp) -> bool:
    return not any(exp)


def _neg_key(k):
    return tuple(-x for x in k)


def _buchberger_raw(polys, ring: PolyRing, budget: int, stop_on_unit: bool = True):
    """Groebner basis of raw term dicts; returns (list of _Elem, steps).

    Normal strategy: the pair with the smallest lcm goes first, ties by
    (i, j).  Pairs are discarded by the product criterion and by the chain
    criterion (some k with lm_k | lcm whose pairs with i and j are no
    longer pending).  With ``stop_on_unit`` the run stops as soon as a
    nonzero constant appears.
    """
    F = ring.base
    key = ring.key
    basis: list = []
    heap = []
    pending = set()
    steps = 0

    def add_element(terms):
        terms, lm = _monic(terms, F, key)
        elem = _Elem(terms, lm)
        idx = len(basis)
        basis.append(elem)
        for i in range(idx):
            L = _lcm(basis[i].lm, lm)
            heapq.heappush(heap, (key(L), i, idx, L))
            pending.add((i, idx))
        return elem

    for p in polys:
        if not p:
            continue
        r = _reduce(p, basis, F, key)
        if r:
            e = add_element(r)
            if stop_on_unit and _is_const(e.lm):
                return [e], steps

    while heap:
        _, i, j, L = heapq.heappop(heap)
        pending.discard((i, j))
        bi, bj = basis[i], basis[j]
        if all(x == 0 or y == 0 for x, y in zip(bi.lm, bj.lm)):
            continue
        if _chain_skip(basis, i, j, L, pending):
            continue
        steps += 1
        if steps > budget:
            raise ResourceBudgetExceeded(
                f"Groebner budget of {budget} S-polynomial reductions exceeded")
        r = _reduce(_spoly(bi, bj, F), basis, F, key)
        if r:
            e = add_element(r)
            if stop_on_unit and _is_const(e.lm):
                return [e], steps
    return basis, steps


def _chain_skip(basis, i, j, L, pending) -> bool:
    for k, bk in enumerate(basis):
        if k == i or k == j:
            continue
        if _divides(bk.lm, L):
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                return True
    return False


def _interreduce(elems, F, key):
    """Reduced basis from a Groebner basis: minimal, tail-reduced, monic."""
    elems = sorted(elems, key=lambda g: key(g.lm))
    minimal = []
    for g in elems:
        if not any(_divides(h.lm, g.lm) for h in minimal):
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        tail = dict(g.terms)
        c = tail.pop(g.lm)
        r = _reduce(tail, others, F, key)
        r[g.lm] = c
        terms, lm = _monic(r, F, key)
        out.append(_Elem(terms, lm))
    out.sort(key=lambda g: key(g.lm), reverse=True)
    return out


def _ring_for(ring: PolyRing, order: str | None) -> PolyRing:
    if order is None or order == ring.order:
        return ring
    return ring.with_order(order)


def buchberger(I: Ideal, order: str | None = None, budget: int | None = None,
               stop_on_unit: bool = False) -> GroebnerBasis:
    """Reduced Groebner basis of I.

    ``order`` defaults to the ring's own order; ``budget`` caps the number
    of S-polynomial reductions (ResourceBudgetExceeded beyond it).  With
    ``stop_on_unit`` the computation ends early once 1 is found, which is
    all radical membership needs.
    """
    ring = _ring_for(I.ring, order)
    budget = default_budget() if budget is None else budget
    F = ring.base
    raw = [dict(g.terms) for g in I.gens]
    elems, steps = _buchberger_raw(raw, ring, budget, stop_on_unit)
    if any(_is_const(e.lm) for e in elems):
        basis = [ring.one()]
    else:
        basis = [Poly(ring, e.terms) for e in _interreduce(elems, F, ring.key)]
    return GroebnerBasis(I, basis, ring.order, {"s_pairs": steps})


def _elems(G: GroebnerBasis):
    return [_Elem(g.terms, g.lm()) for g in G.basis]


def normal_form(f: Poly, G: GroebnerBasis) -> Poly:
    ring = G.ring
    if f.ring.vars != ring.vars or f.ring.base != ring.base:
        raise RingMismatch("polynomial and basis live in different rings")
    r = _reduce(f.terms, _elems(G), ring.base, ring.key)
    return Poly(f.ring, r)


def ideal_membership(f: Poly, G: GroebnerBasis) -> bool:
    return normal_form(f, G).is_zero()


def contains_one(I: Ideal, budget: int | None = None) -> bool:
    if not I.gens:
        return False
    return buchberger(I, budget=budget, stop_on_unit=True).is_unit()


def radical_membership(f: Poly, I: Ideal, budget: int | None = None) -> bool:
    """f in sqrt(I), via 1 in I + (1 - t*f) in K[vars, t].

    The extended ring uses grevlex: only the question whether the ideal is
    the unit ideal is asked, and that does not depend on the order.
    """
    if f.ring != I.ring:
        raise RingMismatch("polynomial and ideal live in different rings")
    if f.is_zero():
        return True
    ring = I.ring
    t = ring.fresh_var("t")
    ext = PolyRing(ring.base, ring.vars + (t,), "grevlex")
    gens = [ring.embed(g, ext) for g in I.gens]
    gens.append(ext.one() - ext.gen(t) * ring.embed(f, ext))
    return contains_one(Ideal(ext, gens), budget)


def loci_equal(I: Ideal, J: Ideal, budget: int | None = None) -> bool:
    """V(I) == V(J) over the algebraic closure (two-sided radical membership)."""
    if I.ring != J.ring:
        raise RingMismatch("ideals live in different rings")
    return (all(radical_membership(g, J, budget) for g in I.gens)
            and all(radical_membership(g, I, budget) for g in J.gens))


def locus_inclusion_report(I: Ideal, J: Ideal, budget: int | None = None) -> dict:
    """Per-generator radical membership in both directions, for reports."""
    return {
        "I_in_rad_J": [radical_membership(g, J, budget) for g in I.gens],
        "J_in_rad_I": [radical_membership(g, I, budget) for g in J.gens],
    }


def ideal_dimension(G: GroebnerBasis) -> int:
    """Krull dimension of ring/I from the leading-monomial staircase.

    The dimension is the size of a largest set S of variables such that no
    leading monomial involves only variables of S.
    """
    if G.is_unit():
        raise EmptyLocus("the ideal is the unit ideal")
    n = G.ring.nvars
    supports = [frozenset(i for i, k in enumerate(m) if k) for m in G.leading_monomials()]
    for size in range(n, -1, -1):
        for S in _subsets(n, size):
            if not any(sup <= S for sup in supports):
                return size
    return 0


def _subsets(n, size):
    from itertools import combinations
    for c in combinations(range(n), size):
        yield frozenset(c)


def dimension(I: Ideal, budget: int | None = None) -> int:
    return ideal_dimension(buchberger(I, budget=budget))
