"""3x3 matrix groups over finite fields.

Covers the unipotent family ``sigma(c1, c2)``, the groups ``sigma(U(a, b))``,
pseudo-reflection/smallness tests, normalisation of an embedding to the
``(1,0), (a,b)`` form, the linear action on polynomials and brute-force
enumeration inside SL(3, q).

Action convention: a matrix ``g`` acts on a polynomial by ``f -> f o g``,
the coordinates ``(x, y, z)`` forming a column vector.  This is a right
action, ``act(g*h, f) == act(h, act(g, f))``; inside an abelian group the
order of composition is irrelevant.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .errors import EnumerationBudgetExceeded, PseudoReflectionForced, RingMismatch
from .ff import Field, FieldElement, make_field
from .poly import Poly, PolyRing, substitute

log = logging.getLogger(__name__)

DEFAULT_ENUMERATION_BUDGET = 3 ** 9


class Mat3:
    """Immutable 3x3 matrix stored as a row-major tuple of element codes."""

    __slots__ = ("field", "e", "_hash")

    def __init__(self, field: Field, entries: Sequence[int]):
        self.field = field
        self.e = tuple(entries)
        self._hash = None

    @classmethod
    def from_rows(cls, field: Field, rows) -> "Mat3":
        codes = []
        for row in rows:
            for x in row:
                if isinstance(x, FieldElement):
                    if x.field != field:
                        raise RingMismatch("entry from a different field")
                    codes.append(x.code)
                else:
                    codes.append(field.from_int(int(x)))
        if len(codes) != 9:
            raise ValueError("a 3x3 matrix needs 9 entries")
        return cls(field, codes)

    @classmethod
    def identity(cls, field: Field) -> "Mat3":
        return cls(field, (1, 0, 0, 0, 1, 0, 0, 0, 1))

    def rows(self) -> list:
        el = self.field.element
        return [[el(self.e[3 * i + j]) for j in range(3)] for i in range(3)]

    def entry(self, i: int, j: int) -> FieldElement:
        return self.field.element(self.e[3 * i + j])

    def __mul__(self, other: "Mat3") -> "Mat3":
        a, b = self.e, other.e
        F = self.field
        if F.k == 1:
            p = F.p
            return Mat3(F, (
                (a[0] * b[0] + a[1] * b[3] + a[2] * b[6]) % p,
                (a[0] * b[1] + a[1] * b[4] + a[2] * b[7]) % p,
                (a[0] * b[2] + a[1] * b[5] + a[2] * b[8]) % p,
                (a[3] * b[0] + a[4] * b[3] + a[5] * b[6]) % p,
                (a[3] * b[1] + a[4] * b[4] + a[5] * b[7]) % p,
                (a[3] * b[2] + a[4] * b[5] + a[5] * b[8]) % p,
                (a[6] * b[0] + a[7] * b[3] + a[8] * b[6]) % p,
                (a[6] * b[1] + a[7] * b[4] + a[8] * b[7]) % p,
                (a[6] * b[2] + a[7] * b[5] + a[8] * b[8]) % p,
            ))
        mul, add = F.mul, F.add
        out = []
        for i in range(3):
            for j in range(3):
                s = 0
                for t in range(3):
                    x, y = a[3 * i + t], b[3 * t + j]
                    if x and y:
                        s = add(s, mul(x, y))
                out.append(s)
        return Mat3(F, out)

    def __add__(self, other: "Mat3") -> "Mat3":
        add = self.field.add
        return Mat3(self.field, [add(x, y) for x, y in zip(self.e, other.e)])

    def __sub__(self, other: "Mat3") -> "Mat3":
        sub = self.field.sub
        return Mat3(self.field, [sub(x, y) for x, y in zip(self.e, other.e)])

    def scale(self, c) -> "Mat3":
        code = c.code if isinstance(c, FieldElement) else self.field.from_int(c)
        mul = self.field.mul
        return Mat3(self.field, [mul(x, code) for x in self.e])

    def __pow__(self, n: int) -> "Mat3":
        if n < 0:
            return self.inverse() ** (-n)
        result = Mat3.identity(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def det(self) -> FieldElement:
        F = self.field
        m, a = F.mul, F.add
        e = self.e

        def t(i, j, k):
            return m(m(e[i], e[j]), e[k])

        pos = a(a(t(0, 4, 8), t(1, 5, 6)), t(2, 3, 7))
        neg = a(a(t(2, 4, 6), t(0, 5, 7)), t(1, 3, 8))
        return F.element(F.sub(pos, neg))

    def inverse(self) -> "Mat3":
        F = self.field
        m, s = F.mul, F.sub
        e = self.e
        d = self.det()
        if d.is_zero():
            raise ZeroDivisionError("singular matrix")
        di = F.inv(d.code)

        def cof(r0, r1, c0, c1):
            return s(m(e[3 * r0 + c0], e[3 * r1 + c1]), m(e[3 * r0 + c1], e[3 * r1 + c0]))

        adj = [
            cof(1, 2, 1, 2), s(0, cof(0, 2, 1, 2)), cof(0, 1, 1, 2),
            s(0, cof(1, 2, 0, 2)), cof(0, 2, 0, 2), s(0, cof(0, 1, 0, 2)),
            cof(1, 2, 0, 1), s(0, cof(0, 2, 0, 1)), cof(0, 1, 0, 1),
        ]
        return Mat3(F, [m(x, di) for x in adj])

    def is_identity(self) -> bool:
        return self.e == (1, 0, 0, 0, 1, 0, 0, 0, 1)

    def order(self, limit: int = 10_000) -> int:
        x = self
        n = 1
        while not x.is_identity():
            x = x * self
            n += 1
            if n > limit:
                raise ValueError("element order exceeds limit")
        return n

    def __eq__(self, other):
        return isinstance(other, Mat3) and self.e == other.e and self.field == other.field

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.e)
        return self._hash

    def __lt__(self, other):
        return self.e < other.e

    def __repr__(self):
        r = self.field.render_code
        return "[" + "; ".join(" ".join(r(self.e[3 * i + j]) for j in range(3))
                               for i in range(3)) + "]"


@dataclass(frozen=True)
class AdditivePair:
    """An element (c1, c2) of the additive group K^2."""

    c1: FieldElement
    c2: FieldElement

    def __add__(self, other):
        return AdditivePair(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        return AdditivePair(self.c1 - other.c1, self.c2 - other.c2)

    def __neg__(self):
        return AdditivePair(-self.c1, -self.c2)

    def __mul__(self, n):
        return AdditivePair(self.c1 * n, self.c2 * n)

    __rmul__ = __mul__

    def is_zero(self):
        return self.c1.is_zero() and self.c2.is_zero()


def sigma(c: AdditivePair) -> Mat3:
    """The unipotent matrix [[1, -c1, c1^2 + c2], [0, 1, c1], [0, 0, 1]]."""
    F = c.c1.field
    c1, c2 = c.c1, c.c2
    return Mat3.from_rows(F, [[1, -c1, c1 * c1 + c2], [0, 1, c1], [0, 0, 1]])


def rank3(g: Mat3) -> int:
    """Rank of a 3x3 matrix by exact elimination."""
    from .linalg import rank
    return rank([list(g.e[0:3]), list(g.e[3:6]), list(g.e[6:9])], g.field, 3)


def fixed_space_dim(g: Mat3) -> int:
    return 3 - rank3(g - Mat3.identity(g.field))


def is_pseudo_reflection(g: Mat3) -> bool:
    return fixed_space_dim(g) == 2


@dataclass
class MatrixGroup:
    elements: frozenset
    generators: tuple
    params: tuple | None = None
    degenerate: bool = False
    field: Field | None = dc_field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __contains__(self, g):
        return g in self.elements

    def is_abelian(self) -> bool:
        els = list(self.elements)
        return all(g * h == h * g for g, h in itertools.combinations(els, 2))

    def exponent(self) -> int:
        from math import lcm
        out = 1
        for g in self.elements:
            out = lcm(out, g.order())
        return out

    def is_closed(self) -> bool:
        els = self.elements
        return all(g * h in els for g in els for h in els) and all(
            g.inverse() in els for g in els)


def closure(generators: Iterable[Mat3], limit: int | None = None) -> frozenset:
    """Subgroup generated by ``generators`` (breadth-first, right multiplication)."""
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    ident = Mat3.identity(gens[0].field)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if limit is not None and len(seen) > limit:
                        raise EnumerationBudgetExceeded(f"group larger than {limit}")
        frontier = nxt
    return frozenset(seen)


def group_from_generators(generators: Sequence[Mat3]) -> MatrixGroup:
    gens = tuple(generators)
    return MatrixGroup(closure(gens), gens, field=gens[0].field)


def trivial_group(F: Field) -> MatrixGroup:
    ident = Mat3.identity(F)
    return MatrixGroup(frozenset([ident]), (ident,), field=F)


def subgroup_pairs(a: FieldElement, b: FieldElement) -> list:
    """The nine pairs m*(1,0) + n*(a,b), m, n in F_3, with repetitions kept."""
    F = a.field
    one = AdditivePair(F.one(), F.zero())
    ab = AdditivePair(a, b)
    return [one * m + ab * n for m in range(3) for n in range(3)]


def build_group(a: FieldElement, b: FieldElement) -> MatrixGroup:
    """sigma(U(a, b)) where U(a, b) is spanned over F_3 by (1, 0) and (a, b)."""
    F = a.field
    if F.p != 3 or b.field != F:
        raise ValueError("a and b must lie in one field of characteristic 3")
    pairs = subgroup_pairs(a, b)
    elements = frozenset(sigma(c) for c in pairs)
    gens = (sigma(AdditivePair(F.one(), F.zero())), sigma(AdditivePair(a, b)))
    degenerate = len(elements) != 9
    if degenerate:
        log.warning("(1,0) and (%r,%r) are F_3-dependent: group of order %d",
                    a, b, len(elements))
    return MatrixGroup(elements, gens, params=(a, b), degenerate=degenerate, field=F)


def is_small(G: MatrixGroup):
    """(True, None) if G has no pseudo-reflection, else (False, witness)."""
    for g in sorted(G.elements):
        if not g.is_identity() and is_pseudo_reflection(g):
            return False, g
    return True, None


def normalize_embedding(u: AdditivePair, u_prime: AdditivePair):
    """Parameters (a, b) with U conjugate to U(a, b).

    With generators (u, v), (u', v') and u != 0 the conjugating substitution
    (c1, c2) -> (c1/u, (c2 - v c1/u)/u^2) sends (u, v) to (1, 0) and
    (u', v') to (a, b) = (u'/u, v'/u^2 - v u'/u^3).
    """
    uu, v = u.c1, u.c2
    if uu.is_zero():
        raise PseudoReflectionForced("u = 0: sigma((u, v)) is a pseudo-reflection")
    ui = uu.inverse()
    a = ui * u_prime.c1
    b = ui * ui * u_prime.c2 - ui * ui * ui * v * u_prime.c1
    return a, b


def normalize_pair(c: AdditivePair, u: AdditivePair) -> AdditivePair:
    """Image of c under the normalising substitution determined by u = (u, v)."""
    ui = u.c1.inverse()
    return AdditivePair(ui * c.c1, ui * ui * (c.c2 - u.c2 * ui * c.c1))


def normalizing_conjugator(u: AdditivePair) -> Mat3:
    """P with P sigma(c) P^-1 == sigma(normalize_pair(c, u)) for every c."""
    F = u.c1.field
    lam = u.c1.inverse()
    tau = -u.c2 * lam
    D = Mat3.from_rows(F, [[lam * lam, 0, 0], [0, lam, 0], [0, 0, 1]])
    T = Mat3.from_rows(F, [[1, 0, 0], [0, 1, tau], [0, 0, 1]])
    return D * T


def in_f3_span(target: AdditivePair, gens: Sequence[AdditivePair]) -> bool:
    zero = AdditivePair(target.c1.field.zero(), target.c1.field.zero())
    for coeffs in itertools.product(range(3), repeat=len(gens)):
        acc = zero
        for n, g in zip(coeffs, gens):
            acc = acc + g * n
        if acc == target:
            return True
    return False


def act_on_poly(g: Mat3, f: Poly) -> Poly:
    """f -> f o g, i.e. each variable replaced by its row of g applied to the coordinates."""
    ring = f.ring
    if ring.nvars != 3:
        raise RingMismatch("the linear action needs a 3-variable ring")
    if ring.base != g.field:
        raise RingMismatch("matrix and polynomial live over different fields")
    gens = ring.gens()
    images = {}
    for i, v in enumerate(ring.vars):
        row = ring.zero()
        for j in range(3):
            c = g.e[3 * i + j]
            if c:
                row = row + gens[j].scale(g.field.element(c))
        images[v] = row
    return substitute(f, images, ring)


# --- enumeration inside SL(3, q) -----------------------------------------------

def _check_budget(q: int, budget: int):
    if q ** 9 > budget:
        raise EnumerationBudgetExceeded(
            f"enumerating 3x3 matrices over F_{q} needs {q ** 9} steps (budget {budget})")


def sl3_elements(F: Field, budget: int = DEFAULT_ENUMERATION_BUDGET) -> list:
    """All of SL(3, F) by exhaustive enumeration."""
    _check_budget(F.q, budget)
    out = []
    for entries in itertools.product(range(F.q), repeat=9):
        m = Mat3(F, entries)
        if m.det().code == 1:
            out.append(m)
    return out


def unitriangular_elements(F: Field) -> list:
    """Upper unitriangular matrices: a Sylow p-subgroup of SL(3, F)."""
    return [Mat3(F, (1, x, y, 0, 1, z, 0, 0, 1))
            for x in range(F.q) for y in range(F.q) for z in range(F.q)]


def centralizer_bruteforce(R: Mat3, q: int | None = None,
                           budget: int = DEFAULT_ENUMERATION_BUDGET) -> frozenset:
    """All A in SL(3, q) commuting with R."""
    F = R.field
    if q is not None and q != F.q:
        raise ValueError("q must be the size of R's field")
    return frozenset(A for A in sl3_elements(F, budget) if A * R == R * A)


def span_form_set(R: Mat3) -> frozenset:
    """{a I + b R + c R^2 : a + b + c = 1} over R's field."""
    F = R.field
    I = Mat3.identity(F)
    R2 = R * R
    out = set()
    for a in range(F.q):
        for b in range(F.q):
            c = F.sub(F.sub(1, a), b)
            out.add(I.scale(F.element(a)) + R.scale(F.element(b)) + R2.scale(F.element(c)))
    return frozenset(out)


def lemma_matrix(F: Field) -> Mat3:
    """The cyclic permutation matrix used as the normal form of R."""
    return Mat3.from_rows(F, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])


@dataclass
class SubgroupCensus:
    """Result of enumerating order-3^r subgroups generated by order-3 elements."""

    q: int
    r: int
    ambient: str
    ambient_order: int
    order3_elements: int
    subgroups: int
    small: int
    not_small: int
    small_elementary_abelian: int
    all_small_elementary_abelian: bool
    not_small_witnesses: list = dc_field(default_factory=list)
    small_examples: list = dc_field(default_factory=list)

    def as_dict(self):
        d = dict(self.__dict__)
        d["not_small_witnesses"] = [repr(m) for m in self.not_small_witnesses]
        d["small_examples"] = [[repr(m) for m in sorted(h)] for h in self.small_examples]
        return d


def _pairs_for_shard(args):
    F, elems, start, step = args
    index = {m: i for i, m in enumerate(elems)}
    ident = Mat3.identity(F)
    found = set()
    for i in range(start, len(elems), step):
        g = elems[i]
        g2 = g * g
        powers_g = (ident, g, g2)
        for j in range(i + 1, len(elems)):
            h = elems[j]
            if h == g2:
                continue
            h2 = h * h
            S = {gi * hj for gi in powers_g for hj in (ident, h, h2)}
            if len(S) != 9:
                continue
            # <g><h> has 9 elements; it is a subgroup iff it is closed under h*
            if all(h * s in S for s in S):
                found.add(frozenset(index[s] for s in S if s != ident))
    return found


def order9_subgroups(elems: Sequence[Mat3], workers: int = 1):
    """Order-9 subgroups generated by two order-3 elements of ``elems``.

    Returns ``(order3_elements, subgroups)``; the search over pairs can be
    sharded across processes and the shards are merged by set union.
    """
    F = elems[0].field
    order3 = sorted(m for m in elems if not m.is_identity() and (m * m * m).is_identity())
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = pool.map(_pairs_for_shard,
                              [(F, order3, s, workers) for s in range(workers)])
            found = set().union(*shards)
    else:
        found = _pairs_for_shard((F, order3, 0, 1))
    ident = Mat3.identity(F)
    groups = [frozenset([ident] + [order3[i] for i in s]) for s in sorted(found, key=sorted)]
    return order3, groups


def verify_small_3group_structure(q: int = 3, r: int = 2, ambient: str = "sl3",
                                  workers: int = 1,
                                  budget: int = DEFAULT_ENUMERATION_BUDGET) -> SubgroupCensus:
    """Enumerate subgroups of order 3^r and test the small ones for C_3^r structure.

    ``ambient="sl3"`` enumerates all of SL(3, q) (q = 3 within the default
    budget); ``ambient="unitriangular"`` searches the upper unitriangular
    Sylow 3-subgroup, which contains a conjugate of every 3-subgroup.
    """
    if r not in (1, 2):
        raise ValueError("only r = 1 and r = 2 are enumerable")
    F = make_field(3, {3: 1, 9: 2, 27: 3}.get(q, 0) or _bad_q(q))
    if ambient == "sl3":
        elems = sl3_elements(F, budget)
    elif ambient == "unitriangular":
        elems = unitriangular_elements(F)
    else:
        raise ValueError(f"unknown ambient {ambient!r}")
    if r == 1:
        order3 = [m for m in elems if not m.is_identity() and (m * m * m).is_identity()]
        groups = sorted({closure([m]) for m in order3}, key=sorted)
    else:
        order3, groups = order9_subgroups(elems, workers)
    small = not_small = good = 0
    witnesses, examples = [], []
    for H in groups:
        G = MatrixGroup(H, (), field=F)
        ok, wit = is_small(G)
        if not ok:
            not_small += 1
            if len(witnesses) < 5:
                witnesses.append(wit)
            continue
        small += 1
        if len(examples) < 3:
            examples.append(H)
        if G.is_abelian() and all(g.is_identity() or g.order() == 3 for g in H):
            good += 1
    return SubgroupCensus(q=q, r=r, ambient=ambient, ambient_order=len(elems),
                          order3_elements=len(order3), subgroups=len(groups), small=small,
                          not_small=not_small, small_elementary_abelian=good,
                          all_small_elementary_abelian=(good == small),
                          not_small_witnesses=witnesses, small_examples=examples)


def _bad_q(q):
    raise ValueError(f"unsupported field size {q}")
