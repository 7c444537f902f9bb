"""Sparse multivariate polynomials over a finite field.

A :class:`Poly` is a dict from exponent tuples to nonzero coefficient codes
(see :mod:`wildquot.ff`).  Zero coefficients are never stored, so two equal
polynomials always have identical term maps and structural equality is
mathematical equality.
"""

from __future__ import annotations

import operator
from typing import Iterable, Mapping, Sequence

from .errors import MissingImage, RingMismatch, UnknownVariable, ZeroPolynomial
from .ff import Field, FieldElement

ORDERS = ("grevlex", "lex")
MAX_EXPONENT = 1 << 20


def _grevlex_key(e):
    return (sum(e),) + tuple(-x for x in reversed(e))


def _lex_key(e):
    return e


class PolyRing:
    """K[vars] with a monomial order ("grevlex" or "lex"), optionally weighted.

    With ``weights`` the order first compares the weighted degree and breaks
    ties with the underlying grevlex/lex order.
    """

    def __init__(self, base: Field, vars: Sequence[str], order: str = "grevlex",
                 weights: Sequence[int] | None = None):
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise ValueError(f"duplicate variable names in {vars}")
        if order not in ORDERS:
            raise ValueError(f"unknown monomial order {order!r}")
        if weights is not None:
            weights = tuple(int(w) for w in weights)
            if len(weights) != len(vars) or any(w < 1 for w in weights):
                raise ValueError("weights must be positive, one per variable")
        self.base = base
        self.vars = vars
        self.order = order
        self.weights = weights
        self.nvars = len(vars)
        self._index = {v: i for i, v in enumerate(vars)}
        inner = _grevlex_key if order == "grevlex" else _lex_key
        if weights is None:
            self.key = inner
        else:
            w = weights
            self.key = lambda e: (sum(map(operator.mul, w, e)),) + tuple(inner(e))
        self.zero_exp = (0,) * self.nvars

    # -- structure ----------------------------------------------------------

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise UnknownVariable(f"{var!r} is not a variable of {self}") from None

    def __contains__(self, var):
        return var in self._index

    def gen(self, var: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(var)] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self) -> tuple:
        return tuple(self.gen(v) for v in self.vars)

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        code = self.coerce_scalar(c)
        return Poly(self, {self.zero_exp: code} if code else {})

    def monomial(self, exp: Sequence[int], c=1) -> "Poly":
        code = self.coerce_scalar(c)
        exp = tuple(exp)
        if len(exp) != self.nvars:
            raise ValueError("exponent vector has wrong length")
        return Poly(self, {exp: code} if code else {})

    def coerce_scalar(self, c) -> int:
        if isinstance(c, FieldElement):
            if c.field != self.base:
                raise RingMismatch("coefficient from a different field")
            return c.code
        if isinstance(c, int):
            return c % self.base.p
        raise TypeError(f"cannot use {type(c).__name__} as a coefficient")

    def with_order(self, order: str, weights=None) -> "PolyRing":
        return PolyRing(self.base, self.vars, order, weights)

    def extend(self, new_vars: Sequence[str], order: str | None = None) -> "PolyRing":
        return PolyRing(self.base, self.vars + tuple(new_vars), order or self.order)

    def fresh_var(self, stem: str = "t") -> str:
        name = stem
        n = 0
        while name in self._index:
            n += 1
            name = f"{stem}{n}"
        return name

    def embed(self, f: "Poly", target: "PolyRing") -> "Poly":
        """Map f into a ring containing all of f's variables (by name)."""
        if f.ring.base != target.base:
            raise RingMismatch("different coefficient fields")
        pos = [target.index(v) for v in f.ring.vars]
        out = {}
        for e, c in f.terms.items():
            ne = [0] * target.nvars
            for i, x in zip(pos, e):
                ne[i] = x
            out[tuple(ne)] = c
        return Poly(target, out)

    def parse(self, text: str, constants: Mapping | None = None) -> "Poly":
        from .parser import parse_poly
        return parse_poly(text, self, constants)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (
            self.base, self.vars, self.order, self.weights) == (
            other.base, other.vars, other.order, other.weights)

    def __hash__(self):
        return hash((self.base, self.vars, self.order, self.weights))

    def __repr__(self):
        return f"{self.base!r}[{','.join(self.vars)}]"

    def __reduce__(self):
        return (PolyRing, (self.base, self.vars, self.order, self.weights))


class Poly:
    """Immutable sparse polynomial.  ``terms`` maps exponent tuples to codes."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- coercion -------------------------------------------------------------

    def _other(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                if other.ring.vars == self.ring.vars and other.ring.base == self.ring.base:
                    return Poly(self.ring, other.terms)
                raise RingMismatch(f"{other.ring} vs {self.ring}")
            return other
        if isinstance(other, (int, FieldElement)):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        add = self.ring.base.add
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = add(s, c)
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        neg = self.ring.base.neg_t
        return Poly(self.ring, {e: neg[c] for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        F = self.ring.base
        mul, add = F.mul, F.add
        out: dict = {}
        vadd = operator.add
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(vadd, e1, e2))
                c = mul(c1, c2)
                s = out.get(e)
                if s is None:
                    out[e] = c
                else:
                    s = add(s, c)
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        code = self.ring.coerce_scalar(c)
        if code == 0:
            return self.ring.zero()
        mul = self.ring.base.mul
        return Poly(self.ring, {e: mul(v, code) for e, v in self.terms.items()})

    def mul_monomial(self, exp: Sequence[int], c=1) -> "Poly":
        code = self.ring.coerce_scalar(c) if not isinstance(c, int) or c != 1 else 1
        if code == 0:
            return self.ring.zero()
        mul = self.ring.base.mul
        return Poly(self.ring, {tuple(map(operator.add, e, exp)): mul(v, code)
                                for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- inspection -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, FieldElement)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring.vars == other.ring.vars and self.ring.base == other.ring.base \
            and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.vars, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self, reverse: bool = True) -> list:
        """(exponent, code) pairs in descending (default) monomial order."""
        key = self.ring.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=reverse)

    def lm(self) -> tuple:
        if not self.terms:
            raise ZeroPolynomial("leading monomial of zero")
        return max(self.terms, key=self.ring.key)

    def lc(self) -> FieldElement:
        return self.ring.base.element(self.terms[self.lm()])

    def coeff(self, exp: Sequence[int]) -> FieldElement:
        return self.ring.base.element(self.terms.get(tuple(exp), 0))

    def coefficients(self) -> dict:
        """Exponent tuple -> FieldElement."""
        el = self.ring.base.element
        return {e: el(c) for e, c in self.terms.items()}

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        inv = self.ring.base.inv(self.terms[self.lm()])
        return self.scale(self.ring.base.element(inv))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, var: str) -> int:
        i = self.ring.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def support_vars(self) -> list:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return [self.ring.vars[i] for i in sorted(used)]

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_homogeneous(self, weights=None) -> bool:
        return len(weighted_degree_profile(self, weights)) <= 1

    # -- rendering --------------------------------------------------------------

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Poly({render(self)!r})"

    # -- convenience wrappers ---------------------------------------------------

    def subs(self, images: Mapping[str, "Poly"], target: PolyRing | None = None) -> "Poly":
        return substitute(self, images, target)

    def diff(self, var: str) -> "Poly":
        return partial_derivative(self, var)

    def __call__(self, *point):
        return evaluate(self, point[0] if len(point) == 1 and isinstance(point[0], Mapping)
                        else point)


# --- operations ---------------------------------------------------------------

def poly_arith(f: Poly, g: Poly, op: str) -> Poly:
    if f.ring != g.ring:
        raise RingMismatch(f"{f.ring} vs {g.ring}")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown operation {op!r}")


def substitute(f: Poly, images: Mapping[str, Poly], target: PolyRing | None = None) -> Poly:
    """Apply the ring homomorphism sending each variable of f to its image.

    Every variable that occurs in f needs an image; variables that do not
    occur may be omitted.  All images must live in one target ring.
    """
    ring = f.ring
    imgs = []
    for i, v in enumerate(ring.vars):
        img = images.get(v)
        if img is None:
            if any(e[i] for e in f.terms):
                raise MissingImage(f"no image for variable {v!r}")
        imgs.append(img)
    if target is None:
        target = next((g.ring for g in imgs if g is not None), None)
        if target is None:  # constant polynomial and no images at all
            return f
    for img in imgs:
        if img is not None and img.ring != target:
            if img.ring.vars != target.vars or img.ring.base != target.base:
                raise RingMismatch("images live in different rings")
    if target.base != ring.base:
        raise RingMismatch("target ring has a different coefficient field")
    powers = [[target.one()] if g is not None else None for g in imgs]

    def power(i, k):
        cache = powers[i]
        while len(cache) <= k:
            cache.append(cache[-1] * imgs[i])
        return cache[k]

    F = target.base
    acc: dict = {}
    add = F.add
    for e, c in f.terms.items():
        term = None
        for i, k in enumerate(e):
            if k:
                term = power(i, k) if term is None else term * power(i, k)
        if term is None:
            term = target.one()
        for te, tc in term.terms.items():
            val = F.mul(tc, c)
            s = acc.get(te)
            if s is None:
                acc[te] = val
            else:
                s = add(s, val)
                if s:
                    acc[te] = s
                else:
                    del acc[te]
    return Poly(target, acc)


def partial_derivative(f: Poly, var: str) -> Poly:
    i = f.ring.index(var)
    F = f.ring.base
    out = {}
    for e, c in f.terms.items():
        k = e[i]
        if k % F.p == 0:
            continue
        ne = e[:i] + (k - 1,) + e[i + 1:]
        out[ne] = F.mul(c, k % F.p)
    return Poly(f.ring, out)


def vanishing_order(f: Poly, var: str) -> int:
    """Minimum exponent of ``var`` over the terms of f."""
    if not f.terms:
        raise ZeroPolynomial("vanishing order of the zero polynomial")
    i = f.ring.index(var)
    return min(e[i] for e in f.terms)


def divide_by_power(f: Poly, var: str, m: int) -> Poly:
    """Exact division by var^m; every term must be divisible."""
    i = f.ring.index(var)
    out = {}
    for e, c in f.terms.items():
        if e[i] < m:
            raise ValueError(f"{var}^{m} does not divide the polynomial")
        out[e[:i] + (e[i] - m,) + e[i + 1:]] = c
    return Poly(f.ring, out)


def weighted_degree_profile(f: Poly, weights=None) -> set:
    """Set of weighted degrees of the terms of f (singleton iff homogeneous)."""
    ring = f.ring
    if weights is None:
        w = ring.weights or (1,) * ring.nvars
    elif isinstance(weights, Mapping):
        missing = [v for v in ring.vars if v not in weights]
        if missing:
            raise UnknownVariable(f"no weight for {missing}")
        w = tuple(weights[v] for v in ring.vars)
    else:
        w = tuple(weights)
        if len(w) != ring.nvars:
            raise ValueError("one weight per variable required")
    return {sum(map(operator.mul, w, e)) for e in f.terms}


def evaluate(f: Poly, point) -> FieldElement:
    """Value of f at a point given as a sequence or a name -> value mapping."""
    ring = f.ring
    F = ring.base
    if isinstance(point, Mapping):
        vals = [point[v] for v in ring.vars]
    else:
        vals = list(point)
        if len(vals) != ring.nvars:
            raise ValueError("point has wrong dimension")
    codes = [ring.coerce_scalar(v) for v in vals]
    total = 0
    for e, c in f.terms.items():
        t = c
        for x, k in zip(codes, e):
            if k:
                t = F.mul(t, F.pow(x, k))
        total = F.add(total, t)
    return F.element(total)


def from_coefficients(ring: PolyRing, coeffs: Mapping) -> Poly:
    """Build a polynomial from {exponent: FieldElement | int}, dropping zeros."""
    out = {}
    for e, c in coeffs.items():
        code = ring.coerce_scalar(c)
        if code:
            out[tuple(e)] = code
    return Poly(ring, out)


def render(f: Poly) -> str:
    """Canonical text: descending monomial order, explicit ``*`` and ``^``.

    Prime-field coefficients print as integers 0..p-1; extension-field
    coefficients print as power-basis tuples.
    """
    if not f.terms:
        return "0"
    F = f.ring.base
    names = f.ring.vars
    parts = []
    for e, c in f.sorted_terms():
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        if not mono:
            parts.append(F.render_code(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(F.render_code(c) + "*" + mono)
    return " + ".join(parts)


def linear_combination(ring: PolyRing, polys: Iterable[Poly], coeffs: Iterable[int]) -> Poly:
    """Sum of code-coefficient multiples of polys."""
    F = ring.base
    acc: dict = {}
    for g, c in zip(polys, coeffs):
        if not c:
            continue
        for e, v in g.terms.items():
            val = F.mul(v, c)
            s = acc.get(e)
            if s is None:
                acc[e] = val
            else:
                s = F.add(s, val)
                if s:
                    acc[e] = s
                else:
                    del acc[e]
    return Poly(ring, acc)
