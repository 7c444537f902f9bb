"""Finite fields F_p and F_{p^k} with table-driven exact arithmetic.

Elements are encoded as integers ``0 <= n < q``: the base-``p`` digits of ``n``
are the coefficients of the element in the power basis ``1, t, ..., t^{k-1}``
of ``F_p[t]/(modulus)``.  All hot-path arithmetic (used by polynomials,
Groebner bases and linear algebra) works on these codes through the tables
held by :class:`Field`; :class:`FieldElement` is the user-facing wrapper.
"""

from __future__ import annotations

import functools
import random
from typing import Iterator, Sequence

from .errors import FieldMismatch, InfeasibleConstraint, NoIrreducible, NotPrime

MAX_DEGREE = 8
# full q*q addition tables up to this size, digit arithmetic above it
_ADD_TABLE_LIMIT = 243


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# --- dense univariate polynomials over F_p (lists, low degree first) -------

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmod(f, g, p):
    """Remainder of f modulo g over F_p."""
    f = _trim(list(f))
    g = _trim(list(g))
    inv_lead = pow(g[-1], p - 2, p)
    while len(f) >= len(g):
        c = f[-1] * inv_lead % p
        shift = len(f) - len(g)
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gi) % p
        _trim(f)
    return f


def _pmulmod(f, g, m, p):
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    return _pmod(out, m, p)


def _pgcd(f, g, p):
    f = _trim(list(f))
    g = _trim(list(g))
    while g:
        f, g = g, _pmod(f, g, p)
    return f


def _xpow_mod(e, m, p):
    """x^e mod m over F_p by square and multiply."""
    result = [1]
    base = _pmod([0, 1], m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _monic_polys(p, d) -> Iterator[list]:
    """Monic degree-d polynomials over F_p in increasing code order."""
    for code in range(p ** d):
        coeffs = []
        c = code
        for _ in range(d):
            coeffs.append(c % p)
            c //= p
        yield coeffs + [1]


def irreducible_by_trial_division(f: Sequence[int], p: int) -> bool:
    """Exhaustive factor search: no monic factor of degree 1..deg/2."""
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for g in _monic_polys(p, d):
            if not _pmod(f, g, p):
                return False
    return True


def irreducible_by_rabin(f: Sequence[int], p: int) -> bool:
    k = len(f) - 1
    if _xpow_mod(p ** k, f, p) != _pmod([0, 1], f, p):
        return False
    for r in range(2, k + 1):
        if k % r == 0 and is_prime(r):
            h = list(_xpow_mod(p ** (k // r), f, p))
            h += [0] * (2 - len(h))
            h[1] = (h[1] - 1) % p
            if len(_pgcd(f, _trim(h), p)) > 1:
                return False
    return True


def is_irreducible(f: Sequence[int], p: int) -> bool:
    if len(f) - 1 <= 4:
        return irreducible_by_trial_division(f, p)
    return irreducible_by_rabin(f, p)


class Field:
    """F_{p^k} = F_p[t]/(modulus); use :func:`make_field` to construct."""

    def __init__(self, p: int, k: int, modulus: Sequence[int]):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be positive")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if k > 1 and not is_irreducible(list(modulus), p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = modulus
        self._build_tables()

    # -- construction ------------------------------------------------------

    def _digits(self, n):
        out = []
        for _ in range(self.k):
            out.append(n % self.p)
            n //= self.p
        return out

    def _code(self, digits):
        n = 0
        for c in reversed(digits):
            n = n * self.p + c % self.p
        return n

    def _slow_mul(self, a, b):
        if self.k == 1:
            return a * b % self.p
        prod = _pmulmod(self._digits(a), self._digits(b), list(self.modulus), self.p)
        return self._code(prod + [0] * (self.k - len(prod)))

    def _slow_pow(self, a, n):
        result = 1
        while n:
            if n & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            n >>= 1
        return result

    def _build_tables(self):
        p, q = self.p, self.q
        self.digits = [self._digits(n) for n in range(q)]
        self.neg_t = [self._code([-d for d in self.digits[n]]) for n in range(q)]
        if q <= _ADD_TABLE_LIMIT:
            dig = self.digits
            code = self._code
            self.add_t = [code([x + y for x, y in zip(dig[a], dig[b])])
                          for a in range(q) for b in range(q)]
        else:
            self.add_t = None
        # primitive element: smallest code of multiplicative order q-1
        order = q - 1
        prime_factors = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
        for g in range(1, q):
            if all(self._slow_pow(g, order // r) != 1 for r in prime_factors):
                break
        else:  # pragma: no cover - a primitive element always exists
            raise NoIrreducible("no primitive element")
        powers = [1]
        x = g
        while x != 1:
            powers.append(x)
            x = self._slow_mul(x, g)
        self.primitive = g
        self.exp_t = powers + powers
        self.log_t = [None] * q
        for i, x in enumerate(powers):
            self.log_t[x] = i

    # -- code-level arithmetic (hot path) ---------------------------------

    def add(self, a: int, b: int) -> int:
        if self.add_t is not None:
            return self.add_t[a * self.q + b]
        p = self.p
        da, db = self.digits[a], self.digits[b]
        n = 0
        for i in range(self.k - 1, -1, -1):
            n = n * p + (da[i] + db[i]) % p
        return n

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg_t[b])

    def neg(self, a: int) -> int:
        return self.neg_t[a]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_t[self.log_t[a] + self.log_t[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.exp_t[(self.q - 1 - self.log_t[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 0
        return self.exp_t[(self.log_t[a] * n) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        return n % self.p

    # -- element-level API ------------------------------------------------

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch("element belongs to another field")
            return value
        if isinstance(value, int):
            return FieldElement(self, self.from_int(value))
        # a coefficient vector in the power basis
        coeffs = list(value)
        if len(coeffs) > self.k:
            raise ValueError("too many power-basis coefficients")
        return FieldElement(self, self._code(coeffs + [0] * (self.k - len(coeffs))))

    def element(self, code: int) -> "FieldElement":
        return FieldElement(self, code)

    def gen(self) -> "FieldElement":
        """The class of t in F_p[t]/(modulus) (equal to 0 when k = 1)."""
        return FieldElement(self, self.p % self.q if self.k > 1 else 0)

    def elements(self) -> list:
        return [FieldElement(self, n) for n in range(self.q)]

    def zero(self):
        return FieldElement(self, 0)

    def one(self):
        return FieldElement(self, 1)

    def in_prime_subfield(self, code: int) -> bool:
        return code < self.p

    def render_code(self, code: int) -> str:
        """Integer for prime fields, power-basis tuple for extensions."""
        if self.k == 1:
            return str(code)
        return "(" + ",".join(str(d) for d in self.digits[code]) + ")"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.k, self.modulus) == (
            other.p, other.k, other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        if self.k == 1:
            return f"F_{self.p}"
        return f"F_{self.q}[mod {list(self.modulus)}]"

    def __reduce__(self):
        return (Field, (self.p, self.k, self.modulus))


@functools.total_ordering
class FieldElement:
    """Immutable element of a :class:`Field`."""

    __slots__ = ("field", "code")

    def __init__(self, field: Field, code: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "code", code)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def parent(self) -> Field:
        return self.field

    @property
    def coeffs(self) -> tuple:
        return tuple(self.field.digits[self.code])

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{other.field!r} vs {self.field!r}")
            return other.code
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(self.code, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(o, self.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(self.code, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(o, self.code))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.code, n))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.code))

    def frobenius(self, times: int = 1):
        return self ** (self.field.p ** times)

    def is_zero(self) -> bool:
        return self.code == 0

    def in_prime_subfield(self) -> bool:
        return self.code < self.field.p

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == self.field.from_int(other)
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.code < other.code

    def __hash__(self):
        return hash((self.field.q, self.code))

    def __int__(self):
        if self.field.k > 1 and self.code >= self.field.p:
            raise ValueError("element is not in the prime subfield")
        return self.code

    def __repr__(self):
        return self.field.render_code(self.code)


def _irreducibles(p: int, k: int) -> Iterator[tuple]:
    if k == 1:
        yield (0, 1)
        return
    for f in _monic_polys(p, k):
        if f[0] != 0 and is_irreducible(f, p):
            yield tuple(f)


@functools.lru_cache(maxsize=None)
def make_field(p: int = 3, k: int = 1, seed: int = 0) -> Field:
    """Return F_{p^k} with a deterministically chosen irreducible modulus.

    Monic candidates are scanned in increasing code order (constant term the
    least significant digit); ``seed`` selects the ``seed``-th irreducible
    found, cyclically, so seed 0 gives the lexicographically first one.
    For ``k = 1`` the modulus is ``x``.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if not 1 <= k <= MAX_DEGREE:
        raise ValueError(f"extension degree must lie in 1..{MAX_DEGREE}")
    found = []
    for f in _irreducibles(p, k):
        found.append(f)
        if len(found) > seed:
            return Field(p, k, f)
    if not found:  # pragma: no cover - irreducibles exist in every degree
        raise NoIrreducible(f"no irreducible of degree {k} over F_{p}")
    return Field(p, k, found[seed % len(found)])


CONSTRAINTS = ("nonzero", "not_in_prime_subfield", "unconstrained")


def sample_parameter(field: Field, constraint: str = "unconstrained",
                     rng_seed: int = 0) -> FieldElement:
    """Uniform random element satisfying ``constraint``, reproducible per seed."""
    if constraint not in CONSTRAINTS:
        raise ValueError(f"unknown constraint {constraint!r}")
    if constraint == "not_in_prime_subfield" and field.k == 1:
        raise InfeasibleConstraint(f"{field!r} has no element outside its prime subfield")
    rng = random.Random(rng_seed)
    while True:
        code = rng.randrange(field.q)
        if constraint == "nonzero" and code == 0:
            continue
        if constraint == "not_in_prime_subfield" and code < field.p:
            continue
        return FieldElement(field, code)
