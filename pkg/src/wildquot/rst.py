"""Ages of diagonalised finite-order elements and the age criterion.

An element of order dividing l acting as diag(zeta^a_1, ..., zeta^a_d) is
given by its exponent vector.  Everything is exact (``fractions.Fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable

from .errors import ExponentOutOfRange

TERMINAL = "terminal"
CANONICAL = "canonical_not_terminal"
NOT_CANONICAL = "not_canonical"


@dataclass(frozen=True)
class AgeVector:
    l: int
    exps: tuple

    def __post_init__(self):
        if not isinstance(self.l, int) or self.l < 1:
            raise ExponentOutOfRange(f"order must be a positive integer, got {self.l!r}")
        exps = tuple(int(a) for a in self.exps)
        for a in exps:
            if not 0 <= a <= self.l - 1:
                raise ExponentOutOfRange(f"exponent {a} outside [0, {self.l - 1}]")
        object.__setattr__(self, "exps", exps)

    @property
    def dim(self) -> int:
        return len(self.exps)

    def is_identity(self) -> bool:
        return not any(self.exps)

    def inverse(self) -> "AgeVector":
        return AgeVector(self.l, tuple((self.l - a) % self.l for a in self.exps))

    def power(self, k: int) -> "AgeVector":
        return AgeVector(self.l, tuple((a * k) % self.l for a in self.exps))

    def fixed_space_dim(self) -> int:
        return sum(1 for a in self.exps if a == 0)

    def is_pseudo_reflection(self) -> bool:
        return self.dim > 0 and self.fixed_space_dim() == self.dim - 1

    def is_faithful_order(self) -> bool:
        """True when the element really has order l (gcd of l and exps is 1)."""
        g = self.l
        for a in self.exps:
            g = gcd(g, a)
        return g == 1

    def __str__(self):
        return f"(1/{self.l})({', '.join(map(str, self.exps))})"


def age(v: AgeVector) -> Fraction:
    return Fraction(sum(v.exps), v.l)


def cyclic_group(v: AgeVector) -> list:
    """All powers g^k, k = 0..l-1 (duplicates removed, order kept)."""
    seen, out = set(), []
    for k in range(v.l):
        w = v.power(k)
        if w.exps not in seen:
            seen.add(w.exps)
            out.append(w)
    return out


@dataclass
class RSTResult:
    verdict: str
    ages: list
    pseudo_reflections: list
    unfaithful: list

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "ages": [[str(v), str(a)] for v, a in self.ages],
            "pseudo_reflections": [str(v) for v in self.pseudo_reflections],
            "unfaithful": [str(v) for v in self.unfaithful],
        }


def rst_classify(elements: Iterable[AgeVector], include_identity: bool = False) -> RSTResult:
    """Age test over the non-identity elements.

    terminal if every age is > 1, canonical_not_terminal if every age is >= 1
    and some equals 1, not_canonical otherwise.  Identity elements are
    skipped; ``include_identity`` only controls whether they are listed in
    the ages.  Pseudo-reflections and elements whose exponents share a
    factor with l are reported, not rejected.
    """
    ages, pr, unfaithful = [], [], []
    lo = None
    for v in elements:
        a = age(v)
        if v.is_identity():
            if include_identity:
                ages.append((v, a))
            continue
        ages.append((v, a))
        if v.is_pseudo_reflection():
            pr.append(v)
        if not v.is_faithful_order():
            unfaithful.append(v)
        lo = a if lo is None else min(lo, a)
    if lo is None or lo > 1:
        verdict = TERMINAL
    elif lo == 1:
        verdict = CANONICAL
    else:
        verdict = NOT_CANONICAL
    return RSTResult(verdict, ages, pr, unfaithful)


def classify_cyclic(l: int, exps) -> RSTResult:
    """Classify the cyclic group generated by one diagonal element."""
    return rst_classify(cyclic_group(AgeVector(l, tuple(exps))))
