"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)*
    atom   := INT | NAME | '(' expr ')' | '(' INT (',' INT)+ ')'

Integer literals are reduced mod p.  A parenthesised tuple of integers is a
field element written in the power basis (c0 + c1*g + ...), which is how
extension-field coefficients are printed, so printed polynomials parse back.
Names that are not ring variables are looked up in ``constants``.
"""

from __future__ import annotations

from typing import Mapping

from .errors import PolySyntaxError, UnknownVariable
from .ff import FieldElement
from .poly import Poly, PolyRing


def tokenize(text: str) -> list:
    """List of (kind, value, line, column); lines and columns are 1-based."""
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        j = i + 1
        if ch.isdigit():
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), line, col))
        elif ch.isalpha() or ch == "_":
            while j < n and (text[j].isalnum() or text[j] == "_") and text[j].isascii():
                j += 1
            tokens.append(("name", text[i:j], line, col))
        elif ch in "+-*^(),":
            tokens.append((ch, ch, line, col))
        else:
            raise PolySyntaxError(f"unexpected character {ch!r}", text, line, col)
        col += j - i
        i = j
    tokens.append(("end", None, line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PolyRing, constants: Mapping | None):
        self.text = text
        self.ring = ring
        self.F = ring.base
        self.constants = dict(constants or {})
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, self.text, tok[2], tok[3])

    def expect(self, kind):
        t = self.peek()
        if t[0] != kind:
            what = "end of input" if t[0] == "end" else repr(t[1])
            self.fail(f"expected {kind!r}, found {what}")
        return self.take()

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        out = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return out

    def expr(self) -> Poly:
        acc = self.term()
        while self.peek()[0] in ("+", "-"):
            op_tok = self.take()
            op = op_tok[0]
            self._operand_follows(op_tok)
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Poly:
        acc = self.unary()
        while self.peek()[0] == "*":
            self._operand_follows(self.take())
            acc = acc * self.unary()
        return acc

    def _operand_follows(self, op_tok):
        if self.peek()[0] in ("end", ")", "+", "*", "^", ","):
            self.fail(f"operator {op_tok[1]!r} is missing its right operand", op_tok)

    def unary(self) -> Poly:
        if self.peek()[0] == "-":
            self._operand_follows(self.take())
            return -self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        while self.peek()[0] == "^":
            self.take()
            t = self.peek()
            if t[0] != "int":
                self.fail("exponent must be a non-negative integer literal")
            self.take()
            base = base ** t[1]
        return base

    def atom(self) -> Poly:
        t = self.peek()
        kind = t[0]
        if kind == "int":
            self.take()
            return self.ring.const(t[1])
        if kind == "name":
            self.take()
            name = t[1]
            if name in self.ring:
                return self.ring.gen(name)
            if name in self.constants:
                return self.ring.const(self._constant(self.constants[name]))
            raise UnknownVariable(name)
        if kind == "(":
            self.take()
            if self.peek()[0] == "int" and self.toks[self.i + 1][0] == ",":
                return self._tuple_literal()
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {t[1]!r}")

    def _tuple_literal(self) -> Poly:
        digits = [self.take()[1]]
        while self.peek()[0] == ",":
            self.take()
            digits.append(self.expect("int")[1])
        self.expect(")")
        if len(digits) > self.F.k:
            self.fail(f"coefficient tuple longer than the field degree {self.F.k}")
        return self.ring.const(self.F(digits))

    def _constant(self, value):
        if isinstance(value, FieldElement):
            return value
        return int(value)


def parse_poly(text: str, ring: PolyRing, constants: Mapping | None = None) -> Poly:
    """Parse ``text`` into a polynomial of ``ring``.

    Raises PolySyntaxError (a SyntaxError) with line and column, or
    UnknownVariable for names that are neither variables nor constants.
    """
    return _Parser(text, ring, constants).parse()


def parse_constant(text: str, field, constants: Mapping | None = None) -> FieldElement:
    """Evaluate a variable-free expression (e.g. "(1+alpha^2)^2") in ``field``."""
    ring = PolyRing(field, ("_t",))
    p = parse_poly(text, ring, constants)
    if not p.is_constant():
        raise UnknownVariable("_t")
    return field.element(p.terms.get((0,), 0))
