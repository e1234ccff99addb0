"""Polynomial expression parser.

Grammar, loosest binding first::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)*          # right-associative exponents
    atom   := INT | INT "/" INT | NAME | "(" expr ")"

Multiplication is always explicit: ``2*x`` parses, ``2x`` does not. Exponents,
towers included, may not exceed ``MAX_EXPONENT``.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from affine_image.errors import ParseError
from affine_image.polynomial import Polynomial, RingContext

MAX_EXPONENT = 1000

_TOKEN = re.compile(
    r"(?P<space>[ \t\r]+)"
    r"|(?P<newline>\n)"
    r"|(?P<number>\d+(?:/\d+)?)"
    r"|(?P<name>[a-zA-Z][a-zA-Z0-9_]*)"
    r"|(?P<op>[-+*^()])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(source: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        column = pos - line_start + 1
        if match is None:
            char = source[pos]
            if char == ".":
                raise ParseError("Non-integer literal", line, column, source)
            raise ParseError(f"Unexpected character {char!r}", line, column, source)
        kind = match.lastgroup
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind != "space":
            tokens.append(Token(kind, match.group(), line, column))
        pos = match.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str, ring: RingContext):
        self.source = source
        self.ring = ring
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, token: Token = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.line, token.column, self.source)

    def advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def parse(self) -> Polynomial:
        if self.current.kind == "end":
            raise self.error("Empty expression")
        result = self.expr()
        if self.current.kind != "end":
            raise self.error(f"Expected an operator, found {self.current.text!r}")
        return result

    def expr(self) -> Polynomial:
        result = self.term()
        while True:
            if self.accept("+"):
                result = result + self.term()
            elif self.accept("-"):
                result = result - self.term()
            else:
                return result

    def term(self) -> Polynomial:
        result = self.unary()
        while self.accept("*"):
            result = result * self.unary()
        return result

    def unary(self) -> Polynomial:
        if self.accept("-"):
            return -self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.accept("^"):
            return base ** self.exponent()
        return base

    def exponent(self) -> int:
        token = self.current
        if token.kind != "number" or "/" in token.text:
            raise self.error("Malformed exponent; expected a nonnegative integer")
        self.advance()
        value = int(token.text)
        if value > MAX_EXPONENT:
            raise self.error(f"Exponent exceeds {MAX_EXPONENT}", token)
        if self.accept("^"):
            value = value ** self.exponent()
            if value > MAX_EXPONENT:
                raise self.error(f"Exponent tower exceeds {MAX_EXPONENT}", token)
        return value

    def atom(self) -> Polynomial:
        token = self.current
        if token.kind == "number":
            self.advance()
            if "/" in token.text:
                num, den = token.text.split("/")
                if int(den) == 0:
                    raise self.error("Zero denominator in rational literal", token)
                return self.ring.constant(Fraction(int(num), int(den)))
            return self.ring.constant(int(token.text))
        if token.kind == "name":
            self.advance()
            if token.text not in self.ring:
                raise self.error(f"Unknown variable {token.text!r}", token)
            return self.ring.gen(token.text)
        if self.accept("("):
            inner = self.expr()
            if not self.accept(")"):
                raise self.error("Expected ')'")
            return inner
        if token.kind == "end":
            raise self.error("Unexpected end of expression")
        raise self.error(f"Unexpected token {token.text!r}")


def parse_polynomial(source: str, ring: RingContext) -> Polynomial:
    """Parse ``source`` into a polynomial over ``ring``."""
    return _Parser(source, ring).parse()
