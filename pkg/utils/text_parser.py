"""
Parsers for the ASCII polynomial grammar and the comma/semicolon separated
lists the CLI accepts.

Grammar (also emitted by ``Polynomial.to_string``)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/" | <juxtaposition>) unary } ;
    unary    = ("+" | "-") unary | power ;
    power    = atom [ ("^" | "**") ["-"] integer ] ;
    atom     = integer | variable | "(" expr ")" ;
    variable = "x1" ... "xn" | "x" | "y" | "z"    (aliases for n <= 3)

Division is only allowed by a nonzero constant; ``1/2*x`` reads as
``(1/2)*x``. Negative exponents of a monomial (``z^-1``) are accepted by
the Laurent parsers only.
"""

import logging
import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from utils.errors import PolynomialParseError
from utils.polynomial import ALIASES, LaurentPolynomial, Polynomial

Value = Union[Polynomial, LaurentPolynomial]

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        match = TOKEN_PATTERN.match(text, pos)
        if not match or match.end() == pos:
            offset = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolynomialParseError(f"Unexpected character {text[offset]!r}", offset)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()
    return tokens


def variable_table(n: int, aliases: Optional[Dict[str, int]] = None) -> Dict[str, int]:
    """x1..xn always; explicit ``aliases`` replace the default x, y, z names."""
    table = {f"x{i + 1}": i for i in range(n)}
    if aliases:
        table.update(aliases)
    elif n <= len(ALIASES):
        table.update({name: i for i, name in enumerate(ALIASES[:n])})
    return table


class _PolynomialParser:
    def __init__(self, text: str, n: int, aliases: Optional[Dict[str, int]], laurent: bool = False):
        self.text = text
        self.n = n
        self.laurent = laurent
        self.variables = variable_table(n, aliases)
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def position(self) -> int:
        token = self.peek()
        return token[2] if token else len(self.text)

    def take(self) -> Tuple[str, str, int]:
        token = self.peek()
        if token is None:
            raise PolynomialParseError("Unexpected end of expression", len(self.text))
        self.index += 1
        return token

    def expect(self, value: str) -> None:
        token = self.take()
        if token[1] != value:
            raise PolynomialParseError(f"Expected {value!r}, found {token[1]!r}", token[2])

    def parse(self) -> Value:
        if not self.tokens:
            raise PolynomialParseError("Empty expression", 0)
        result = self.expr()
        if self.peek() is not None:
            token = self.peek()
            raise PolynomialParseError(f"Unexpected token {token[1]!r}", token[2])
        return result

    def expr(self) -> Value:
        result = self.term()
        while self.peek() is not None and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            right = self.term()
            result = result + right if op == "+" else result - right
        return result

    def term(self) -> Value:
        result = self.unary()
        while True:
            token = self.peek()
            if token is None:
                return result
            kind, value, start = token
            if value == "*":
                self.take()
                result = result * self.unary()
            elif value == "/":
                self.take()
                divisor = self.unary()
                if not divisor.is_constant() or divisor.is_zero:
                    raise PolynomialParseError(
                        "Division is only allowed by a nonzero constant", start
                    )
                result = result.scale_down(divisor.constant_term())
            elif kind in ("number", "name") or value == "(":
                result = result * self.unary()
            else:
                return result

    def unary(self) -> Value:
        token = self.peek()
        if token is not None and token[1] in ("+", "-"):
            self.take()
            operand = self.unary()
            return operand if token[1] == "+" else -operand
        return self.power()

    def power(self) -> Value:
        base = self.atom()
        token = self.peek()
        if token is not None and token[1] in ("^", "**"):
            self.take()
            sign_token = self.peek()
            negative = sign_token is not None and sign_token[1] == "-"
            if negative:
                if not self.laurent:
                    raise PolynomialParseError(
                        "Negative exponent outside Laurent context", sign_token[2]
                    )
                self.take()
            kind, value, start = self.take()
            if kind != "number":
                raise PolynomialParseError(f"Exponent must be an integer, found {value!r}", start)
            if not negative:
                return base ** int(value)
            try:
                return base ** -int(value)
            except (ValueError, ZeroDivisionError) as e:
                raise PolynomialParseError(str(e), sign_token[2]) from e
        return base

    def lifted(self, value: Polynomial) -> Value:
        return LaurentPolynomial(value) if self.laurent else value

    def atom(self) -> Value:
        kind, value, start = self.take()
        if kind == "number":
            return self.lifted(Polynomial.constant(int(value), self.n))
        if kind == "name":
            if value not in self.variables:
                raise PolynomialParseError(f"Unknown variable {value!r}", start)
            return self.lifted(Polynomial.variable(self.variables[value], self.n))
        if value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise PolynomialParseError(f"Unexpected token {value!r}", start)


def parse_poly(text: str, n: int, aliases: Optional[Dict[str, int]] = None) -> Polynomial:
    """Parse ``text`` into a canonical polynomial in ``n`` variables."""
    return _PolynomialParser(text, n, aliases).parse()


def parse_laurent(
    text: str, n: int, aliases: Optional[Dict[str, int]] = None
) -> LaurentPolynomial:
    """Like ``parse_poly`` with ``z^-k`` allowed."""
    return _PolynomialParser(text, n, aliases, laurent=True).parse()


def split_top_level(text: str, separator: str) -> List[str]:
    """Split on ``separator`` outside of parentheses and brackets."""
    parts = []
    depth = 0
    current = []
    for char in text:
        if char in "([":
            depth += 1
        elif char in ")]":
            depth -= 1
        if char == separator and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    tail = "".join(current).strip()
    if tail or parts:
        parts.append(tail)
    return [part for part in parts if part != ""]


def parse_poly_list(
    text: str,
    n: int,
    separator: Optional[str] = None,
    aliases: Optional[Dict[str, int]] = None,
) -> List[Polynomial]:
    if separator is None:
        separator = ";" if ";" in text else ","
    return [parse_poly(item, n, aliases) for item in split_top_level(text, separator)]


def parse_laurent_list(
    text: str,
    n: int,
    separator: Optional[str] = None,
    aliases: Optional[Dict[str, int]] = None,
) -> List[LaurentPolynomial]:
    if separator is None:
        separator = ";" if ";" in text else ","
    return [parse_laurent(item, n, aliases) for item in split_top_level(text, separator)]


def parse_int_list(text: str) -> List[int]:
    cleaned = text.strip().strip("[]")
    try:
        return [int(item) for item in split_top_level(cleaned, ",")]
    except ValueError as e:
        raise PolynomialParseError(f"Expected a comma separated integer list: {text!r}") from e


def parse_rational_list(text: str) -> List[Fraction]:
    cleaned = text.strip().strip("[]")
    try:
        return [Fraction(item) for item in split_top_level(cleaned, ",")]
    except ValueError as e:
        raise PolynomialParseError(f"Expected a comma separated rational list: {text!r}") from e
