"""Recursive-descent parser for coefficient and equilibrium expressions.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom (("^" | "**") ["-"] INTEGER)?
    atom   := NUMBER | NAME | "(" expr ")"
"""
import re
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Callable, List, NamedTuple, Optional

from src.utils.errors import ExpressionSyntaxError

if TYPE_CHECKING:
    from src.algebra import CoeffField
    from src.models import EquilibriumExpr

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+(?:\.\d+)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<op>\*\*|[-+*/^()]))")
_MOMENT = re.compile(r"m([1-9][0-9]*)$")


class Token(NamedTuple):
    kind: str
    value: str
    column: int


def tokenize(text: str, line: Optional[int] = None, key: Optional[str] = None) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            column = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionSyntaxError(f"Unexpected character {text[column - 1]!r} in {text!r}",
                                        line, column, key)
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind) + 1))
        pos = match.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


class ExpressionParser:
    """Parse one expression; ``resolve`` maps names to values of the target ring."""

    def __init__(self, text: str, resolve: Callable[[str, int], Any], number: Callable[[Fraction], Any],
                 line: Optional[int] = None, key: Optional[str] = None):
        self.text = text
        self.resolve = resolve
        self.number = number
        self.line = line
        self.key = key
        self.tokens = tokenize(text, line, key)
        self.pos = 0

    def error(self, message: str, column: Optional[int] = None) -> ExpressionSyntaxError:
        column = column if column is not None else self.peek().column
        return ExpressionSyntaxError(f"{message} in {self.text!r}", self.line, column, self.key)

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, *ops: str) -> Optional[Token]:
        token = self.peek()
        if token.kind == "op" and token.value in ops:
            return self.advance()
        return None

    def parse(self) -> Any:
        if self.peek().kind == "end":
            raise self.error("Empty expression")
        value = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"Unexpected {self.peek().value!r}")
        return value

    def expr(self) -> Any:
        value = self.term()
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> Any:
        value = self.unary()
        while True:
            if self.accept("*"):
                value = value * self.unary()
            elif self.accept("/"):
                token = self.peek()
                divisor = self.unary()
                try:
                    value = value / divisor
                except (ZeroDivisionError, TypeError, ValueError) as exc:
                    raise self.error(f"Invalid division ({exc})", token.column)
            else:
                return value

    def unary(self) -> Any:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Any:
        base = self.atom()
        if self.accept("^", "**"):
            negative = bool(self.accept("-"))
            token = self.advance()
            if token.kind != "number" or not token.value.isdigit():
                raise self.error("Exponent must be an integer", token.column)
            exponent = -int(token.value) if negative else int(token.value)
            try:
                return base ** exponent
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise self.error(f"Invalid power ({exc})", token.column)
        return base

    def atom(self) -> Any:
        token = self.advance()
        if token.kind == "number":
            return self.number(Fraction(token.value))
        if token.kind == "name":
            return self.resolve(token.value, token.column)
        if token.kind == "op" and token.value == "(":
            value = self.expr()
            if not self.accept(")"):
                raise self.error("Missing closing parenthesis")
            return value
        raise self.error(f"Unexpected {token.value or 'end of expression'!r}", token.column)


def parse_coefficient(text: Any, field: "CoeffField", line: Optional[int] = None,
                      key: Optional[str] = None):
    """Parse a rational function of the field parameters."""
    if not isinstance(text, str):
        return field.coerce(text)

    def resolve(name: str, column: int):
        if name not in field.names:
            raise ExpressionSyntaxError(f"Unknown parameter {name!r} in {text!r}", line, column, key)
        return field.gen(name)

    def number(value: Fraction):
        return field.coerce(value)

    return ExpressionParser(text, resolve, number, line, key).parse()


def parse_equilibrium(text: Any, field: "CoeffField", conserved: int, line: Optional[int] = None,
                      key: Optional[str] = None) -> "EquilibriumExpr":
    """Parse a polynomial in m1..mN with coefficients in the field."""
    from src.models import EquilibriumExpr

    if not isinstance(text, str):
        return EquilibriumExpr.constant(field, conserved, field.coerce(text))

    def resolve(name: str, column: int):
        moment = _MOMENT.match(name)
        if moment:
            index = int(moment.group(1))
            if index > conserved:
                raise ExpressionSyntaxError(f"m{index} is not a conserved moment (N={conserved})",
                                            line, column, key)
            return EquilibriumExpr.moment(field, conserved, index - 1)
        if name not in field.names:
            raise ExpressionSyntaxError(f"Unknown symbol {name!r} in {text!r}", line, column, key)
        return EquilibriumExpr.constant(field, conserved, field.gen(name))

    def number(value: Fraction):
        return EquilibriumExpr.constant(field, conserved, value)

    return ExpressionParser(text, resolve, number, line, key).parse()
