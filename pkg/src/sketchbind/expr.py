"""Expression language for parameter bindings.

Grammar (loosest to tightest binding):

    compare   := additive (("<" | ">" | "<=" | ">=" | "==") additive)*
    additive  := multiplicative (("+" | "-") multiplicative)*
    multiplicative := unary (("*" | "/") unary)*
    unary     := "-" unary | power
    power     := primary ("^" unary)?          # right-associative
    primary   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

Identifiers are ``[A-Za-z_][A-Za-z0-9_-]*`` and the tokenizer longest-matches
them, so hyphens glue into names ("dino-size" is one identifier); a binary
minus needs whitespace or a non-identifier character on its left operand
side. Comparisons yield 1/0 and trigonometry works in degrees.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import (
    DivisionByZeroError,
    DomainError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
NUMBER_RE = re.compile(r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")

COMPARE_OPS = ("<=", ">=", "==", "<", ">")


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Unary:
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Compare:
    op: str  # < > <= >= ==
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Number | Ident | Unary | Binary | Compare | Call

# name -> (min arity, max arity)
FUNCTIONS = {
    "sin": (1, 1),
    "cos": (1, 1),
    "tan": (1, 1),
    "sqrt": (1, 1),
    "abs": (1, 1),
    "min": (2, None),
    "max": (2, None),
    "pow": (2, 2),
}


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op" | "end"
    text: str
    pos: int


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        m = NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("num", m.group(), i))
            i = m.end()
            continue
        two = text[i:i + 2]
        if two in ("<=", ">=", "=="):
            tokens.append(_Token("op", two, i))
            i += 2
            continue
        if ch in "+-*/^()<>,":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise ExpressionSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def eat(self, text=None) -> _Token:
        tok = self.cur
        if text is not None and not (tok.kind == "op" and tok.text == text):
            raise ExpressionSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.pos)
        self.i += 1
        return tok

    def parse(self) -> Expr:
        expr = self.compare()
        if self.cur.kind != "end":
            raise ExpressionSyntaxError(f"unexpected trailing {self.cur.text!r}", self.cur.pos)
        return expr

    def compare(self) -> Expr:
        left = self.additive()
        while self.cur.kind == "op" and self.cur.text in COMPARE_OPS:
            op = self.eat().text
            left = Compare(op, left, self.additive())
        return left

    def additive(self) -> Expr:
        left = self.multiplicative()
        while self.cur.kind == "op" and self.cur.text in ("+", "-"):
            op = self.eat().text
            left = Binary(op, left, self.multiplicative())
        return left

    def multiplicative(self) -> Expr:
        left = self.unary()
        while self.cur.kind == "op" and self.cur.text in ("*", "/"):
            op = self.eat().text
            left = Binary(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.cur.kind == "op" and self.cur.text == "-":
            self.eat()
            return Unary(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.cur.kind == "op" and self.cur.text == "^":
            self.eat()
            return Binary("^", base, self.unary())  # right-assoc, exponent may be signed
        return base

    def primary(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.eat()
            return Number(float(tok.text))
        if tok.kind == "ident":
            self.eat()
            if self.cur.kind == "op" and self.cur.text == "(":
                return self.call(tok)
            return Ident(tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.eat()
            inner = self.compare()
            self.eat(")")
            return inner
        raise ExpressionSyntaxError(f"expected a value, found {tok.text or 'end of input'!r}", tok.pos)

    def call(self, name_tok: _Token) -> Expr:
        self.eat("(")
        args = [self.compare()]
        while self.cur.kind == "op" and self.cur.text == ",":
            self.eat()
            args.append(self.compare())
        self.eat(")")
        arity = FUNCTIONS.get(name_tok.text)
        if arity is not None:
            lo, hi = arity
            if len(args) < lo or (hi is not None and len(args) > hi):
                raise ExpressionSyntaxError(
                    f"{name_tok.text}() takes {lo}{'' if hi == lo else '+'} argument(s), got {len(args)}",
                    name_tok.pos)
        return Call(name_tok.text, tuple(args))


def parse(text: str) -> Expr:
    """Parse ``text`` into an AST; raises ExpressionSyntaxError with a position."""
    return _Parser(text).parse()


def _finite(x: float) -> float:
    if not math.isfinite(x):
        raise DomainError(f"non-finite result {x}")
    return x


def _power(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0:
        raise DivisionByZeroError("zero raised to a negative power")
    if base < 0 and exponent != int(exponent):
        raise DomainError("negative base with fractional exponent")
    try:
        return _finite(float(base) ** float(exponent))
    except OverflowError:
        raise DomainError("power overflow") from None


def _call(name: str, args):
    if name == "sin":
        return math.sin(math.radians(args[0]))
    if name == "cos":
        return math.cos(math.radians(args[0]))
    if name == "tan":
        return _finite(math.tan(math.radians(args[0])))
    if name == "sqrt":
        if args[0] < 0:
            raise DomainError("sqrt of a negative value")
        return math.sqrt(args[0])
    if name == "abs":
        return abs(args[0])
    if name == "min":
        return min(args)
    if name == "max":
        return max(args)
    if name == "pow":
        return _power(args[0], args[1])
    raise UnknownIdentifierError(name)


def evaluate(expr: Expr, env: dict) -> float:
    """Evaluate an AST against ``env`` (name -> finite scalar).

    Comparisons return exactly 1.0 or 0.0; trig takes degrees.
    """
    if isinstance(expr, Number):
        return expr.value
    if isinstance(expr, Ident):
        try:
            return float(env[expr.name])
        except KeyError:
            raise UnknownIdentifierError(expr.name) from None
    if isinstance(expr, Unary):
        return -evaluate(expr.operand, env)
    if isinstance(expr, Binary):
        left = evaluate(expr.left, env)
        right = evaluate(expr.right, env)
        if expr.op == "+":
            return _finite(left + right)
        if expr.op == "-":
            return _finite(left - right)
        if expr.op == "*":
            return _finite(left * right)
        if expr.op == "/":
            if right == 0.0:
                raise DivisionByZeroError("division by zero")
            return _finite(left / right)
        if expr.op == "^":
            return _power(left, right)
        raise ValueError(f"bad binary op {expr.op!r}")
    if isinstance(expr, Compare):
        left = evaluate(expr.left, env)
        right = evaluate(expr.right, env)
        ok = {"<": left < right, ">": left > right,
              "<=": left <= right, ">=": left >= right,
              "==": left == right}[expr.op]
        return 1.0 if ok else 0.0
    if isinstance(expr, Call):
        args = [evaluate(a, env) for a in expr.args]
        return _finite(_call(expr.name, args))
    raise TypeError(f"not an expression node: {expr!r}")


def free_variables(expr: Expr) -> frozenset:
    """Identifiers read by ``expr`` (call names excluded)."""
    if isinstance(expr, Number):
        return frozenset()
    if isinstance(expr, Ident):
        return frozenset((expr.name,))
    if isinstance(expr, Unary):
        return free_variables(expr.operand)
    if isinstance(expr, (Binary, Compare)):
        return free_variables(expr.left) | free_variables(expr.right)
    if isinstance(expr, Call):
        out = frozenset()
        for a in expr.args:
            out |= free_variables(a)
        return out
    raise TypeError(f"not an expression node: {expr!r}")


def unparse(expr: Expr) -> str:
    """Render an AST back to text (fully parenthesized)."""
    if isinstance(expr, Number):
        return repr(expr.value)
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Unary):
        return f"(- {unparse(expr.operand)})"
    if isinstance(expr, (Binary, Compare)):
        return f"({unparse(expr.left)} {expr.op} {unparse(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(unparse(a) for a in expr.args)})"
    raise TypeError(f"not an expression node: {expr!r}")
