"""Scalar field expressions over chart coordinates.

The grammar is deliberately tiny::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ['-'] atom ['^' integer]
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'

A leading minus binds tighter than ``^``, so ``-x^2`` is ``(-x)^2``.
Write ``-(x^2)`` for the other reading.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "tanh", "sqrt")

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, text: str):
        super().__init__(f"{message} at offset {offset}: {text!r}")
        self.offset = offset
        self.text = text


class PoleError(ArithmeticError):
    """Raised when a field cannot be evaluated (or differentiated) at a point."""

    def __init__(self, node: "Expr", point, reason: str):
        super().__init__(f"{reason} in {serialize_expr(node)} at point {tuple(float(v) for v in point)}")
        self.node = node
        self.point = point
        self.reason = reason


@dataclass(frozen=True)
class Expr:
    # coordinate indices referenced by the subtree; empty means constant
    _free: frozenset = field(init=False, repr=False, compare=False, default=frozenset())

    @property
    def is_constant(self) -> bool:
        return not self._free

    @property
    def coordinates(self) -> frozenset:
        return self._free


def _set_free(node: Expr, *children: Expr) -> None:
    free = frozenset().union(*(c._free for c in children)) if children else frozenset()
    object.__setattr__(node, "_free", free)


@dataclass(frozen=True)
class Const(Expr):
    value: float = 0.0

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"constants must be finite and non-negative, got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Coord(Expr):
    index: int = 0
    name: str = "x"

    def __post_init__(self):
        object.__setattr__(self, "_free", frozenset((self.index,)))


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr = None

    def __post_init__(self):
        _set_free(self, self.arg)


@dataclass(frozen=True)
class Binary(Expr):
    left: Expr = None
    right: Expr = None
    op: str = "+"

    def __post_init__(self):
        if self.op not in "+-*/":
            raise ValueError(f"unknown binary operator {self.op!r}")
        _set_free(self, self.left, self.right)


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr = None
    exponent: int = 1

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, (int, np.integer)):
            raise TypeError("power exponent must be a literal integer")
        object.__setattr__(self, "exponent", int(self.exponent))
        _set_free(self, self.base)


@dataclass(frozen=True)
class Func(Expr):
    name: str = "exp"
    arg: Expr = None

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")
        _set_free(self, self.arg)


def Add(a, b):
    return Binary(left=a, right=b, op="+")


def Sub(a, b):
    return Binary(left=a, right=b, op="-")


def Mul(a, b):
    return Binary(left=a, right=b, op="*")


def Div(a, b):
    return Binary(left=a, right=b, op="/")


ZERO = Const(0.0)
ONE = Const(1.0)


# --------------------------------------------------------------------------
# parsing


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(("num", m.group(), i))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(("id", m.group(), i))
            i = m.end()
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", len(text[:i].encode()), text)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, coords: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.coords = {name: k for k, name in enumerate(coords)}

    def error(self, message, tok=None):
        tok = tok or self.tokens[self.pos]
        offset = len(self.text[: tok[2]].encode())
        raise ExprSyntaxError(message, offset, self.text)

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            expected = "end of input" if kind == "end" else repr(kind)
            self.error(f"expected {expected}, found {tok[1]!r}" if tok[0] != "end" else f"expected {expected}, found end of input")
        self.pos += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = Binary(left=node, right=self.term(), op=op)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = Binary(left=node, right=self.factor(), op=op)
        return node

    def factor(self):
        negate = False
        if self.peek()[0] == "-":
            self.take()
            negate = True
        node = self.atom()
        if negate:
            node = Neg(arg=node)
        if self.peek()[0] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "-":
                self.take()
                sign = -1
            tok = self.peek()
            if tok[0] != "num" or not tok[1].isdigit():
                self.error("power exponent must be an integer literal")
            self.take()
            node = Pow(base=node, exponent=sign * int(tok[1]))
        return node

    def atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "num":
            self.take()
            return Const(float(tok[1]))
        if kind == "id":
            self.take()
            name = tok[1]
            if self.peek()[0] == "(":
                if name not in FUNCTIONS:
                    self.error(f"unknown function {name!r}", tok)
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Func(name=name, arg=arg)
            if name in self.coords:
                return Coord(index=self.coords[name], name=name)
            self.error(f"unknown identifier {name!r}", tok)
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {tok[1]!r}")


def parse_expr(text: str, coords: Sequence[str]) -> Expr:
    """Parse ``text`` into an expression tree over the named coordinates."""
    coords = list(coords)
    if not coords:
        raise ValueError("coordinate list must not be empty")
    if len(set(coords)) != len(coords):
        raise ValueError(f"duplicate coordinate names in {coords}")
    for name in coords:
        if not _IDENT.fullmatch(name):
            raise ValueError(f"invalid coordinate name {name!r}")
        if name in FUNCTIONS:
            raise ValueError(f"coordinate name {name!r} shadows a function")
    parser = _Parser(text, coords)
    node = parser.expr()
    parser.take("end")
    return node


def serialize_expr(e: Expr) -> str:
    """Fully parenthesized infix text; ``parse_expr`` inverts it."""
    if isinstance(e, Const):
        return _format_number(e.value)
    if isinstance(e, Coord):
        return e.name
    if isinstance(e, Neg):
        return f"(-{serialize_expr(e.arg)})"
    if isinstance(e, Binary):
        return f"({serialize_expr(e.left)}{e.op}{serialize_expr(e.right)})"
    if isinstance(e, Pow):
        return f"({serialize_expr(e.base)}^{e.exponent})"
    if isinstance(e, Func):
        return f"{e.name}({serialize_expr(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def _format_number(v: float) -> str:
    # every non-atom serializes inside its own parentheses, so operands never need extra wrapping
    if v.is_integer() and v < 1e15:
        return str(int(v))
    return repr(v)


def max_coordinate(e: Expr) -> int:
    return max(e.coordinates, default=-1)


# --------------------------------------------------------------------------
# plain evaluation


def evaluate(e: Expr, point, dtype=np.float64):
    """Evaluate ``e`` at ``point`` in the given floating type (no derivatives)."""
    p = np.asarray(point, dtype=dtype)
    with np.errstate(all="ignore"):
        return _eval(e, p, dtype)


def _eval(e, p, dtype):
    if isinstance(e, Const):
        return dtype(e.value)
    if isinstance(e, Coord):
        if e.index >= len(p):
            raise IndexError(f"coordinate {e.name} (index {e.index}) outside a {len(p)}-dimensional chart")
        return p[e.index]
    if isinstance(e, Neg):
        return -_eval(e.arg, p, dtype)
    if isinstance(e, Binary):
        a = _eval(e.left, p, dtype)
        b = _eval(e.right, p, dtype)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise PoleError(e, p, "division by zero")
        return a / b
    if isinstance(e, Pow):
        b = _eval(e.base, p, dtype)
        if e.exponent < 0 and b == 0:
            raise PoleError(e, p, "negative power of zero")
        return b ** e.exponent if e.exponent >= 0 else dtype(1) / b ** (-e.exponent)
    if isinstance(e, Func):
        a = _eval(e.arg, p, dtype)
        if e.name == "log" and a <= 0:
            raise PoleError(e, p, "log of non-positive value")
        if e.name == "sqrt" and a < 0:
            raise PoleError(e, p, "sqrt of negative value")
        return getattr(np, e.name)(a)
    raise TypeError(f"not an expression node: {e!r}")
