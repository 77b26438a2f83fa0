"""A small recursive-descent parser for functions of one variable.

Grammar (lowest precedence first)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'x' | 't' | NAME '(' expr ')' | '(' expr ')'

``^`` is right associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)`` and ``2^-x`` is ``2^(-x)``.  Only ``^`` denotes a power.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier

FUNCTIONS = ("exp", "sin", "cos", "abs", "sqrt", "log")
VARIABLES = ("x", "t")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = len(text) - len(text[pos:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {text[start]!r}", _byte_offset(text, start))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExpressionSyntaxError(message, _byte_offset(self.text, tok[2]))

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "end":
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, value, start = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(value))
        if kind == "name":
            self.advance()
            if value in VARIABLES:
                return Var()
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            raise UnknownIdentifier(value, _byte_offset(self.text, start))
        if value == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(f"unexpected {value or 'end of input'!r}")


def parse_expr(text: str) -> Expr:
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return _Parser(text).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(e: Expr, need: bool) -> str:
    s = to_text(e)
    return f"({s})" if need else s


def to_text(e: Expr) -> str:
    """Canonical text; ``parse_expr(to_text(e)) == e`` for nonnegative literals."""
    if isinstance(e, Num):
        return repr(float(e.value)) if e.value >= 0 else f"({e.value!r})"
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _prec(e.operand) < _NEG_PREC)
    if isinstance(e, Call):
        return f"{e.name}({to_text(e.arg)})"
    p = _PREC[e.op]
    if e.op == "^":
        return f"{_wrap(e.left, _prec(e.left) <= p)}^{_wrap(e.right, _prec(e.right) < _NEG_PREC)}"
    return f"{_wrap(e.left, _prec(e.left) < p)} {e.op} {_wrap(e.right, _prec(e.right) <= p)}"


def _checked(value, what):
    if not np.all(np.isfinite(value)):
        raise DomainError(f"{what} produced a non-finite value")
    return value


def _power(base, expo):
    base_arr, expo_arr = np.broadcast_arrays(np.asarray(base, float), np.asarray(expo, float))
    if np.any((base_arr < 0) & (expo_arr != np.round(expo_arr))):
        raise DomainError("negative base raised to a non-integer power")
    if np.any((base_arr == 0) & (expo_arr < 0)):
        raise DomainError("zero raised to a negative power")
    with np.errstate(over="ignore"):
        return np.power(base, expo)


def _eval(e: Expr, x):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, Call):
        v = _eval(e.arg, x)
        if e.name == "log":
            if np.any(np.asarray(v) <= 0):
                raise DomainError("log of a nonpositive number")
            return np.log(v)
        if e.name == "sqrt":
            if np.any(np.asarray(v) < 0):
                raise DomainError("sqrt of a negative number")
            return np.sqrt(v)
        with np.errstate(over="ignore"):
            out = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs}[e.name](v)
        return _checked(out, e.name)
    left, right = _eval(e.left, x), _eval(e.right, x)
    if e.op == "+":
        out = left + right
    elif e.op == "-":
        out = left - right
    elif e.op == "*":
        out = left * right
    elif e.op == "/":
        if np.any(np.asarray(right) == 0):
            raise DomainError("division by zero")
        out = left / right
    else:
        out = _power(left, right)
    return _checked(out, e.op)


def eval_expr(e: Expr, x):
    """Evaluate at a scalar or array ``x``; domain violations raise DomainError."""
    if isinstance(x, np.ndarray):
        return np.broadcast_to(np.asarray(_eval(e, x), dtype=float), x.shape).copy()
    return float(_eval(e, float(x)))
