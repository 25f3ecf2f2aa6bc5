"""Coefficient expressions in ``x`` and ``y``.

Grammar::

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := "-" factor | power
    power   := primary ("^" factor)?
    primary := NUMBER | "x" | "y" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := sin | cos | exp | sqrt | log | abs

``^`` binds tighter than unary minus (``-x^2 == -(x^2)``) and is
right-associative.  ``sign`` is accepted as an extra function so that derivatives of ``abs``
(which use ``sign(0) = 0``) can be printed and parsed back.

Trees are immutable.  :func:`evaluate` works elementwise on numpy arrays and
:func:`diff` returns an exact symbolic partial derivative with light constant
folding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ParseError

__all__ = [
    "Expr", "Num", "Var", "Const", "Neg", "BinOp", "Call",
    "parse_expression", "evaluate", "diff", "to_string", "has_variables",
]

FUNCTIONS = ("sin", "cos", "exp", "sqrt", "log", "abs", "sign")
CONSTANTS = {"pi": math.pi, "e": math.e}


class Expr:
    """Base class of expression nodes."""

    def __call__(self, x, y):
        return evaluate(self, x, y)

    def __str__(self):
        return to_string(self)

    def __add__(self, other):
        return _add(self, _lift(other))

    def __radd__(self, other):
        return _add(_lift(other), self)

    def __sub__(self, other):
        return _sub(self, _lift(other))

    def __rsub__(self, other):
        return _sub(_lift(other), self)

    def __mul__(self, other):
        return _mul(self, _lift(other))

    def __rmul__(self, other):
        return _mul(_lift(other), self)

    def __truediv__(self, other):
        return _div(self, _lift(other))

    def __rtruediv__(self, other):
        return _div(_lift(other), self)

    def __neg__(self):
        return _neg(self)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Const(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr


def _lift(v):
    return v if isinstance(v, Expr) else Num(float(v))


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start + 1))
        pos = m.end()
    tokens.append(("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0
        self.open_parens = []

    def fail_at(self, message, kind, pos):
        # running out of input inside a group points at the unmatched "("
        if kind == "end" and self.open_parens:
            raise ParseError("unbalanced parenthesis", self.open_parens[-1])
        raise ParseError(message, pos)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.peek()
        if val != value or kind != "op":
            what = "end of input" if kind == "end" else repr(val)
            self.fail_at(f"expected {value!r}, found {what}", kind, pos)
        self.i += 1
        if value == "(":
            self.open_parens.append(pos)
        elif value == ")":
            self.open_parens.pop()

    def parse(self):
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing token {val!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            e = BinOp(op, e, self.factor())
        return e

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self):
        # exponent may carry its own sign: 2^-x == 2^(-x); x^y^z == x^(y^z)
        base = self.primary()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def primary(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in ("x", "y"):
                return Var(val)
            if val in CONSTANTS:
                return Const(val)
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            self.open_parens.append(pos)
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(val)
        self.fail_at(f"unexpected {what}", kind, pos)


def parse_expression(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises
    ------
    ParseError
        With the 1-based column of the offending token.
    """
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# printing

def to_string(e: Expr) -> str:
    """Fully parenthesized text that parses back to an equal-valued tree."""
    if isinstance(e, Num):
        v = e.value
        return repr(v) if v >= 0 else f"(-{repr(-v)})"
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)}{e.op}{to_string(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------------------
# evaluation

def _check(mask, e, what):
    if np.any(mask):
        raise EvaluationError(f"{what} in subexpression {to_string(e)}")


def evaluate(e: Expr, x, y):
    """Evaluate elementwise; ``x`` and ``y`` broadcast against each other."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    out = np.asarray(_eval(e, x, y), dtype=float)
    if out.shape != shape:
        out = np.broadcast_to(out, shape).copy()
    return out


def _eval(e, x, y):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x if e.name == "x" else y
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -_eval(e.arg, x, y)
    if isinstance(e, BinOp):
        a = _eval(e.left, x, y)
        b = _eval(e.right, x, y)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            _check(np.asarray(b) == 0.0, e, "division by zero")
            return a / b
        with np.errstate(all="ignore"):
            r = np.power(np.asarray(a, dtype=float), b)
        _check(~np.isfinite(r) & np.isfinite(a) & np.isfinite(b), e,
               "power outside its real domain")
        return r
    if isinstance(e, Call):
        a = np.asarray(_eval(e.arg, x, y), dtype=float)
        f = e.func
        if f == "log":
            _check(a <= 0.0, e, "log of nonpositive value")
            return np.log(a)
        if f == "sqrt":
            _check(a < 0.0, e, "sqrt of negative value")
            return np.sqrt(a)
        if f == "exp":
            with np.errstate(over="ignore"):
                r = np.exp(a)
            _check(~np.isfinite(r), e, "exp overflow")
            return r
        return getattr(np, f)(a)
    raise TypeError(f"not an expression: {e!r}")


def has_variables(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, (Num, Const)):
        return False
    if isinstance(e, (Neg, Call)):
        return has_variables(e.arg)
    return has_variables(e.left) or has_variables(e.right)


# --------------------------------------------------------------------------
# differentiation

def _is(e, v):
    return isinstance(e, Num) and e.value == v


def _add(a, b):
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return BinOp("+", a, b)


def _sub(a, b):
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return _neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return BinOp("-", a, b)


def _mul(a, b):
    if _is(a, 0.0) or _is(b, 0.0):
        return Num(0.0)
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return BinOp("*", a, b)


def _div(a, b):
    if _is(a, 0.0):
        return Num(0.0)
    if _is(b, 1.0):
        return a
    return BinOp("/", a, b)


def _neg(a):
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _pow(a, b):
    if _is(b, 1.0):
        return a
    if _is(b, 0.0):
        return Num(1.0)
    return BinOp("^", a, b)


def diff(e: Expr, var: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``var`` (``"x"`` or ``"y"``)."""
    if var not in ("x", "y"):
        raise ValueError(f"can only differentiate with respect to x or y, not {var!r}")
    return _diff(e, var)


def _diff(e, v):
    if isinstance(e, (Num, Const)):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0 if e.name == v else 0.0)
    if isinstance(e, Neg):
        return _neg(_diff(e.arg, v))
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = _diff(a, v), _diff(b, v)
        if e.op == "+":
            return _add(da, db)
        if e.op == "-":
            return _sub(da, db)
        if e.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if e.op == "/":
            # (da*b - a*db) / b^2
            return _div(_sub(_mul(da, b), _mul(a, db)), _pow(b, Num(2.0)))
        # power
        if not has_variables(b):
            return _mul(_mul(b, _pow(a, _sub(b, Num(1.0)))), da)
        return _mul(e, _add(_mul(db, Call("log", a)), _div(_mul(b, da), a)))
    if isinstance(e, Call):
        u = e.arg
        du = _diff(u, v)
        if _is(du, 0.0):
            return Num(0.0)
        f = e.func
        if f == "sin":
            outer = Call("cos", u)
        elif f == "cos":
            outer = _neg(Call("sin", u))
        elif f == "exp":
            outer = e
        elif f == "sqrt":
            outer = _div(Num(1.0), _mul(Num(2.0), e))
        elif f == "log":
            outer = _div(Num(1.0), u)
        elif f == "abs":
            outer = Call("sign", u)
        else:  # sign: derivative zero away from the origin
            return Num(0.0)
        return _mul(outer, du)
    raise TypeError(f"not an expression: {e!r}")
