"""Textual right-hand sides ``f(x, y)`` and exact solutions ``u(x)``.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ["^" ["-"] INT]
    atom   := NUMBER | "x" | "y" | FUNC "(" expr ["," ["-"] INT] ")" | "(" expr ")"

``FUNC`` is one of ``exp ln sin cos powi``; ``powi`` takes the integer
exponent as second argument.  Numeric literals become exact rationals, so
``0.5`` is ``1/2`` whatever backend the expression is later evaluated in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .elemfun import FUNCTIONS, lift
from .grossnum import GrossNumber

__all__ = ["parse_expr", "Expression", "ExprSyntaxError", "UnknownIdentifier"]


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifier(ExprSyntaxError):
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Pow, Call]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            bad = len(src) - len(src[pos:].lstrip()) if src[pos].isspace() else pos
            raise ExprSyntaxError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, variables: tuple[str, ...]):
        self.tokens = _tokenize(src)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {value!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        return self.power()

    def integer(self) -> int:
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, text, pos = self.take()
        if kind != "num" or not text.isdigit():
            raise ExprSyntaxError("exponent must be an integer literal", pos)
        return sign * int(text)

    def power(self) -> Node:
        node = self.atom()
        if self.peek()[1] == "^":
            self.take()
            node = Pow(node, self.integer())
            if self.peek()[1] == "^":
                raise ExprSyntaxError("chained '^' needs parentheses", self.peek()[2])
        return node

    def atom(self) -> Node:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(Fraction(text))
        if kind == "name":
            if self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {text!r}", pos)
                self.take("(")
                arg = self.expr()
                if text == "powi":
                    self.take(",")
                    node = Pow(arg, self.integer())
                else:
                    node = Call(text, arg)
                self.take(")")
                return node
            if text not in self.variables:
                raise UnknownIdentifier(f"unknown identifier {text!r}", pos)
            return Var(text)
        if text == "(":
            node = self.expr()
            self.take(")")
            return node
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", pos)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node: Node, parent: int = 0) -> str:
    """Print an AST back to parseable text with minimal parentheses."""
    # parent 4 marks the base of "^", where a leading minus would bind last
    if isinstance(node, Num):
        v = node.value
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        wrap = (v.denominator != 1 and parent >= 2) or (v < 0 and parent >= 4)
        return f"({s})" if wrap else s
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        s = "-" + to_source(node.arg, 3)
        return f"({s})" if parent >= 4 else s
    if isinstance(node, Pow):
        base = to_source(node.base, 4)
        if isinstance(node.base, Pow):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    prec = _PREC[node.op]
    # left-associative: the right operand needs parentheses at equal precedence
    s = f"{to_source(node.left, prec)} {node.op} {to_source(node.right, prec + 1)}"
    return f"({s})" if prec < parent else s


def _eval(node: Node, env: dict[str, GrossNumber], ctx) -> GrossNumber:
    if isinstance(node, Num):
        return GrossNumber.scalar(node.value, ctx)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, env, ctx)
    if isinstance(node, Pow):
        return lift("powi", _eval(node.base, env, ctx), n=node.exponent)
    if isinstance(node, Call):
        return lift(node.func, _eval(node.arg, env, ctx))
    a = _eval(node.left, env, ctx)
    b = _eval(node.right, env, ctx)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


class Expression:
    """A parsed expression usable as a black-box procedure.

    Right-hand sides are called as ``f(x, y)``, exact solutions as ``u(x)``;
    arguments are :class:`GrossNumber` values and the result lives in their
    context.
    """

    def __init__(self, source: str, variables: tuple[str, ...] = ("x", "y")):
        if not source.strip():
            raise ExprSyntaxError("empty expression", 0)
        self.source = source
        self.variables = variables
        self.ast = _Parser(source, variables).parse()

    @property
    def arity(self) -> int:
        return len(self.variables)

    def __call__(self, *args: GrossNumber) -> GrossNumber:
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments, got {len(args)}")
        ctx = args[0].ctx
        return _eval(self.ast, dict(zip(self.variables, args)), ctx)

    def __str__(self):
        return to_source(self.ast)

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse_expr(src: str, variables: tuple[str, ...] = ("x", "y")) -> Expression:
    return Expression(src, variables)
