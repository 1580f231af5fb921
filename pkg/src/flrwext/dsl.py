"""Tiny expression language for scale factors and gauge functions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' exponent)?
    base   := number | VAR | func '(' expr ')' | '(' expr ')'
    exponent := ['-'] number | '(' constant expr ')'

``VAR`` is ``t`` for scale factors and ``s`` for gauge functions.  ``^`` binds
tighter than ``*`` and the exponent must not depend on the variable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import (
    DomainError,
    DslSyntaxError,
    NonConstantExponentError,
    UnknownIdentifierError,
)
from .jet import JET_FUNCTIONS, Jet2, jpow

FUNCTIONS = ("sqrt", "exp", "log", "sinh", "cosh", "tanh", "sin", "cos")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: float


@dataclass(frozen=True)
class Neg:
    arg: "Node"


Node = Union[Num, Var, Call, BinOp, Pow, Neg]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op" | "end"
    text: str
    offset: int


def tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variable: str):
        self.source = source
        self.variable = variable
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        if tok.kind == "end":
            message = f"unexpected end of input ({message})"
        raise DslSyntaxError(message, tok.offset, self.source)

    def _expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind != "op":
            self._fail(f"expected {text!r}")
        return self._advance()

    def _number(self, tok: _Token) -> float:
        value = float(tok.text)
        if not math.isfinite(value):
            raise DslSyntaxError(f"number {tok.text!r} overflows", tok.offset, self.source)
        return value

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail(f"unexpected token {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self._advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self._advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self._advance()
            return Neg(self.factor())
        node = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self._advance()
            node = Pow(node, self.exponent())
        return node

    def exponent(self) -> float:
        tok = self.tok
        sign = 1.0
        if tok.kind == "op" and tok.text == "-":
            self._advance()
            sign = -1.0
        if self.tok.kind == "num":
            return sign * self._number(self._advance())
        if self.tok.kind == "op" and self.tok.text == "(":
            start = self.tok
            self._advance()
            inner = self.expr()
            self._expect(")")
            if self.variable in free_variables(inner):
                raise NonConstantExponentError(
                    "non-constant exponent", start.offset, self.source
                )
            try:
                return sign * compile_value(inner, self.variable)(0.0)
            except DomainError as exc:
                raise DslSyntaxError(f"exponent not evaluable: {exc}", start.offset, self.source)
        if self.tok.kind == "ident":
            raise NonConstantExponentError("non-constant exponent", self.tok.offset, self.source)
        self._fail("expected a numeric exponent")

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self._advance()
            return Num(self._number(tok))
        if tok.kind == "ident":
            self._advance()
            nxt = self.tok
            if nxt.kind == "op" and nxt.text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownIdentifierError(
                        f"unknown function {tok.text!r}", tok.offset, self.source
                    )
                self._advance()
                arg = self.expr()
                self._expect(")")
                return Call(tok.text, arg)
            if tok.text == self.variable:
                return Var(tok.text)
            raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", tok.offset, self.source)
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self.expr()
            self._expect(")")
            return node
        self._fail(f"unexpected token {tok.text!r}" if tok.kind != "end" else "expected an operand")


def parse(source: str, variable: str = "t") -> Node:
    """Parse ``source`` into an AST over the single variable ``variable``."""
    return _Parser(source, variable).parse()


def free_variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Call, Neg)):
        return free_variables(node.arg)
    if isinstance(node, Pow):
        return free_variables(node.base)
    return free_variables(node.left) | free_variables(node.right)


def to_source(node: Node) -> str:
    """Fully parenthesised source text; ``parse(to_source(n)) == n``."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, Pow):
        return f"({to_source(node.base)} ^ {node.exponent!r})"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"


# -- evaluation ---------------------------------------------------------------


def _math_call(name: str) -> Callable[[float], float]:
    fn = getattr(math, name)

    def call(x: float) -> float:
        try:
            return fn(x)
        except (ValueError, OverflowError) as exc:
            raise DomainError(f"{name}({x!r}): {exc}") from exc

    return call


def _div(x: float, y: float) -> float:
    if y == 0.0:
        raise DomainError("division by zero")
    return x / y


def _pow(x: float, p: float) -> float:
    if x < 0.0 and not float(p).is_integer():
        raise DomainError(f"negative base {x!r} raised to non-integer power {p!r}")
    if x == 0.0 and p < 0.0:
        raise DomainError("zero raised to a negative power")
    try:
        return x**p
    except OverflowError as exc:
        raise DomainError(str(exc)) from exc


def compile_value(node: Node, variable: str = "t") -> Callable[[float], float]:
    """Compile ``node`` into a plain float -> float closure."""
    if isinstance(node, Num):
        c = node.value
        return lambda x: c
    if isinstance(node, Var):
        if node.name != variable:
            raise UnknownIdentifierError(f"unknown identifier {node.name!r}", 0)
        return lambda x: x
    if isinstance(node, Call):
        fn = _math_call(node.func)
        arg = compile_value(node.arg, variable)
        return lambda x: fn(arg(x))
    if isinstance(node, Neg):
        arg = compile_value(node.arg, variable)
        return lambda x: -arg(x)
    if isinstance(node, Pow):
        base = compile_value(node.base, variable)
        p = node.exponent
        return lambda x: _pow(base(x), p)
    left = compile_value(node.left, variable)
    right = compile_value(node.right, variable)
    if node.op == "+":
        return lambda x: left(x) + right(x)
    if node.op == "-":
        return lambda x: left(x) - right(x)
    if node.op == "*":
        return lambda x: left(x) * right(x)
    return lambda x: _div(left(x), right(x))


def eval_jet(node: Node, x: Jet2) -> Jet2:
    """Evaluate ``node`` on a jet; the variable is bound to ``x``."""
    if isinstance(node, Num):
        return Jet2.constant(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Call):
        return JET_FUNCTIONS[node.func](eval_jet(node.arg, x))
    if isinstance(node, Neg):
        return -eval_jet(node.arg, x)
    if isinstance(node, Pow):
        return jpow(eval_jet(node.base, x), node.exponent)
    left = eval_jet(node.left, x)
    right = eval_jet(node.right, x)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return left / right
