"""Arithmetic expressions over x1..xn for config-defined objectives.

Grammar (whitespace-insensitive)::

    expr  := term (('+'|'-') term)*
    term  := factor (('*'|'/') factor)*
    factor:= unary ('^' factor)?
    unary := '-' unary | atom
    atom  := number | variable | func '(' expr ')' | '(' expr ')'

so ``^`` is right-associative and ``-2^2`` is ``(-2)^2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ArityError, EvaluationError, ExpressionSyntaxError, UnknownIdentifier

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
    "abs": abs,
    "sqrt": math.sqrt,
}

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_VARIABLE = re.compile(r"x([1-9]\d*)")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None):
        pos = self.pos if pos is None else pos
        offset = len(self.text[:pos].encode("utf-8"))
        return ExpressionSyntaxError(message, offset)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        base = self.unary()
        if self.peek() == "^":
            self.pos += 1
            return BinOp("^", base, self.factor())
        return base

    def unary(self) -> Node:
        if self.peek() == "-":
            self.pos += 1
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Node:
        ch = self.peek()
        if not ch:
            raise self.error("unexpected end of input")
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        m = _NUMBER.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Num(float(m.group(0)))
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise self.error(f"unexpected {ch!r}")
        name = m.group(0)
        self.pos = m.end()
        var = _VARIABLE.fullmatch(name)
        if var:
            return Var(int(var.group(1)))
        if name not in FUNCTIONS:
            raise UnknownIdentifier(f"unknown identifier {name!r}")
        if self.peek() != "(":
            raise self.error(f"function {name} needs an argument list")
        self.pos += 1
        args = [self.expr()]
        while self.peek() == ",":
            self.pos += 1
            args.append(self.expr())
        self.expect(")")
        if len(args) != 1:
            raise ArityError(f"{name} takes 1 argument, got {len(args)}")
        return Call(name, args[0])


def parse_expression(text: str) -> Node:
    """Parse ``text`` into a syntax tree; see the module docstring for the grammar."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()


def to_text(node: Node) -> str:
    """Fully parenthesized form; parsing it gives back an identical tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    return f"{node.name}({to_text(node.arg)})"


def max_variable(node: Node) -> int:
    """Largest variable index used (0 for constants)."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Neg):
        return max_variable(node.operand)
    if isinstance(node, BinOp):
        return max(max_variable(node.left), max_variable(node.right))
    if isinstance(node, Call):
        return max_variable(node.arg)
    return 0


def _apply(op: str, a: float, b: float) -> float:
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b
        out = a ** b
    except ZeroDivisionError:
        raise EvaluationError(f"division by zero in {a!r} {op} {b!r}") from None
    except OverflowError:
        raise EvaluationError(f"overflow in {a!r} ^ {b!r}") from None
    if isinstance(out, complex):
        raise EvaluationError(f"negative base {a!r} with non-integer exponent {b!r}")
    return out


def evaluate(node: Node, x) -> float:
    """Value of the tree at the point ``x`` (x1 is x[0])."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.index > len(x):
            raise UnknownIdentifier(f"x{node.index} exceeds dimension {len(x)}")
        return float(x[node.index - 1])
    if isinstance(node, Neg):
        return -evaluate(node.operand, x)
    if isinstance(node, BinOp):
        return _apply(node.op, evaluate(node.left, x), evaluate(node.right, x))
    arg = evaluate(node.arg, x)
    try:
        return float(FUNCTIONS[node.name](arg))
    except (ValueError, OverflowError):
        raise EvaluationError(f"{node.name}({arg!r}) is undefined") from None


def compile_expression(text: str, dimension: int) -> Callable[[object], float]:
    """Parse ``text`` and return x -> value, checking variables against ``dimension``."""
    tree = parse_expression(text)
    top = max_variable(tree)
    if top > dimension:
        raise UnknownIdentifier(f"x{top} is not a variable of a {dimension}-dimensional domain")

    def fn(x):
        return evaluate(tree, x)

    fn.tree = tree  # type: ignore[attr-defined]
    return fn
