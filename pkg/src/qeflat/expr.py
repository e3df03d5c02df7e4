"""Scalar expression DSL for metric components and potentials.

The grammar is ordinary infix arithmetic over the chart coordinates:

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?          # right-associative
    atom    := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  The
function set is fixed to smooth primitives (exp, log, sin, cos, tan,
sinh, cosh, tanh, sqrt); non-smooth functions such as ``abs`` are
rejected at parse time because they would corrupt third-order jets.
``pi`` and ``e`` are named constants.  Coordinate names shadow constants.

Evaluation is generic over the scalar type: the same AST evaluates on
plain floats and on :class:`qeflat.jets.Jet` values, because jets
implement the arithmetic operators and the function table dispatches on
the operand type.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

FUNCTIONS = ("cos", "cosh", "exp", "log", "sin", "sinh", "sqrt", "tan", "tanh")
CONSTANTS = {"pi": math.pi, "e": math.e}

_REJECTED_FUNCTIONS = ("abs", "sign", "floor", "ceil", "min", "max")

# Largest integer exponent expanded by repeated multiplication.
_MAX_INT_EXPONENT = 64


class ExpressionError(ValueError):
    """Base class for parse and evaluation failures."""


class ParseError(ExpressionError):
    def __init__(self, message: str, source: str, position: int) -> None:
        super().__init__(f"{message} (at position {position}: {source[position:position + 12]!r})")
        self.position = position


class EvalDomainError(ExpressionError):
    """Domain violation (log of non-positive, division by zero, ...)."""

    def __init__(self, message: str, subexpression: "Node") -> None:
        super().__init__(f"{message} in subexpression `{pretty(subexpression)}`")
        self.subexpression = subexpression


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Num, Var, Const, Neg, BinOp, Call]


@dataclass(frozen=True)
class Expression:
    """Parsed expression bound to an ordered coordinate list."""

    root: Node
    coordinates: tuple[str, ...]
    source: str

    def variables(self) -> frozenset[str]:
        return _collect_vars(self.root)

    def __str__(self) -> str:
        return pretty(self.root)


def _collect_vars(node: Node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset((node.name,))
    if isinstance(node, Neg):
        return _collect_vars(node.arg)
    if isinstance(node, BinOp):
        return _collect_vars(node.left) | _collect_vars(node.right)
    if isinstance(node, Call):
        return _collect_vars(node.arg)
    return frozenset()


_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+\.\d+(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>[-+*/^()])
    |(?P<ws>\s+)
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", source, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, coordinates: tuple[str, ...]) -> None:
        self.source = source
        self.coordinates = coordinates
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}, found {text or 'end of input'!r}", self.source, pos)
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", self.source, pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.unary())
            else:
                return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            nkind, ntext, _ = self.peek()
            if nkind == "op" and ntext == "(":
                if text in _REJECTED_FUNCTIONS:
                    raise ParseError(
                        f"function {text!r} is not smooth and is not supported", self.source, pos
                    )
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", self.source, pos)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in self.coordinates:
                return Var(text)
            if text in CONSTANTS:
                return Const(text)
            raise ParseError(
                f"unknown identifier {text!r} (coordinates: {', '.join(self.coordinates)})",
                self.source,
                pos,
            )
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a value, found {text or 'end of input'!r}", self.source, pos)


def parse(source: str, coordinate_names: list[str] | tuple[str, ...]) -> Expression:
    """Parse ``source`` against an ordered, distinct coordinate list."""
    coords = tuple(coordinate_names)
    if len(set(coords)) != len(coords):
        raise ParseError("coordinate names must be distinct", source, 0)
    if not source.strip():
        raise ParseError("empty input", source, 0)
    root = _Parser(source, coords).parse()
    return Expression(root, coords, source)


# --- evaluation -------------------------------------------------------------

_REAL_FNS = {
    "exp": math.exp,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
}


def _eval_call(fn: str, value, node: Node):
    from . import jets  # local import; jets imports nothing from here at module level

    if isinstance(value, jets.Jet):
        try:
            return jets.apply_function(fn, value)
        except ZeroDivisionError:
            raise EvalDomainError("division by zero", node) from None
        except jets.JetDomainError as exc:
            raise EvalDomainError(str(exc), node) from None
    x = float(value)
    if fn == "log":
        if x <= 0.0:
            raise EvalDomainError(f"log of non-positive value {x!r}", node)
        return math.log(x)
    if fn == "sqrt":
        if x < 0.0:
            raise EvalDomainError(f"sqrt of negative value {x!r}", node)
        return math.sqrt(x)
    try:
        return _REAL_FNS[fn](x)
    except (ValueError, OverflowError) as exc:
        raise EvalDomainError(str(exc), node) from None


def _is_integer_scalar(value) -> bool:
    return isinstance(value, (int, float)) and float(value).is_integer() and abs(value) <= _MAX_INT_EXPONENT


def _power(base, expo, node: Node):
    from . import jets

    if isinstance(expo, jets.Jet) and jets.is_constant(expo):
        expo = expo.value
    if _is_integer_scalar(expo):
        k = int(expo)
        if k == 0:
            return 1.0
        if k < 0:
            if isinstance(base, jets.Jet):
                if base.value == 0.0:
                    raise EvalDomainError("zero raised to a negative power", node)
                return 1.0 / _int_pow(base, -k)
            if base == 0.0:
                raise EvalDomainError("zero raised to a negative power", node)
            return 1.0 / _int_pow(base, -k)
        return _int_pow(base, k)
    # non-integer exponent: a^b = exp(b * log(a)), inheriting log's domain
    return _eval_call("exp", expo * _eval_call("log", base, node), node)


def _int_pow(base, k: int):
    out = base
    for _ in range(k - 1):
        out = out * base
    return out


def evaluate(expression: Expression | Node, bindings: Mapping[str, object]):
    """Evaluate on floats or jets, depending on the bound values."""
    node = expression.root if isinstance(expression, Expression) else expression
    return _eval(node, bindings)


def _eval(node: Node, env: Mapping[str, object]):
    from . import jets

    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise EvalDomainError(f"unbound variable {node.name!r}", node) from None
    if isinstance(node, Neg):
        return -_eval(node.arg, env)
    if isinstance(node, Call):
        return _eval_call(node.fn, _eval(node.arg, env), node)
    # BinOp
    left = _eval(node.left, env)
    right = _eval(node.right, env)
    op = node.op
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        rv = right.value if isinstance(right, jets.Jet) else right
        if rv == 0.0:
            raise EvalDomainError("division by zero", node)
        return left / right
    return _power(left, right, node)


# --- pretty printing --------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def pretty(node: Node) -> str:
    """Render with minimal parentheses; reparses to an identical tree."""
    return _pp(node, 0)


def _pp(node: Node, parent_prec: int) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.fn}({_pp(node.arg, 0)})"
    if isinstance(node, Neg):
        text = "-" + _pp(node.arg, _PREC["neg"])
        return f"({text})" if parent_prec > _PREC["neg"] else text
    prec = _PREC[node.op]
    if node.op == "^":
        # right-associative; the right operand may be any unary expression
        left = _pp(node.left, prec + 1)
        right = _pp(node.right, _PREC["neg"])
        text = f"{left}^{right}"
    else:
        left = _pp(node.left, prec)
        right = _pp(node.right, prec + 1)
        text = f"{left} {node.op} {right}"
    return f"({text})" if parent_prec > prec else text
