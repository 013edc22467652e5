"""Arithmetic expression language for problem definitions.

Maps, inverses, and custom metric formulas are written as small
arithmetic expressions over the input coordinates x0..x9.  The grammar
is deliberately tiny (no transcendental functions): every map this tool
deals with is polynomial or affine, and abs/min/max cover the metric
formulas.

Grammar (EBNF)::

    expr    := term (("+"|"-") term)* ;
    term    := factor (("*"|"/") factor)* ;
    factor  := unary ("^" factor)? ;
    unary   := "-" unary | atom ;
    atom    := NUMBER | VAR | FUNC "(" expr ("," expr)* ")" | "(" expr ")" ;
    VAR     := "x" DIGIT ;  FUNC := "abs" | "min" | "max" ;

"+"/"-" and "*"/"/" are left-associative, "^" is right-associative, and
unary minus binds tighter than "^" (so ``-x0^2`` is ``(-x0)^2``).  The
exponent of "^" must be a constant subexpression.  Error positions are
1-based byte offsets into the source text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import EvaluationFault, ExprSyntaxError
from .lattice import Vec


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" | "abs"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # "add" | "sub" | "mul" | "div" | "pow" | "min" | "max"
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Unary, Binary]

_FUNCS = ("abs", "min", "max")
_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "var", "func", "op", "end"
    text: str
    pos: int  # 1-based offset of the first character


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*/^(),":
            tokens.append(_Token("op", c, i + 1))
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(_Token("num", m.group(), i + 1))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group()
            if word in _FUNCS:
                tokens.append(_Token("func", word, i + 1))
            elif re.fullmatch(r"x\d", word):
                tokens.append(_Token("var", word, i + 1))
            else:
                raise ExprSyntaxError(f"unknown identifier {word!r}", i + 1)
            i = m.end()
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i + 1)
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            return self.next()
        raise ExprSyntaxError(f"expected {op!r}", tok.pos)

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            rhs = self.parse_term()
            node = Binary("add" if op == "+" else "sub", node, rhs)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            rhs = self.parse_factor()
            node = Binary("mul" if op == "*" else "div", node, rhs)
        return node

    def parse_factor(self) -> Expr:
        node = self.parse_unary()
        if self.peek().kind == "op" and self.peek().text == "^":
            caret = self.next()
            rhs = self.parse_factor()
            if _uses_variables(rhs):
                raise ExprSyntaxError("exponent must be constant", caret.pos)
            node = Binary("pow", node, rhs)
        return node

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.next()
            return Unary("neg", self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.next()
        if tok.kind == "num":
            return Const(float(tok.text))
        if tok.kind == "var":
            return Var(int(tok.text[1]))
        if tok.kind == "func":
            self.expect_op("(")
            args = [self.parse_expr()]
            while self.peek().kind == "op" and self.peek().text == ",":
                self.next()
                args.append(self.parse_expr())
            self.expect_op(")")
            return _make_call(tok, args)
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        what = "end of input" if tok.kind == "end" else f"{tok.text!r}"
        raise ExprSyntaxError(f"unexpected {what}", tok.pos)


def _make_call(tok: _Token, args: list[Expr]) -> Expr:
    if tok.text == "abs":
        if len(args) != 1:
            raise ExprSyntaxError("abs takes exactly 1 argument", tok.pos)
        return Unary("abs", args[0])
    if len(args) != 2:
        raise ExprSyntaxError(f"{tok.text} takes exactly 2 arguments", tok.pos)
    return Binary(tok.text, args[0], args[1])


def _uses_variables(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Unary):
        return _uses_variables(e.operand)
    if isinstance(e, Binary):
        return _uses_variables(e.left) or _uses_variables(e.right)
    return False


def parse(text: str) -> Expr:
    """Parse expression text into an AST, raising position-annotated errors."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ExprSyntaxError(f"unexpected {trailing.text!r}", trailing.pos)
    return node


def max_var_index(e: Expr) -> int:
    """Largest variable index used, or -1 for a constant expression."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Unary):
        return max_var_index(e.operand)
    if isinstance(e, Binary):
        return max(max_var_index(e.left), max_var_index(e.right))
    return -1


# Precedence levels for formatting: add/sub < mul/div < pow < unary < atoms.
_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 3}
_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        if e.op in ("min", "max"):
            return 5
        return _PREC[e.op]
    if isinstance(e, Unary):
        return 5 if e.op == "abs" else 4
    return 5


def _fmt(e: Expr, min_prec: int) -> str:
    s = _fmt_bare(e)
    if _prec(e) < min_prec:
        return "(" + s + ")"
    return s


def _fmt_const(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _fmt_bare(e: Expr) -> str:
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Unary):
        if e.op == "abs":
            return "abs(" + _fmt(e.operand, 0) + ")"
        return "-" + _fmt(e.operand, 4)
    if e.op in ("min", "max"):
        return f"{e.op}(" + _fmt(e.left, 0) + ", " + _fmt(e.right, 0) + ")"
    if e.op == "pow":
        return _fmt(e.left, 4) + "^" + _fmt(e.right, 3)
    p = _PREC[e.op]
    return _fmt(e.left, p) + _INFIX[e.op] + _fmt(e.right, p + 1)


def format_expr(e: Expr) -> str:
    """Render an AST back to text; parse(format_expr(e)) == e structurally.

    Negative constants cannot appear in parser output (unary minus owns
    the sign), so round-tripping assumes nonnegative Const values.
    """
    return _fmt_bare(e)


def eval_expr(e: Expr, point: Sequence[float]) -> float:
    """Evaluate one expression at a point, IEEE double semantics throughout."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        if e.index >= len(point):
            raise EvaluationFault(
                f"variable x{e.index} out of range for input of dimension {len(point)}"
            )
        return float(point[e.index])
    if isinstance(e, Unary):
        v = eval_expr(e.operand, point)
        return -v if e.op == "neg" else abs(v)
    left = eval_expr(e.left, point)
    if e.op != "pow":
        right = eval_expr(e.right, point)
    if e.op == "add":
        return left + right
    if e.op == "sub":
        return left - right
    if e.op == "mul":
        return left * right
    if e.op == "div":
        if right == 0.0:
            raise EvaluationFault("division by zero")
        return left / right
    if e.op == "min":
        return min(left, right)
    if e.op == "max":
        return max(left, right)
    # pow: exponent is a constant subtree by construction
    exponent = eval_expr(e.right, point)
    try:
        return math.pow(left, exponent)
    except (ValueError, OverflowError) as exc:
        raise EvaluationFault(f"pow fault: {left!r}^{exponent!r} ({exc})") from exc


@dataclass(frozen=True)
class MapSpec:
    """A map R^in_dim -> R^out_dim given by one expression per output coordinate."""

    outputs: tuple[Expr, ...]
    in_dim: int

    def __post_init__(self):
        if not self.outputs:
            raise ValueError("map needs at least one output expression")
        if self.in_dim < 1:
            raise ValueError("in_dim must be >= 1")
        for k, out in enumerate(self.outputs):
            idx = max_var_index(out)
            if idx >= self.in_dim:
                raise ValueError(
                    f"output {k} uses x{idx} but map input dimension is {self.in_dim}"
                )

    @property
    def out_dim(self) -> int:
        return len(self.outputs)


def parse_map(texts: Sequence[str], in_dim: int) -> MapSpec:
    return MapSpec(tuple(parse(t) for t in texts), in_dim)


def format_map(m: MapSpec) -> list[str]:
    return [format_expr(e) for e in m.outputs]


def eval_map(m: MapSpec, p: Vec) -> Vec:
    """Evaluate all output coordinates at a point.

    Faults (division by zero, non-finite results) are reported naming the
    offending output coordinate.
    """
    if p.dim != m.in_dim:
        raise EvaluationFault(
            f"input dimension {p.dim} does not match map input dimension {m.in_dim}"
        )
    values = []
    for k, out in enumerate(m.outputs):
        try:
            v = eval_expr(out, p.coords)
        except EvaluationFault as exc:
            raise EvaluationFault(str(exc), coordinate=k) from exc
        if not math.isfinite(v):
            raise EvaluationFault(f"non-finite result {v!r}", coordinate=k)
        values.append(v)
    return Vec(tuple(values))


def _substitute(e: Expr, replacements: Sequence[Expr]) -> Expr:
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return replacements[e.index]
    if isinstance(e, Unary):
        return Unary(e.op, _substitute(e.operand, replacements))
    return Binary(e.op, _substitute(e.left, replacements), _substitute(e.right, replacements))


def compose(outer: MapSpec, inner: MapSpec) -> MapSpec:
    """Map composition: (outer . inner)(x) = outer(inner(x))."""
    if inner.out_dim != outer.in_dim:
        raise ValueError(
            f"cannot compose: inner out_dim {inner.out_dim} != outer in_dim {outer.in_dim}"
        )
    outputs = tuple(_substitute(e, inner.outputs) for e in outer.outputs)
    return MapSpec(outputs, inner.in_dim)
