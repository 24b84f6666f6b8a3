"""A small expression language for scalar fields on the torus.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("+" | "-") unary | power ;
    power   = atom [ "^" unary ] ;
    atom    = number | "pi" | "i" | coord | call | "(" expr ")" ;
    call    = ("sin" | "cos" | "exp" | "ln" | "abs") "(" expr ")" ;
    coord   = "x0" | "x1" | ... ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] [ "j" ] ;

Parsing reuses Python's tokenizer and AST (``^`` is rewritten to ``**``),
then every node is checked against a whitelist.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import EvaluationError, ExpressionError
from .grid import ScalarField, TorusGrid

FUNCTIONS: dict[str, Callable] = {
    "sin": np.sin, "cos": np.cos, "exp": np.exp, "ln": np.log, "abs": np.abs,
}
CONSTANTS = {"pi": math.pi, "i": 1j}
_COORD = re.compile(r"^x(\d+)$")


def _column_map(source: str) -> tuple[str, list[int]]:
    """Rewrite ``^`` as ``**`` and remember original columns of the output chars."""
    out, cols = [], []
    for col, ch in enumerate(source):
        if ch == "^":
            out.append("**")
            cols += [col, col]
        else:
            out.append(ch)
            cols.append(col)
    cols.append(len(source))
    return "".join(out), cols


def _line_col(source: str, rewritten_offset: int, cols: list[int], line: int) -> tuple[int, int]:
    lines = source.split("\n")
    start = sum(len(lines[k]) + 1 for k in range(line - 1))
    # rewritten offsets are counted in the whole rewritten string
    orig = cols[min(rewritten_offset, len(cols) - 1)]
    return line, orig - start + 1


@dataclass(frozen=True)
class FieldExpr:
    """A validated expression; call with a grid or with explicit coordinates."""

    source: str
    tree: ast.Expression
    max_coord: int

    def evaluate(self, coords: list[np.ndarray]) -> np.ndarray:
        if self.max_coord >= len(coords):
            raise EvaluationError(f"expression uses x{self.max_coord} but only {len(coords)} coordinates given")
        with np.errstate(all="ignore"):
            val = _eval(self.tree.body, coords)
        return np.asarray(val, dtype=complex)

    def on_grid(self, grid: TorusGrid) -> ScalarField:
        vals = self.evaluate([grid.coord(mu) for mu in range(grid.n)])
        vals = np.broadcast_to(vals, grid.shape).copy()
        if not np.all(np.isfinite(vals)):
            raise EvaluationError(f"non-finite value in {self.source!r}")
        return ScalarField(grid, vals)

    def at(self, point) -> complex:
        return complex(self.evaluate([np.asarray(x, dtype=float) for x in point]))

    def pretty(self) -> str:
        return to_source(self.tree.body)

    __call__ = at


def parse_field_expr(source: str) -> FieldExpr:
    """Parse ``source``; errors carry 1-based line and column."""
    rewritten, cols = _column_map(source)
    try:
        tree = ast.parse(rewritten.strip() and rewritten, mode="eval")
    except SyntaxError as exc:
        line = exc.lineno or 1
        off = (exc.offset or 1) - 1
        lines = rewritten.split("\n")
        flat = sum(len(lines[k]) + 1 for k in range(line - 1)) + off
        ln, col = _line_col(source, flat, cols, line)
        raise ExpressionError(exc.msg or "syntax error", ln, col) from None
    max_coord = -1

    def fail(node, msg):
        lines = rewritten.split("\n")
        flat = sum(len(lines[k]) + 1 for k in range(node.lineno - 1)) + node.col_offset
        ln, col = _line_col(source, flat, cols, node.lineno)
        raise ExpressionError(msg, ln, col)

    for node in ast.walk(tree.body):
        if isinstance(node, ast.Name):
            m = _COORD.match(node.id)
            if m:
                max_coord = max(max_coord, int(m.group(1)))
            elif node.id not in CONSTANTS and node.id not in FUNCTIONS:
                fail(node, f"unknown identifier {node.id!r}")
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                fail(node, "only sin, cos, exp, ln, abs may be called")
            if len(node.args) != 1 or node.keywords:
                fail(node, f"{node.func.id} takes exactly one argument")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float, complex)) or isinstance(node.value, bool):
                fail(node, "only numeric literals are allowed")
        elif isinstance(node, ast.BinOp):
            if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
                fail(node, "unsupported operator")
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.UAdd, ast.USub)):
                fail(node, "unsupported unary operator")
        elif not isinstance(node, (ast.Load, ast.operator, ast.unaryop)):
            fail(node, f"unsupported syntax ({type(node).__name__})")
    for node in ast.walk(tree.body):
        if isinstance(node, ast.Name) and node.id in FUNCTIONS:
            parent_ok = any(isinstance(p, ast.Call) and p.func is node for p in ast.walk(tree.body))
            if not parent_ok:
                fail(node, f"function {node.id!r} used without a call")
    return FieldExpr(source, tree, max_coord)


def _eval(node, coords):
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        m = _COORD.match(node.id)
        if m:
            return coords[int(m.group(1))]
        return CONSTANTS[node.id]
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, coords)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call):
        return FUNCTIONS[node.func.id](np.asarray(_eval(node.args[0], coords), dtype=complex))
    left, right = _eval(node.left, coords), _eval(node.right, coords)
    if isinstance(node.op, ast.Add):
        return left + right
    if isinstance(node.op, ast.Sub):
        return left - right
    if isinstance(node.op, ast.Mult):
        return left * right
    if isinstance(node.op, ast.Div):
        denom = np.asarray(right, dtype=complex)
        if np.any(denom == 0):
            raise EvaluationError("division by zero")
        return left / denom
    base = np.asarray(left, dtype=complex)
    return base ** np.asarray(right, dtype=complex)


def to_source(node) -> str:
    """Fully parenthesized pretty-printer using ``^`` for powers."""
    if isinstance(node, ast.Constant):
        v = node.value
        if isinstance(v, complex):
            return f"({v.real!r}+{v.imag!r}*i)" if v.real else f"({v.imag!r}*i)"
        return repr(v)
    if isinstance(node, ast.Name):
        return node.id
    if isinstance(node, ast.UnaryOp):
        sign = "-" if isinstance(node.op, ast.USub) else "+"
        return f"({sign}{to_source(node.operand)})"
    if isinstance(node, ast.Call):
        return f"{node.func.id}({to_source(node.args[0])})"
    ops = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/", ast.Pow: "^"}
    return f"({to_source(node.left)} {ops[type(node.op)]} {to_source(node.right)})"
