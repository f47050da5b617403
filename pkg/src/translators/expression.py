"""Parser for user-supplied speed expressions in the variables x and y.

Grammar (infix, usual precedence)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 'x' | 'y' | 'sqrt' '(' expr ')' | '(' expr ')'

``^`` is exponentiation and is right-associative; ``**`` is accepted as a
synonym. Rational powers such as ``(x*y^2)^(1/3)`` are written with an
explicit division inside parentheses.
"""

from __future__ import annotations

import ast

import numpy as np

from .errors import ExpressionError

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}
_UNARY = {ast.USub: np.negative, ast.UAdd: np.positive}
_FUNCS = {"sqrt": np.sqrt}
_VARS = ("x", "y")


class Expression:
    """A compiled, numpy-evaluable expression f(x, y)."""

    def __init__(self, source: str):
        if not isinstance(source, str) or not source.strip():
            raise ExpressionError("empty expression")
        self.source = source
        try:
            tree = ast.parse(source.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY:
                raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
            self._check(node.operand)
        elif isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ExpressionError(f"constant {node.value!r} not allowed")
        elif isinstance(node, ast.Name):
            if node.id not in _VARS:
                raise ExpressionError(f"unknown variable {node.id!r}; only x and y")
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise ExpressionError("only sqrt(...) calls are allowed")
            if len(node.args) != 1 or node.keywords:
                raise ExpressionError("sqrt takes exactly one argument")
            self._check(node.args[0])
        else:
            raise ExpressionError(f"syntax element {type(node).__name__} not allowed")

    def _eval(self, node, env):
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, env))
        if isinstance(node, ast.Constant):
            return np.float64(node.value)
        if isinstance(node, ast.Name):
            return env[node.id]
        return _FUNCS[node.func.id](self._eval(node.args[0], env))

    def __call__(self, x, y):
        env = {"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float)}
        # negative bases with fractional exponents yield nan; callers treat nan as
        # "outside the admissible cone"
        with np.errstate(all="ignore"):
            out = self._eval(self._tree, env)
        out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"Expression({self.source!r})"
