"""Safe evaluation of small polynomial expressions.

Fixture files write polynomials such as ``"2*x*y - 1/2*u^2"`` or
``"2*pi*i"``.  They are parsed with :mod:`ast` and evaluated over whatever
ring the caller supplies through ``names``; only arithmetic nodes are
accepted.  ``^`` means power.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import Callable, Mapping

__all__ = ["evaluate", "ExpressionError"]


class ExpressionError(ValueError):
    pass


def evaluate(text: str, names: Mapping[str, object] | Callable[[str], object],
             functions: Mapping[str, Callable] | None = None):
    """Evaluate ``text`` with identifiers looked up in ``names``.

    Integer literals become ``Fraction`` so that ``1/2`` is exact.  Division
    and negative powers need a number or a value with ``inverse()``.
    """
    if not isinstance(text, str):
        raise ExpressionError(f"expected an expression string, got {type(text).__name__}")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    lookup = names if callable(names) else names.__getitem__
    funcs = functions or {}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            try:
                return lookup(node.id)
            except KeyError:
                raise ExpressionError(f"unknown symbol {node.id!r} in {text!r}") from None
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if isinstance(b, Fraction):
                    if b == 0:
                        raise ExpressionError(f"division by zero in {text!r}")
                    return a * (1 / b)
                if hasattr(b, "inverse"):
                    return a * b.inverse()
                raise ExpressionError(f"division by a non-invertible value in {text!r}")
            if isinstance(node.op, ast.Pow):
                if not isinstance(b, Fraction) or b.denominator != 1:
                    raise ExpressionError(f"exponents must be integers in {text!r}")
                if b < 0:
                    if isinstance(a, Fraction) and a:
                        a = 1 / a
                    elif hasattr(a, "inverse"):
                        a = a.inverse()
                    else:
                        raise ExpressionError(f"negative power of a non-invertible value in {text!r}")
                    b = -b
                out = Fraction(1)
                for _ in range(int(b)):
                    out = out * a
                return out
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in funcs:
            if node.keywords:
                raise ExpressionError("keyword arguments are not allowed")
            return funcs[node.func.id](*[ev(a) for a in node.args])
        raise ExpressionError(f"unsupported syntax in {text!r}: {ast.dump(node)[:60]}")

    return ev(tree)
