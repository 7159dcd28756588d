"""Tiny arithmetic-expression compiler for user-supplied generating functions.

Accepts a single-variable expression over +, -, *, /, **, unary sign, the
functions exp, log, sqrt, sign, abs, pow, and the constants pi and e. The
variable may be written x (or z, convenient for inverse expressions); both
names bind to the same argument. Anything else is rejected with the line
and column of the offending token, before any evaluation happens.

Runtime domain violations are softened so admissibility scans can probe
freely: overflow and division by zero evaluate to a signed inf, invalid
domains (log of a negative number) to nan. The softening happens per
operation, not per expression: exp(1000)*sign(x) must come out as -inf for
negative x, which an expression-wide except cannot deliver because the
surrounding sign flip never runs once the inner call raises.
"""
from __future__ import annotations

import ast
import math
from typing import Callable

from .errors import ExpressionError

__all__ = ["compile_expression"]


def _sign(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def _g_exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError:
        return math.inf


def _g_log(a: float) -> float:
    if a == 0.0:
        return -math.inf
    try:
        return math.log(a)
    except ValueError:
        return math.nan


def _g_pow(a: float, b: float) -> float:
    # math.pow keeps floats real; float ** float would hand back a complex
    # number for a negative base and fractional exponent.
    try:
        return math.pow(a, b)
    except OverflowError:
        odd = b == int(b) and int(b) % 2 == 1
        return -math.inf if (a < 0.0 and odd) else math.inf
    except ValueError:
        return math.nan


def _g_div(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0.0:
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


_FUNCTIONS = {
    "exp": _g_exp,
    "log": _g_log,
    "sqrt": math.sqrt,
    "sign": _sign,
    "abs": abs,
    "pow": _g_pow,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_VARIABLES = ("x", "z")

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNARYOPS = (ast.UAdd, ast.USub)


def _reject(node: ast.AST, message: str) -> ExpressionError:
    line = getattr(node, "lineno", 1)
    col = getattr(node, "col_offset", 0)
    return ExpressionError(message, line, col)


def _validate(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body)
        return
    if isinstance(node, ast.BinOp):
        if not isinstance(node.op, _BINOPS):
            raise _reject(node, f"operator {type(node.op).__name__} is not allowed")
        _validate(node.left)
        _validate(node.right)
        return
    if isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _UNARYOPS):
            raise _reject(node, f"operator {type(node.op).__name__} is not allowed")
        _validate(node.operand)
        return
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise _reject(node, "only exp, log, sqrt, sign, abs, pow may be called")
        if node.keywords:
            raise _reject(node, "keyword arguments are not allowed")
        want = 2 if node.func.id == "pow" else 1
        if len(node.args) != want:
            raise _reject(
                node, f"{node.func.id} takes exactly {want} argument{'s' if want > 1 else ''}"
            )
        for a in node.args:
            _validate(a)
        return
    if isinstance(node, ast.Name):
        if node.id in _VARIABLES or node.id in _CONSTANTS:
            return
        raise _reject(node, f"unknown name {node.id!r}; the variable is x (or z)")
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return
        raise _reject(node, "only numeric literals are allowed")
    raise _reject(node, f"syntax element {type(node).__name__} is not allowed")


class _Lower(ast.NodeTransformer):
    """Rewrite ** and / into calls to the guarded helpers.

    Runs after validation, so the helper names cannot appear in user input;
    they only exist in the evaluation environment.
    """

    def visit_BinOp(self, node: ast.BinOp) -> ast.AST:
        self.generic_visit(node)
        if isinstance(node.op, ast.Pow):
            name = "pow"
        elif isinstance(node.op, ast.Div):
            name = "_div"
        else:
            return node
        call = ast.Call(func=ast.Name(id=name, ctx=ast.Load()),
                        args=[node.left, node.right], keywords=[])
        return ast.copy_location(call, node)


def compile_expression(text: str) -> Callable[[float], float]:
    """Compile text into a float -> float function, validating first."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression", 1, 0)
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(
            exc.msg or "invalid syntax", exc.lineno or 1, (exc.offset or 1) - 1
        ) from None
    _validate(tree)
    tree = ast.fix_missing_locations(_Lower().visit(tree))
    code = compile(tree, "<expression>", "eval")
    env = {"__builtins__": {}}
    env.update(_FUNCTIONS)
    env.update(_CONSTANTS)
    env["_div"] = _g_div

    def fn(value: float) -> float:
        v = float(value)
        try:
            return float(eval(code, env, {"x": v, "z": v}))
        except OverflowError:
            return math.inf
        except ZeroDivisionError:
            return math.inf
        except ValueError:
            return math.nan

    return fn
