"""Right-hand sides from expressions or sampled data.

Expressions use a small grammar: numeric literals, ``x``, ``+ - * /``,
powers written ``^`` or ``**``, parentheses and the functions exp, log, sin,
cos, sqrt and gamma. Sampled data is a CSV with a header row and two columns
(x, f) and is interpolated with monotone cubic (PCHIP) pieces.
"""
import logging
import math
import re
from pathlib import Path

import numpy as np
import sympy
from scipy.interpolate import PchipInterpolator
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import EvaluationError, PreconditionError
from .jacobi import Integrand

logger = logging.getLogger(__name__)

X = sympy.Symbol("x", real=True)
FUNCTIONS = {
    "exp": sympy.exp,
    "log": sympy.log,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "sqrt": sympy.sqrt,
    "gamma": sympy.gamma,
}
_TOKEN = re.compile(r"\s+|\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|[A-Za-z_]\w*|\*\*|[-+*/^()]")


class ExpressionError(PreconditionError):
    """An expression failed to parse; ``position`` is the 0-based character offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}", field="rhs.expression")
        self.position = position


def _check_tokens(text):
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ExpressionError(f"unexpected character {text[position]!r}", position)
        token = match.group()
        if token[0].isalpha() or token[0] == "_":
            if token != "x" and token not in FUNCTIONS:
                raise ExpressionError(f"unknown name {token!r}", position)
        position = match.end()


def parse_expression(text):
    """Parse an expression in x into a vectorised numpy callable."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression", 0)
    _check_tokens(text)
    try:
        expr = parse_expr(
            text,
            local_dict={"x": X, **FUNCTIONS},
            transformations=standard_transformations + (convert_xor,),
            evaluate=True,
        )
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        offset = getattr(e, "offset", None)
        position = max(0, min(len(text), offset - 1)) if isinstance(offset, int) else len(text)
        raise ExpressionError(f"cannot parse {text!r}", position) from e
    except Exception as e:  # tokenizer errors from unbalanced parentheses
        raise ExpressionError(f"cannot parse {text!r}: {e}", len(text)) from e
    if expr.free_symbols - {X}:
        raise ExpressionError(f"expression {text!r} has free symbols other than x", 0)
    if expr.has(sympy.zoo, sympy.nan, sympy.oo, -sympy.oo, sympy.I):
        raise ExpressionError(f"expression {text!r} is not a finite real function", 0)
    try:
        func = sympy.lambdify(X, expr, modules=["scipy", "numpy"])
    except (KeyError, NameError, TypeError) as e:
        raise ExpressionError(f"cannot evaluate {text!r}: {e}", 0) from e
    logger.debug(f"Parsed expression {text!r} as {expr}")

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return np.array(np.broadcast_to(np.asarray(func(x), dtype=float), x.shape))

    return evaluate


def sampled_function(x, f, interval=None):
    """PCHIP interpolant through (x_i, f_i); evaluation outside the sample hull raises."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if x.ndim != 1 or x.shape != f.shape or len(x) < 2:
        raise PreconditionError("samples need at least two (x, f) rows", field="rhs.samples")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f))):
        raise PreconditionError("samples must be finite", field="rhs.samples")
    if not np.all(np.diff(x) > 0.0):
        raise PreconditionError("sample abscissae must be strictly increasing", field="rhs.samples",
                                valid_range="x_1 < x_2 < ...")
    if interval is not None and (x[0] < interval.a or x[-1] > interval.b):
        raise PreconditionError(f"sample abscissae must lie in [{interval.a}, {interval.b}]",
                                field="rhs.samples")
    interpolant = PchipInterpolator(x, f, extrapolate=False)
    low, high = float(x[0]), float(x[-1])

    def evaluate(points):
        points = np.asarray(points, dtype=float)
        outside = (points < low) | (points > high)
        if np.any(outside):
            node = float(points[outside].flat[0])
            raise EvaluationError(f"sampled rhs queried at x={node!r}, outside the sample hull [{low}, {high}]",
                                  node=node)
        return interpolant(points)

    return evaluate


def load_samples(path, interval=None):
    try:
        table = np.atleast_1d(np.genfromtxt(path, delimiter=",", names=True))
    except (OSError, ValueError) as e:
        raise PreconditionError(f"cannot read samples {path}: {e}", field="rhs.samples") from e
    names = table.dtype.names
    if names is None or len(names) != 2:
        raise PreconditionError(f"samples file {path} needs a header and two columns", field="rhs.samples")
    return sampled_function(table[names[0]], table[names[1]], interval)


def declared_exponent(source, field="rhs.exponent"):
    """The optional left exponent of an rhs block; 0 when absent."""
    value = source.get("exponent", 0.0)
    if isinstance(value, bool):
        raise PreconditionError(f"exponent must be a number, got {value!r}", field=field)
    try:
        exponent = float(value)
    except (TypeError, ValueError) as e:
        raise PreconditionError(f"exponent must be a number, got {value!r}", field=field) from e
    if not math.isfinite(exponent):
        raise PreconditionError(f"exponent must be finite, got {value!r}", field=field)
    return exponent


def ingest_rhs(source, interval, base_dir=None):
    """Build the right-hand side Integrand from ``{"expression" | "samples", "exponent"?}``."""
    if not isinstance(source, dict):
        raise PreconditionError("rhs must be an object", field="rhs")
    exponent = declared_exponent(source)
    if "expression" in source:
        smooth = parse_expression(source["expression"])
    elif "samples" in source:
        if not isinstance(source["samples"], str):
            raise PreconditionError("rhs.samples must be a file path", field="rhs.samples")
        path = Path(source["samples"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        smooth = load_samples(path, interval)
    else:
        raise PreconditionError("rhs needs 'expression' or 'samples'", field="rhs")
    return Integrand(smooth, exponent, interval.a)
