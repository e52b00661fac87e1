"""Exact identity checks and an axisymmetric flow solver for a quasilinear Liouville problem on spheres.

Rational quantities come back as fractions.Fraction. Parameters p and q accept
int, Fraction or a rational string such as "5/2".
"""

from fractions import Fraction

from . import _core
from ._core import (
    EvalError,
    InadmissibleParams,
    OutOfWindow,
    ParseError,
    __version__,
    calculus_suite,
    certify,
    format_expr,
    trace_inequality,
    run_cli,
    sweep_csv,
    tensor_suite,
)

_RATIONAL_KEYS = ("alpha", "lambda", "eps2", "t", "g_A", "g_B", "g_C", "beta0", "a", "k", "M")


def _text(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def classify_regime(n, p, q):
    return _core.classify_regime(n, _text(p), _text(q))


def derived_params(n, p, q):
    """Every derived quantity at (n, p, q); raises OutOfWindow outside the subcritical window."""
    d = _core.derived_params(n, _text(p), _text(q))
    for key in _RATIONAL_KEYS:
        d[key] = Fraction(d[key])
    return d


def eval_numeric(expr, n, p, q):
    """Exact Fraction, or float when omega_star appears."""
    v = _core.eval_numeric(expr, n, _text(p), _text(q))
    return v if isinstance(v, float) else Fraction(v)


def eval_symbolic(expr):
    """Canonical rational-function text in n, p, q."""
    return _core.eval_symbolic(expr)


def solve(n=3, p=2, q=4, **kwargs):
    return _core.solve(n, _text(p), _text(q), **kwargs)


def pde_residual(n, p, q, omega):
    return _core.pde_residual(n, _text(p), _text(q), list(omega))


__all__ = [
    "EvalError",
    "InadmissibleParams",
    "OutOfWindow",
    "ParseError",
    "__version__",
    "calculus_suite",
    "certify",
    "classify_regime",
    "derived_params",
    "eval_numeric",
    "eval_symbolic",
    "format_expr",
    "trace_inequality",
    "pde_residual",
    "run_cli",
    "solve",
    "sweep_csv",
    "tensor_suite",
]
