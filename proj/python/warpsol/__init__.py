"""Verification of gradient Ricci solitons on multiply warped products.

Specs are accepted as JSON text or as plain dicts in the spec file format.
"""

import json

from . import _core
from ._core import DomainError, NumericError, ParseError, ValidationError, derivative, jet

__all__ = [
    "DomainError",
    "NumericError",
    "ParseError",
    "ValidationError",
    "catalog",
    "check",
    "classify",
    "derivative",
    "integrate",
    "jet",
    "obstruction",
]


def _text(spec):
    return spec if isinstance(spec, str) else json.dumps(spec)


def catalog(kind, n=6, r=2, rho=0.0):
    """Closed-form catalog entry as a spec dict."""
    return json.loads(_core.catalog(kind, n, r, rho))


def check(spec, grid=64, tol=1e-9):
    """Full residual report; ``report["pass"]`` mirrors the CLI exit status."""
    code, report = _core.check(_text(spec), grid, tol)
    out = json.loads(report)
    out["exit_code"] = code
    return out


def classify(spec, grid=64, tol=1e-9):
    """Returns ``(verdict, predicates)``."""
    return _core.classify(_text(spec), grid, tol)


def integrate(spec, s1, s0=None, tol=1e-10, points=201, fixed_step=None):
    """Integrates the soliton ODE from the spec's ``initial`` block."""
    return _core.integrate(_text(spec), s1, s0, tol, points, fixed_step)


def obstruction(n, rho, samples=100000, seed=42):
    return _core.obstruction(n, rho, samples, seed)
