"""Right-hand sides f of -eps u'' + u' = f."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Forcing:
    """A vectorized forcing term.

    ``poly`` holds polynomial coefficients (constant term first) when f is a
    polynomial; it enables exact load vectors and closed-form solutions.
    """

    name: str
    func: object
    poly: tuple[float, ...] | None = None

    def __call__(self, x):
        return self.func(x)

    @property
    def is_constant(self) -> bool:
        return self.poly is not None and len(self.poly) == 1

    def sup_norm(self, samples: int = 20001) -> float:
        x = np.linspace(0.0, 1.0, samples)
        return float(np.max(np.abs(np.broadcast_to(self(x), x.shape))))


def polynomial(coeffs, name: str | None = None) -> Forcing:
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        raise ParameterError("polynomial forcing needs at least one coefficient")
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs = coeffs[:-1]
    poly = np.polynomial.Polynomial(coeffs)

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(poly(x), x.shape).copy() if x.ndim else float(poly(x))

    label = name or "poly:" + ",".join(repr(c) for c in coeffs)
    return Forcing(label, func, coeffs)


def _cos2pi(x):
    return np.cos(2.0 * math.pi * np.asarray(x, dtype=float))


CONST1 = polynomial([1.0], "const1")
ZERO = polynomial([0.0], "zero")
LINEAR_X = polynomial([0.0, 1.0], "linear")
COS2PI = Forcing("cos2pi", _cos2pi)

PRESETS = {f.name: f for f in (CONST1, ZERO, LINEAR_X, COS2PI)}


def get_forcing(spec) -> Forcing:
    """Resolve a preset name, a coefficient list, a 'c0,c1,...' string or a callable."""
    if isinstance(spec, Forcing):
        return spec
    if callable(spec):
        return Forcing(getattr(spec, "__name__", "callable"), spec)
    if isinstance(spec, str):
        if spec in PRESETS:
            return PRESETS[spec]
        try:
            return polynomial([float(t) for t in spec.split(",")])
        except ValueError:
            raise ParameterError(
                f"unknown forcing {spec!r}; use one of {', '.join(PRESETS)} "
                "or comma-separated polynomial coefficients") from None
    return polynomial(spec)
