"""Gauss-Legendre panel quadrature, including layer-graded integration.

Integrands are vectorized callables ``f(x: ndarray) -> ndarray``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EvaluationError, ParameterError, ToleranceNotMet

MAX_ORDER = 32


@dataclass(frozen=True)
class QuadRule:
    """Gauss-Legendre rule on the reference interval [0, 1]."""

    order: int
    points: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def gauss_rule(order: int) -> QuadRule:
    if not 1 <= order <= MAX_ORDER:
        raise ParameterError(f"quadrature order must be in 1..{MAX_ORDER}, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    points = 0.5 * (x + 1.0)
    weights = 0.5 * w
    if order <= 20:
        # exactness for monomials up to degree 2*order - 1
        for k in range(2 * order):
            exact = 1.0 / (k + 1)
            if abs(weights @ points**k - exact) > 1e-14 * (k + 1):
                raise ArithmeticError(f"Gauss rule of order {order} fails degree {k}")
    points.flags.writeable = False
    weights.flags.writeable = False
    return QuadRule(order, points, weights)


def panel_nodes(breaks, order: int):
    """Quadrature points and weights for the panels delimited by ``breaks``.

    Returns arrays of shape (npanels, order).
    """
    breaks = np.asarray(breaks, dtype=float)
    rule = gauss_rule(order)
    left = breaks[:-1, None]
    width = np.diff(breaks)[:, None]
    return left + width * rule.points, width * rule.weights


def _sample(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    bad = ~np.isfinite(y)
    if bad.any():
        where = float(np.asarray(x)[bad].flat[0])
        raise EvaluationError(f"integrand is not finite at x = {where!r}")
    return y


def integrate(f, a: float, b: float, order: int = 8, panels: int = 1) -> float:
    """Composite Gauss-Legendre approximation of the integral of f over [a, b]."""
    if a > b:
        raise ParameterError(f"integration bounds out of order: a={a}, b={b}")
    if a == b:
        return 0.0
    x, w = panel_nodes(np.linspace(a, b, panels + 1), order)
    return float(np.sum(w * _sample(f, x)))


def integrate_panels(f, breaks, order: int = 8) -> np.ndarray:
    """Integral of f over each panel [breaks[i], breaks[i+1]]."""
    x, w = panel_nodes(breaks, order)
    return np.sum(w * _sample(f, x), axis=1)


def layer_width(eps: float) -> float:
    """Width of the region next to x = 1 that receives graded panels."""
    if eps <= 0:
        raise ParameterError(f"epsilon must be positive, got {eps}")
    if eps < 1.0 / math.e:
        return min(0.5, 8.0 * eps * math.log(1.0 / eps))
    return 0.5


def graded_breaks(a: float, b: float, eps: float, breakpoints=None) -> np.ndarray:
    """Panel boundaries for [a, b]: user breakpoints plus geometric grading
    (factor 2) toward b inside the layer region, down to a width of 1e-3*eps."""
    pts = [a, b]
    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float)
        pts.extend(bp[(bp > a) & (bp < b)].tolist())
    cut = 1.0 - layer_width(eps)
    if b > cut:
        start = max(a, cut)
        pts.append(start)
        floor = 1e-3 * eps
        width = b - start
        while 0.5 * width >= floor:
            width *= 0.5
            pts.append(b - width)
    return np.unique(np.asarray(pts, dtype=float))


def _refine(breaks: np.ndarray, level: int) -> np.ndarray:
    if level == 0:
        return breaks
    k = 2**level
    t = np.arange(k) / k
    inner = breaks[:-1, None] + np.diff(breaks)[:, None] * t
    return np.append(inner.ravel(), breaks[-1])


def graded_integrate(f, a: float, b: float, eps: float, order: int = 8,
                     breakpoints=None, rtol: float = 1e-10, max_levels: int = 20,
                     atol: float = 0.0) -> float:
    """Integrate f over [a, b] resolving a boundary layer of width ~eps at x = 1.

    Every panel is halved per refinement level until two successive levels
    agree to ``rtol`` (relative to the larger value, with a roundoff floor of
    1e-13 times the integral of |f|) or to ``atol``.
    """
    if a > b:
        raise ParameterError(f"integration bounds out of order: a={a}, b={b}")
    if a == b:
        return 0.0
    base = graded_breaks(a, b, eps, breakpoints)
    previous = earlier = None
    for level in range(max_levels + 1):
        x, w = panel_nodes(_refine(base, level), order)
        y = _sample(f, x)
        value = float(np.sum(w * y))
        if previous is not None:
            floor = 1e-13 * float(np.sum(w * np.abs(y)))
            if abs(value - previous) <= rtol * max(abs(value), abs(previous)) + floor + atol:
                return value
        earlier, previous = previous, value
    raise ToleranceNotMet(
        f"graded quadrature did not converge after {max_levels} levels",
        last=previous, previous=earlier)


def layer_graded_integrate(f, eps: float, order: int = 8, breakpoints=None,
                           rtol: float = 1e-10, max_levels: int = 20, atol: float = 0.0) -> float:
    """Integral of f over [0, 1] with graded panels in the outflow layer."""
    return graded_integrate(f, 0.0, 1.0, eps, order, breakpoints, rtol, max_levels, atol)
