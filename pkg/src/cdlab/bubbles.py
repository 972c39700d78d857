"""Bubble functions on a reference cell [0, h] and their upwinding constants.

Two families are supported:

* quadratic, ``B(x) = 4 beta / h**2 * x (h - x)``;
* exponential, the solution of ``-eps B'' - B' = 1/h`` with ``B(0) = B(h) = 0``.

Each bubble is summarized by its moments ``b1 = (1/h) int B`` and
``b2 = h int (B')**2``.  Exponentials are only ever evaluated as ``exp(-t)``
with ``t >= 0``, so nothing overflows for large ``h/eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, ValidityError
from .quadrature import integrate

QUADRATIC = "quadratic"
EXPONENTIAL = "exponential"

#: Printed value of 1 + b2 for quadratic bubbles; matches 1 + 16 beta^2 / 3 only at beta = 1.
QUADRATIC_ONE_PLUS_B2_BETA1 = 19.0 / 3.0

#: Smallest admissible h / eps for the bidiagonal quadratic choice of beta.
SPECIAL_BETA_RATIO = 2.6


@dataclass(frozen=True)
class BubbleSpec:
    kind: str
    param: float  # beta for quadratic bubbles, eps for exponential ones
    h: float
    b1: float
    b2: float
    d: float | None = None  # effective diffusion eps + h*b1, when eps is known
    g0: float | None = None
    l0: float | None = None
    u0: float | None = None

    @property
    def beta(self) -> float:
        if self.kind != QUADRATIC:
            raise AttributeError("exponential bubbles have no beta")
        return self.param

    @property
    def eps(self) -> float:
        if self.kind != EXPONENTIAL:
            raise AttributeError("quadratic bubbles carry no epsilon")
        return self.param

    @property
    def one_plus_b2(self) -> float:
        if self.kind == EXPONENTIAL:
            return self.h / (2.0 * self.param * self.g0)
        return 1.0 + self.b2

    @property
    def g0_saturated(self) -> bool:
        """True when tanh(h / 2 eps) has rounded to exactly 1.0."""
        return self.kind == EXPONENTIAL and self.g0 == 1.0

    def diffusion(self, eps: float) -> float:
        """Effective diffusion eps + h*b1 of the upwinded scheme."""
        if self.kind == EXPONENTIAL:
            return self.d
        return eps + self.h * self.b1


def _positive(name, value):
    if not value > 0 or not math.isfinite(value):
        raise ParameterError(f"{name} must be positive and finite, got {value!r}")


def make_quadratic(beta: float, h: float, eps: float | None = None) -> BubbleSpec:
    _positive("beta", beta)
    _positive("h", h)
    b1 = 2.0 * beta / 3.0
    d = None if eps is None else eps + h * b1
    return BubbleSpec(QUADRATIC, beta, h, b1, 16.0 * beta * beta / 3.0, d=d)


def tanh_half_ratio(h: float, eps: float) -> float:
    """tanh(h / (2 eps)) written with exp(-h/eps) only."""
    e = math.exp(-h / eps)
    return -math.expm1(-h / eps) / (1.0 + e)


def make_exponential(eps: float, h: float) -> BubbleSpec:
    _positive("eps", eps)
    _positive("h", h)
    g0 = tanh_half_ratio(h, eps)
    return BubbleSpec(
        EXPONENTIAL, eps, h,
        b1=1.0 / (2.0 * g0) - eps / h,
        b2=h / (2.0 * eps * g0) - 1.0,
        d=h / (2.0 * g0),
        g0=g0,
        l0=(1.0 + g0) / (2.0 * g0),
        u0=(1.0 - g0) / (2.0 * g0),
    )


def _cell_points(spec, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > spec.h) or np.any(np.isnan(x)):
        raise DomainError(f"bubble argument outside [0, h] with h = {spec.h!r}")
    return x


def eval_bubble(spec: BubbleSpec, x):
    x = _cell_points(spec, x)
    if spec.kind == QUADRATIC:
        y = 4.0 * spec.param / spec.h**2 * x * (spec.h - x)
    else:
        y = spec.l0 * -np.expm1(-x / spec.param) - x / spec.h
    return float(y) if y.ndim == 0 else y


def bubble_derivative(spec: BubbleSpec, x):
    x = _cell_points(spec, x)
    if spec.kind == QUADRATIC:
        y = 4.0 * spec.param / spec.h**2 * (spec.h - 2.0 * x)
    else:
        eps = spec.param
        y = spec.l0 * np.exp(-x / eps) / eps - 1.0 / spec.h
    return float(y) if y.ndim == 0 else y


def bubble_second_derivative(spec: BubbleSpec, x):
    x = _cell_points(spec, x)
    if spec.kind == QUADRATIC:
        y = np.full_like(x, -8.0 * spec.param / spec.h**2)
    else:
        eps = spec.param
        y = -spec.l0 * np.exp(-x / eps) / eps**2
    return float(y) if y.ndim == 0 else y


def moments_by_quadrature(spec: BubbleSpec, quad_order: int = 16, panels: int = 8):
    """Numerically integrated (b1, b2); an independent check on the closed forms."""
    if quad_order < 4:
        raise ParameterError(f"moment quadrature needs order >= 4, got {quad_order}")
    h = spec.h
    b1 = integrate(lambda x: eval_bubble(spec, x), 0.0, h, quad_order, panels) / h
    b2 = h * integrate(lambda x: bubble_derivative(spec, x) ** 2, 0.0, h, quad_order, panels)
    return b1, b2


def special_beta(eps: float, h: float) -> float:
    """beta = (3/4)(1 - 2 eps/h), which zeroes the super-diagonal of the stencil."""
    if eps < 0 or h <= 0:
        raise ParameterError(f"need eps >= 0 and h > 0, got eps={eps}, h={h}")
    threshold = SPECIAL_BETA_RATIO * eps
    if not h > threshold:
        raise ValidityError(
            f"special beta requires h > 2.6*eps = {threshold:.17g}, got h = {h:.17g}",
            threshold=threshold)
    return 0.75 * (1.0 - 2.0 * eps / h)


def check_h_restriction(eps: float, h: float, b1: float) -> bool:
    """eps^2 + h^2/pi^2 <= (eps + h*b1)^2, evaluated as written."""
    return eps**2 + h**2 / math.pi**2 <= (eps + h * b1) ** 2
