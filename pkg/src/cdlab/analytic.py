"""Exact and reference solutions of -eps u'' + u' = f, u(0) = u(1) = 0.

Closed forms exist for every polynomial forcing and for cos(2 pi x).  For
anything else the ground truth is the exponential-bubble UPG solution on a
fine mesh, which is nodally exact up to the load-vector quadrature.

All boundary-layer terms are written with exp((x - 1)/eps) and exp(-t) for
t >= 0, so nothing overflows for small eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bubbles import make_exponential
from .errors import ParameterError, ValidityError
from .forcing import COS2PI, Forcing, get_forcing
from .mesh_fem import P1Function, UniformMesh
from .quadrature import panel_nodes

CONST_ONE = "const1"
POLYNOMIAL = "polynomial"
TRIG = "cos2pi"
REFERENCE = "reference"


@dataclass(frozen=True, eq=False)
class ExactSolution:
    """Ground-truth solution; ``reference`` is set for fine-mesh references."""

    eps: float
    kind: str
    value: object
    derivative: object
    second_derivative: object | None = None
    reference: P1Function | None = None

    def __call__(self, x):
        return self.value(x)


def _layer(x, eps):
    """(exp(x/eps) - 1) / (exp(1/eps) - 1) and its derivative, overflow-free."""
    x = np.asarray(x, dtype=float)
    decay = np.exp((x - 1.0) / eps)
    denom = -math.expm1(-1.0 / eps)
    return decay * -np.expm1(-x / eps) / denom, decay / (eps * denom)


def exact_f1(eps: float, x):
    """Solution for f = 1: x - (e^{x/eps} - 1)/(e^{1/eps} - 1)."""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    x = np.asarray(x, dtype=float)
    y = x - _layer(x, eps)[0]
    return float(y) if y.ndim == 0 else y


def _polynomial_solution(f: Forcing, eps: float, kind: str) -> ExactSolution:
    # u' - eps u'' = p has the particular slope v = sum_k eps^k p^(k)
    p = np.polynomial.Polynomial(f.poly)
    v = sum((eps**k * p.deriv(k) for k in range(1, len(f.poly))), p)
    up = v.integ(lbnd=0.0)
    up1 = float(up(1.0))
    dv = v.deriv()

    def value(x):
        x = np.asarray(x, dtype=float)
        return up(x) - up1 * _layer(x, eps)[0]

    def derivative(x):
        x = np.asarray(x, dtype=float)
        return v(x) - up1 * _layer(x, eps)[1]

    def second(x):
        x = np.asarray(x, dtype=float)
        return dv(x) - up1 * _layer(x, eps)[1] / eps

    return ExactSolution(eps, kind, value, derivative, second)


def _cos2pi_solution(eps: float) -> ExactSolution:
    # particular solution A cos + B sin already satisfies both boundary conditions up to -A
    w = 2.0 * math.pi
    b = 1.0 / (w * (1.0 + (w * eps) ** 2))
    a = w * eps * b

    def value(x):
        x = np.asarray(x, dtype=float)
        return a * (np.cos(w * x) - 1.0) + b * np.sin(w * x)

    def derivative(x):
        x = np.asarray(x, dtype=float)
        return -a * w * np.sin(w * x) + b * w * np.cos(w * x)

    def second(x):
        x = np.asarray(x, dtype=float)
        return -w * w * (a * np.cos(w * x) + b * np.sin(w * x))

    return ExactSolution(eps, TRIG, value, derivative, second)


def exact_solution(forcing, eps: float) -> ExactSolution | None:
    """Closed-form solution for polynomial and cos(2 pi x) forcings, else None."""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    f = get_forcing(forcing)
    if f.poly is not None:
        return _polynomial_solution(f, eps, CONST_ONE if f.poly == (1.0,) else POLYNOMIAL)
    if f is COS2PI or f.name == COS2PI.name:
        return _cos2pi_solution(eps)
    return None


def primitive_w(f, x, quad_order: int = 8, mesh: UniformMesh | None = None):
    """w(x) = int_0^x f, with Gauss panels aligned to the mesh nodes below x."""
    mesh = mesh or UniformMesh(64)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        breaks = np.append(mesh.nodes[mesh.nodes < xi], xi)
        if len(breaks) < 2:
            out[i] = 0.0
            continue
        pts, wts = panel_nodes(breaks, quad_order)
        out[i] = np.sum(wts * np.broadcast_to(np.asarray(f(pts), dtype=float), pts.shape))
    return float(out[0]) if np.ndim(x) == 0 else out


def reference_solution(f, eps: float, n_ref: int, quad_order: int = 12,
                       allow_underresolved: bool = False) -> ExactSolution:
    """Exponential-bubble UPG solution on a fine mesh, used as ground truth.

    Requires n_ref >= 512 and n_ref * eps >= 4 unless ``allow_underresolved``.
    """
    from .assembly import rhs_upg, stencil_exponential
    from .solvers import thomas_solve

    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if not allow_underresolved and (n_ref < 512 or n_ref * eps < 4):
        need = max(512, math.ceil(4.0 / eps))
        raise ParameterError(
            f"reference mesh n_ref={n_ref} is too coarse for eps={eps:g}; "
            f"use n_ref >= {need} or pass allow_underresolved=True")
    if not callable(f):
        f = get_forcing(f)
    mesh = UniformMesh(n_ref)
    spec = make_exponential(eps, mesh.h)
    dual = "exact" if isinstance(f, Forcing) and f.poly is not None else "quadrature"
    rhs = rhs_upg(f, mesh, spec, quad_order, dual=dual)
    sol = thomas_solve(stencil_exponential(spec, mesh.n - 1), rhs)
    ref = P1Function(mesh, sol.coeffs)
    return ExactSolution(eps, REFERENCE, ref, ref.derivative, None, ref)


def reference_mesh_size(n: int, eps: float) -> int:
    """Smallest n * 2^k with n_ref >= 512 and n_ref * eps >= 4."""
    n_ref = n
    while n_ref < 512 or n_ref * eps < 4:
        n_ref *= 2
    return n_ref


def energy_error_f1_underflow(eps: float, h: float) -> float:
    """|u - u_hc|^2 for f = 1 when the computed solution is u_hc(x_j) = x_j."""
    if eps <= 0 or h <= 0:
        raise ParameterError(f"need eps > 0 and h > 0, got eps={eps}, h={h}")
    one_minus_q = -math.expm1(-1.0 / eps)
    q = math.exp(-1.0 / eps)
    return ((1.0 + q) / one_minus_q / (2.0 * eps)
            - 2.0 / h * -math.expm1(-h / eps) / one_minus_q
            + 1.0 / h)


def special_case_nodal_bound(f_sup: float, eps: float, h: float) -> float:
    """||f||_inf (2 - 2 eps/h) h, the nodal deviation bound for the bidiagonal choice of beta."""
    if not h > 2.6 * eps:
        raise ValidityError(f"bound requires h > 2.6*eps = {2.6 * eps:.17g}, got h = {h:.17g}",
                            threshold=2.6 * eps)
    return f_sup * (2.0 - 2.0 * eps / h) * h
