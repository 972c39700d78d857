"""Optimal trial norms for -eps u'' + u' = f on [0, 1].

The convection term is represented through ``Tu = x*mean(u) - int_0^x u``,
which gives ``|Tu|^2 = ||u||^2 - mean(u)^2``.  The discrete seminorm
``|u|_{*,h} = |P_h T u|`` only needs cell averages of ``u``.

Functions here accept a :class:`P1Function` (evaluated exactly), a vectorized
callable (integrated with mesh-aligned Gauss panels; H1 quantities need a
``derivative`` attribute or an explicit ``du``), or precomputed
:class:`NormParts`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .mesh_fem import P1Function, UniformMesh, cell_averages, h1_seminorm, l2_norm_sq
from .methods import LINEAR, SPLS, Method
from .quadrature import gauss_rule, integrate_panels

ROUNDOFF_GUARD = 1e-13


@dataclass(frozen=True)
class NormParts:
    """The integrals every norm in this module is built from."""

    h1_sq: float | None  # int (u')^2, None when no derivative is available
    l2_sq: float
    mean: float
    cell_avgs: np.ndarray


def _clamp(value: float, scale: float) -> float:
    if value >= 0.0:
        return value
    if value >= -ROUNDOFF_GUARD * max(1.0, scale):
        return 0.0
    raise ArithmeticError(f"squared seminorm is negative beyond roundoff: {value!r}")


def norm_parts(u, mesh: UniformMesh, quad_order: int = 8, du=None) -> NormParts:
    if isinstance(u, NormParts):
        return u
    if isinstance(u, P1Function):
        return NormParts(h1_seminorm(u) ** 2, l2_norm_sq(u), u.mean(), cell_averages(u, mesh))
    du = du if du is not None else getattr(u, "derivative", None)
    cell_int = integrate_panels(u, mesh.nodes, quad_order)
    l2_sq = float(np.sum(integrate_panels(lambda x: np.asarray(u(x)) ** 2, mesh.nodes, quad_order)))
    h1_sq = None
    if du is not None:
        h1_sq = float(np.sum(integrate_panels(lambda x: np.asarray(du(x)) ** 2, mesh.nodes, quad_order)))
    return NormParts(h1_sq, l2_sq, float(np.sum(cell_int)), cell_int / mesh.h)


def _h1_sq(parts: NormParts) -> float:
    if parts.h1_sq is None:
        raise ParameterError("this norm needs the derivative of u (pass du= or a P1Function)")
    return parts.h1_sq


@dataclass(frozen=True)
class TRepresentation:
    """Tu(x) = x * mean - primitive(x), with (Tu)'(x) = mean - u(x)."""

    source: object
    mean: float
    primitive: object

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x * self.mean - self.primitive(x)

    def derivative(self, x):
        return self.mean - np.asarray(self.source(x), dtype=float)


def _p1_primitive(u: P1Function):
    mesh, v = u.mesh, u.values
    a, b = v[:-1], v[1:]
    cum = np.concatenate(([0.0], np.cumsum(0.5 * mesh.h * (a + b))))

    def primitive(x):
        x = np.asarray(x, dtype=float)
        i = mesh.cell_of(x)
        s = x - mesh.nodes[i]
        return cum[i] + a[i] * s + (b[i] - a[i]) * s * s / (2.0 * mesh.h)

    return primitive, float(cum[-1])


def _quadrature_primitive(u, mesh: UniformMesh, quad_order: int):
    cell_int = integrate_panels(u, mesh.nodes, quad_order)
    cum = np.concatenate(([0.0], np.cumsum(cell_int)))
    rule = gauss_rule(quad_order)

    def primitive(x):
        x = np.asarray(x, dtype=float)
        i = mesh.cell_of(x)
        left = mesh.nodes[i]
        s = x - left
        pts = left[..., None] + s[..., None] * rule.points
        partial = s * np.sum(rule.weights * np.asarray(u(pts), dtype=float), axis=-1)
        return cum[i] + partial

    return primitive, float(cum[-1])


def t_action(u, mesh: UniformMesh, quad_order: int = 8) -> TRepresentation:
    if isinstance(u, P1Function):
        primitive, total = _p1_primitive(u)
    else:
        primitive, total = _quadrature_primitive(u, mesh, quad_order)
    return TRepresentation(u, total, primitive)


def t_norm_sq(u, mesh: UniformMesh, quad_order: int = 8) -> float:
    """|Tu|^2 = ||u||^2 - mean(u)^2."""
    p = norm_parts(u, mesh, quad_order)
    return _clamp(p.l2_sq - p.mean**2, p.l2_sq)


def t_norm_sq_direct(u, mesh: UniformMesh, quad_order: int = 8) -> float:
    """|Tu|^2 as the H1 seminorm of the T representation, by quadrature of ((Tu)')^2."""
    rep = t_action(u, mesh, quad_order)
    order = max(quad_order, 2)
    return float(np.sum(integrate_panels(lambda x: rep.derivative(x) ** 2, mesh.nodes, order)))


def continuous_star_norm(u, eps: float, mesh: UniformMesh, quad_order: int = 8, du=None) -> float:
    """||u||_* = sqrt(eps^2 |u|^2 + ||u||^2 - mean(u)^2)."""
    p = norm_parts(u, mesh, quad_order, du)
    t_sq = _clamp(p.l2_sq - p.mean**2, p.l2_sq)
    return math.sqrt(eps * eps * _h1_sq(p) + t_sq)


def discrete_star_seminorm_sq(u, mesh: UniformMesh, quad_order: int = 8) -> float:
    """|u|_{*,h}^2 = (1/n) sum_i avg_i^2 - (int_0^1 u)^2 from cell averages."""
    if isinstance(u, NormParts):
        c = u.cell_avgs
    else:
        c = cell_averages(u, mesh, quad_order)
    sq = float(np.mean(c * c))
    mean = float(np.sum(c)) * mesh.h
    return _clamp(sq - mean * mean, sq)


def projection_oracle(u: P1Function, mesh: UniformMesh | None = None) -> float:
    """|P_h T u|^2 by actually solving the P1 elliptic projection of Tu.

    Test oracle for :func:`discrete_star_seminorm_sq`.  The load vector
    a0(Tu, phi_j) = (2 Tu(x_j) - Tu(x_{j-1}) - Tu(x_{j+1})) / h is exact because
    phi_j' is piecewise constant.
    """
    mesh = mesh or u.mesh
    m, h = mesh.n - 1, mesh.h
    tu = t_action(u, mesh)(mesh.nodes)
    rhs = (2.0 * tu[1:-1] - tu[:-2] - tu[2:]) / h
    stiff = (2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)) / h
    p = np.linalg.solve(stiff, rhs)
    return float(p @ stiff @ p)


def method_star_norm(u, mesh: UniformMesh, method: Method, eps: float, quad_order: int = 8, du=None) -> float:
    """Discrete optimal trial norm of a method, for any u with the needed integrals.

    linear: eps^2 |u|^2 + |u|_{*,h}^2
    UPG:    (d^2 |u|^2 + |u|_{*,h}^2) / (1 + b2), d = eps + h*b1
    SPLS:   the continuous optimal norm (P_h T u_h = T u_h for P2 test functions)
    """
    if not isinstance(method, Method):
        raise ParameterError(f"unknown method tag {method!r}")
    p = norm_parts(u, mesh, quad_order, du)
    if method.kind == SPLS:
        return continuous_star_norm(p, eps, mesh)
    semi = discrete_star_seminorm_sq(p, mesh)
    h1_sq = _h1_sq(p)
    if method.kind == LINEAR:
        return math.sqrt(eps * eps * h1_sq + semi)
    spec = method.bubble(eps, mesh.h)
    d = spec.diffusion(eps)
    return math.sqrt((d * d * h1_sq + semi) / spec.one_plus_b2)
