"""Uniform meshes of [0, 1] and the P1 / P2 finite element functions on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, EvaluationError, ParameterError
from .quadrature import integrate_panels


@dataclass(frozen=True)
class UniformMesh:
    """n equal cells on [0, 1]; node j sits at x_j = j/n."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"mesh needs an integer cell count n >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.arange(self.n + 1) / self.n
        x.flags.writeable = False
        return x

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    def cell_of(self, x) -> np.ndarray:
        """0-based index of the cell containing each x (right end goes to the last cell)."""
        return np.minimum(np.floor(np.asarray(x) * self.n).astype(int), self.n - 1)


def _check_domain(x, upper=1.0):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > upper) or np.any(np.isnan(x)):
        raise DomainError(f"evaluation point outside [0, {upper:g}]")
    return x


@dataclass(frozen=True, eq=False)
class P1Function:
    """Continuous piecewise linear function vanishing at x = 0 and x = 1.

    Only the n-1 interior nodal values are stored.
    """

    mesh: UniformMesh
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (self.mesh.n - 1,):
            raise ParameterError(
                f"P1Function on n={self.mesh.n} needs {self.mesh.n - 1} coefficients, got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, mesh: UniformMesh) -> P1Function:
        return cls(mesh, np.zeros(mesh.n - 1))

    @classmethod
    def hat(cls, mesh: UniformMesh, j: int) -> P1Function:
        c = np.zeros(mesh.n - 1)
        c[j - 1] = 1.0
        return cls(mesh, c)

    @property
    def values(self) -> np.ndarray:
        """Nodal values including the two boundary zeros."""
        return np.concatenate(([0.0], self.coeffs, [0.0]))

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / self.mesh.h

    def __call__(self, x):
        return eval_p1(self, x)

    def derivative(self, x):
        x = _check_domain(x)
        return self.slopes[self.mesh.cell_of(x)]

    def mean(self) -> float:
        return self.mesh.h * float(np.sum(self.coeffs))

    def __sub__(self, other: P1Function) -> P1Function:
        if other.mesh != self.mesh:
            raise ParameterError("P1 functions live on different meshes")
        return P1Function(self.mesh, self.coeffs - other.coeffs)


def eval_p1(u: P1Function, x):
    x = _check_domain(x)
    y = np.interp(x, u.mesh.nodes, u.values)
    return float(y) if y.ndim == 0 else y


def interpolate(f, mesh: UniformMesh) -> P1Function:
    """Nodal interpolant of f in the P1 trial space (boundary values of f are dropped)."""
    vals = np.asarray(f(mesh.interior), dtype=float)
    vals = np.broadcast_to(vals, mesh.interior.shape)
    if not np.all(np.isfinite(vals)):
        j = int(np.flatnonzero(~np.isfinite(vals))[0]) + 1
        raise EvaluationError(f"interpolated function is not finite at node x_{j} = {mesh.nodes[j]!r}")
    return P1Function(mesh, vals)


def h1_seminorm(u: P1Function) -> float:
    return float(np.sqrt(np.sum(np.diff(u.values) ** 2) / u.mesh.h))


def l2_norm_sq(u: P1Function) -> float:
    a, b = u.values[:-1], u.values[1:]
    return float(u.mesh.h / 3.0 * np.sum(a * a + a * b + b * b))


def l2_norm(u: P1Function) -> float:
    return float(np.sqrt(l2_norm_sq(u)))


def cell_averages(f, mesh: UniformMesh, quad_order: int = 8) -> np.ndarray:
    """(1/h) times the integral of f over each cell.

    P1 inputs use the exact value (left + right) / 2.
    """
    if isinstance(f, P1Function):
        if f.mesh != mesh:
            raise ParameterError("P1 function lives on a different mesh")
        v = f.values
        return 0.5 * (v[:-1] + v[1:])
    if quad_order < 1:
        raise ParameterError(f"quad_order must be >= 1, got {quad_order}")
    return integrate_panels(f, mesh.nodes, quad_order) / mesh.h


@dataclass(frozen=True, eq=False)
class P2Function:
    """Continuous piecewise quadratic function split as hats plus cell bubbles.

    Bubble i (1-based) is B_i = 4 phi_{i-1} phi_i, i.e. 4 t (1 - t) in local
    coordinate t on cell i.
    """

    mesh: UniformMesh
    linear_coeffs: np.ndarray
    bubble_coeffs: np.ndarray

    def __post_init__(self):
        lin = np.array(self.linear_coeffs, dtype=float)
        bub = np.array(self.bubble_coeffs, dtype=float)
        n = self.mesh.n
        if lin.shape != (n - 1,) or bub.shape != (n,):
            raise ParameterError(
                f"P2Function on n={n} needs {n - 1} linear and {n} bubble coefficients")
        object.__setattr__(self, "linear_coeffs", lin)
        object.__setattr__(self, "bubble_coeffs", bub)

    @property
    def dimension(self) -> int:
        return 2 * self.mesh.n - 1

    @property
    def linear_part(self) -> P1Function:
        return P1Function(self.mesh, self.linear_coeffs)

    def _local(self, x):
        x = _check_domain(x)
        cell = self.mesh.cell_of(x)
        t = x * self.mesh.n - cell
        return x, cell, t

    def __call__(self, x):
        x, cell, t = self._local(x)
        y = eval_p1(self.linear_part, x) + self.bubble_coeffs[cell] * 4.0 * t * (1.0 - t)
        return float(y) if np.ndim(y) == 0 else y

    def derivative(self, x):
        x, cell, t = self._local(x)
        lin = self.linear_part.slopes[cell]
        return lin + self.bubble_coeffs[cell] * 4.0 * (1.0 - 2.0 * t) / self.mesh.h

    def h1_seminorm(self) -> float:
        # hats and cell bubbles are a0-orthogonal cell by cell
        lin = h1_seminorm(self.linear_part) ** 2
        return float(np.sqrt(lin + 16.0 / (3.0 * self.mesh.h) * np.sum(self.bubble_coeffs**2)))
