"""Stencils, load vectors and the SPLS block system.

Trial functions are the interior hats phi_1..phi_{n-1}.  The UPG test
functions are phi_j + B_j - B_{j+1}, where B_i is the reference bubble
translated to cell i.  All production integrals of polynomials are exact;
quadrature assembly is kept only as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import gammainc, gammaln

from .bubbles import EXPONENTIAL, BubbleSpec, bubble_derivative, eval_bubble
from .errors import ParameterError
from .forcing import Forcing, get_forcing
from .mesh_fem import UniformMesh
from .quadrature import panel_nodes


@dataclass(frozen=True, eq=False)
class TriDiag:
    """m x m tridiagonal matrix stored as (sub, diag, sup)."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        sub, diag, sup = (np.array(a, dtype=float) for a in (self.sub, self.diag, self.sup))
        m = diag.shape[0] if diag.ndim == 1 else -1
        if m < 1 or sub.shape != (m - 1,) or sup.shape != (m - 1,):
            raise ParameterError(
                f"inconsistent tridiagonal lengths: sub {sub.shape}, diag {diag.shape}, sup {sup.shape}")
        for name, a in (("sub", sub), ("diag", diag), ("sup", sup)):
            object.__setattr__(self, name, a)

    @classmethod
    def constant(cls, lower: float, center: float, upper: float, m: int) -> TriDiag:
        if m < 1:
            raise ParameterError(f"matrix size must be >= 1, got {m}")
        return cls(np.full(m - 1, lower), np.full(m, center), np.full(m - 1, upper))

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[1:] += self.sub * x[:-1]
        y[:-1] += self.sup * x[1:]
        return y

    def row_sums(self) -> np.ndarray:
        s = self.diag.copy()
        s[1:] += self.sub
        s[:-1] += self.sup
        return s


def stencil_upg(eps: float, h: float, b1: float, m: int) -> TriDiag:
    """tridiag(-d/h - 1/2, 2d/h, -d/h + 1/2) with d = eps + h*b1; b1 = 0 is plain Galerkin."""
    if m < 1:
        raise ParameterError(f"matrix size must be >= 1, got {m}")
    r = (eps + h * b1) / h
    return TriDiag.constant(-r - 0.5, 2.0 * r, -r + 0.5, m)


def stencil_exponential(spec: BubbleSpec, m: int) -> TriDiag:
    """tridiag(-l0, 1/g0, -u0), built from g0 directly."""
    if spec.kind != EXPONENTIAL:
        raise ParameterError("stencil_exponential needs an exponential bubble")
    return TriDiag.constant(-spec.l0, 1.0 / spec.g0, -spec.u0, m)


def stencil_for_bubble(spec: BubbleSpec | None, eps: float, mesh: UniformMesh) -> TriDiag:
    m = mesh.n - 1
    if spec is None:
        return stencil_upg(eps, mesh.h, 0.0, m)
    if spec.kind == EXPONENTIAL:
        return stencil_exponential(spec, m)
    return stencil_upg(eps, mesh.h, spec.b1, m)


# --- load vectors -----------------------------------------------------------

def _shifted_coeffs(poly, left):
    """Coefficients a_k(cell) of p(left + s) in powers of s, shape (ncells, deg+1)."""
    c = np.asarray(poly, dtype=float)
    deg = len(c) - 1
    out = np.zeros((len(left), deg + 1))
    for j in range(deg + 1):
        for k in range(j + 1):
            out[:, k] += c[j] * comb(j, k) * left ** (j - k)
    return out


def _exact_cell_moments(f: Forcing, mesh: UniformMesh, spec: BubbleSpec | None):
    """Exact integrals of f*(s/h), f*(1 - s/h) and f*B over every cell (f polynomial)."""
    h = mesh.h
    a = _shifted_coeffs(f.poly, mesh.nodes[:-1])
    k = np.arange(a.shape[1])
    if f.is_constant:
        rise = fall = np.full(mesh.n, f.poly[0] * (0.5 * h))
    else:
        mono = h ** (k + 1) / (k + 1)              # int s^k
        mono_up = h ** (k + 1) / (k + 2)           # int s^k * s/h
        rise = a @ mono_up
        fall = a @ (mono - mono_up)
    if spec is None:
        return rise, fall, np.zeros(mesh.n)
    if spec.kind == EXPONENTIAL:
        eps = spec.param
        # int_0^h s^k e^{-s/eps} ds = eps^{k+1} k! P(k+1, h/eps)
        expo = np.exp((k + 1) * np.log(eps) + gammaln(k + 1)) * gammainc(k + 1, h / eps)
        mono = h ** (k + 1) / (k + 1)
        weights = spec.l0 * (mono - expo) - h ** (k + 1) / (k + 2)
    else:
        beta = spec.param
        # int_0^h s^k 4 beta/h^2 s (h - s) ds
        weights = 4.0 * beta / h**2 * (h ** (k + 3) / (k + 2) - h ** (k + 3) / (k + 3))
    bub = a @ weights
    if f.is_constant:
        bub = np.full(mesh.n, bub[0])
    return rise, fall, bub


def _quadrature_cell_moments(f, mesh: UniformMesh, spec: BubbleSpec | None, quad_order: int, panels: int = 1):
    h = mesh.h
    local = np.linspace(0.0, h, panels + 1)
    s, w = panel_nodes(local, quad_order)
    s, w = s.ravel(), w.ravel()
    x = mesh.nodes[:-1, None] + s
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(fx)):
        raise ParameterError("forcing is not finite at a quadrature point")
    rise = fx @ (w * s / h)
    fall = fx @ (w * (1.0 - s / h))
    if spec is None:
        bub = np.zeros(mesh.n)
    else:
        bub = fx @ (w * eval_bubble(spec, s))
    return rise, fall, bub


def cell_moments(f, mesh: UniformMesh, spec: BubbleSpec | None = None, quad_order: int = 8,
                 dual: str = "quadrature", panels: int = 1):
    """Per-cell integrals (f, rising hat), (f, falling hat), (f, bubble).

    ``dual="exact"`` requires a polynomial forcing.
    """
    if dual == "exact":
        f = get_forcing(f)
        if f.poly is None:
            raise ParameterError(f"exact load vector needs a polynomial forcing, got {f.name!r}")
        return _exact_cell_moments(f, mesh, spec)
    if dual != "quadrature":
        raise ParameterError(f"dual must be 'exact' or 'quadrature', got {dual!r}")
    return _quadrature_cell_moments(f, mesh, spec, quad_order, panels)


def rhs_standard(f, mesh: UniformMesh, quad_order: int = 8, dual: str = "quadrature") -> np.ndarray:
    """(f, phi_j) for j = 1..n-1."""
    if isinstance(f, Forcing) and f.is_constant:
        return np.full(mesh.n - 1, f.poly[0] * mesh.h)
    rise, fall, _ = cell_moments(f, mesh, None, quad_order, dual)
    return rise[:-1] + fall[1:]


def rhs_upg(f, mesh: UniformMesh, spec: BubbleSpec, quad_order: int = 8, dual: str = "quadrature",
            panels: int = 1) -> np.ndarray:
    """(f, phi_j) + (f, B_j) - (f, B_{j+1}) for j = 1..n-1."""
    rise, fall, bub = cell_moments(f, mesh, spec, quad_order, dual, panels)
    return rise[:-1] + bub[:-1] + fall[1:] - bub[1:]


# --- SPLS -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SplsSystem:
    """Blocks of [[A, B], [B^T, 0]] [w; u] = [F; 0].

    Test-space ordering: the n-1 hats first, then the n cell bubbles
    B_i = 4 phi_{i-1} phi_i.
    """

    mesh: UniformMesh
    eps: float
    A: np.ndarray
    B: np.ndarray
    F: np.ndarray

    def full_matrix(self) -> np.ndarray:
        m = self.B.shape[1]
        return np.block([[self.A, self.B], [self.B.T, np.zeros((m, m))]])


def assemble_spls(f, mesh: UniformMesh, eps: float, quad_order: int = 8, dual: str = "quadrature") -> SplsSystem:
    """P1 trial / P2 test saddle point system; eps = 0 gives the reduced problem."""
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    n, h = mesh.n, mesh.h
    m = n - 1
    size = 2 * n - 1
    A = np.zeros((size, size))
    hat = (2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)) / h
    A[:m, :m] = hat
    A[m:, m:] = np.eye(n) * (16.0 / (3.0 * h))

    B = np.zeros((size, m))
    # hat rows: eps * stiffness + convection C = tridiag(-1/2, 0, 1/2)
    B[:m, :m] = eps * hat + 0.5 * (np.eye(m, k=1) - np.eye(m, k=-1))
    # bubble rows: (q', B) = slope of q on the bubble's cell times 2h/3;
    # on 0-based cell i the hat in column i-1 falls and the one in column i rises
    for i in range(n):
        if i >= 1:
            B[m + i, i - 1] = -2.0 / 3.0
        if i <= m - 1:
            B[m + i, i] = 2.0 / 3.0

    rise, fall, _ = cell_moments(f, mesh, None, quad_order, dual)
    if dual == "exact":
        ff = get_forcing(f)
        a = _shifted_coeffs(ff.poly, mesh.nodes[:-1])
        k = np.arange(a.shape[1])
        bub = a @ (4.0 / h**2 * (h ** (k + 3) / (k + 2) - h ** (k + 3) / (k + 3)))
    else:
        s, w = panel_nodes(np.array([0.0, h]), max(quad_order, 2))
        s, w = s.ravel(), w.ravel()
        x = mesh.nodes[:-1, None] + s
        fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
        bub = fx @ (w * 4.0 * (s / h) * (1.0 - s / h))
    F = np.concatenate((rise[:-1] + fall[1:], bub))
    return SplsSystem(mesh, eps, A, B, F)


# --- quadrature oracle ------------------------------------------------------

def stencil_from_quadrature(eps: float, mesh: UniformMesh, spec: BubbleSpec | None,
                            quad_order: int = 16, panels: int = 8) -> TriDiag:
    """Assemble b(g_j, phi_k) = eps (phi_k', g_j') + (phi_k', g_j) numerically.

    ``spec=None`` uses the bare hats as test functions (standard Galerkin).
    """
    if quad_order < 8:
        raise ParameterError(f"oracle assembly needs quad_order >= 8, got {quad_order}")
    h = mesh.h
    s, w = panel_nodes(np.linspace(0.0, h, panels + 1), quad_order)
    s, w = s.ravel(), w.ravel()
    if spec is None:
        bub, dbub = np.zeros_like(s), np.zeros_like(s)
    else:
        bub, dbub = eval_bubble(spec, s), bubble_derivative(spec, s)
    # local test functions on a cell: rising hat + B, falling hat - B
    tests = {
        "rise": (np.sum(w * (s / h + bub)), np.sum(w * (1.0 / h + dbub))),
        "fall": (np.sum(w * (1.0 - s / h - bub)), np.sum(w * (-1.0 / h - dbub))),
    }
    slopes = {"rise": 1.0 / h, "fall": -1.0 / h}
    local = {(t, q): eps * slopes[q] * tests[t][1] + slopes[q] * tests[t][0]
             for t in tests for q in slopes}

    m = mesh.n - 1
    dense = np.zeros((m, m))
    offset = {"rise": 1, "fall": 0}  # on cell c the rising hat is phi_{c+1}
    for c in range(mesh.n):
        for (t, q), value in local.items():
            j, k = c + offset[t], c + offset[q]
            if 1 <= j <= m and 1 <= k <= m:
                dense[j - 1, k - 1] += value
    return TriDiag(np.diag(dense, -1), np.diag(dense).copy(), np.diag(dense, 1))
