"""Solve, measure and compare the four discretizations.

Every solve produces a :class:`RunRecord` holding the discrete solution's
errors in the H1 seminorm, L2, the continuous optimal norm and the method's
own discrete optimal norm, together with oscillation and stability
diagnostics.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .assembly import (
    TriDiag,
    assemble_spls,
    rhs_standard,
    rhs_upg,
    stencil_for_bubble,
    stencil_upg,
)
from .bubbles import check_h_restriction, make_exponential
from .errors import ParameterError
from .forcing import CONST1, Forcing, get_forcing
from .mesh_fem import P1Function, UniformMesh, interpolate
from .methods import LINEAR, SPECIAL, SPLS, UPG_EXP, UPG_QUAD, Method
from .norms import NormParts, continuous_star_norm, method_star_norm, norm_parts
from .quadrature import graded_integrate, layer_graded_integrate
from .solvers import forward_solve_bidiagonal, spls_solve, thomas_solve

ROUNDOFF = 1e-14

CSV_COLUMNS = (
    "method", "epsilon", "n", "h", "beta", "forcing",
    "err_h1", "err_l2", "err_star", "err_star_h", "quasi_opt_ratio",
    "sign_changes", "total_variation", "g0_saturated", "restriction_ok", "residual_inf",
    "max_nodal_error",
)


@dataclass(frozen=True)
class SolveOptions:
    quad_order: int = 8
    dual: str = "auto"  # "exact" for polynomial forcings, else quadrature


@dataclass(eq=False)
class RunRecord:
    method: str
    epsilon: float
    n: int
    h: float
    beta: float | None
    forcing: str
    err_h1: float
    err_l2: float
    err_star: float
    err_star_h: float
    quasi_opt_ratio: float
    sign_changes: int
    total_variation: float
    g0_saturated: bool | None
    restriction_ok: bool | None
    residual_inf: float
    max_nodal_error: float
    interpolant_exact: bool = False
    solution: P1Function | None = field(default=None, repr=False)
    exact: object = field(default=None, repr=False)

    @property
    def errors(self) -> dict[str, float]:
        return {"h1_seminorm": self.err_h1, "l2": self.err_l2,
                "star_continuous": self.err_star, "star_discrete_method": self.err_star_h}

    @property
    def oscillation(self) -> tuple[int, float]:
        return self.sign_changes, self.total_variation

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


# --- diagnostics -------------------------------------------------------------

def _alternations(u: P1Function) -> int:
    diffs = np.diff(u.values)
    signs = np.sign(diffs[diffs != 0.0])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def oscillation_diagnostic(u: P1Function) -> tuple[int, float]:
    """(sign alternations of successive nodal differences, total variation).

    Boundary zeros are included, so a rise-then-fall profile already counts
    one alternation.
    """
    return _alternations(u), float(np.sum(np.abs(np.diff(u.values))))


# --- discrete solves -----------------------------------------------------------

def _dual_mode(f: Forcing, options: SolveOptions) -> str:
    if options.dual == "auto":
        return "exact" if f.poly is not None else "quadrature"
    return options.dual


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    u: P1Function
    residual_inf: float
    rhs_max: float
    matrix: TriDiag | None = None
    spec: object = None
    w: object = None


def discrete_solve(method: Method, eps: float, mesh: UniformMesh, forcing, options: SolveOptions = SolveOptions()):
    f = get_forcing(forcing)
    dual = _dual_mode(f, options)
    q = options.quad_order
    if method.kind == SPLS:
        system = assemble_spls(f, mesh, eps, q, dual)
        sol = spls_solve(system)
        return DiscreteSolution(sol.u, sol.residual_inf, float(np.max(np.abs(system.F))), w=sol.w)
    spec = method.bubble(eps, mesh.h)
    if method.kind == LINEAR:
        matrix = stencil_upg(eps, mesh.h, 0.0, mesh.n - 1)
        rhs = rhs_standard(f, mesh, q, dual)
    else:
        matrix = stencil_for_bubble(spec, eps, mesh)
        rhs = rhs_upg(f, mesh, spec, q, dual)
    if method.kind == UPG_QUAD and method.beta == SPECIAL:
        sol = forward_solve_bidiagonal(matrix, rhs)
    else:
        sol = thomas_solve(matrix, rhs)
    return DiscreteSolution(P1Function(mesh, sol.coeffs), sol.residual_inf,
                            float(np.max(np.abs(rhs), initial=0.0)), matrix, spec)


# --- error measurement ---------------------------------------------------------

def ground_truth(forcing, eps: float, n: int):
    """Closed-form solution when available, else a nested fine-mesh reference."""
    f = get_forcing(forcing)
    exact = analytic.exact_solution(f, eps)
    if exact is not None:
        return exact
    return analytic.reference_solution(f, eps, analytic.reference_mesh_size(n, eps))


def error_parts(exact, uh: P1Function, eps: float, quad_order: int = 8) -> NormParts:
    """Integrals of e = u - u_h needed by every norm, resolved through the layer."""
    mesh = uh.mesh
    ref = getattr(exact, "reference", None)
    if ref is not None and ref.mesh.n % mesh.n == 0:
        fine = ref.mesh
        e = ref - interpolate(uh, fine)
        p = norm_parts(e, fine)
        coarse = p.cell_avgs.reshape(mesh.n, -1).mean(axis=1)
        return NormParts(p.h1_sq, p.l2_sq, p.mean, coarse)

    def e(x):
        return np.asarray(exact.value(x), dtype=float) - np.interp(x, mesh.nodes, uh.values)

    def de(x):
        return np.asarray(exact.derivative(x), dtype=float) - uh.derivative(x)

    nodes = mesh.nodes
    # roundoff floors: e is a difference of O(scale) quantities
    scale = 1.0 + float(np.max(np.abs(uh.values)))
    tol = ROUNDOFF * scale
    h1_sq = layer_graded_integrate(lambda x: de(x) ** 2, eps, quad_order, nodes,
                                   atol=(tol * (1.0 + 1.0 / eps)) ** 2)
    l2_sq = layer_graded_integrate(lambda x: e(x) ** 2, eps, quad_order, nodes, atol=tol**2)
    cells = np.array([graded_integrate(e, nodes[i], nodes[i + 1], eps, quad_order, atol=tol * mesh.h)
                      for i in range(mesh.n)])
    return NormParts(h1_sq, l2_sq, float(np.sum(cells)), cells / mesh.h)


def _beta_for_record(method: Method, eps: float, h: float):
    if method.kind != UPG_QUAD:
        return None
    return method.beta_value(eps, h)


def solve_method(method: Method, eps: float, n: int, forcing=CONST1,
                 options: SolveOptions = SolveOptions()) -> RunRecord:
    """Solve with one method and measure everything a RunRecord carries."""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    mesh = UniformMesh(n)
    f = get_forcing(forcing)
    disc = discrete_solve(method, eps, mesh, f, options)
    exact = ground_truth(f, eps, n)
    uh = disc.u
    u_interp = interpolate(exact, mesh)

    parts = error_parts(exact, uh, eps, options.quad_order)
    parts_i = error_parts(exact, u_interp, eps, options.quad_order)
    err_star_h = method_star_norm(parts, mesh, method, eps)
    interp_star_h = method_star_norm(parts_i, mesh, method, eps)
    if interp_star_h == 0.0:
        ratio, degenerate = 1.0, True
    else:
        ratio, degenerate = err_star_h / interp_star_h, False

    raw, tv = oscillation_diagnostic(uh)
    spurious = max(0, raw - _alternations(u_interp))

    spec = disc.spec
    restriction = None
    if spec is not None:
        restriction = check_h_restriction(eps, mesh.h, spec.b1)
    return RunRecord(
        method=method.kind, epsilon=eps, n=n, h=mesh.h,
        beta=_beta_for_record(method, eps, mesh.h), forcing=f.name,
        err_h1=math.sqrt(parts.h1_sq), err_l2=math.sqrt(parts.l2_sq),
        err_star=continuous_star_norm(parts, eps, mesh), err_star_h=err_star_h,
        quasi_opt_ratio=ratio, sign_changes=spurious, total_variation=tv,
        g0_saturated=spec.g0_saturated if method.kind == UPG_EXP else None,
        restriction_ok=restriction, residual_inf=disc.residual_inf,
        max_nodal_error=float(np.max(np.abs(uh.coeffs - u_interp.coeffs))),
        interpolant_exact=degenerate, solution=uh, exact=exact,
    )


# --- studies ---------------------------------------------------------------------

NORM_FIELDS = {"h1": "err_h1", "l2": "err_l2", "star": "err_star", "star_h": "err_star_h"}


@dataclass(eq=False)
class ConvergenceResult:
    records: list[RunRecord]
    rates: dict[str, float | None]
    aborted: str | None = None


def fitted_rate(hs, errors) -> float | None:
    """Least-squares slope of log(error) against log(h); None if any error is zero."""
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0.0):
        return None
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


def convergence_study(method: Method, eps: float, n_list, forcing=CONST1, norms=("h1",),
                      options: SolveOptions = SolveOptions()) -> ConvergenceResult:
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ParameterError("n_list must be strictly increasing with at least 3 entries")
    if isinstance(norms, str):
        norms = (norms,)
    for name in norms:
        if name not in NORM_FIELDS:
            raise ParameterError(f"unknown norm {name!r}; choose from {', '.join(NORM_FIELDS)}")
    records = []
    for n in n_list:
        try:
            records.append(solve_method(method, eps, n, forcing, options))
        except (ValueError, ArithmeticError) as exc:
            return ConvergenceResult(records, {}, aborted=f"n={n}: {exc}")
    hs = [r.h for r in records]
    rates = {name: fitted_rate(hs, [getattr(r, NORM_FIELDS[name]) for r in records]) for name in norms}
    return ConvergenceResult(records, rates)


@dataclass(frozen=True)
class QuasiOptimality:
    ratio: float
    bound: float
    interpolant_exact: bool


def quasi_optimality_probe(method: Method, eps: float, n: int, forcing=CONST1,
                           options: SolveOptions = SolveOptions()) -> QuasiOptimality:
    """Error over interpolation error, both in the method's own optimal norm."""
    rec = solve_method(method, eps, n, forcing, options)
    return QuasiOptimality(rec.quasi_opt_ratio, method.quasi_optimality_constant(eps, 1.0 / n),
                           rec.interpolant_exact)


def underflow_probe(eps_list, h: float) -> list[dict]:
    """Exponential-bubble stencil and f = 1 solution as h/eps crosses the saturation point."""
    n = round(1.0 / h)
    if abs(n * h - 1.0) > 1e-12:
        raise ParameterError(f"h must be 1/n for an integer n, got {h}")
    mesh = UniformMesh(n)
    rows = []
    for eps in eps_list:
        spec = make_exponential(eps, mesh.h)
        matrix = stencil_for_bubble(spec, eps, mesh)
        rhs = rhs_upg(CONST1, mesh, spec, dual="exact")
        u = thomas_solve(matrix, rhs).coeffs
        exact = analytic.exact_f1(eps, mesh.interior)
        rows.append({
            "epsilon": eps, "h": mesh.h, "h_over_eps": mesh.h / eps,
            "g0": spec.g0, "g0_saturated": spec.g0_saturated,
            "sub": float(matrix.sub[0]) if mesh.n > 2 else None,
            "diag": float(matrix.diag[0]),
            "sup": float(matrix.sup[0]) if mesh.n > 2 else None,
            "max_dev_from_nodes": float(np.max(np.abs(u - mesh.interior))),
            "max_nodal_error": float(np.max(np.abs(u - exact))),
        })
    return rows


def compare_methods(eps: float, n: int, forcing=CONST1, beta=1.0,
                    options: SolveOptions = SolveOptions(), workers: int | None = None) -> list[RunRecord]:
    methods = [Method.linear(), Method.spls(), Method.upg_quad(beta), Method.upg_exp()]
    return run_grid([(m, eps, n, forcing, options) for m in methods], workers)


def run_grid(tasks, workers: int | None = None) -> list[RunRecord]:
    """Run solve_method over (method, eps, n, forcing, options) tuples, keeping input order."""
    tasks = list(tasks)
    if workers is None or workers <= 1:
        return [solve_method(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: solve_method(*t), tasks))
