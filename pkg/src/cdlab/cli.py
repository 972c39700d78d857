"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 validity error (a method's
precondition fails), 4 internal numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import experiments
from .errors import EvaluationError, ParameterError, ValidityError
from .experiments import CSV_COLUMNS, SolveOptions
from .forcing import get_forcing
from .methods import SPECIAL, Method

EXIT_OK, EXIT_USAGE, EXIT_VALIDITY, EXIT_NUMERICAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _beta(text):
    if text == SPECIAL:
        return SPECIAL
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"beta must be a number or 'special', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cdlab", description="1D convection-diffusion discretization laboratory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, method=True, n=True):
        if method:
            p.add_argument("--method", required=True, help="linear | spls | upg-quad | upg-exp")
            p.add_argument("--beta", type=_beta, default=None, help="quadratic bubble beta or 'special'")
        p.add_argument("--epsilon", type=float, required=True)
        if n:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--forcing", default="const1",
                       help="const1 | cos2pi | linear | zero | comma-separated polynomial coefficients")
        p.add_argument("--quad-order", type=int, default=8)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None)

    common(sub.add_parser("solve", help="solve once with one method"))
    p = sub.add_parser("convergence", help="mesh refinement study")
    common(p, n=False)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--norm", action="append", choices=sorted(experiments.NORM_FIELDS), default=None)
    p = sub.add_parser("compare", help="all four methods on one problem")
    common(p, method=False)
    p.add_argument("--beta", type=_beta, default=1.0)

    p = sub.add_parser("underflow", help="exponential bubble stencil across h/eps")
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--epsilon-list", type=_float_list, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)

    p = sub.add_parser("norms-check", help="randomized checks of the norm identities")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)
    return parser


def _method(args) -> Method:
    beta = args.beta
    kind = args.method.replace("-", "_")
    if kind != "upg_quad":
        if beta is not None:
            raise UsageError(f"--beta applies only to --method upg-quad, not {args.method}")
        return Method(kind)
    return Method(kind, 1.0 if beta is None else beta)


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _write_json(config, rows, extra=None) -> str:
    doc = {"config": config, "records": [{k: _jsonable(v) for k, v in r.items()} for r in rows]}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def _emit(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    return {k: _jsonable(v) for k, v in vars(args).items() if k not in ("output",)}


def _records_out(args, records, extra=None):
    rows = [r.to_dict() for r in records]
    if args.format == "json":
        _emit(args, _write_json(_config(args), rows, extra))
    else:
        _emit(args, _write_csv(rows, CSV_COLUMNS))


def _options(args) -> SolveOptions:
    return SolveOptions(quad_order=args.quad_order)


def cmd_solve(args):
    rec = experiments.solve_method(_method(args), args.epsilon, args.n, get_forcing(args.forcing), _options(args))
    _records_out(args, [rec])


def cmd_convergence(args):
    norms = tuple(args.norm or ("h1",))
    result = experiments.convergence_study(_method(args), args.epsilon, args.n_list,
                                           get_forcing(args.forcing), norms, _options(args))
    _records_out(args, result.records, {"rates": result.rates, "aborted": result.aborted})
    if result.aborted:
        raise ArithmeticError(f"convergence study aborted at {result.aborted}")


def cmd_compare(args):
    recs = experiments.compare_methods(args.epsilon, args.n, get_forcing(args.forcing), args.beta, _options(args))
    _records_out(args, recs)


UNDERFLOW_COLUMNS = ("epsilon", "h", "h_over_eps", "g0", "g0_saturated", "sub", "diag", "sup",
                     "max_dev_from_nodes", "max_nodal_error")


def cmd_underflow(args):
    eps_list = args.epsilon_list or [args.h / r for r in (2.0, 10.0, 30.0, 36.04, 36.05, 37.0, 38.0, 40.0, 1000.0)]
    rows = experiments.underflow_probe(eps_list, args.h)
    if args.format == "json":
        _emit(args, _write_json(_config(args), rows))
    else:
        _emit(args, _write_csv(rows, UNDERFLOW_COLUMNS))


NORMS_CHECK_COLUMNS = ("check", "samples", "max_violation", "passed")


def norms_check(samples: int = 500, seed: int = 0) -> list[dict]:
    """Randomized checks of the sandwich inequality, the |Tu| identity and the
    explicit discrete seminorm against the projection oracle."""
    from .mesh_fem import P1Function, UniformMesh, h1_seminorm, l2_norm_sq
    from .norms import discrete_star_seminorm_sq, projection_oracle, t_norm_sq, t_norm_sq_direct

    rng = np.random.default_rng(seed)
    worst = {"sandwich": 0.0, "t_identity": 0.0, "projection_oracle": 0.0}
    for _ in range(samples):
        n = int(rng.integers(2, 65))
        eps = float(10.0 ** rng.uniform(-4, 0))
        mesh = UniformMesh(n)
        u = P1Function(mesh, rng.normal(size=n - 1))
        h1_sq, l2_sq = h1_seminorm(u) ** 2, l2_norm_sq(u)
        semi = discrete_star_seminorm_sq(u, mesh)
        star_sq = eps**2 * h1_sq + l2_sq - u.mean() ** 2
        lower = star_sq - (eps**2 + mesh.h**2 / math.pi**2) * h1_sq
        worst["sandwich"] = max(worst["sandwich"], lower - semi - 1e-10, semi - l2_sq - 1e-10)
        direct, formula = t_norm_sq_direct(u, mesh), t_norm_sq(u, mesh)
        # both sides can vanish exactly, so scale by ||u||^2 rather than by either side
        scale = max(l2_sq, 1e-300)
        worst["t_identity"] = max(worst["t_identity"], abs(direct - formula) / scale - 1e-11)
        worst["projection_oracle"] = max(worst["projection_oracle"],
                                         abs(projection_oracle(u) - semi) / scale - 1e-10)
    return [{"check": k, "samples": samples, "max_violation": v, "passed": v <= 0.0} for k, v in worst.items()]


def cmd_norms_check(args):
    rows = norms_check(args.samples, args.seed)
    if args.format == "json":
        _emit(args, _write_json(_config(args), rows))
    else:
        _emit(args, _write_csv(rows, NORMS_CHECK_COLUMNS))
    if not all(r["passed"] for r in rows):
        raise ArithmeticError("norm identity check failed")


COMMANDS = {"solve": cmd_solve, "convergence": cmd_convergence, "compare": cmd_compare,
            "underflow": cmd_underflow, "norms-check": cmd_norms_check}


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cdlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidityError as exc:
        print(f"cdlab: validity error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except (ParameterError, EvaluationError) as exc:
        print(f"cdlab: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"cdlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"cdlab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(run_cli())
