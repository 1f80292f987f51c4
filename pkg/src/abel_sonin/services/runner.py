"""Turns a problem document into library calls and writes the artifacts."""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from rich.console import Console
from rich.table import Table

from .config import Config
from .errors import NumericalError, PreconditionError, SoninConditionError
from .ingest import declared_exponent, ingest_rhs, parse_expression
from .jacobi import Integrand, Interval, WeightParams, basis_for, c_m, delta_n, delta_prime, endpoint_value
from .kernels import cosine_pair, load_kernel_table, riemann_liouville_pair, verify_pair
from .operators import OperatorContext
from .report import build_document, companion_path, write_report, write_samples_csv, write_traces_csv
from .solver import ProblemSpec, manufactured_rhs, solve

logger = logging.getLogger(__name__)

console = Console(highlight=False)
error_console = Console(stderr=True, highlight=False)

SUBCOMMANDS = ("solve", "diagnose", "verify-pair", "basis-info")


@dataclass
class RunConfig:
    subcommand: str
    problem: dict = field(default_factory=dict)
    output_path: str = None
    tolerances: dict = field(default_factory=dict)
    seed: int = None
    base_dir: str = None
    config_path: str = None
    overrides: dict = field(default_factory=dict)

    def resolve(self):
        """Read the config file, if any, and fold CLI overrides into the problem document."""
        problem = dict(self.problem)
        tolerances = {}
        if self.config_path:
            problem.update(load_problem(self.config_path))
            self.base_dir = self.base_dir or str(Path(self.config_path).parent)
        tolerances.update(problem.get("tolerances") or {})
        tolerances.update(self.tolerances or {})
        problem.update({k: v for k, v in (self.overrides or {}).items() if v is not None})
        self.problem, self.tolerances = problem, tolerances
        return self


def load_problem(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as e:
        raise PreconditionError(f"config file {path} not found", field="config") from e
    except json.JSONDecodeError as e:
        raise PreconditionError(f"config is not valid JSON: {e}", field="config") from e


def _number(doc, key, cast=float, default=None):
    value = doc.get(key, default)
    if value is None:
        raise PreconditionError(f"missing field {key!r}", field=key)
    if isinstance(value, bool):
        raise PreconditionError(f"field {key!r} must be a number, got {value!r}", field=key)
    if cast is int and not (isinstance(value, int) or (isinstance(value, float) and value.is_integer())):
        raise PreconditionError(f"field {key!r} must be an integer, got {value!r}", field=key)
    try:
        return cast(value)
    except (TypeError, ValueError) as e:
        raise PreconditionError(f"field {key!r} must be a number, got {value!r}", field=key) from e


def parse_interval(doc):
    bounds = doc.get("interval", [0.0, 1.0])
    if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
        raise PreconditionError("interval must be a pair [a, b]", field="interval", valid_range="[a, b] with a < b")
    try:
        return Interval(float(bounds[0]), float(bounds[1]))
    except (TypeError, ValueError) as e:
        raise PreconditionError(f"interval must be numeric, got {bounds!r}", field="interval") from e


def build_pair(pair_doc, length, defaults, base_dir=None):
    if not isinstance(pair_doc, dict) or "kind" not in pair_doc:
        raise PreconditionError("pair must be an object with a 'kind'", field="pair", valid_range="rl | cosine | table")
    kind = pair_doc["kind"]
    if kind == "rl":
        return riemann_liouville_pair(_number(pair_doc, "alpha"), length, defaults.tol_sonin)
    if kind == "cosine":
        return cosine_pair(_number(pair_doc, "lambda"), length, defaults.tol_sonin)
    if kind == "table":
        kernels = []
        for name in ("rho", "theta"):
            entry = pair_doc.get(name)
            if not isinstance(entry, dict) or not entry.get("path"):
                raise PreconditionError(f"table pair needs {name}.path and {name}.nu", field=f"pair.{name}")
            path = Path(entry["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            kernels.append(load_kernel_table(path, _number(entry, "nu"), name=f"{name}:{path.name}"))
        return verify_pair(kernels[0], kernels[1], length, defaults.tol_sonin,
                           defaults.quad_order, defaults.check_count)
    raise PreconditionError(f"unknown pair kind {kind!r}", field="pair.kind", valid_range="rl | cosine | table")


def _build_rhs(rhs_doc, interval, pair, quad_order, base_dir):
    if isinstance(rhs_doc, dict) and "manufactured" in rhs_doc:
        # f = I^rho phi for phi given as an expression; a check problem with known solution
        phi_doc = rhs_doc["manufactured"]
        if not isinstance(phi_doc, dict) or "expression" not in phi_doc:
            raise PreconditionError("manufactured rhs needs an expression for phi", field="rhs.manufactured")
        exponent = declared_exponent(phi_doc, "rhs.manufactured.exponent")
        phi = Integrand(parse_expression(phi_doc["expression"]), exponent, interval.a)
        return manufactured_rhs(OperatorContext(pair, interval, quad_order), phi)
    return ingest_rhs(rhs_doc, interval, base_dir)


def problem_from_dict(doc, defaults=None, base_dir=None, seed=None):
    """Validate a problem document and build the ProblemSpec plus its normalised echo."""
    defaults = defaults or Config.DEFAULTS
    if not isinstance(doc, dict):
        raise PreconditionError("problem must be a JSON object", field="problem")
    interval = parse_interval(doc)
    params = WeightParams(_number(doc, "beta"), _number(doc, "gamma"))
    params.require_solver_range()
    p = _number(doc, "p", default=2.0)
    if not (math.isfinite(p) and p > 1.0):
        raise PreconditionError(f"p must satisfy p > 1, got {p}", field="p", valid_range="(1, inf)")
    n_modes = _number(doc, "n_modes", int, defaults.n_modes)
    quad_order = _number(doc, "quad_order", int, defaults.quad_order)
    seed = _number(doc, "seed", int, 0) if seed is None else int(seed)
    if "rhs" not in doc:
        raise PreconditionError("missing field 'rhs'", field="rhs")

    pair = build_pair(doc.get("pair"), interval.length, defaults, base_dir)
    if not pair.verified:
        raise SoninConditionError(
            f"pair failed the Sonin check: max residual {pair.max_residual:.3e}", max_residual=pair.max_residual,
        )
    rhs = _build_rhs(doc["rhs"], interval, pair, quad_order, base_dir)
    spec = ProblemSpec(pair, interval, params, p, rhs, n_modes, quad_order, seed, defaults)

    echo = {key: value for key, value in doc.items() if key != "tolerances"}
    echo.update({"interval": [interval.a, interval.b], "beta": params.beta, "gamma": params.gamma, "p": p,
                 "n_modes": n_modes, "quad_order": quad_order, "seed": seed})
    return spec, echo


def _run_solve(config, defaults, write_solution):
    spec, echo = problem_from_dict(config.problem, defaults, config.base_dir, config.seed)
    report = solve(spec)
    document = build_document(echo, report, defaults, include_solution=write_solution)
    default_name = "report.json" if write_solution else "diagnostics.json"
    out = Path(config.output_path or default_name)
    write_report(out, document)
    if write_solution:
        write_samples_csv(companion_path(out, "psi"), report.psi, defaults.sample_points)
        write_traces_csv(companion_path(out, "traces"), report)

    table = Table(title=f"{config.subcommand}: {out}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("verdict", report.criterion_verdict.value)
    table.add_row("residual_l2", f"{report.residual_l2:.3e}")
    table.add_row("c_tilde_estimate", f"{report.c_tilde_estimate:.6g}")
    table.add_row("tail_decay_exponent", f"{report.tail_decay_exponent:.4g}")
    console.print(table)
    return 0


def _run_verify_pair(config, defaults):
    doc = config.problem
    interval = parse_interval(doc)
    pair = build_pair(doc.get("pair"), interval.length, defaults, config.base_dir)
    table = Table(title=f"Sonin residuals: {pair.rho.name}, {pair.theta.name}")
    table.add_column("t", justify="right")
    table.add_column("|rho*theta - 1|", justify="right")
    for t, residual in zip(pair.grid, pair.residuals):
        table.add_row(f"{t:.6g}", f"{residual:.3e}")
    console.print(table)
    if not pair.verified:
        raise SoninConditionError(
            f"pair failed the Sonin check: max residual {pair.max_residual:.3e}", max_residual=pair.max_residual,
        )
    return 0


def _run_basis_info(config, defaults):
    doc = config.problem
    interval = parse_interval(doc)
    params = WeightParams(_number(doc, "beta"), _number(doc, "gamma"))
    max_degree = _number(doc, "max_degree", int, 10)
    basis = basis_for(interval, params, max_degree)
    table = Table(title=f"Jacobi basis beta={params.beta} gamma={params.gamma} on [{interval.a}, {interval.b}]")
    for column in ("n", "delta_n", "delta'_n", "p_n(a)", "C_n"):
        table.add_column(column, justify="right")
    for n in range(max_degree + 1):
        cm = c_m(params, n) if params.beta + params.gamma + n >= 0.0 else None
        table.add_row(
            str(n), f"{delta_n(params, interval, n):.12g}", f"{delta_prime(params, n):.12g}",
            f"{endpoint_value(basis, n):.12g}", "-" if cm is None else f"{cm:.12g}",
        )
    console.print(table)
    return 0


def _error_line(error):
    field_name = getattr(error, "field", None) or "-"
    message = str(error).replace("\n", " ")
    valid_range = getattr(error, "valid_range", None)
    if valid_range:
        message = f"{message} (valid range {valid_range})"
    return f"error: kind={error.kind} field={field_name} message={message}"


def run(config, defaults=None):
    """Run one subcommand; returns the process exit status."""
    try:
        if config.subcommand not in SUBCOMMANDS:
            raise PreconditionError(f"unknown subcommand {config.subcommand!r}", field="subcommand",
                                    valid_range=" | ".join(SUBCOMMANDS))
        config.resolve()
        try:
            defaults = (defaults or Config.DEFAULTS).with_overrides(**(config.tolerances or {}))
        except KeyError as e:
            raise PreconditionError(str(e.args[0]), field="tolerances") from e
        if config.subcommand == "solve":
            return _run_solve(config, defaults, write_solution=True)
        if config.subcommand == "diagnose":
            return _run_solve(config, defaults, write_solution=False)
        if config.subcommand == "verify-pair":
            return _run_verify_pair(config, defaults)
        return _run_basis_info(config, defaults)
    except PreconditionError as e:
        logger.error(f"Invalid input: {e}")
        error_console.print(_error_line(e), markup=False, soft_wrap=True)
        return 1
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        error_console.print(_error_line(e), markup=False, soft_wrap=True)
        return 2
