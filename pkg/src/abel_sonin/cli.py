"""Console script for abel_sonin."""
import logging
from pathlib import Path
from typing import Optional

import typer

from abel_sonin.services.config import Config
from abel_sonin.services.runner import RunConfig, run

app = typer.Typer(help="Jacobi-series solver for the Abel-Sonin equation I^rho phi = f.")


def _configure_logging():
    logging.basicConfig(level=getattr(logging, Config.DEFAULTS.log_level.upper(), logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(message)s')


def _problem_run(subcommand, config, out, n_modes, quad_order, tol_sonin, seed):
    _configure_logging()
    overrides = {"n_modes": n_modes, "quad_order": quad_order}
    tolerances = {"tol_sonin": tol_sonin} if tol_sonin is not None else {}
    return run(RunConfig(subcommand, output_path=str(out) if out else None, tolerances=tolerances, seed=seed,
                         config_path=str(config), overrides=overrides))


@app.command()
def solve(
    config: Path = typer.Option(..., "--config", help="Problem JSON document."),
    out: Optional[Path] = typer.Option(None, "--out", help="Report path (default report.json)."),
    n_modes: Optional[int] = typer.Option(None, "--n-modes"),
    quad_order: Optional[int] = typer.Option(None, "--quad-order"),
    tol_sonin: Optional[float] = typer.Option(None, "--tol-sonin"),
    seed: Optional[int] = typer.Option(None, "--seed"),
):
    """Solve the equation and write the report, psi samples and traces."""
    raise typer.Exit(code=_problem_run("solve", config, out, n_modes, quad_order, tol_sonin, seed))


@app.command()
def diagnose(
    config: Path = typer.Option(..., "--config", help="Problem JSON document."),
    out: Optional[Path] = typer.Option(None, "--out", help="Diagnostics path (default diagnostics.json)."),
    n_modes: Optional[int] = typer.Option(None, "--n-modes"),
    quad_order: Optional[int] = typer.Option(None, "--quad-order"),
    tol_sonin: Optional[float] = typer.Option(None, "--tol-sonin"),
    seed: Optional[int] = typer.Option(None, "--seed"),
):
    """Write only the solvability diagnostics."""
    raise typer.Exit(code=_problem_run("diagnose", config, out, n_modes, quad_order, tol_sonin, seed))


@app.command("verify-pair")
def verify_pair(
    pair: str = typer.Option("rl", "--pair", help="rl, cosine or table."),
    alpha: float = typer.Option(0.5, "--alpha"),
    lam: float = typer.Option(1.0, "--lambda"),
    length: float = typer.Option(1.0, "--length"),
    rho_table: Optional[Path] = typer.Option(None, "--rho-table"),
    rho_nu: float = typer.Option(0.5, "--rho-nu"),
    theta_table: Optional[Path] = typer.Option(None, "--theta-table"),
    theta_nu: float = typer.Option(0.5, "--theta-nu"),
    tol_sonin: Optional[float] = typer.Option(None, "--tol-sonin"),
):
    """Print the Sonin residuals |rho*theta - 1| at the check points."""
    _configure_logging()
    pair_doc = {"kind": pair, "alpha": alpha, "lambda": lam}
    if pair == "table":
        pair_doc["rho"] = {"path": str(rho_table) if rho_table else None, "nu": rho_nu}
        pair_doc["theta"] = {"path": str(theta_table) if theta_table else None, "nu": theta_nu}
        pair_doc = {k: v for k, v in pair_doc.items() if k not in ("alpha", "lambda")}
    tolerances = {"tol_sonin": tol_sonin} if tol_sonin is not None else {}
    problem = {"interval": [0.0, length], "pair": pair_doc}
    raise typer.Exit(code=run(RunConfig("verify-pair", problem, tolerances=tolerances)))


@app.command("basis-info")
def basis_info(
    beta: float = typer.Option(0.5, "--beta"),
    gamma: float = typer.Option(0.5, "--gamma"),
    a: float = typer.Option(0.0, "--a"),
    b: float = typer.Option(1.0, "--b"),
    max_degree: int = typer.Option(10, "--max-degree"),
):
    """Print delta_n, delta'_n, p_n(a) and C_n for a basis."""
    _configure_logging()
    problem = {"interval": [a, b], "beta": beta, "gamma": gamma, "max_degree": max_degree}
    raise typer.Exit(code=run(RunConfig("basis-info", problem)))


if __name__ == "__main__":
    app()
