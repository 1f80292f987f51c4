"""Report documents and CSV exports for a solve."""
import json
import logging
import math
from pathlib import Path

import numpy as np

from .jacobi import synthesize

logger = logging.getLogger(__name__)

REPORT_KEYS = ("problem", "psi_coeffs", "diagnostics", "residuals", "defaults_used", "warnings")


def _number(value):
    """JSON-safe float: nan becomes null, infinities become the strings 'inf'/'-inf'."""
    if value is None:
        return None
    value = float(value)
    if math.isnan(value):
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _numbers(values):
    return [_number(v) for v in np.asarray(values, dtype=float).tolist()]


def diagnostics_section(report):
    diagnosis = report.diagnosis
    return {
        "verdict": report.criterion_verdict.value,
        "decay_ok": diagnosis.decay_ok if diagnosis else None,
        "boundary_ok": diagnosis.boundary_ok if diagnosis else None,
        "pollard_ok": diagnosis.pollard_ok if diagnosis else None,
        "rho_in_conjugate_lp": diagnosis.rho_in_conjugate_lp if diagnosis else None,
        "tail_decay_exponent": _number(report.tail_decay_exponent),
        "xi": _number(report.xi),
        "pollard_range": _numbers(report.pollard_range),
        "c_tilde_estimate": _number(report.c_tilde_estimate),
        "defect_constant": _number(report.defect_constant),
        "g_coeffs": _numbers(report.g_coeffs.coeffs),
        "theta_in_l2": bool(report.theta_in_l2),
        "theta_weighted_l2": bool(report.theta_weighted_l2),
        "operator_bound": _number(report.operator_bound),
        "b_functional_partial_sums": _numbers(report.b_functional_partial_sums),
        "mm_weighted_sums": _numbers(report.mm_weighted_sums),
        "boundary_sum_trace": _numbers(report.boundary_sum_trace),
    }


def build_document(problem, report, defaults, include_solution=True):
    """The report document. ``problem`` is the normalised problem section."""
    document = {
        "problem": problem,
        "diagnostics": diagnostics_section(report),
        "defaults_used": defaults.as_dict(),
        "warnings": list(report.notes),
    }
    if include_solution:
        document["psi_coeffs"] = _numbers(report.psi.coeffs)
        document["residuals"] = {
            "residual_l2": _number(report.residual_l2),
            "corrected_residual_l2": _number(report.corrected_residual_l2),
            "psi_lp_norm": _number(report.psi_lp_norm),
        }
    return document


def dumps(document):
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_report(path, document):
    path = Path(path)
    path.write_text(dumps(document))
    logger.info(f"Report written to {path}")
    return path


def companion_path(path, suffix):
    path = Path(path)
    return path.with_name(f"{path.stem}_{suffix}.csv")


def write_samples_csv(path, psi, count):
    """ψ on the interior grid x_k = a + (k + 1/2)(b - a)/count."""
    interval = psi.interval
    x = interval.a + (np.arange(count) + 0.5) * interval.length / count
    values = synthesize(psi, x)
    np.savetxt(path, np.column_stack([x, values]), delimiter=",", header="x,psi", comments="", fmt="%.17g")
    return Path(path)


def write_traces_csv(path, report):
    rows = []
    for name in ("b_functional_partial_sums", "mm_weighted_sums", "boundary_sum_trace"):
        values = np.asarray(getattr(report, name), dtype=float)
        # partial sums of the two weighted functionals start at index 1
        start = 0 if name == "boundary_sum_trace" else 1
        rows.extend(f"{name},{k},{value!r}" for k, value in enumerate(values.tolist(), start=start))
    Path(path).write_text("trace,k,value\n" + "".join(f"{row}\n" for row in rows))
    return Path(path)
