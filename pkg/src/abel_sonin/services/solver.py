"""Jacobi-series solution of I^rho phi = f and the solvability diagnostics.

With g = I^theta f expanded in the (beta-1, gamma-1) basis, the coefficients
of phi in the (beta, gamma) basis are psi_m = C_m g_{m+1}. The partial sums
T_K = sum_{m<=K} g_m p^{beta-1,gamma-1}_m(a) approximate g(a); when they do not
tend to zero the series solves I^rho psi = f + kappa rho(x - a) with
kappa = -lim T_K instead of the original equation.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .config import Config, Defaults
from .errors import PreconditionError
from .jacobi import (
    CoefficientSeries, Integrand, Interval, WeightParams, as_integrand, basis_for, beta_fn, c_m, endpoint_value,
    expand, lp_norm_weighted, series_integrand,
)
from .kernels import SoninPair, kernel_in_lq, kernel_in_weighted_l2
from .operators import OperatorContext, empirical_operator_bound, sonin_integral_function

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ProblemSpec:
    pair: SoninPair
    interval: Interval
    params: WeightParams
    p: float
    rhs: Integrand
    n_modes: int = Config.DEFAULTS.n_modes
    quad_order: int = Config.DEFAULTS.quad_order
    seed: int = 0
    defaults: Defaults = field(default_factory=lambda: Config.DEFAULTS, compare=False)

    def __post_init__(self):
        self.params.require_solver_range()
        if not (math.isfinite(self.p) and self.p > 1.0):
            raise PreconditionError(f"p must satisfy p > 1, got {self.p}", field="p", valid_range="(1, inf)")
        if not self.n_modes >= 4:
            raise PreconditionError(f"n_modes must be >= 4, got {self.n_modes}", field="n_modes", valid_range=">= 4")
        if not self.quad_order >= 16:
            raise PreconditionError(f"quad_order must be >= 16, got {self.quad_order}",
                                    field="quad_order", valid_range=">= 16")
        rhs = as_integrand(self.rhs)
        if not 2.0 * rhs.exponent + self.params.beta > -1.0:
            raise PreconditionError(
                f"rhs exponent {rhs.exponent} puts f outside L_2(I, beta, gamma)",
                field="rhs.exponent", valid_range=f"> {-(1.0 + self.params.beta) / 2.0}",
            )
        object.__setattr__(self, "rhs", rhs)


@dataclass(frozen=True)
class Diagnosis:
    verdict: Verdict
    decay_ok: bool = None
    boundary_ok: bool = None
    pollard_ok: bool = None
    rho_in_conjugate_lp: bool = None
    reasons: tuple = ()


@dataclass(frozen=True)
class SolveReport:
    psi: CoefficientSeries
    g_coeffs: CoefficientSeries = field(repr=False)
    b_functional_partial_sums: np.ndarray = field(repr=False)
    mm_weighted_sums: np.ndarray = field(repr=False)
    boundary_sum_trace: np.ndarray = field(repr=False)
    c_tilde_estimate: float
    defect_constant: float
    residual_l2: float
    corrected_residual_l2: float
    psi_lp_norm: float
    xi: float
    tail_decay_exponent: float
    pollard_range: tuple
    theta_in_l2: bool
    theta_weighted_l2: bool
    operator_bound: float
    criterion_verdict: Verdict = Verdict.INCONCLUSIVE
    diagnosis: Diagnosis = None
    notes: tuple = ()


def xi_exponent(params, p):
    return (2.5 + max(params.beta, params.gamma)) * (p - 2.0) + 2.0


def b_functional(series, p, xi, upto=None):
    """Partial sums sum_{n=1}^{K} |c_n|^p n^xi for K = 1..upto."""
    upto = series.degree if upto is None else upto
    if not 1 <= upto <= series.degree:
        raise PreconditionError(f"upto must be in 1..{series.degree}, got {upto}", field="upto")
    n = np.arange(1, upto + 1, dtype=float)
    return np.cumsum(np.abs(series.coeffs[1:upto + 1]) ** p * n ** xi)


def mm_weighted_sums(psi, p):
    """Partial sums sum_{m=1}^{K} |psi_m|^p M_m^{p-2} m^{p-2}, M_m = m^{1/2 + max(beta, gamma)}."""
    m = np.arange(1, len(psi), dtype=float)
    big_m = m ** (0.5 + max(psi.params.beta, psi.params.gamma))
    return np.cumsum(np.abs(psi.coeffs[1:]) ** p * big_m ** (p - 2.0) * m ** (p - 2.0))


def boundary_sum_trace(g_series, shifted_basis):
    """T_K = sum_{m<=K} g_m p^{beta-1,gamma-1}_m(a), K = 0..N+1."""
    if g_series.params != shifted_basis.params or g_series.interval != shifted_basis.interval:
        raise PreconditionError("series and basis parameters differ", field="basis")
    endpoints = np.array([endpoint_value(shifted_basis, m) for m in range(len(g_series))])
    return np.cumsum(g_series.coeffs * endpoints)


def _tail(values):
    values = np.asarray(values, dtype=float)
    return values[-max(1, len(values) // 4):]


def c_tilde_estimate(trace, params, interval):
    """sqrt(B(beta, gamma)) (b-a)^{(beta+gamma-1)/2} times the tail average of the trace."""
    scale = interval.length ** (0.5 * (params.beta + params.gamma - 1.0))
    prefactor = math.sqrt(beta_fn(params.beta, params.gamma)) * scale
    return prefactor * float(np.mean(_tail(trace)))


def defect_constant(trace):
    """kappa with I^rho psi = f + kappa rho(x - a)."""
    return -float(np.mean(_tail(trace)))


def pollard_range(params):
    beta, gamma = params.beta, params.gamma
    low = 4.0 * max((beta + 1.0) / (2.0 * beta + 3.0), (gamma + 1.0) / (2.0 * gamma + 3.0))
    high = 4.0 * min((beta + 1.0) / (2.0 * beta + 1.0), (gamma + 1.0) / (2.0 * gamma + 1.0))
    return low, high


def tail_decay_exponent(coeffs, noise_floor=None):
    """r with |c_n| ~ n^{-r}, fitted over the last half of the coefficients above the noise floor.

    Returns inf when every coefficient in the last half of the index range sits
    below the floor, nan when too few coefficients remain to fit.
    """
    noise_floor = Config.DEFAULTS.noise_floor if noise_floor is None else noise_floor
    mags = np.abs(np.asarray(coeffs, dtype=float))
    scale = mags.max() if len(mags) else 0.0
    if scale == 0.0:
        return math.inf
    n = np.arange(len(mags))
    keep = (n >= 1) & (mags > noise_floor * scale)
    if not np.any(keep & (n > (len(mags) - 1) / 2.0)):
        return math.inf
    idx = n[keep]
    idx = idx[len(idx) // 2:]
    if len(idx) < 3:
        return math.nan
    slope, _ = np.polyfit(np.log(idx), np.log(mags[idx]), 1)
    return -float(slope)


def manufactured_rhs(ctx, phi):
    """f = I^rho phi for a known solution phi."""
    return sonin_integral_function(ctx, as_integrand(phi), "rho")


def _rho_at_offset(pair, a):
    rho = pair.rho
    return Integrand(lambda x: rho.regular_values(np.asarray(x, dtype=float) - a), rho.nu - 1.0, a)


def solve(spec):
    """Compute the Jacobi-series solution of I^rho phi = f and its diagnostics."""
    defaults = spec.defaults
    params, interval, n_modes = spec.params, spec.interval, spec.n_modes
    ctx = OperatorContext(spec.pair, interval, spec.quad_order)
    shifted = params.shifted()
    notes = []
    logger.info(f"Solving with {spec.pair.rho.name} on [{interval.a}, {interval.b}], "
                f"beta={params.beta}, gamma={params.gamma}, p={spec.p}, N={n_modes}")

    shifted_basis = basis_for(interval, shifted, n_modes + 1)
    g = sonin_integral_function(ctx, spec.rhs, "theta")
    g_series = expand(g, shifted_basis, n_modes + 1, order=defaults.expansion_order(n_modes + 1))
    psi = CoefficientSeries(
        params, interval, [c_m(params, m) * g_series.coeffs[m + 1] for m in range(n_modes + 1)],
    )

    xi = xi_exponent(params, spec.p)
    trace = boundary_sum_trace(g_series, shifted_basis)
    kappa = defect_constant(trace)

    order = max(defaults.expansion_order(n_modes), defaults.residual_min_order)
    psi_fn = series_integrand(psi)
    forward = sonin_integral_function(ctx, psi_fn, "rho")
    residual = lp_norm_weighted(forward - spec.rhs, params, interval, 2.0, order)
    if 2.0 * (spec.pair.rho.nu - 1.0) + params.beta > -1.0:
        corrected = forward - spec.rhs - kappa * _rho_at_offset(spec.pair, interval.a)
        corrected_residual = lp_norm_weighted(corrected, params, interval, 2.0, order)
    else:
        corrected_residual = math.nan
        notes.append("rho(x - a) is not in L_2(I, beta, gamma); corrected residual not computed")

    theta_weighted = kernel_in_weighted_l2(spec.pair.theta, defaults.theta_weight_k, spec.pair.length)
    notes.append("b_functional_partial_sums are taken over the coefficients of I^theta f")
    notes.append(f"theta_weighted_l2 tests the integral of |theta(t)|^2 t^k with k={defaults.theta_weight_k}")
    report = SolveReport(
        psi=psi,
        g_coeffs=g_series,
        b_functional_partial_sums=b_functional(g_series, spec.p, xi),
        mm_weighted_sums=mm_weighted_sums(psi, spec.p),
        boundary_sum_trace=trace,
        c_tilde_estimate=c_tilde_estimate(trace, params, interval),
        defect_constant=kappa,
        residual_l2=residual,
        corrected_residual_l2=corrected_residual,
        psi_lp_norm=lp_norm_weighted(psi_fn, params, interval, spec.p, order),
        xi=xi,
        tail_decay_exponent=tail_decay_exponent(g_series.coeffs, defaults.noise_floor),
        pollard_range=pollard_range(params),
        theta_in_l2=kernel_in_lq(spec.pair.theta, 2.0, spec.pair.length),
        theta_weighted_l2=theta_weighted,
        operator_bound=empirical_operator_bound(ctx, params, defaults.bound_trials, seed=spec.seed),
        notes=tuple(notes),
    )
    diagnosis = diagnose(spec, report)
    logger.info(f"Residual {residual:.3e}, boundary constant {report.c_tilde_estimate:.3e}, "
                f"verdict {diagnosis.verdict.value}")
    return replace(report, criterion_verdict=diagnosis.verdict, diagnosis=diagnosis,
                   notes=report.notes + diagnosis.reasons)


def diagnose(spec, report):
    """Classify the sufficient condition as satisfied, violated or inconclusive."""
    defaults = spec.defaults
    reasons = []
    pollard_ok = rho_conjugate = None
    if 1.0 < spec.p < 2.0:
        low, high = report.pollard_range
        pollard_ok = low < spec.p < high
        rho_conjugate = kernel_in_lq(spec.pair.rho, spec.p / (spec.p - 1.0), spec.pair.length)
        if not pollard_ok:
            reasons.append(f"p={spec.p} outside the mean-convergence range ({low:.4f}, {high:.4f})")
        if not rho_conjugate:
            reasons.append(f"rho is not in L_{spec.p / (spec.p - 1.0):.4f}")
        reasons.append("the sufficient condition is only established for p >= 2")

    if spec.n_modes < defaults.min_fit_modes:
        reasons.append(f"n_modes={spec.n_modes} below {defaults.min_fit_modes}; too few modes to fit a decay rate")
        return Diagnosis(Verdict.INCONCLUSIVE, None, None, pollard_ok, rho_conjugate, tuple(reasons))

    r = report.tail_decay_exponent
    if math.isnan(r):
        decay_ok = None
        reasons.append("coefficient tail too short to fit a decay rate")
    else:
        total = -math.inf if math.isinf(r) else spec.p * (-r) + report.xi
        if total < -1.0 - defaults.decay_margin:
            decay_ok = True
        elif total > -1.0 + defaults.decay_margin:
            decay_ok = False
            reasons.append(f"coefficients decay like n^-{r:.3f}; the weighted p-sum diverges")
        else:
            decay_ok = None
            reasons.append(f"decay exponent {r:.3f} is within the margin of the summability threshold")

    tail = _tail(report.boundary_sum_trace)
    average, spread = abs(float(np.mean(tail))), float(np.ptp(tail))
    tolerance = defaults.boundary_rel_tol * float(np.linalg.norm(report.g_coeffs.coeffs))
    if average <= tolerance:
        boundary_ok = True
    elif spread <= average:
        boundary_ok = False
        reasons.append(f"boundary sums settle at {-report.defect_constant:.6g}, not 0")
    else:
        boundary_ok = None
        reasons.append("boundary sums have not settled")

    if decay_ok is False or boundary_ok is False:
        verdict = Verdict.VIOLATED
    elif decay_ok and boundary_ok:
        verdict = Verdict.SATISFIED
    else:
        verdict = Verdict.INCONCLUSIVE
    return Diagnosis(verdict, decay_ok, boundary_ok, pollard_ok, rho_conjugate, tuple(reasons))
