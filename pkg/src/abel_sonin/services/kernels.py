"""Sonin kernels, pair constructors and the Sonin-condition check.

A kernel is stored as s^{nu-1} r(s) with a bounded regular part r, so every
integral against it can put the s^{nu-1} factor into a Gauss-Jacobi weight.
"""
import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .config import Config
from .errors import DomainError, EvaluationError, PreconditionError, SoninConditionError
from .jacobi import gauss_jacobi_rule
from .special import gamma_fn

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SoninKernel:
    name: str
    nu: float
    regular: Callable

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"kernel exponent nu must be in (0, 1], got {self.nu}", field="nu", valid_range="(0, 1]")

    def regular_values(self, s):
        s = np.asarray(s, dtype=float)
        return np.array(np.broadcast_to(np.asarray(self.regular(s), dtype=float), s.shape))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        values = self.regular_values(s)
        if self.nu != 1.0:
            values = values * s ** (self.nu - 1.0)
        return values


@dataclass(frozen=True)
class SoninPair:
    rho: SoninKernel
    theta: SoninKernel
    length: float
    verified: bool
    max_residual: float
    grid: tuple = ()
    residuals: tuple = ()

    def kernel(self, which):
        if which == "rho":
            return self.rho
        if which == "theta":
            return self.theta
        raise PreconditionError(f"kernel must be 'rho' or 'theta', got {which!r}", field="which")


def _constant(value, s):
    return np.full(np.shape(s), value)


def _cos_regular(lam, s):
    return np.cos(2.0 * np.sqrt(lam * s)) / math.sqrt(math.pi)


def _cosh_regular(lam, s):
    return np.cosh(2.0 * np.sqrt(lam * s)) / math.sqrt(math.pi)


def check_grid(length, count=None):
    count = count or Config.DEFAULTS.check_count
    return tuple(length * k / (count + 1) for k in range(1, count + 1))


def _half_integral(weight_kernel, other, t, order):
    """∫_0^{t/2} weight_kernel(s) other(t - s) ds with s^{nu-1} in the rule."""
    half = 0.5 * t
    rule = gauss_jacobi_rule(weight_kernel.nu - 1.0, 0.0, order)
    s = half * rule.nodes
    values = weight_kernel.regular_values(s) * other(t - s)
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"kernel {weight_kernel.name} or {other.name} is not finite near t={t}", node=t)
    return half ** weight_kernel.nu * rule.integrate(values)


def sonin_residual(pair, t, order=None):
    """|(rho * theta)(t) - 1|, splitting the convolution at t/2 so each half carries one singularity."""
    if not 0.0 < t <= pair.length * (1.0 + 1e-12):
        raise DomainError(f"t={t} outside (0, {pair.length}]", field="t", valid_range=f"(0, {pair.length}]")
    order = order or Config.DEFAULTS.quad_order
    total = _half_integral(pair.rho, pair.theta, t, order) + _half_integral(pair.theta, pair.rho, t, order)
    return abs(total - 1.0)


def verify_pair(rho, theta, length=1.0, tolerance=None, order=None, check_count=None):
    """Check rho * theta = 1 on a check grid and return the pair with its residuals."""
    tolerance = Config.DEFAULTS.tol_sonin if tolerance is None else tolerance
    if not length > 0.0:
        raise PreconditionError(f"length must be > 0, got {length}", field="length", valid_range="(0, inf)")
    unverified = SoninPair(rho, theta, float(length), False, math.inf)
    grid = check_grid(length, check_count)
    residuals = tuple(sonin_residual(unverified, t, order) for t in grid)
    max_residual = max(residuals)
    verified = max_residual < tolerance
    log = logger.debug if verified else logger.warning
    log(f"Sonin check for ({rho.name}, {theta.name}) on (0, {length}]: max residual {max_residual:.3e}")
    return SoninPair(rho, theta, float(length), verified, max_residual, grid, residuals)


def riemann_liouville_pair(alpha, length=1.0, tolerance=None):
    """rho = s^{alpha-1}/Γ(alpha), theta = s^{-alpha}/Γ(1-alpha); verified analytically."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must satisfy 0 < alpha < 1, got {alpha}", field="alpha", valid_range="(0, 1)")
    rho = SoninKernel(f"rl_rho(alpha={alpha})", alpha, partial(_constant, 1.0 / gamma_fn(alpha)))
    theta = SoninKernel(f"rl_theta(alpha={alpha})", 1.0 - alpha, partial(_constant, 1.0 / gamma_fn(1.0 - alpha)))
    checked = verify_pair(rho, theta, length, tolerance)
    if not checked.verified:
        logger.warning(f"Riemann-Liouville pair alpha={alpha} shows residual {checked.max_residual:.3e}")
    # the pair is Sonin by the Beta integral; the check-point residuals are kept for the record
    return SoninPair(rho, theta, checked.length, True, checked.max_residual, checked.grid, checked.residuals)


def cosine_pair(lam, length=1.0, tolerance=None):
    """rho = cos(2 sqrt(lam s))/sqrt(pi s), theta = cosh(2 sqrt(lam s))/sqrt(pi s)."""
    if not (math.isfinite(lam) and lam >= 0.0):
        raise DomainError(f"lambda must be >= 0, got {lam}", field="lambda", valid_range="[0, inf)")
    rho = SoninKernel(f"cos_rho(lambda={lam})", 0.5, partial(_cos_regular, lam))
    theta = SoninKernel(f"cosh_theta(lambda={lam})", 0.5, partial(_cosh_regular, lam))
    pair = verify_pair(rho, theta, length, tolerance)
    if not pair.verified:
        raise SoninConditionError(
            f"cosine pair lambda={lam} failed the Sonin check: max residual {pair.max_residual:.3e}",
            max_residual=pair.max_residual,
        )
    return pair


def _lq_integral(kernel, q, length, order):
    exponent = q * (kernel.nu - 1.0)
    rule = gauss_jacobi_rule(exponent, 0.0, order)
    values = np.abs(kernel.regular_values(length * rule.nodes)) ** q
    return length ** (exponent + 1.0) * rule.integrate(values)


def _stable(estimate, refined, tolerance):
    return math.isfinite(estimate) and math.isfinite(refined) and abs(refined - estimate) <= tolerance * abs(refined)


def kernel_in_lq(kernel, q, length=1.0, order=None, tolerance=None):
    """Whether kernel ∈ L_q(0, length): power counting plus a stability check of the integral."""
    if not q >= 1.0:
        raise PreconditionError(f"q must be >= 1, got {q}", field="q", valid_range="[1, inf)")
    if math.isinf(q):
        return kernel.nu == 1.0 and np.all(np.isfinite(kernel.regular_values(np.linspace(0.0, length, 65))))
    if not q * (kernel.nu - 1.0) > -1.0:
        logger.debug(f"{kernel.name} not in L_{q}: s^{q * (kernel.nu - 1.0)} is not integrable at 0")
        return False
    order = order or Config.DEFAULTS.quad_order
    tolerance = Config.DEFAULTS.lq_stability_tol if tolerance is None else tolerance
    estimate, refined = _lq_integral(kernel, q, length, order), _lq_integral(kernel, q, length, 2 * order)
    if not _stable(estimate, refined, tolerance):
        logger.warning(f"L_{q} norm of {kernel.name} did not settle: {estimate:.6e} vs {refined:.6e}")
        return False
    return True


def kernel_in_weighted_l2(kernel, k=None, length=1.0, order=None, tolerance=None):
    """Whether ∫_0^length s^k |kernel(s)|^2 ds is finite."""
    k = Config.DEFAULTS.theta_weight_k if k is None else k
    exponent = 2.0 * (kernel.nu - 1.0) + k
    if not exponent > -1.0:
        return False
    order = order or Config.DEFAULTS.quad_order
    tolerance = Config.DEFAULTS.lq_stability_tol if tolerance is None else tolerance

    def integral(n):
        rule = gauss_jacobi_rule(exponent, 0.0, n)
        values = kernel.regular_values(length * rule.nodes) ** 2
        return length ** (exponent + 1.0) * rule.integrate(values)

    return _stable(integral(order), integral(2 * order), tolerance)


def tabulated_kernel(name, nu, s, r):
    """Kernel s^{nu-1} r(s) with r interpolated by PCHIP from samples.

    The first table segment is extended down to s = 0; beyond the last sample
    evaluation fails.
    """
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    if s.ndim != 1 or s.shape != r.shape or len(s) < 2:
        raise PreconditionError("kernel table needs at least two (s, r) rows", field="table")
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(r))):
        raise PreconditionError("kernel table entries must be finite", field="table")
    if s[0] < 0.0 or not np.all(np.diff(s) > 0.0):
        raise PreconditionError("kernel table abscissae must be non-negative and strictly increasing",
                                field="table.s")
    interpolant = PchipInterpolator(s, r, extrapolate=True)
    s_max = float(s[-1])

    def regular(points):
        points = np.asarray(points, dtype=float)
        if np.any(points > s_max * (1.0 + 1e-12)) or np.any(points < 0.0):
            raise EvaluationError(f"kernel {name} evaluated outside its table [0, {s_max}]",
                                  node=float(points.max()))
        return interpolant(points)

    return SoninKernel(name, float(nu), regular)


def load_kernel_table(path, nu, name=None):
    """Read a CSV with header ``s,r`` into a tabulated kernel."""
    try:
        table = np.genfromtxt(path, delimiter=",", names=True)
    except (OSError, ValueError) as e:
        raise PreconditionError(f"cannot read kernel table {path}: {e}", field="table") from e
    if table.dtype.names is None or tuple(table.dtype.names[:2]) != ("s", "r"):
        raise PreconditionError(f"kernel table {path} must have header 's,r'", field="table")
    table = np.atleast_1d(table)
    return tabulated_kernel(name or str(path), nu, table["s"], table["r"])
