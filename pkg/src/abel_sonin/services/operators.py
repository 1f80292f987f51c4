"""Sonin integral and derivative operators on (a, b).

I^k f(x) = ∫_a^x k(x - t) f(t) dt is evaluated after the substitution
t = x - (x - a) u, which turns the kernel singularity and f's endpoint power
into one Gauss-Jacobi weight u^{nu-1} (1-u)^mu:

    I^k f(x) = (x - a)^{nu + mu} ∫_0^1 u^{nu-1} (1-u)^mu r((x-a) u) h(t) du.

The result is again an Integrand, so compositions keep their exponents.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .config import Config
from .errors import DomainError, EvaluationError, PreconditionError
from .jacobi import (
    CoefficientSeries, Integrand, Interval, as_integrand, basis_for, c_m, endpoint_value, gauss_jacobi_rule,
    lp_norm_weighted, synthesize, weighted_integral,
)
from .kernels import SoninPair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorContext:
    pair: SoninPair
    interval: Interval
    quad_order: int = Config.DEFAULTS.quad_order

    def __post_init__(self):
        if self.quad_order < 16:
            raise PreconditionError(f"quad_order must be >= 16, got {self.quad_order}",
                                    field="quad_order", valid_range=">= 16")
        if not self.pair.verified:
            raise PreconditionError(
                f"pair ({self.pair.rho.name}, {self.pair.theta.name}) failed the Sonin check "
                f"(max residual {self.pair.max_residual:.3e})", field="pair",
            )
        if self.pair.length < self.interval.length * (1.0 - 1e-12):
            raise PreconditionError(
                f"pair verified on (0, {self.pair.length}] but the interval has length {self.interval.length}",
                field="pair.length",
            )

    def kernel(self, which):
        return self.pair.kernel(which)


def sonin_integral_function(ctx, f, which="rho"):
    """I^rho f or I^theta f as an Integrand with exponent mu + nu."""
    kernel = ctx.kernel(which)
    f = as_integrand(f)
    a = ctx.interval.a
    if f.exponent != 0.0 and f.anchor != a:
        raise PreconditionError(f"integrand anchored at {f.anchor}, interval starts at {a}", field="anchor")
    if not f.exponent > -1.0:
        raise PreconditionError(f"integrand exponent {f.exponent} is not locally integrable",
                                field="exponent", valid_range="(-1, inf)")
    rule = gauss_jacobi_rule(kernel.nu - 1.0, f.exponent, ctx.quad_order)

    def smooth(x):
        x = np.asarray(x, dtype=float)
        s = np.asarray(x - a)[..., None] * rule.nodes
        values = kernel.regular_values(s) * f.smooth_values(x[..., None] - s)
        if not np.all(np.isfinite(values)):
            bad = np.broadcast_to(x[..., None] - s, values.shape)[~np.isfinite(values)].flat[0]
            raise EvaluationError(f"integrand of I^{which} is not finite at t={bad!r}", node=float(bad))
        return (values * rule.weights).sum(axis=-1)

    return Integrand(smooth, f.exponent + kernel.nu, a)


def apply_sonin_integral(ctx, f, x, which="rho"):
    """(I^rho f)(x) or (I^theta f)(x) for a < x <= b."""
    points = ctx.interval.check(x, open_left=True)
    values = sonin_integral_function(ctx, f, which)(points)
    return float(values) if np.ndim(x) == 0 else values


def sonin_derivative_poly_function(ctx, basis, n):
    """D^theta p_n = p_n(a) theta(x - a) + I^theta p_n', as an Integrand."""
    if basis.interval != ctx.interval:
        raise PreconditionError(f"basis interval {basis.interval} differs from {ctx.interval}", field="basis")
    theta = ctx.kernel("theta")
    a = ctx.interval.a
    boundary = endpoint_value(basis, n)
    jump = Integrand(lambda x: boundary * theta.regular_values(np.asarray(x, dtype=float) - a), theta.nu - 1.0, a)
    slope = sonin_integral_function(ctx, Integrand(lambda t: basis.deriv(n, t)), "theta")
    return jump + slope


def apply_sonin_derivative_poly(ctx, basis, n, x):
    """(D^theta p_n)(x) for a < x < b."""
    points = np.asarray(x, dtype=float)
    if np.any(points <= ctx.interval.a) or np.any(points >= ctx.interval.b):
        raise DomainError(f"D^theta p_n needs a < x < b, got {x}", field="x",
                          valid_range=f"({ctx.interval.a}, {ctx.interval.b})")
    values = sonin_derivative_poly_function(ctx, basis, n)(points)
    return float(values) if np.ndim(x) == 0 else values


def dtheta_gram(ctx, basis, m, n, order=None):
    """∫ p_m (D^theta p_n) ω^{beta,gamma} dx."""
    basis.params.require_solver_range()
    integrand = sonin_derivative_poly_function(ctx, basis, n) * Integrand(lambda x: basis.eval(m, x))
    return weighted_integral(integrand, basis.params, ctx.interval, order or ctx.quad_order)


def shifted_gram(ctx, basis, m, n, order=None):
    """C_m ∫ p^{beta-1,gamma-1}_{m+1} (I^theta p_n) ω^{beta-1,gamma-1} dx, the shifted-basis form of dtheta_gram."""
    params = basis.params
    params.require_solver_range()
    shifted = basis_for(ctx.interval, params.shifted(), m + 1)
    smoothed = sonin_integral_function(ctx, Integrand(lambda x: basis.eval(n, x)), "theta")
    integrand = smoothed * Integrand(lambda x: shifted.eval(m + 1, x))
    return c_m(params, m) * weighted_integral(integrand, params.shifted(), ctx.interval, order or ctx.quad_order)


def operator_ratio(ctx, params, f, which="theta", order=None):
    """‖I^k f‖ / ‖f‖ in L_2(I, beta, gamma)."""
    order = order or Config.DEFAULTS.residual_min_order
    f = as_integrand(f)
    denominator = lp_norm_weighted(f, params, ctx.interval, 2.0, order)
    if denominator == 0.0:
        raise PreconditionError("operator ratio undefined for f = 0", field="f")
    return lp_norm_weighted(sonin_integral_function(ctx, f, which), params, ctx.interval, 2.0, order) / denominator


def _random_polynomials(ctx, params, trials, degree, seed):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        coeffs = rng.standard_normal(degree + 1)
        if not np.any(coeffs):
            continue
        series = CoefficientSeries(params, ctx.interval, coeffs)
        yield series, Integrand(lambda x, series=series: synthesize(series, x))


def empirical_operator_bound(ctx, params, trials=None, degree=8, seed=0, which="theta"):
    """max ‖I^theta f‖ / ‖f‖ over random polynomials f of the given degree."""
    trials = trials or Config.DEFAULTS.bound_trials
    ratios = [operator_ratio(ctx, params, f, which) for _, f in _random_polynomials(ctx, params, trials, degree, seed)]
    bound = max(ratios)
    logger.debug(f"Empirical bound of I^{which} on degree-{degree} polynomials: {bound:.6e}")
    return bound


def functional_bound(ctx, params, m, trials=None, degree=8, seed=0, order=None):
    """max |∫ p^{beta-1,gamma-1}_m (I^theta f) ω^{beta-1,gamma-1}| / ‖f‖ over random polynomials."""
    trials = trials or Config.DEFAULTS.bound_trials
    order = order or Config.DEFAULTS.residual_min_order
    shifted = params.shifted()
    shifted_basis = basis_for(ctx.interval, shifted, m)
    best = 0.0
    for series, f in _random_polynomials(ctx, params, trials, degree, seed):
        smoothed = sonin_integral_function(ctx, f, "theta")
        integrand = smoothed * Integrand(lambda x: shifted_basis.eval(m, x))
        value = abs(weighted_integral(integrand, shifted, ctx.interval, order))
        best = max(best, value / float(np.sqrt(np.sum(series.coeffs ** 2))))
    return best
