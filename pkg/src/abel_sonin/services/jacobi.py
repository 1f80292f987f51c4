"""Orthonormal Jacobi polynomials on an interval (a, b) and Gauss-Jacobi rules.

The basis p_n^{beta,gamma} is orthonormal for the weight
(x-a)^beta (b-x)^gamma and has a positive leading coefficient, which is the
Rodrigues normalisation with the (-1)^n sign absorbed. Values come from the
three-term recurrence of the monic Jacobi polynomials on (0, 1). On the
reference interval [-1, 1] the exponent of (x-a) sits on (1+t), so the
standard (1-t)^alpha (1+t)^beta parameters are (alpha, beta) = (gamma, beta).
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .config import Config
from .errors import DomainError, EvaluationError, PreconditionError, QuadratureError
from .special import beta_fn, gamma_ln

logger = logging.getLogger(__name__)

# |beta + gamma + 1| below this takes the closed form delta_0 = 1/sqrt(Γ(β+1)Γ(γ+1))
SPECIAL_DELTA0_TOL = 1e-14
# evaluation points this far outside [a, b] (relative to b - a) are clipped, not rejected
_DOMAIN_SLACK = 1e-12

__all__ = [
    "Interval", "WeightParams", "QuadratureRule", "CoefficientSeries", "Integrand", "JacobiBasis",
    "gamma_ln", "beta_fn", "delta_n", "delta_prime", "c_m", "gauss_jacobi_rule", "basis_for",
    "eval_basis", "eval_basis_deriv", "endpoint_value", "expand", "synthesize",
    "weighted_integral", "lp_norm_weighted", "as_integrand",
]


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise PreconditionError(
                f"interval must satisfy a < b with finite endpoints, got ({self.a}, {self.b})",
                field="interval", valid_range="a < b, both finite",
            )

    @property
    def length(self):
        return self.b - self.a

    def to_unit(self, x):
        return (np.asarray(x, dtype=float) - self.a) / self.length

    def from_unit(self, u):
        return self.a + self.length * np.asarray(u, dtype=float)

    def check(self, x, open_left=False):
        """Validate evaluation points and clip round-off excursions back into [a, b]."""
        x = np.asarray(x, dtype=float)
        slack = _DOMAIN_SLACK * self.length
        below = x <= self.a if open_left else x < self.a - slack
        if np.any(below) or np.any(x > self.b + slack) or not np.all(np.isfinite(x)):
            bad = x[below | (x > self.b + slack) | ~np.isfinite(x)]
            left = "(" if open_left else "["
            raise DomainError(
                f"point {bad.flat[0]} lies outside {left}{self.a}, {self.b}]",
                field="x", valid_range=f"{left}{self.a}, {self.b}]",
            )
        return np.clip(x, self.a, self.b)


@dataclass(frozen=True)
class WeightParams:
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value) or not value > -1.0:
                raise DomainError(f"{name} must be > -1, got {value}", field=name, valid_range="(-1, inf)")

    def shifted(self):
        """The parameters (beta-1, gamma-1) of the companion weight."""
        return WeightParams(self.beta - 1.0, self.gamma - 1.0)

    def require_solver_range(self):
        for name in ("beta", "gamma"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise PreconditionError(
                    f"{name} must satisfy 0 < {name} < 1, got {value}", field=name, valid_range="(0, 1)",
                )


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for ∫_0^1 u^left (1-u)^right g(u) du."""

    nodes: np.ndarray
    weights: np.ndarray
    left_exponent: float
    right_exponent: float
    order: int

    def integrate(self, values):
        return (np.asarray(values, dtype=float) * self.weights).sum(axis=-1)


def _as_array(values, shape):
    return np.array(np.broadcast_to(np.asarray(values, dtype=float), shape))


@dataclass(frozen=True)
class Integrand:
    """A function (x - anchor)^exponent * smooth(x) with a declared endpoint exponent.

    ``smooth`` must accept numpy arrays of any shape. Quadratures absorb the
    exponent into their weight, so weak power singularities at the left end
    cost no accuracy.
    """

    smooth: Callable
    exponent: float = 0.0
    anchor: float = 0.0

    def smooth_values(self, x):
        x = np.asarray(x, dtype=float)
        return _as_array(self.smooth(x), x.shape)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        values = self.smooth_values(x)
        if self.exponent != 0.0:
            values = values * (x - self.anchor) ** self.exponent
        return values

    def _common_anchor(self, other):
        if self.exponent == 0.0:
            return other.anchor
        if other.exponent != 0.0 and other.anchor != self.anchor:
            raise PreconditionError(
                f"cannot combine integrands anchored at {self.anchor} and {other.anchor}", field="anchor",
            )
        return self.anchor

    def __add__(self, other):
        other = as_integrand(other)
        anchor = self._common_anchor(other)
        exponent = min(self.exponent, other.exponent)
        lift_self, lift_other = self.exponent - exponent, other.exponent - exponent

        def smooth(x):
            x = np.asarray(x, dtype=float)
            left = self.smooth_values(x)
            right = other.smooth_values(x)
            if lift_self:
                left = left * (x - anchor) ** lift_self
            if lift_other:
                right = right * (x - anchor) ** lift_other
            return left + right

        return Integrand(smooth, exponent, anchor)

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        return self + (-1.0 * as_integrand(other))

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            scale = float(other)
            return Integrand(lambda x: scale * self.smooth_values(x), self.exponent, self.anchor)
        other = as_integrand(other)
        anchor = self._common_anchor(other)
        return Integrand(
            lambda x: self.smooth_values(x) * other.smooth_values(x),
            self.exponent + other.exponent, anchor,
        )

    __rmul__ = __mul__


def as_integrand(f):
    if isinstance(f, Integrand):
        return f
    if callable(f):
        return Integrand(f)
    raise PreconditionError(f"expected a callable integrand, got {type(f).__name__}", field="f")


@dataclass(frozen=True)
class CoefficientSeries:
    params: WeightParams
    interval: Interval
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if not np.all(np.isfinite(coeffs)):
            raise PreconditionError("coefficient series must be finite", field="coeffs")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self):
        return len(self.coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def _check_compatible(self, other):
        if not isinstance(other, CoefficientSeries):
            return NotImplemented
        if other.params != self.params or other.interval != self.interval:
            raise TypeError(
                f"cannot mix series with parameters {self.params} on {self.interval} "
                f"and {other.params} on {other.interval}"
            )
        return None

    def __add__(self, other):
        mismatch = self._check_compatible(other)
        if mismatch is NotImplemented:
            return mismatch
        size = max(len(self), len(other))
        total = np.zeros(size)
        total[:len(self)] += self.coeffs
        total[:len(other)] += other.coeffs
        return CoefficientSeries(self.params, self.interval, total)

    def __mul__(self, scale):
        if not isinstance(scale, (int, float, np.floating)):
            return NotImplemented
        return CoefficientSeries(self.params, self.interval, float(scale) * self.coeffs)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other


# -- normalisation constants -------------------------------------------------

def _log_delta_prime(params, n):
    """ln of the interval-free normalisation constant |delta_n| (b-a)^{n+(β+γ+1)/2}."""
    beta, gamma = params.beta, params.gamma
    if n < 0:
        raise PreconditionError(f"degree must be >= 0, got {n}", field="n", valid_range="n >= 0")
    if n == 0:
        if abs(beta + gamma + 1.0) < SPECIAL_DELTA0_TOL:
            return -0.5 * (gamma_ln(beta + 1.0) + gamma_ln(gamma + 1.0))
        # (β+γ+1)Γ(β+γ+1) = Γ(β+γ+2), which stays on positive arguments when β+γ+1 < 0
        return 0.5 * (gamma_ln(beta + gamma + 2.0) - gamma_ln(beta + 1.0) - gamma_ln(gamma + 1.0))
    if not beta + gamma + n + 1.0 > 0.0:
        raise DomainError(
            f"delta_n undefined: beta + gamma + n + 1 = {beta + gamma + n + 1.0} <= 0",
            field="n", valid_range="beta + gamma + n + 1 > 0",
        )
    return 0.5 * (
        math.log(beta + gamma + 2.0 * n + 1.0) + gamma_ln(beta + gamma + n + 1.0)
        - gamma_ln(n + 1.0) - gamma_ln(beta + n + 1.0) - gamma_ln(gamma + n + 1.0)
    )


def delta_prime(params, n):
    """Interval-free constant delta'_n(beta, gamma) (sign-free, see module docs)."""
    return math.exp(_log_delta_prime(params, n))


def delta_n(params, interval, n):
    """Rodrigues constant delta_n(beta, gamma) including (-1)^n and the (b-a) power."""
    log_value = _log_delta_prime(params, n) - (n + 0.5 * (params.beta + params.gamma + 1.0)) * math.log(interval.length)
    return (-1.0) ** n * math.exp(log_value)


def c_m(params, m):
    """C_m(beta, gamma) = sqrt((m+1)(beta+gamma+m))."""
    if m < 0 or params.beta + params.gamma + m < 0.0:
        raise DomainError(
            f"C_m needs m >= 0 and beta + gamma + m >= 0, got m={m}", field="m", valid_range="beta + gamma + m >= 0",
        )
    return math.sqrt((m + 1.0) * (params.beta + params.gamma + m))


# -- recurrence and quadrature ----------------------------------------------

def _recurrence(left, right, count):
    """Monic recurrence on (0, 1) for u^left (1-u)^right.

    Returns (alpha, sqrt_beta, mu0) with p_{k+1} = (u - alpha_k) p_k - beta_k p_{k-1};
    sqrt_beta[0] is unused and mu0 = B(left+1, right+1) is the total mass.
    """
    sa, sb = float(right), float(left)
    alpha = np.empty(count)
    beta = np.zeros(count)
    alpha[0] = (sb - sa) / (sa + sb + 2.0)
    if count > 1:
        k = np.arange(1, count, dtype=float)
        s = 2.0 * k + sa + sb
        alpha[1:] = (sb * sb - sa * sa) / (s * (s + 2.0))
        beta[1] = 4.0 * (1.0 + sa) * (1.0 + sb) / ((2.0 + sa + sb) ** 2 * (3.0 + sa + sb))
        if count > 2:
            k, s = k[1:], s[1:]
            beta[2:] = 4.0 * k * (k + sa) * (k + sb) * (k + sa + sb) / (s * s * (s + 1.0) * (s - 1.0))
    # map t = 2u - 1
    alpha = 0.5 * (1.0 + alpha)
    beta = 0.25 * beta
    return alpha, np.sqrt(beta), beta_fn(left + 1.0, right + 1.0)


def _orthonormal_values(u, alpha, sqrt_beta, q0, degree, with_derivative=False):
    """Orthonormal values (and u-derivatives) of degrees 0..degree at u, stacked on axis 0."""
    u = np.asarray(u, dtype=float)
    values = np.empty((degree + 1,) + u.shape)
    derivs = np.empty_like(values) if with_derivative else None
    values[0] = q0
    if with_derivative:
        derivs[0] = 0.0
    prev, prev_d = np.zeros_like(u), np.zeros_like(u)
    for k in range(degree):
        shifted = u - alpha[k]
        nxt = (shifted * values[k] - sqrt_beta[k] * prev) / sqrt_beta[k + 1]
        if with_derivative:
            nxt_d = (values[k] + shifted * derivs[k] - sqrt_beta[k] * prev_d) / sqrt_beta[k + 1]
            prev_d = derivs[k]
            derivs[k + 1] = nxt_d
        prev = values[k]
        values[k + 1] = nxt
    return values, derivs


def _newton_polish(nodes, alpha, sqrt_beta, q0, order, max_iter=12):
    """Polish eigenvalue nodes by Newton steps on q_order; nodes that misbehave keep their eigenvalue."""
    polished = nodes.copy()
    converged = np.zeros(order, dtype=bool)
    for _ in range(max_iter):
        values, derivs = _orthonormal_values(polished, alpha, sqrt_beta, q0, order, with_derivative=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = values[order] / derivs[order]
        step = np.where(converged, 0.0, step)
        polished = polished - step
        converged |= np.abs(step) <= 8.0 * np.finfo(float).eps * np.abs(polished)
        if converged.all():
            break

    spacing = np.diff(np.concatenate(([0.0], nodes, [1.0])))
    gap = 0.5 * np.minimum(spacing[:-1], spacing[1:])
    bad = ~np.isfinite(polished) | (np.abs(polished - nodes) > gap) | ~converged
    if bad.any():
        logger.debug(f"Newton polish kept {int(bad.sum())} eigenvalue node(s) of order {order}")
        polished = np.where(bad, nodes, polished)
    return polished


@lru_cache(maxsize=256)
def gauss_jacobi_rule(left_exponent, right_exponent, order):
    """Gauss-Jacobi rule on (0, 1) for the weight u^left (1-u)^right.

    Nodes start from the Golub-Welsch eigenvalues of the Jacobi matrix and are
    polished by Newton iteration on the recurrence; weights are the
    Christoffel numbers 1 / sum_k q_k(u_i)^2 of the orthonormal recurrence.
    """
    left_exponent, right_exponent = float(left_exponent), float(right_exponent)
    if not isinstance(order, (int, np.integer)) or order <= 0:
        raise PreconditionError(f"quadrature order must be a positive integer, got {order}",
                                field="order", valid_range="order >= 1")
    for name, value in (("left_exponent", left_exponent), ("right_exponent", right_exponent)):
        if not value > -1.0:
            raise DomainError(f"{name} must be > -1, got {value}", field=name, valid_range="(-1, inf)")
    order = int(order)

    alpha, sqrt_beta, mu0 = _recurrence(left_exponent, right_exponent, order + 1)
    q0 = 1.0 / math.sqrt(mu0)
    if order == 1:
        nodes = alpha[:1].copy()
    else:
        nodes = eigh_tridiagonal(alpha[:order], sqrt_beta[1:order], eigvals_only=True)
        nodes = _newton_polish(np.sort(nodes), alpha, sqrt_beta, q0, order)

    if not (np.all(np.isfinite(nodes)) and np.all(nodes > 0.0) and np.all(nodes < 1.0)
            and np.all(np.diff(nodes) > 0.0)):
        raise QuadratureError(
            f"Gauss-Jacobi construction failed for exponents ({left_exponent}, {right_exponent}), order {order}: "
            "nodes are duplicated or outside (0, 1)"
        )
    values, _ = _orthonormal_values(nodes, alpha, sqrt_beta, q0, order - 1)
    weights = 1.0 / (values * values).sum(axis=0)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, left_exponent, right_exponent, order)


# -- basis ------------------------------------------------------------------

@dataclass(frozen=True)
class JacobiBasis:
    interval: Interval
    params: WeightParams
    max_degree: int = Config.DEFAULTS.max_degree
    norm_consts: np.ndarray = field(init=False, repr=False, compare=False)
    recurrence: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_degree < 0:
            raise PreconditionError(f"max_degree must be >= 0, got {self.max_degree}", field="max_degree")
        alpha, sqrt_beta, mu0 = _recurrence(self.params.beta, self.params.gamma, self.max_degree + 1)
        norms = np.array([delta_n(self.params, self.interval, n) for n in range(self.max_degree + 1)])
        for array in (alpha, sqrt_beta, norms):
            array.setflags(write=False)
        object.__setattr__(self, "norm_consts", norms)
        object.__setattr__(self, "recurrence", (alpha, sqrt_beta))
        object.__setattr__(self, "_q0", 1.0 / math.sqrt(mu0))
        # p_n(x) = q_n(u) (b-a)^{-(1+β+γ)/2}
        exponent = -0.5 * (1.0 + self.params.beta + self.params.gamma)
        object.__setattr__(self, "_scale", self.interval.length ** exponent)

    def _degree(self, n):
        if n is None:
            return self.max_degree
        if not 0 <= n <= self.max_degree:
            raise PreconditionError(f"degree {n} outside 0..{self.max_degree}", field="n",
                                    valid_range=f"0..{self.max_degree}")
        return int(n)

    def table(self, x, degree=None):
        """p_0..p_degree at x, stacked along a new leading axis."""
        degree = self._degree(degree)
        u = self.interval.to_unit(self.interval.check(x))
        alpha, sqrt_beta = self.recurrence
        values, _ = _orthonormal_values(u, alpha, sqrt_beta, self._q0, degree)
        return values * self._scale

    def derivative_table(self, x, degree=None):
        degree = self._degree(degree)
        u = self.interval.to_unit(self.interval.check(x))
        alpha, sqrt_beta = self.recurrence
        _, derivs = _orthonormal_values(u, alpha, sqrt_beta, self._q0, degree, with_derivative=True)
        return derivs * (self._scale / self.interval.length)

    def eval(self, n, x):
        return self.table(x, self._degree(n))[n]

    def deriv(self, n, x):
        return self.derivative_table(x, self._degree(n))[n]

    def series_sum(self, coeffs, x):
        """sum_n coeffs[n] p_n(x), accumulated in degree order alongside the recurrence."""
        coeffs = np.asarray(coeffs, dtype=float)
        degree = self._degree(len(coeffs) - 1)
        u = self.interval.to_unit(self.interval.check(x))
        alpha, sqrt_beta = self.recurrence
        current = np.full(u.shape, self._q0)
        previous = np.zeros_like(u)
        total = coeffs[0] * current
        for k in range(degree):
            nxt = ((u - alpha[k]) * current - sqrt_beta[k] * previous) / sqrt_beta[k + 1]
            previous, current = current, nxt
            total = total + coeffs[k + 1] * current
        return total * self._scale


@lru_cache(maxsize=64)
def basis_for(interval, params, max_degree):
    logger.debug(f"Building Jacobi basis {params} on {interval} up to degree {max_degree}")
    return JacobiBasis(interval, params, max_degree)


def _scalar_or_array(x, values):
    return float(values) if np.ndim(x) == 0 else values


def eval_basis(basis, n, x):
    return _scalar_or_array(x, basis.eval(n, x))


def eval_basis_deriv(basis, n, x):
    return _scalar_or_array(x, basis.deriv(n, x))


def endpoint_value(basis, n):
    """p_n(a) from the closed form delta_n (b-a)^n Γ(n+β+1)/Γ(β+1).

    The route avoids the recurrence at the endpoint, where the weight's
    singular exponents make the three-term evaluation lose relative accuracy
    for large n.
    """
    basis._degree(n)
    params, length = basis.params, basis.interval.length
    log_value = (
        _log_delta_prime(params, n) - 0.5 * (params.beta + params.gamma + 1.0) * math.log(length)
        + gamma_ln(n + params.beta + 1.0) - gamma_ln(params.beta + 1.0)
    )
    return (-1.0) ** n * math.exp(log_value)


# -- weighted integrals -----------------------------------------------------

def _checked(values, x, what):
    finite = np.isfinite(values)
    if not finite.all():
        node = np.broadcast_to(x, values.shape)[~finite].flat[0]
        raise EvaluationError(f"{what} is not finite at node x={node!r}", node=float(node))
    return values


def _absorbed_rule(f, params, interval, order, power=1.0):
    """Rule for ∫ |(x-a)^mu h|^power ω dx with the singular factor in the weight."""
    f = as_integrand(f)
    exponent = power * f.exponent
    if f.exponent != 0.0 and f.anchor != interval.a:
        raise PreconditionError(
            f"integrand anchored at {f.anchor} does not match interval start {interval.a}", field="anchor",
        )
    left = params.beta + exponent
    if not left > -1.0:
        raise PreconditionError(
            f"integrand exponent {f.exponent} makes the weighted integral diverge "
            f"(beta + {power} * exponent = {left} <= -1)",
            field="exponent", valid_range=f"> {(-1.0 - params.beta) / power}",
        )
    rule = gauss_jacobi_rule(left, params.gamma, order)
    x = interval.from_unit(rule.nodes)
    scale = interval.length ** (1.0 + params.beta + params.gamma + exponent)
    return f, rule, x, scale


def weighted_integral(f, params, interval, order=None):
    """∫_a^b f(x) ω^{beta,gamma}(x) dx with f's exponent absorbed into the weight."""
    order = order or Config.DEFAULTS.residual_min_order
    f, rule, x, scale = _absorbed_rule(f, params, interval, order)
    values = _checked(f.smooth_values(x), x, "integrand")
    return scale * rule.integrate(values)


def lp_norm_weighted(f, params, interval, p, order=None):
    """‖f‖_{L_p(I, beta, gamma)} by Gauss-Jacobi quadrature."""
    if not p >= 1.0:
        raise PreconditionError(f"p must be >= 1, got {p}", field="p", valid_range="[1, inf)")
    order = order or Config.DEFAULTS.residual_min_order
    f, rule, x, scale = _absorbed_rule(f, params, interval, order, power=p)
    values = _checked(f.smooth_values(x), x, "integrand")
    return float((scale * rule.integrate(np.abs(values) ** p)) ** (1.0 / p))


def expand(f, basis, n_terms, order=None):
    """Coefficients f_0..f_N of f in the basis, N = n_terms."""
    degree = basis._degree(n_terms)
    order = order or Config.DEFAULTS.expansion_order(degree)
    if order < degree + 1:
        raise PreconditionError(f"expansion order {order} too small for degree {degree}", field="order")
    f, rule, x, scale = _absorbed_rule(f, basis.params, basis.interval, order)
    values = _checked(f.smooth_values(x), x, "integrand")
    table = basis.table(x, degree)
    coeffs = scale * (table * (rule.weights * values)).sum(axis=1)
    return CoefficientSeries(basis.params, basis.interval, coeffs)


def synthesize(series, x, basis=None):
    """Partial sum S_N f(x) = sum_n c_n p_n(x)."""
    if basis is None:
        basis = basis_for(series.interval, series.params, max(series.degree, 0))
    elif basis.params != series.params or basis.interval != series.interval:
        raise PreconditionError(
            f"series parameters {series.params} on {series.interval} do not match basis "
            f"{basis.params} on {basis.interval}", field="basis",
        )
    return _scalar_or_array(x, basis.series_sum(series.coeffs, x))


def series_integrand(series):
    """The partial sum of a series as an Integrand with exponent 0."""
    basis = basis_for(series.interval, series.params, max(series.degree, 0))
    return Integrand(lambda x: basis.series_sum(series.coeffs, x))
