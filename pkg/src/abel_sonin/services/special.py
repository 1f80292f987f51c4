"""Special functions needed by the Jacobi normalisation constants.

ln Γ is evaluated with the Lanczos approximation (g = 7, nine coefficients,
the widely published Godfrey set). For x >= 1/2 the series is summed
directly; for 0 < x < 1/2 the reflection formula is used. Near the zeros of
ln Γ at x = 1 and x = 2 the Taylor series of ln Γ(1+z) and ln Γ(2+z) take over,
so the relative accuracy holds there too.
"""
import math

from scipy.special import zeta

from .errors import DomainError

LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
EULER_GAMMA = 0.57721566490153286061

TAYLOR_RADIUS = 0.25
_TAYLOR_TERMS = 40
# (-1)^k zeta(k) / k for k = 2..41
_ZETA_TERMS = tuple((-1.0) ** k * float(zeta(k)) / k for k in range(2, _TAYLOR_TERMS + 2))
_ZETA_TERMS_SHIFTED = tuple((-1.0) ** k * (float(zeta(k)) - 1.0) / k for k in range(2, _TAYLOR_TERMS + 2))


def _taylor(z, linear, terms):
    total = 0.0
    power = z
    for coeff in terms:
        power *= z
        total += coeff * power
    return linear * z + total


def _lanczos(x):
    z = x - 1.0
    series = LANCZOS_COEFFS[0]
    for i, coeff in enumerate(LANCZOS_COEFFS[1:], start=1):
        series += coeff / (z + i)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(series)


def gamma_ln(x):
    """Return ln Γ(x) for real x > 0."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma_ln requires x > 0, got {x}", field="x", valid_range="(0, inf)")
    if abs(x - 1.0) <= TAYLOR_RADIUS:
        return _taylor(x - 1.0, -EULER_GAMMA, _ZETA_TERMS)
    if abs(x - 2.0) <= TAYLOR_RADIUS:
        return _taylor(x - 2.0, 1.0 - EULER_GAMMA, _ZETA_TERMS_SHIFTED)
    if x < 0.5:
        # Γ(x)Γ(1-x) = π / sin(πx), sin(πx) > 0 on (0, 1/2)
        return math.log(math.pi / math.sin(math.pi * x)) - gamma_ln(1.0 - x)
    return _lanczos(x)


def gamma_fn(x):
    return math.exp(gamma_ln(x))


def beta_fn(x, y):
    """Euler's Beta function B(x, y) for x, y > 0."""
    return math.exp(gamma_ln(x) + gamma_ln(y) - gamma_ln(x + y))
