import math
import unittest

import numpy as np
from scipy.integrate import quad
from scipy.special import beta as beta_oracle
from scipy.special import eval_jacobi

from abel_sonin.services.errors import DomainError, EvaluationError, PreconditionError
from abel_sonin.services.jacobi import (
    CoefficientSeries, Integrand, Interval, JacobiBasis, WeightParams, c_m, delta_n, delta_prime, endpoint_value,
    eval_basis, eval_basis_deriv, expand, gauss_jacobi_rule, lp_norm_weighted, synthesize, weighted_integral,
)

UNIT = Interval(0.0, 1.0)
PARAM_GRID = [WeightParams(b, g) for b in (0.3, 0.5, 0.7) for g in (0.3, 0.5, 0.7)]


def rodrigues_oracle(params, interval, n, x):
    """p_n from the standard Jacobi polynomial P_n^{(gamma, beta)} on [-1, 1]."""
    t = 2.0 * (x - interval.a) / interval.length - 1.0
    scale = abs(delta_n(params, interval, n)) * interval.length ** n * math.factorial(n)
    return scale * eval_jacobi(n, params.gamma, params.beta, t)


class TestNormalisation(unittest.TestCase):
    def test_delta_examples(self):
        self.assertAlmostEqual(delta_n(WeightParams(0.0, 0.0), UNIT, 0), 1.0, delta=1e-13)
        special = 1.0 / math.sqrt(math.gamma(1.5) * math.gamma(0.5))
        self.assertAlmostEqual(delta_n(WeightParams(0.5, -0.5), UNIT, 0), special, delta=1e-13)
        self.assertAlmostEqual(special, 0.7978845608, places=9)
        d0 = delta_n(WeightParams(0.5, 0.5), UNIT, 0)
        self.assertAlmostEqual(d0 ** 2 * beta_oracle(1.5, 1.5), 1.0, delta=1e-13)

    def test_delta_sign_alternates(self):
        params = WeightParams(0.4, 0.6)
        for n in range(6):
            self.assertEqual(math.copysign(1.0, delta_n(params, UNIT, n)), (-1.0) ** n)

    def test_c_m_examples(self):
        self.assertAlmostEqual(c_m(WeightParams(0.5, 0.5), 2), 3.0, delta=1e-14)
        self.assertAlmostEqual(c_m(WeightParams(0.5, 0.5), 0), 1.0, delta=1e-14)
        self.assertAlmostEqual(c_m(WeightParams(0.3, 0.7), 5), 6.0, delta=1e-14)
        with self.assertRaises(DomainError):
            c_m(WeightParams(-0.5, -0.5), 0)

    def test_shifted_normalisation_ratio(self):
        for params in (WeightParams(0.3, 0.5), WeightParams(0.5, 0.5), WeightParams(0.7, 0.4)):
            shifted = params.shifted()
            for m in range(31):
                with self.subTest(params=params, m=m):
                    ratio = delta_prime(params, m) / delta_prime(shifted, m + 1)
                    expected = c_m(params, m)
                    self.assertLess(abs(ratio - expected), 1e-12 * expected)

    def test_delta_prime_is_interval_free(self):
        params = WeightParams(0.3, 0.6)
        for n in range(5):
            for interval in (UNIT, Interval(-1.0, 2.0)):
                power = n + 0.5 * (params.beta + params.gamma + 1)
                scaled = abs(delta_n(params, interval, n)) * interval.length ** power
                self.assertAlmostEqual(scaled / delta_prime(params, n), 1.0, delta=1e-13)


class TestQuadrature(unittest.TestCase):
    def test_examples(self):
        self.assertAlmostEqual(gauss_jacobi_rule(-0.5, -0.5, 8).weights.sum(), math.pi, delta=1e-13)
        rule = gauss_jacobi_rule(0.0, 0.0, 4)
        self.assertAlmostEqual(rule.integrate(rule.nodes ** 3), 0.25, delta=1e-14)
        rule = gauss_jacobi_rule(0.5, 0.0, 16)
        self.assertAlmostEqual(rule.integrate(rule.nodes ** 2), 2.0 / 7.0, delta=1e-14)

    def test_exact_for_degree_below_twice_order(self):
        for left, right in ((0.5, 0.0), (-0.5, 0.3), (0.2, -0.7), (-0.9, -0.9)):
            order = 16
            rule = gauss_jacobi_rule(left, right, order)
            for k in range(2 * order):
                with self.subTest(left=left, right=right, k=k):
                    expected = beta_oracle(left + k + 1.0, right + 1.0)
                    self.assertLess(abs(rule.integrate(rule.nodes ** k) - expected), 1e-11 * expected)

    def test_nodes_ordered_inside_unit_interval(self):
        rule = gauss_jacobi_rule(-0.5, 0.5, 128)
        self.assertTrue(np.all(rule.nodes > 0.0) and np.all(rule.nodes < 1.0))
        self.assertTrue(np.all(np.diff(rule.nodes) > 0.0))
        self.assertTrue(np.all(rule.weights > 0.0))
        self.assertFalse(rule.nodes.flags.writeable)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            gauss_jacobi_rule(-1.0, 0.0, 8)
        with self.assertRaises(PreconditionError):
            gauss_jacobi_rule(0.0, 0.0, 0)


class TestBasis(unittest.TestCase):
    def test_orthonormality(self):
        for params in PARAM_GRID:
            with self.subTest(params=params):
                basis = JacobiBasis(UNIT, params, 20)
                rule = gauss_jacobi_rule(params.beta, params.gamma, 64)
                table = basis.table(rule.nodes)
                gram = (table * rule.weights) @ table.T
                self.assertLess(np.abs(gram - np.eye(21)).max(), 1e-9)

    def test_orthonormality_on_scaled_interval(self):
        interval, params = Interval(-1.0, 2.0), WeightParams(0.3, 0.7)
        basis = JacobiBasis(interval, params, 12)
        rule = gauss_jacobi_rule(params.beta, params.gamma, 64)
        table = basis.table(interval.from_unit(rule.nodes))
        gram = interval.length ** (1.0 + params.beta + params.gamma) * (table * rule.weights) @ table.T
        self.assertLess(np.abs(gram - np.eye(13)).max(), 1e-9)

    def test_eval_examples(self):
        basis = JacobiBasis(UNIT, WeightParams(0.5, -0.5), 4)
        for x in (0.0, 0.3, 1.0):
            self.assertAlmostEqual(eval_basis(basis, 0, x), 0.7978845608, places=9)
        legendre = JacobiBasis(UNIT, WeightParams(0.0, 0.0), 4)
        self.assertAlmostEqual(eval_basis(legendre, 1, 0.5), 0.0, delta=1e-14)

    def test_matches_rodrigues_oracle(self):
        for params, interval in ((WeightParams(0.4, 0.6), UNIT), (WeightParams(0.3, 0.3), Interval(1.0, 3.5))):
            basis = JacobiBasis(interval, params, 12)
            for n in range(13):
                for x in interval.from_unit(np.array([0.0, 0.13, 0.37, 0.81, 1.0])):
                    with self.subTest(params=params, n=n, x=x):
                        expected = rodrigues_oracle(params, interval, n, x)
                        self.assertLess(abs(eval_basis(basis, n, x) - expected), 1e-10 * max(1.0, abs(expected)))

    def test_leading_coefficient_positive(self):
        basis = JacobiBasis(UNIT, WeightParams(0.4, 0.6), 6)
        for n in range(1, 7):
            self.assertGreater(eval_basis(basis, n, 1.0), 0.0)

    def test_derivative_examples(self):
        legendre = JacobiBasis(UNIT, WeightParams(0.0, 0.0), 4)
        self.assertEqual(eval_basis_deriv(legendre, 0, 0.3), 0.0)
        for x in (0.1, 0.5, 0.9):
            self.assertAlmostEqual(eval_basis_deriv(legendre, 1, x), 2.0 * math.sqrt(3.0), delta=1e-13)

    def test_derivative_matches_central_differences(self):
        rng = np.random.default_rng(7)
        for params, interval in ((WeightParams(0.5, 0.5), UNIT), (WeightParams(0.3, 0.7), Interval(-2.0, 1.0))):
            basis = JacobiBasis(interval, params, 12)
            h = 1e-6 * interval.length
            for x in interval.from_unit(rng.uniform(0.05, 0.95, 10)):
                for n in (1, 4, 8, 12):
                    with self.subTest(params=params, n=n, x=x):
                        fd = (eval_basis(basis, n, x + h) - eval_basis(basis, n, x - h)) / (2.0 * h)
                        exact = eval_basis_deriv(basis, n, x)
                        self.assertLess(abs(fd - exact), 1e-6 * max(1.0, abs(exact)))

    def test_endpoint_value(self):
        legendre = JacobiBasis(UNIT, WeightParams(0.0, 0.0), 4)
        self.assertAlmostEqual(endpoint_value(legendre, 0), 1.0, delta=1e-13)
        special = JacobiBasis(UNIT, WeightParams(0.5, -0.5), 4)
        self.assertAlmostEqual(endpoint_value(special, 0), 0.7978845608, places=9)
        params = WeightParams(0.3, 0.3)
        basis = JacobiBasis(UNIT, params, 20)
        self.assertAlmostEqual(endpoint_value(basis, 5), rodrigues_oracle(params, UNIT, 5, 0.0), delta=1e-10)
        for n in range(21):
            with self.subTest(n=n):
                closed = endpoint_value(basis, n)
                self.assertLess(abs(closed - eval_basis(basis, n, 0.0)), 1e-10 * abs(closed))
                self.assertEqual(math.copysign(1.0, closed), (-1.0) ** n)

    def test_out_of_range(self):
        basis = JacobiBasis(UNIT, WeightParams(0.5, 0.5), 4)
        with self.assertRaises(DomainError):
            eval_basis(basis, 1, 1.5)
        with self.assertRaises(PreconditionError):
            eval_basis(basis, 5, 0.5)
        with self.assertRaises(DomainError):
            WeightParams(-1.0, 0.0)
        with self.assertRaises(PreconditionError):
            Interval(1.0, 1.0)


class TestExpansion(unittest.TestCase):
    def test_basis_element_expands_to_unit_vector(self):
        params = WeightParams(0.4, 0.6)
        basis = JacobiBasis(UNIT, params, 10)
        series = expand(Integrand(lambda x: basis.eval(3, x)), basis, 10)
        expected = np.zeros(11)
        expected[3] = 1.0
        self.assertLess(np.abs(series.coeffs - expected).max(), 1e-10)

    def test_constant_legendre(self):
        basis = JacobiBasis(UNIT, WeightParams(0.0, 0.0), 6)
        series = expand(Integrand(lambda x: np.ones_like(x)), basis, 6)
        self.assertAlmostEqual(series.coeffs[0], 1.0, delta=1e-13)
        self.assertLess(np.abs(series.coeffs[1:]).max(), 1e-13)

    def test_square_against_adaptive_quadrature(self):
        basis = JacobiBasis(UNIT, WeightParams(0.5, 0.5), 5)
        series = expand(Integrand(lambda x: x ** 2), basis, 5)
        for n in range(6):
            expected, _ = quad(lambda x: x ** 2 * eval_basis(basis, n, x), 0.0, 1.0,
                               weight="alg", wvar=(0.5, 0.5), epsabs=1e-14)
            self.assertAlmostEqual(series.coeffs[n], expected, delta=1e-10)

    def test_declared_exponent_is_absorbed(self):
        params = WeightParams(0.5, 0.5)
        basis = JacobiBasis(UNIT, params, 4)
        series = expand(Integrand(lambda x: np.ones_like(x), exponent=0.2), basis, 4)
        expected, _ = quad(lambda x: x ** 0.2 * eval_basis(basis, 2, x), 0.0, 1.0,
                           weight="alg", wvar=(0.5, 0.5), epsabs=1e-14)
        self.assertAlmostEqual(series.coeffs[2], expected, delta=1e-10)

    def test_non_finite_integrand(self):
        basis = JacobiBasis(UNIT, WeightParams(0.5, 0.5), 4)
        with self.assertRaises(EvaluationError) as ctx:
            expand(Integrand(lambda x: np.where(x > 0.5, np.nan, 1.0)), basis, 4)
        self.assertGreater(ctx.exception.node, 0.5)

    def test_round_trip_random_polynomials(self):
        rng = np.random.default_rng(11)
        params = WeightParams(0.3, 0.7)
        basis = JacobiBasis(UNIT, params, 15)
        x = np.linspace(0.0, 1.0, 23)
        for degree in (0, 3, 9, 15):
            poly = np.polynomial.Polynomial(rng.standard_normal(degree + 1))
            series = expand(Integrand(poly), basis, 15)
            self.assertLess(np.abs(synthesize(series, x, basis) - poly(x)).max(), 1e-9)

    def test_synthesize(self):
        params = WeightParams(0.5, 0.5)
        basis = JacobiBasis(UNIT, params, 8)
        zero = CoefficientSeries(params, UNIT, np.zeros(5))
        self.assertEqual(synthesize(zero, 0.3), 0.0)
        series = expand(Integrand(lambda x: basis.eval(2, x)), basis, 8)
        self.assertAlmostEqual(synthesize(series, 0.77), eval_basis(basis, 2, 0.77), delta=1e-10)
        coeffs = np.random.default_rng(3).standard_normal(6)
        naive = sum(c * eval_basis(basis, n, 0.41) for n, c in enumerate(coeffs))
        self.assertAlmostEqual(synthesize(CoefficientSeries(params, UNIT, coeffs), 0.41), naive, delta=1e-13)

    def test_series_parameter_mismatch(self):
        left = CoefficientSeries(WeightParams(0.5, 0.5), UNIT, np.ones(3))
        right = CoefficientSeries(WeightParams(0.4, 0.5), UNIT, np.ones(3))
        with self.assertRaises(TypeError):
            left + right
        with self.assertRaises(PreconditionError):
            synthesize(left, 0.5, JacobiBasis(UNIT, WeightParams(0.4, 0.5), 4))
        with self.assertRaises(PreconditionError):
            CoefficientSeries(WeightParams(0.5, 0.5), UNIT, [1.0, np.inf])


class TestWeightedNorms(unittest.TestCase):
    def test_examples(self):
        one = Integrand(lambda x: np.ones_like(x))
        self.assertAlmostEqual(lp_norm_weighted(one, WeightParams(0.0, 0.0), UNIT, 2), 1.0, delta=1e-14)
        self.assertAlmostEqual(lp_norm_weighted(one, WeightParams(0.5, 0.5), UNIT, 2), math.sqrt(math.pi / 8.0),
                               delta=1e-14)
        expected, _ = quad(lambda x: x ** 3, 0.0, 1.0, weight="alg", wvar=(0.5, 0.3), epsabs=1e-15)
        value = lp_norm_weighted(Integrand(lambda x: x), WeightParams(0.5, 0.3), UNIT, 3)
        self.assertAlmostEqual(value, expected ** (1.0 / 3.0), delta=1e-12)

    def test_singular_integrand(self):
        f = Integrand(lambda x: np.cos(x), exponent=-0.3)
        expected, _ = quad(lambda x: np.cos(x) ** 2, 0.0, 1.0, weight="alg", wvar=(0.5 - 0.6, 0.5), epsabs=1e-14)
        self.assertAlmostEqual(lp_norm_weighted(f, WeightParams(0.5, 0.5), UNIT, 2), math.sqrt(expected), delta=1e-11)
        with self.assertRaises(PreconditionError):
            lp_norm_weighted(Integrand(lambda x: np.ones_like(x), exponent=-0.8), WeightParams(0.5, 0.5), UNIT, 2)

    def test_weighted_integral(self):
        value = weighted_integral(Integrand(lambda x: np.ones_like(x)), WeightParams(0.5, 0.5), UNIT, 16)
        self.assertAlmostEqual(value, math.pi / 8.0, delta=1e-14)

    def test_integrand_arithmetic(self):
        f = Integrand(lambda x: np.ones_like(x), exponent=0.5)
        g = Integrand(lambda x: 2.0 * x)
        x = np.array([0.2, 0.7])
        np.testing.assert_allclose((f + g)(x), np.sqrt(x) + 2.0 * x, rtol=1e-14)
        np.testing.assert_allclose((f - 3.0 * g)(x), np.sqrt(x) - 6.0 * x, rtol=1e-14)
        np.testing.assert_allclose((f * g)(x), 2.0 * x ** 1.5, rtol=1e-14)
        self.assertEqual((f + g).exponent, 0.0)
        self.assertEqual((f * f).exponent, 1.0)


if __name__ == '__main__':
    unittest.main()
