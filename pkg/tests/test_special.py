import math
import unittest

from scipy.special import gammaln

from abel_sonin.services.errors import DomainError
from abel_sonin.services.special import beta_fn, gamma_ln


class TestGammaLn(unittest.TestCase):
    def test_known_values(self):
        self.assertEqual(gamma_ln(1.0), 0.0)
        self.assertAlmostEqual(gamma_ln(0.5), math.log(math.sqrt(math.pi)), delta=1e-13)
        self.assertAlmostEqual(gamma_ln(6.0), math.log(120.0), delta=1e-13)

    def test_matches_scipy(self):
        for x in (0.01, 0.3, 0.75, 1.5, 2.5, 7.3, 31.0, 120.5):
            with self.subTest(x=x):
                expected = gammaln(x)
                self.assertLess(abs(gamma_ln(x) - expected), 1e-13 * abs(expected))

    def test_relative_accuracy_near_zeros(self):
        for x in (1.0 - 1e-6, 1.0 + 1e-6, 2.0 - 1e-6, 2.0 + 1e-6, 1.999, 0.8, 1.2, 2.2):
            with self.subTest(x=x):
                expected = gammaln(x)
                self.assertLess(abs(gamma_ln(x) - expected), 1e-13 * abs(expected))
        self.assertEqual(gamma_ln(2.0), 0.0)

    def test_rejects_non_positive(self):
        for x in (0.0, -1.5, float("nan"), float("inf")):
            with self.assertRaises(DomainError):
                gamma_ln(x)

    def test_beta(self):
        self.assertAlmostEqual(beta_fn(0.5, 0.5), math.pi, delta=1e-13)
        self.assertAlmostEqual(beta_fn(1.5, 1.5), math.pi / 8.0, delta=1e-14)


if __name__ == '__main__':
    unittest.main()
