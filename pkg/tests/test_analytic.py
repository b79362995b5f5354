#!/usr/bin/env python3
"""
Unit tests for ntos analytic constants.

Tests the ζ ratio, C1(k), C2(k), the prime sums and products with their tail
bounds, the logarithmic integral and the exact τ identity.
"""
from __future__ import annotations

import math
import os
import unittest

import mpmath
from ntos.analytic import LI_AT_2
from ntos.analytic import c1_mobius_sum
from ntos.analytic import c1_of_k
from ntos.analytic import c2_of_k
from ntos.analytic import constants_table
from ntos.analytic import euler_gamma
from ntos.analytic import log_integral
from ntos.analytic import prime_log_sum
from ntos.analytic import stephens_c
from ntos.analytic import stephens_c_logsum
from ntos.analytic import tau_identity_check
from ntos.analytic import tau_sum_probe
from ntos.analytic import theorem_C
from ntos.analytic import theorem_C_ksum
from ntos.analytic import theorem_C_summand
from ntos.analytic import zeta3
from ntos.analytic import zeta_ratio
from ntos.arith import sieve_primes
from ntos.errors import DomainError
from ntos.errors import PreconditionError
from ntos.errors import ResourceError

SLOW = os.environ.get('NTOS_SLOW_TESTS') == '1'


class TestZetaValues(unittest.TestCase):
    """Test suite for zeta3, zeta_ratio and euler_gamma"""

    def test_zeta3_series(self):
        """Test the central-binomial series against mpmath"""
        z3 = zeta3()
        with mpmath.workdps(30):
            error = abs(z3.value - mpmath.zeta(3))
        self.assertLessEqual(float(error), z3.tail_bound + 1e-28)
        self.assertLess(z3.tail_bound, 1e-18)

    def test_zeta3_bracket(self):
        """Test that a longer series stays within the shorter tail bound"""
        coarse = zeta3(5)
        fine = zeta3(25)
        self.assertTrue(coarse.brackets(fine))
        self.assertLess(fine.tail_bound, coarse.tail_bound)

    def test_zeta_ratio(self):
        """Test zeta(2)zeta(3)/zeta(6)"""
        ratio = zeta_ratio()
        self.assertAlmostEqual(float(ratio), 1.9435964368, delta=1e-9)
        self.assertLess(ratio.tail_bound, 1e-9)
        self.assertAlmostEqual(float(mpmath.pi ** 2 / 6), 1.6449340668, places=10)

    def test_gamma_literal(self):
        """Test the Euler-Mascheroni literal against mpmath"""
        with mpmath.workdps(30):
            self.assertLess(abs(euler_gamma().value - mpmath.euler), mpmath.mpf('1e-29'))

    def test_invalid_terms(self):
        """Test that an empty series is rejected"""
        with self.assertRaises(PreconditionError):
            zeta3(0)


class TestLocalConstants(unittest.TestCase):
    """Test suite for c1_of_k and c2_of_k"""

    def test_c1_examples(self):
        """Test C1 at 1, 2 and 6"""
        ratio = float(zeta_ratio())
        self.assertAlmostEqual(float(c1_of_k(1)), ratio, places=12)
        self.assertAlmostEqual(float(c1_of_k(2)), 2.5914619, places=6)
        self.assertAlmostEqual(float(c1_of_k(6)), ratio * 4 / 3 * 9 / 7, places=12)

    def test_c1_multiplicative(self):
        """Test C1(k1 k2) zeta_ratio = C1(k1) C1(k2) on coprime squarefree pairs"""
        ratio = float(zeta_ratio())
        for k1, k2 in ((2, 3), (5, 7), (6, 35), (11, 30)):
            self.assertAlmostEqual(
                float(c1_of_k(k1 * k2)) * ratio, float(c1_of_k(k1)) * float(c1_of_k(k2)), places=10)

    def test_c1_rejects_non_squarefree(self):
        """Test that k with a square factor is rejected"""
        with self.assertRaises(PreconditionError):
            c1_of_k(12)
        with self.assertRaises(PreconditionError):
            c2_of_k(4, truncation=100)

    def test_c2_formula(self):
        """Test C2(1) and the extra local term at k = 2"""
        s = float(prime_log_sum(10 ** 4))
        gamma = float(euler_gamma())
        c2_1 = c2_of_k(1, truncation=10 ** 4)
        self.assertAlmostEqual(float(c2_1), float(c1_of_k(1)) * (gamma - s), places=12)
        c2_2 = c2_of_k(2, truncation=10 ** 4)
        expected = float(c1_of_k(2)) * (gamma - s - 2 * math.log(2) / 3)
        self.assertAlmostEqual(float(c2_2), expected, places=12)

    def test_c2_tail_propagation(self):
        """Test tail(C2) <= |C1| tail(S) + tail(C1)|inner| up to rounding"""
        c1 = c1_of_k(1)
        s = prime_log_sum(10 ** 4)
        c2 = c2_of_k(1, truncation=10 ** 4)
        inner = float(euler_gamma()) - float(s)
        self.assertLessEqual(c2.tail_bound, float(c1) * s.tail_bound + c1.tail_bound * abs(inner) + 1e-15)


class TestPrimeSums(unittest.TestCase):
    """Test suite for prime_log_sum, stephens_c and stephens_c_logsum"""

    @classmethod
    def setUpClass(cls):
        """Build a prime table shared by the tests"""
        cls.table = sieve_primes(10 ** 6)

    def test_single_term(self):
        """Test truncation at 2"""
        self.assertAlmostEqual(float(prime_log_sum(2)), math.log(2) / 3, places=15)
        self.assertAlmostEqual(float(stephens_c(2)), 5 / 7, places=15)

    def test_prime_log_sum_monotone_and_bracketed(self):
        """Test value(10^4) <= value(10^6) <= value(10^4) + tail(10^4)"""
        coarse = prime_log_sum(10 ** 4, self.table)
        fine = prime_log_sum(10 ** 6, self.table)
        self.assertLessEqual(float(coarse), float(fine))
        self.assertTrue(coarse.brackets(fine))
        self.assertLess(fine.tail_bound, coarse.tail_bound)

    def test_stephens_bracket(self):
        """Test the truncated products at 10^3, 10^5 and 10^6"""
        p3 = stephens_c(10 ** 3, self.table)
        p5 = stephens_c(10 ** 5, self.table)
        p6 = stephens_c(10 ** 6, self.table)
        self.assertTrue(p3.brackets(p6))
        self.assertTrue(p5.brackets(p6))
        self.assertTrue(p5.agrees_with(p6))
        self.assertGreaterEqual(float(p3), float(p6))
        self.assertLessEqual(abs(float(p6) - 0.5759599689), p6.tail_bound)

    def test_two_evaluation_paths_agree(self):
        """Test the direct product against the log-sum path"""
        for truncation in (100, 10 ** 4, 10 ** 6):
            direct = stephens_c(truncation, self.table)
            logsum = stephens_c_logsum(truncation, self.table)
            self.assertLess(abs(float(direct) - float(logsum)), 1e-12)

    def test_invalid_truncation(self):
        """Test that truncations below 2 are rejected"""
        with self.assertRaises(PreconditionError):
            prime_log_sum(1)

    @unittest.skipUnless(SLOW, 'set NTOS_SLOW_TESTS=1 for the 10^7 product')
    def test_stephens_at_ten_million(self):
        """Test the truncation 10^7 value and its bracket against 10^5"""
        fine = stephens_c(10 ** 7)
        self.assertAlmostEqual(float(fine), 0.5759599689, delta=1e-8)
        self.assertTrue(stephens_c(10 ** 5, self.table).agrees_with(fine))


class TestTheoremConstant(unittest.TestCase):
    """Test suite for theorem_C and the k-sums"""

    def test_first_summands(self):
        """Test that k = 1 vanishes and the k = 2 summand"""
        self.assertEqual(float(theorem_C_summand(1)), 0.0)
        self.assertEqual(float(theorem_C_ksum(1)), 0.0)
        expected = -0.25 * float(c1_of_k(2)) * (-2 * (2 * math.log(2)) / 3 + math.log(2))
        self.assertAlmostEqual(float(theorem_C_summand(2)), expected, places=14)
        self.assertEqual(float(theorem_C_summand(12)), 0.0)

    def test_ksum_matches_summands(self):
        """Test the sieved k-sum against the per-k summands"""
        direct = math.fsum(float(theorem_C_summand(k)) for k in range(1, 301))
        self.assertAlmostEqual(float(theorem_C_ksum(300)), direct, places=12)

    def test_two_truncations_agree(self):
        """Test C at K = 10^4 and K = 10^5 within their tails"""
        coarse = theorem_C(10 ** 4, 10 ** 5)
        fine = theorem_C(10 ** 5, 10 ** 6)
        self.assertTrue(coarse.agrees_with(fine))
        self.assertTrue(coarse.brackets(fine))
        self.assertLess(fine.tail_bound, coarse.tail_bound)

    def test_mobius_sum_tends_to_one(self):
        """Test sum of mu(k)C1(k)/k^2 -> 1"""
        value = c1_mobius_sum(10 ** 5)
        self.assertLessEqual(abs(float(value) - 1), value.tail_bound)
        self.assertLess(abs(float(value) - 1), 1e-3)


class TestLogIntegral(unittest.TestCase):
    """Test suite for log_integral"""

    def test_reference_values(self):
        """Test Li(x) against mpmath's offset logarithmic integral"""
        for x in (3.0, 100.0, 1e4, 1e10):
            self.assertAlmostEqual(log_integral(x) / float(mpmath.li(x, offset=True)), 1.0, places=9)
        self.assertAlmostEqual(log_integral(1e4), 1245.09, places=1)
        self.assertAlmostEqual(LI_AT_2, float(mpmath.li(2)), places=14)

    def test_increasing(self):
        """Test that Li is positive and increasing"""
        values = [log_integral(x) for x in (2.5, 10, 100, 1e3, 1e6)]
        self.assertGreater(values[0], 0)
        self.assertEqual(values, sorted(values))

    def test_expansion(self):
        """Test |Li(u) - u/log u| <= 2u/log^2 u for u >= 10^3"""
        for u in (1e3, 1e4, 1e5, 1e7, 1e10):
            self.assertLessEqual(abs(log_integral(u) - u / math.log(u)), 2 * u / math.log(u) ** 2)

    def test_domain(self):
        """Test that x <= 2 is rejected"""
        with self.assertRaises(DomainError):
            log_integral(2.0)
        with self.assertRaises(DomainError):
            log_integral(-5)


class TestTauIdentity(unittest.TestCase):
    """Test suite for tau_identity_check and tau_sum_probe"""

    @classmethod
    def setUpClass(cls):
        """Build a prime table shared by the tests"""
        cls.table = sieve_primes(10 ** 4)

    def test_identity_holds(self):
        """Test exact equality of both sides"""
        for x in (2, 10, 50, 100, 1000):
            left, right = tau_identity_check(x, self.table)
            self.assertEqual(left, right)

    @unittest.skipUnless(SLOW, 'set NTOS_SLOW_TESTS=1 for x = 10^4')
    def test_identity_at_ten_thousand(self):
        """Test exact equality at x = 10^4"""
        left, right = tau_identity_check(10 ** 4, self.table)
        self.assertEqual(left, right)

    def test_guards(self):
        """Test the size limit and the coverage check"""
        with self.assertRaises(ResourceError):
            tau_identity_check(10 ** 4, self.table, max_x=1000)
        with self.assertRaises(PreconditionError):
            tau_identity_check(20000, self.table, max_x=10 ** 6)

    def test_sum_probe(self):
        """Test the tau sum against its asymptotic at k = 1 and k = 6"""
        for k in (1, 6):
            probe = tau_sum_probe(10 ** 4, k, self.table)
            self.assertGreater(probe.exact, 0)
            self.assertAlmostEqual(probe.ratio, 1.0, delta=0.2)


class TestConstantsTable(unittest.TestCase):
    """Test suite for constants_table"""

    def test_rows(self):
        """Test the names and finite tails of every row"""
        rows = constants_table(10 ** 4, 10 ** 4)
        names = [row.name for row in rows]
        self.assertIn('c', names)
        self.assertIn('C', names)
        for row in rows:
            self.assertTrue(math.isfinite(row.tail_bound))
            self.assertGreaterEqual(row.tail_bound, 0)


if __name__ == '__main__':
    unittest.main()
