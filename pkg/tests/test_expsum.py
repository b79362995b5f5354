#!/usr/bin/env python3
"""
Unit tests for ntos exponential sums.

Tests subgroup sums, Parseval, discrepancy and the Erdős–Turán bound.
"""
from __future__ import annotations

import cmath
import math
import random
import unittest

from ntos.arith import divisors_with_phi
from ntos.arith import factor
from ntos.arith import sieve_primes
from ntos.errors import PreconditionError
from ntos.errors import ResourceError
from ntos.expsum import counting_probe
from ntos.expsum import decay_profile
from ntos.expsum import erdos_turan_bound
from ntos.expsum import exp_sum
from ntos.expsum import max_subgroup_sum
from ntos.expsum import mean_normalized
from ntos.expsum import star_discrepancy
from ntos.expsum import subgroup_elements
from ntos.expsum import subgroup_weyl_sums
from ntos.expsum import true_discrepancy


def brute_discrepancy(points: list[float], grid: int = 400) -> float:
    """Sup over open intervals with endpoints on a fine grid plus the points, nudged both ways."""
    n = len(points)
    eps = 1e-12
    ends = {0.0, 1.0}
    for x in points:
        ends.update({x, max(x - eps, 0.0), min(x + eps, 1.0)})
    ends.update(i / grid for i in range(grid + 1))
    ends = sorted(ends)
    best = 0.0
    for i, a in enumerate(ends):
        for b in ends[i + 1:]:
            count = sum(1 for x in points if a < x < b)
            best = max(best, abs(count - (b - a) * n))
    return best


class TestSubgroupSums(unittest.TestCase):
    """Test suite for subgroup_elements, exp_sum and max_subgroup_sum"""

    @classmethod
    def setUpClass(cls):
        """Build a prime table shared by the tests"""
        cls.table = sieve_primes(10 ** 4)

    def test_subgroup_elements(self):
        """Test the subgroups of order 3, 1 and 6 modulo 7"""
        self.assertEqual(subgroup_elements(7, 3), {1, 2, 4})
        self.assertEqual(subgroup_elements(7, 1), {1})
        self.assertEqual(subgroup_elements(7, 6), set(range(1, 7)))
        with self.assertRaises(PreconditionError):
            subgroup_elements(7, 5)

    def test_exp_sum_examples(self):
        """Test the complete sum, the cubic subgroup and k = 0"""
        full = exp_sum(7, range(1, 7), 1)
        self.assertLess(abs(full - (-1 + 0j)), 1e-12)
        cubic = exp_sum(7, {1, 2, 4}, 1)
        self.assertAlmostEqual(abs(cubic), math.sqrt(2), places=12)
        self.assertLess(abs(cubic - (-1 + 1j * math.sqrt(7)) / 2), 1e-12)
        self.assertEqual(exp_sum(11, {1, 3, 4, 5, 9}, 0), 5)

    def test_large_k_is_reduced_exactly(self):
        """Test that k and k + p give the same sum"""
        elements = subgroup_elements(9973, 12)
        self.assertEqual(exp_sum(9973, elements, 5), exp_sum(9973, elements, 5 + 9973 * 10 ** 12))

    def test_residues_out_of_range(self):
        """Test that residues outside [0, p - 1] are rejected"""
        with self.assertRaises(PreconditionError):
            exp_sum(7, {1, 9}, 1)

    def test_complete_sum_is_minus_one(self):
        """Test the complete nontrivial sum on many primes"""
        rng = random.Random(11)
        for p in rng.sample(self.table.upto(3000).tolist()[1:], 30):
            k = rng.randrange(1, p)
            self.assertLess(abs(exp_sum(p, range(1, p), k) + 1), 1e-10)

    def test_parseval(self):
        """Test sum over k of |S(k)|^2 = p |H|"""
        rng = random.Random(5)
        for p in rng.sample(self.table.upto(600).tolist()[1:], 25):
            f = factor(p - 1, self.table)
            d = rng.choice([d for d, _ in divisors_with_phi(f)])
            elements = subgroup_elements(p, d, f)
            energy = math.fsum(abs(exp_sum(p, elements, k)) ** 2 for k in range(p))
            self.assertAlmostEqual(energy / (p * d), 1.0, delta=1e-6)

    def test_max_examples(self):
        """Test maxima for (7, 3), (11, 5) and the full group"""
        cubic = max_subgroup_sum(7, 3)
        self.assertAlmostEqual(cubic.max_abs, math.sqrt(2), places=12)
        self.assertAlmostEqual(cubic.normalized, 0.4714045, places=6)
        quintic = max_subgroup_sum(11, 5)
        direct = max(abs(sum(cmath.exp(2j * math.pi * k * a / 11) for a in (1, 3, 4, 5, 9))) for k in range(1, 11))
        self.assertAlmostEqual(quintic.max_abs, direct, places=12)
        for p in (5, 13, 101):
            self.assertAlmostEqual(max_subgroup_sum(p, p - 1).max_abs, 1.0, places=12)

    def test_coset_reduction_matches_direct(self):
        """Test that coset representatives reproduce the direct maximum"""
        for p in (31, 61, 97, 211, 401):
            f = factor(p - 1, self.table)
            for d, _ in divisors_with_phi(f):
                fast = max_subgroup_sum(p, d, f)
                slow = max_subgroup_sum(p, d, f, use_cosets=False)
                self.assertAlmostEqual(fast.max_abs, slow.max_abs, places=10)
                self.assertLessEqual(fast.max_abs, d + 1e-9)
                if d > 1:
                    self.assertLess(fast.max_abs, d)

    def test_budget(self):
        """Test the work budget"""
        with self.assertRaises(ResourceError):
            max_subgroup_sum(9973, 9972, use_cosets=False, work_budget=10 ** 6)

    def test_csv_row(self):
        """Test the CSV columns"""
        row = max_subgroup_sum(7, 3).csv_row()
        self.assertEqual(row[:2], ['7', '3'])
        self.assertEqual(len(row), 6)
        self.assertAlmostEqual(float(row[4]), math.log(7), places=15)


class TestDiscrepancy(unittest.TestCase):
    """Test suite for true_discrepancy, star_discrepancy and erdos_turan_bound"""

    def test_single_point(self):
        """Test one point: open-interval sup 1, anchored sup 0.5"""
        self.assertEqual(true_discrepancy([0.5]), 1.0)
        self.assertEqual(star_discrepancy([0.5]), 0.5)

    def test_equally_spaced(self):
        """Test that j/N has discrepancy at most 1"""
        for n in (1, 2, 5, 17):
            self.assertLessEqual(true_discrepancy([j / n for j in range(n)]), 1.0 + 1e-12)

    def test_against_grid_search(self):
        """Test the endpoint scan against a brute-force interval search"""
        cases = [
            [1 / 7, 2 / 7, 4 / 7],
            [0.0, 0.25, 0.25, 0.9],
            [0.1, 0.2, 0.3],
            [0.0],
        ]
        for points in cases:
            self.assertAlmostEqual(true_discrepancy(points), brute_discrepancy(points), places=6)

    def test_cubic_subgroup_value(self):
        """Test the exact value for {1/7, 2/7, 4/7}"""
        # [1/7, 4/7] holds all three points against an expected 9/7
        self.assertAlmostEqual(true_discrepancy([1 / 7, 2 / 7, 4 / 7]), 12 / 7, places=12)

    def test_full_group_at_large_p(self):
        """Test the whole group a/p for p = 20011 without quadratic memory"""
        p = 20011
        # [1/p, (p-1)/p] holds all p - 1 points against an expected (p-1)(p-2)/p
        value = true_discrepancy([a / p for a in range(1, p)])
        self.assertAlmostEqual(value, 2 * (p - 1) / p, places=6)

    def test_invalid_points(self):
        """Test that empty or out-of-range input is rejected"""
        with self.assertRaises(PreconditionError):
            true_discrepancy([])
        with self.assertRaises(PreconditionError):
            true_discrepancy([0.5, 1.0])

    def test_erdos_turan_formula(self):
        """Test the bound with vanishing sums, M = 1 and custom constants"""
        self.assertEqual(erdos_turan_bound(10, 4, [0.0] * 4), 2.0)
        self.assertEqual(erdos_turan_bound(10, 1, [3.0]), 8.0)
        self.assertEqual(erdos_turan_bound(10, 1, [3.0], c1=1.0, c2=3.0), 14.0)
        with self.assertRaises(PreconditionError):
            erdos_turan_bound(10, 0, [])
        with self.assertRaises(PreconditionError):
            erdos_turan_bound(10, 2, [1.0])

    def test_erdos_turan_dominates_subgroup_discrepancy(self):
        """Test discrepancy <= bound for every subgroup of p < 120 and every M < p"""
        table = sieve_primes(120)
        for p in table.as_list:
            f = factor(p - 1, table)
            for d, _ in divisors_with_phi(f):
                elements = sorted(subgroup_elements(p, d, f))
                disc = true_discrepancy([a / p for a in elements])
                weyl = subgroup_weyl_sums(p, elements, max(p - 1, 1))
                for m in range(1, max(p - 1, 1) + 1):
                    self.assertLessEqual(disc, erdos_turan_bound(d, m, weyl[:m]) + 1e-9)

    def test_weyl_sums_match_exp_sum(self):
        """Test that Weyl sums are the absolute exponential sums"""
        elements = subgroup_elements(13, 4)
        weyl = subgroup_weyl_sums(13, elements, 12)
        for m in range(1, 13):
            self.assertAlmostEqual(weyl[m - 1], abs(exp_sum(13, elements, m)), places=12)


class TestProbes(unittest.TestCase):
    """Test suite for counting_probe and decay_profile"""

    @classmethod
    def setUpClass(cls):
        """Build a prime table shared by the tests"""
        cls.table = sieve_primes(4000)

    def test_counting_examples(self):
        """Test the full period and its multiples"""
        probe = counting_probe(7, 3, 7)
        self.assertEqual((probe.exact, probe.main, probe.error), (3, 3.0, 0.0))
        for p in (11, 13, 101):
            for d, _ in divisors_with_phi(factor(p - 1, self.table)):
                self.assertEqual(counting_probe(p, d, p).error, 0.0)
                self.assertEqual(counting_probe(p, d, 3 * p).error, 0.0)

    def test_counting_error_is_at_most_d(self):
        """Test |error| <= d for the largest d <= sqrt(p)"""
        rng = random.Random(2)
        for p in self.table.upto(4000).tolist()[170:]:
            f = factor(p - 1, self.table)
            d = max(d for d, _ in divisors_with_phi(f) if d * d <= p)
            y = rng.randrange(1, 2 * p)
            self.assertLessEqual(abs(counting_probe(p, d, y, f).error), d)

    def test_decay_profile(self):
        """Test the chosen subgroup orders and the mean"""
        profiles = decay_profile(self.table, 1000, 1200, 0.25)
        self.assertTrue(profiles)
        for profile in profiles:
            self.assertGreaterEqual(math.log(profile.d) / math.log(profile.p), 0.25)
            self.assertEqual((profile.p - 1) % profile.d, 0)
        self.assertTrue(0 <= mean_normalized(profiles) <= 1)
        with self.assertRaises(PreconditionError):
            mean_normalized([])

    def test_decay_trend(self):
        """Test that the mean normalized maximum does not grow across dyadic ranges"""
        table = sieve_primes(2 ** 14)
        means = [mean_normalized(decay_profile(table, 2 ** k, 2 ** (k + 1), 0.25)) for k in (9, 11, 13)]
        for mean in means:
            self.assertTrue(0 < mean <= 1)
        self.assertLessEqual(means[-1], means[0] + 0.05)


if __name__ == '__main__':
    unittest.main()
