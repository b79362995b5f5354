"""
The invariant suite behind ``ntos verify``.

Each check raises VerificationFailed on the first violation. The quick scale
finishes in seconds; the full scale runs the acceptance-size experiments.
"""
from __future__ import annotations

import collections
import logging
import math
import random
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import analytic
from . import expsum
from . import experiments
from .arith import PrimeTable
from .arith import divisors_with_phi
from .arith import factor
from .arith import mobius_sieve
from .arith import smallest_prime_factors
from .errors import VerificationFailed
from .order import count_roots
from .order import factor_pm1
from .order import order_spectrum
from .order import rectangle_summary
from .order import rectangle_summary_naive

logger = logging.getLogger(__name__)

ZETA_RATIO = 1.9435964368
STEPHENS_C = 0.5759599689
DECAY_TOLERANCE = 0.05


@dataclass(frozen=True)
class Scale:
    name: str
    identity_limit: int
    tau_points: tuple[int, ...]
    oracle_x: int
    oracle_y: int
    stephens_truncations: tuple[int, int]
    expsum_prime_limit: int
    parseval_samples: int
    counting_limit: int
    experiments: bool
    roundtrip_limit: int
    decay_exponents: tuple[int, ...]

    @property
    def table_limit(self) -> int:
        points = (self.identity_limit, self.oracle_x, self.counting_limit, max(self.tau_points),
                  self.roundtrip_limit, 2 ** (max(self.decay_exponents) + 1))
        return max(points + ((10 ** 6,) if self.experiments else ()))


QUICK = Scale('quick', 10 ** 3, (10, 50, 100), 120, 40, (10 ** 4, 10 ** 5), 100, 10, 10 ** 3, False,
              10 ** 4, (8, 10))
FULL = Scale('full', 10 ** 4, (10, 50, 100, 10 ** 3, 10 ** 4), 300, 100, (10 ** 5, 10 ** 7),
             500, 50, 10 ** 4, True, 10 ** 6, (9, 11, 13))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: str = ''


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise VerificationFailed(message)


def check_divisor_identities(table: PrimeTable, scale: Scale) -> str:
    """Σ_{d|n} φ(d) = n, Möbius inversion of φ, Σ_{d|n} |μ(d)| d <= φ(n) 3^ω(n) and order spectra."""
    mu = mobius_sieve(scale.identity_limit)
    spf = smallest_prime_factors(scale.identity_limit)
    for n in range(1, scale.identity_limit + 1):
        f = factor(n, table)
        _require(int(spf[n]) == (f.factors[0][0] if f.factors else 1), f"least prime factor of {n}")
        pairs = divisors_with_phi(f)
        _require(sum(phi for _, phi in pairs) == n, f"sum of phi over divisors of {n}")
        phi = dict(pairs)
        squarefree_sum = sum(d for d in phi if mu[d] != 0)
        _require(squarefree_sum <= phi[n] * 3 ** len(f.factors), f"squarefree divisor sum bound at {n}")
        for d in phi:
            inverted = sum(int(mu[d // e]) * e for e in phi if d % e == 0)
            _require(inverted == phi[d], f"Mobius inversion of phi at {d}")
    primes = table.upto(scale.identity_limit - 1).tolist()
    for p in primes:
        f = factor_pm1(p, factor(p - 1, table))
        spectrum = order_spectrum(p, f, method='enumerate')
        _require(spectrum.entries == dict(divisors_with_phi(f)), f"order spectrum at p={p}")
    return f"n <= {scale.identity_limit}, {len(primes)} spectra"


def check_factor_roundtrip(table: PrimeTable, scale: Scale) -> str:
    """Repeated division by the least prime factor rebuilds every n <= roundtrip_limit."""
    limit = scale.roundtrip_limit
    spf = smallest_prime_factors(limit)
    n = np.arange(2, limit + 1, dtype=np.int64)
    rest = n.copy()
    product = np.ones_like(n)
    previous = np.ones_like(n)
    while True:
        active = rest > 1
        if not active.any():
            break
        q = spf[rest[active]]
        _require(bool(np.isin(q, table.primes).all()), 'least prime factor is not a prime')
        _require(bool((q >= previous[active]).all()), 'prime factors out of order')
        previous[active] = q
        product[active] *= q
        rest[active] //= q
    _require(bool((product == n).all()), f"factor products differ at {n[product != n][:5].tolist()}")
    rng = random.Random(limit)
    for m in rng.sample(range(2, limit + 1), min(2000, limit - 1)):
        f = factor(m, table)
        m_rest, expanded = m, []
        while m_rest > 1:
            expanded.append(int(spf[m_rest]))
            m_rest //= expanded[-1]
        _require(f.factors == tuple(sorted(collections.Counter(expanded).items())), f"factor({m})")
    return f"n <= {limit}"


def check_tau_identity(table: PrimeTable, scale: Scale) -> str:
    for x in scale.tau_points:
        left, right = analytic.tau_identity_check(x, table)
        _require(left == right, f"tau identity at x={x}: {left} != {right}")
    return f"x in {list(scale.tau_points)}"


def check_rectangle_oracle(table: PrimeTable, scale: Scale) -> str:
    """Per-prime records match the naive loop; every x <= oracle_x is a prefix."""
    for y in range(1, scale.oracle_y + 1):
        fast = rectangle_summary(scale.oracle_x, y, 0.5 * y, table, chunk_size=7)
        slow = rectangle_summary_naive(scale.oracle_x, y, 0.5 * y, table)
        _require(fast.records == slow.records, f"rectangle records differ at y={y}")
        _require(fast.reciprocal_total == slow.reciprocal_total, f"reciprocal totals differ at y={y}")
    return f"x <= {scale.oracle_x}, y <= {scale.oracle_y}"


def check_constants(table: PrimeTable, scale: Scale) -> str:
    ratio = analytic.zeta_ratio()
    _require(abs(float(ratio) - ZETA_RATIO) <= 1e-9, f"zeta ratio {float(ratio)}")
    low, high = scale.stephens_truncations
    coarse = analytic.stephens_c(low, table)
    fine = analytic.stephens_c(high, table)
    _require(coarse.agrees_with(fine), 'Stephens constant brackets do not overlap')
    _require(abs(float(fine) - STEPHENS_C) <= max(1e-8, fine.tail_bound), f"c = {float(fine)}")
    logsum = analytic.stephens_c_logsum(low, table)
    _require(abs(float(logsum) - float(coarse)) <= 1e-12, 'product and log-sum paths disagree')
    mobius_sum = analytic.c1_mobius_sum(low)
    _require(abs(float(mobius_sum) - 1) <= mobius_sum.tail_bound, 'sum mu(k)C1(k)/k^2 != 1')
    return f"c = {float(fine):.12f} at {high}"


def check_exponential_sums(table: PrimeTable, scale: Scale) -> str:
    rng = random.Random(20240601)
    primes = [p for p in table.upto(scale.identity_limit).tolist() if p > 2]
    for p in rng.sample(primes, min(scale.parseval_samples, len(primes))):
        f = factor_pm1(p, factor(p - 1, table))
        d = rng.choice([d for d, _ in divisors_with_phi(f)])
        elements = expsum.subgroup_elements(p, d, f)
        energy = math.fsum(abs(expsum.exp_sum(p, elements, k)) ** 2 for k in range(p))
        _require(abs(energy - p * d) <= 1e-6 * p * d, f"Parseval at p={p}, d={d}")
        full = expsum.exp_sum(p, range(1, p), rng.randrange(1, p))
        _require(abs(full + 1) <= 1e-10, f"complete sum at p={p}")
    bounded = 0
    for p in table.upto(scale.expsum_prime_limit - 1).tolist():
        f = factor_pm1(p, factor(p - 1, table))
        for d, _ in divisors_with_phi(f):
            elements = sorted(expsum.subgroup_elements(p, d, f))
            disc = expsum.true_discrepancy([a / p for a in elements])
            m_max = max(p - 1, 1)
            weyl = expsum.subgroup_weyl_sums(p, elements, m_max)
            ms = np.arange(1, m_max + 1)
            bounds = d / (ms + 1) + np.cumsum(np.asarray(weyl) / ms)
            worst = int(np.argmin(bounds - disc))
            _require(disc <= bounds[worst] + 1e-9, f"Erdos-Turan at p={p}, d={d}, M={worst + 1}")
            _require(math.isclose(bounds[-1], expsum.erdos_turan_bound(d, m_max, weyl), rel_tol=1e-12),
                     f"Erdos-Turan prefix sums at p={p}, d={d}")
            bounded += 1
    means = [expsum.mean_normalized(expsum.decay_profile(table, 2 ** k, 2 ** (k + 1)))
             for k in scale.decay_exponents]
    _require(means[-1] <= means[0] + DECAY_TOLERANCE, f"normalized subgroup sums grow: {means}")
    return f"{bounded} subgroups, decay means {', '.join(f'{m:.3f}' for m in means)}"


def check_counting(table: PrimeTable, scale: Scale) -> str:
    probes = 0
    for p in table.upto(scale.counting_limit - 1).tolist():
        f = factor_pm1(p, factor(p - 1, table))
        for d, _ in divisors_with_phi(f):
            _require(count_roots(p, d, p, f) == d, f"count at full period p={p}, d={d}")
            probes += 1
    return f"{probes} (p, d) pairs"


def check_experiments(table: PrimeTable, scale: Scale, workers: int = 1) -> str:
    expected = experiments.load_expectations()
    x, y = 10 ** 5, 10 ** 3
    t3 = experiments.run_t3(x, y, table, workers=workers)
    _require(expected['t3']['ratio_low'] <= t3.extras['ratio'] <= expected['t3']['ratio_high'],
             f"t3 ratio {t3.extras['ratio']}")
    c11 = experiments.run_c11(x, y, table, workers=workers)
    _require(expected['c11']['ratio_low'] <= c11.extras['ratio'] <= expected['c11']['ratio_high'],
             f"c11 ratio {c11.extras['ratio']}")
    t2 = experiments.run_t2(x, y, experiments.PsiSpec('log3'), table, workers=workers)
    _require(t2.empirical <= t2.main_term, 't2 empirical above pi(x)')
    _require(t2.main_term - t2.empirical <= expected['t2']['error_multiplier'] * t2.extras['error_scale'],
             't2 deficit above its error scale')
    luca = experiments.luca_average_probe(x, table)
    _require(luca.deviation <= expected['luca']['tolerance'], f"Luca probe off by {luca.deviation}")
    residuals = []
    for x1 in (10 ** 4, 10 ** 5, 10 ** 6):
        y1 = math.ceil(x1 / (math.log(x1) * math.log(math.log(x1)))) * 4
        report = experiments.run_t1(x1, y1, table, workers=workers)
        residuals.append(report.residual)
    _require(all(abs(r) <= expected['t1']['residual_band'] for r in residuals), f"t1 residuals {residuals}")
    _require(not (residuals[0] < residuals[1] < residuals[2]) or residuals[2] - residuals[0] < 1,
             f"t1 residuals grow with x: {residuals}")
    return 't1, t2, t3, c11, luca'


CHECKS: tuple[tuple[str, Callable[[PrimeTable, Scale], str]], ...] = (
    ('divisor identities', check_divisor_identities),
    ('factor round trip', check_factor_roundtrip),
    ('tau identity', check_tau_identity),
    ('rectangle oracle', check_rectangle_oracle),
    ('constants', check_constants),
    ('exponential sums', check_exponential_sums),
    ('counting probe', check_counting),
)


def run_suite(table: PrimeTable, scale: Scale = QUICK, workers: int = 1) -> list[CheckResult]:
    """Run every check at the given scale; failures are collected, not raised."""
    checks = list(CHECKS)
    if scale.experiments:
        checks.append(('experiments', lambda t, s: check_experiments(t, s, workers)))
    results = []
    for name, check in checks:
        start = time.perf_counter()
        try:
            detail = check(table, scale)
            passed = True
        except VerificationFailed as e:
            detail = str(e)
            passed = False
        elapsed = time.perf_counter() - start
        logger.info('%s: %s in %.2fs', name, 'ok' if passed else 'FAILED', elapsed)
        results.append(CheckResult(name, passed, elapsed, detail))
    return results
