"""
High-precision analytic quantities: ζ values, prime sums, Euler products,
the constants C1(k), C2(k), C and c, and the logarithmic integral.

Every truncated evaluation returns a ConstantValue whose ``tail_bound`` is a
rigorous bound on the truncation error, derived by integral comparison with
explicit Chebyshev-type estimates:

    θ(t) <= 1.01624·t            for t > 0
    π(t) <  1.25506·t / log t    for t > 1
    Σ_{n<=t} τ(n) <= t(log t + 1)
"""
from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy import integrate

from .arith import Factorization
from .arith import PrimeTable
from .arith import factor
from .arith import factor_integer
from .arith import mobius_sieve
from .arith import phi_sieve
from .arith import radical
from .arith import sieve_primes
from .errors import DomainError
from .errors import PreconditionError
from .errors import ResourceError

logger = logging.getLogger(__name__)

PRECISION_DPS = 30
# Euler–Mascheroni constant to 30 digits (OEIS A001620).
EULER_GAMMA_DIGITS = '0.577215664901532860606512090082'
# li(2) = ∫_0^2 dt/log t (principal value), converts Li to li.
LI_AT_2 = 1.045163780117492784844588889194613

THETA_BOUND = 1.01624
PI_BOUND = 1.25506

DEFAULT_ZETA3_TERMS = 30
DEFAULT_PRIME_TRUNCATION = 10 ** 6
DEFAULT_K_TRUNCATION = 10 ** 6
DEFAULT_TAU_IDENTITY_LIMIT = 10 ** 6

_FLOAT_EPS = 2.0 ** -52


@dataclass(frozen=True)
class ConstantValue:
    """
    A numerical constant with a bound on its truncation error.

    The true constant lies in [value - tail_bound, value + tail_bound].
    """

    name: str
    value: mpmath.mpf
    tail_bound: float
    truncation: int | None = None
    meta: str = ''

    def __float__(self) -> float:
        return float(self.value)

    def brackets(self, finer: ConstantValue) -> bool:
        """True when a run at a larger truncation stays within this run's tail bound."""
        return abs(float(finer.value - self.value)) <= self.tail_bound

    def agrees_with(self, other: ConstantValue) -> bool:
        """True when the two brackets overlap."""
        return abs(float(other.value - self.value)) <= self.tail_bound + other.tail_bound


def _mpf(value) -> mpmath.mpf:
    with mpmath.workdps(PRECISION_DPS):
        return mpmath.mpf(value)


def euler_gamma() -> ConstantValue:
    return ConstantValue('gamma', _mpf(EULER_GAMMA_DIGITS), 1e-30, None, '30-digit literal')


def _primes_upto(truncation: int, table: PrimeTable | None) -> np.ndarray:
    if truncation < 2:
        raise PreconditionError(f"Truncation must be at least 2, got {truncation}")
    if table is not None and table.limit >= truncation:
        return table.upto(truncation)
    return sieve_primes(truncation).primes


def zeta3(terms: int = DEFAULT_ZETA3_TERMS) -> ConstantValue:
    """
    ζ(3) = (5/2) Σ_{n>=1} (-1)^(n+1) / (n³·C(2n, n)).

    The series alternates with decreasing terms, so the first omitted term
    bounds the error.
    """
    if terms < 1:
        raise PreconditionError(f"Need at least one term, got {terms}")
    with mpmath.workdps(PRECISION_DPS):
        total = mpmath.mpf(0)
        for n in range(1, terms + 1):
            term = mpmath.mpf(1) / (n ** 3 * math.comb(2 * n, n))
            total += term if n % 2 else -term
        value = total * 5 / 2
        nxt = terms + 1
        tail = float(mpmath.mpf(5) / 2 / (nxt ** 3 * math.comb(2 * nxt, nxt)))
    return ConstantValue('zeta(3)', value, tail, terms, 'alternating central-binomial series')


def zeta_ratio(terms: int = DEFAULT_ZETA3_TERMS) -> ConstantValue:
    """ζ(2)ζ(3)/ζ(6) with ζ(2) = π²/6 and ζ(6) = π⁶/945."""
    z3 = zeta3(terms)
    with mpmath.workdps(PRECISION_DPS):
        z2 = mpmath.pi ** 2 / 6
        z6 = mpmath.pi ** 6 / 945
        factor_ = z2 / z6
        value = factor_ * z3.value
        tail = float(factor_) * z3.tail_bound
    return ConstantValue('zeta(2)zeta(3)/zeta(6)', value, tail, terms, 'closed forms + zeta(3) series')


def _euler_factor(p: int) -> Fraction:
    return 1 + Fraction(p - 1, p * p - p + 1)


def _squarefree_factorization(k: int, fact: Factorization | None) -> Factorization:
    f = fact if fact is not None else factor_integer(k)
    if f.n != k:
        raise PreconditionError(f"Factorization of {f.n} given for k = {k}")
    if not f.is_squarefree:
        raise PreconditionError(f"{k} is not squarefree")
    return f


def c1_of_k(k: int, fact: Factorization | None = None) -> ConstantValue:
    """C1(k) = ζ(2)ζ(3)/ζ(6) · ∏_{p|k} (1 + (p-1)/(p²-p+1)) for squarefree k."""
    f = _squarefree_factorization(k, fact)
    zr = zeta_ratio()
    product = math.prod((_euler_factor(p) for p in f.primes), start=Fraction(1))
    with mpmath.workdps(PRECISION_DPS):
        value = zr.value * product.numerator / product.denominator
    return ConstantValue(
        f"C1({k})", value, zr.tail_bound * float(product), None, f"k' = {radical(f)}")


def _local_log_weight(p: int) -> float:
    return (p - 1) * p * math.log(p) / (p * p - p + 1)


def c2_of_k(
    k: int,
    fact: Factorization | None = None,
    truncation: int = DEFAULT_PRIME_TRUNCATION,
    table: PrimeTable | None = None,
) -> ConstantValue:
    """C2(k) = C1(k)·(γ - Σ_p log p/(p²-p+1) - Σ_{p|k} (p-1)p log p/(p²-p+1))."""
    f = _squarefree_factorization(k, fact)
    c1 = c1_of_k(k, f)
    s = prime_log_sum(truncation, table)
    with mpmath.workdps(PRECISION_DPS):
        inner = euler_gamma().value - s.value - math.fsum(_local_log_weight(p) for p in f.primes)
        value = c1.value * inner
        tail = float(abs(c1.value)) * s.tail_bound + c1.tail_bound * float(abs(inner))
    return ConstantValue(f"C2({k})", value, tail, truncation, f"prime sum to {truncation}")


def prime_log_sum(
    truncation: int = DEFAULT_PRIME_TRUNCATION,
    table: PrimeTable | None = None,
) -> ConstantValue:
    """
    Σ_{p<=T} log p/(p²-p+1).

    With w(t) = 1/(t²-t+1) decreasing, Stieltjes integration against θ gives
    Σ_{p>T} w(p)·log p <= 1.01624·(T·w(T) + ∫_T^∞ w) <= 1.01624·(T·w(T) + 1/(T-1/2)).
    """
    primes = _primes_upto(truncation, table).astype(np.float64)
    total = math.fsum((np.log(primes) / (primes * primes - primes + 1)).tolist())
    t = float(truncation)
    tail = THETA_BOUND * (t / (t * t - t + 1) + 1 / (t - 0.5)) + 4 * _FLOAT_EPS * total
    return ConstantValue('sum_p log p/(p^2-p+1)', _mpf(total), tail, truncation, f"primes <= {truncation}")


def _stephens_tail_sum(truncation: int) -> float:
    """
    Upper bound for Σ_{p>T} p/(p³-p-1), which in turn bounds
    -Σ_{p>T} log(1 - p/(p³-1)).
    """
    t = float(truncation)
    v = t / (t ** 3 - t - 1)
    r = 1 / (1 - 1 / t ** 2 - 1 / t ** 3)
    return PI_BOUND * (t * v + r / t) / math.log(t)


def stephens_c(
    truncation: int = DEFAULT_PRIME_TRUNCATION,
    table: PrimeTable | None = None,
) -> ConstantValue:
    """
    c = ∏_p (1 - p/(p³-1)) truncated at T, as a direct product in mpmath.

    Every factor is below 1, so the truncated product P_T is an upper bound
    and c >= P_T·exp(-S_T) with S_T bounding Σ_{p>T} p/(p³-p-1).
    """
    primes = _primes_upto(truncation, table).tolist()
    with mpmath.workdps(PRECISION_DPS):
        value = mpmath.fprod(mpmath.mpf(p ** 3 - p - 1) / (p ** 3 - 1) for p in primes)
    tail = -math.expm1(-_stephens_tail_sum(truncation)) * float(value)
    logger.debug('Stephens product over %d primes', len(primes))
    return ConstantValue('c', value, tail, truncation, f"direct product, primes <= {truncation}")


def stephens_c_logsum(
    truncation: int = DEFAULT_PRIME_TRUNCATION,
    table: PrimeTable | None = None,
) -> ConstantValue:
    """The same product as exp(Σ log1p(-p/(p³-1))) in float64."""
    primes = _primes_upto(truncation, table).astype(np.float64)
    logs = np.log1p(-primes / (primes ** 3 - 1))
    value = math.exp(math.fsum(logs.tolist()))
    tail = -math.expm1(-_stephens_tail_sum(truncation)) * value + 8 * _FLOAT_EPS * value
    return ConstantValue('c', _mpf(value), tail, truncation, f"log-sum, primes <= {truncation}")


def _squarefree_kernel(limit: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    For k in [0, limit]: μ(k), ∏_{p|k} (1 + (p-1)/(p²-p+1)) and
    Σ_{p|k} (p-1)p log p/(p²-p+1), sieved prime by prime.
    """
    mu = mobius_sieve(limit).astype(np.float64)
    product = np.ones(limit + 1, dtype=np.float64)
    local = np.zeros(limit + 1, dtype=np.float64)
    for p in sieve_primes(max(limit, 2)).as_list:
        if p > limit:
            break
        product[p::p] *= 1 + (p - 1) / (p * p - p + 1)
        local[p::p] += _local_log_weight(p)
    k = np.arange(limit + 1, dtype=np.float64)
    return k, mu, product, local


def theorem_C_summand(k: int, fact: Factorization | None = None) -> mpmath.mpf:
    """(μ(k)/k²)·C1(k)·(-2Σ_{p|k} (p-1)p log p/(p²-p+1) + log k); 0 off squarefree k."""
    f = fact if fact is not None else factor_integer(k)
    if not f.is_squarefree:
        return _mpf(0)
    mu = -1 if len(f.factors) % 2 else 1
    c1 = c1_of_k(k, f)
    with mpmath.workdps(PRECISION_DPS):
        inner = -2 * math.fsum(_local_log_weight(p) for p in f.primes) + mpmath.log(k)
        return mpmath.mpf(mu) / (k * k) * c1.value * inner


def theorem_C_ksum(k_truncation: int = DEFAULT_K_TRUNCATION) -> ConstantValue:
    """
    Σ_{k<=K} (μ(k)/k²) C1(k) (-2Σ_{p|k} (p-1)p log p/(p²-p+1) + log k).

    On squarefree k the bracket is at most 3 log k and the product at most
    2^ω(k) <= τ(k), so the tail is below 3·ζ-ratio·Σ_{k>K} τ(k) log k/k² <=
    3·ζ-ratio·(2L² + 5L + 5)/K with L = log K.
    """
    if k_truncation < 1:
        raise PreconditionError(f"K must be positive, got {k_truncation}")
    zr = zeta_ratio()
    k, mu, product, local = _squarefree_kernel(k_truncation)
    keep = mu != 0
    keep[0] = False
    terms = mu[keep] / (k[keep] * k[keep]) * product[keep] * (-2 * local[keep] + np.log(k[keep]))
    raw = math.fsum(terms.tolist())
    big_l = math.log(max(k_truncation, 2))
    k_tail = 3 * float(zr.value) * (2 * big_l ** 2 + 5 * big_l + 5) / max(k_truncation, 2)
    with mpmath.workdps(PRECISION_DPS):
        value = zr.value * raw
    tail = k_tail + abs(raw) * zr.tail_bound + 16 * _FLOAT_EPS * math.fsum(np.abs(terms).tolist())
    return ConstantValue('C k-sum', value, tail, k_truncation, f"k <= {k_truncation}")


def theorem_C(
    k_truncation: int = DEFAULT_K_TRUNCATION,
    truncation: int = DEFAULT_PRIME_TRUNCATION,
    table: PrimeTable | None = None,
) -> ConstantValue:
    """
    C = 2γ - 2Σ_p log p/(p²-p+1) + Σ_k (μ(k)/k²) C1(k) (-2Σ_{p|k} ... + log k).

    The value is produced here and only cross-checked internally (two
    truncations and the single-summand path); no published figure exists.
    """
    s = prime_log_sum(truncation, table)
    ksum = theorem_C_ksum(k_truncation)
    with mpmath.workdps(PRECISION_DPS):
        value = 2 * euler_gamma().value - 2 * s.value + ksum.value
    tail = 2 * s.tail_bound + ksum.tail_bound
    return ConstantValue(
        'C', value, tail, k_truncation, f"k <= {k_truncation}, primes <= {truncation}")


def c1_mobius_sum(k_truncation: int = DEFAULT_K_TRUNCATION) -> ConstantValue:
    """
    Σ_{k<=K} μ(k)C1(k)/k², which converges to exactly 1.

    Tail: |μ(k)C1(k)/k²| <= ζ-ratio·τ(k)/k², and Σ_{k>K} τ(k)/k² <= 2(L + 2)/K.
    """
    zr = zeta_ratio()
    k, mu, product, _ = _squarefree_kernel(k_truncation)
    keep = mu != 0
    keep[0] = False
    raw = math.fsum((mu[keep] * product[keep] / (k[keep] * k[keep])).tolist())
    big_l = math.log(max(k_truncation, 2))
    tail = float(zr.value) * 2 * (big_l + 2) / max(k_truncation, 2) + abs(raw) * zr.tail_bound
    with mpmath.workdps(PRECISION_DPS):
        value = zr.value * raw
    return ConstantValue('sum mu(k)C1(k)/k^2', value, tail, k_truncation, f"k <= {k_truncation}")


def log_integral(x: float) -> float:
    """
    Li(x) = ∫_2^x dt/log t by adaptive quadrature.

    Integrates e^u/u over [log 2, log x] so the range stays short for large x.

    Raises:
        DomainError: If x <= 2
    """
    if not x > 2:
        raise DomainError(f"Li(x) needs x > 2, got {x}")
    value, _ = integrate.quad(
        lambda u: math.exp(u) / u, math.log(2.0), math.log(x),
        epsabs=0.0, epsrel=1e-10, limit=200,
    )
    return value


def tau_identity_check(
    x: int,
    table: PrimeTable,
    max_x: int = DEFAULT_TAU_IDENTITY_LIMIT,
) -> tuple[Fraction, Fraction]:
    """
    Both sides of Σ_{d<x} (φ(d)/d) π(x;d,1) = Σ_{k<x} (μ(k)/k) Σ_{p<=x, p≡1(k)} τ((p-1)/k).

    The left side counts primes in progressions; the right side walks the
    squarefree divisors k of each p - 1. Both are exact rationals.

    Raises:
        PreconditionError: If the table does not cover x
        ResourceError: If x exceeds ``max_x``
    """
    if x > max_x:
        raise ResourceError(f"tau identity check limited to x <= {max_x}, got {x}")
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover x={x}")
    primes = table.upto(x)
    phi = phi_sieve(max(x, 1))

    left_numerators = defaultdict(int)
    shifted = primes - 1
    for d in range(1, x):
        count = int(np.count_nonzero(shifted % d == 0))
        if count:
            left_numerators[d] += int(phi[d]) * count
    left = sum((Fraction(n, d) for d, n in left_numerators.items()), Fraction(0))

    right_numerators = defaultdict(int)
    for p in primes.tolist():
        f = factor(p - 1, table)
        for chosen in itertools.product((False, True), repeat=len(f.factors)):
            k = 1
            divisor_count = 1
            for (q, e), take in zip(f.factors, chosen):
                if take:
                    k *= q
                    divisor_count *= e
                else:
                    divisor_count *= e + 1
            sign = -1 if sum(chosen) % 2 else 1
            right_numerators[k] += sign * divisor_count
    right = sum((Fraction(n, k) for k, n in right_numerators.items()), Fraction(0))
    return left, right


@dataclass(frozen=True)
class TauSumProbe:
    x: int
    k: int
    exact: int
    predicted: float

    @property
    def ratio(self) -> float:
        return self.exact / self.predicted


def tau_sum_probe(x: int, k: int, table: PrimeTable) -> TauSumProbe:
    """
    Exact Σ_{p<=x, p≡1(k)} τ((p-1)/k) against the main terms
    (x/k)C1(k) + (1/k)(2C2(k) + C1(k) log(k'²/k))·li(x) for squarefree k.
    """
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover x={x}")
    f = _squarefree_factorization(k, None)
    exact = 0
    for p in table.upto(x).tolist():
        if (p - 1) % k == 0:
            g = factor((p - 1) // k, table)
            exact += math.prod(e + 1 for _, e in g.factors)
    c1 = float(c1_of_k(k, f))
    c2 = float(c2_of_k(k, f, table=table if table.limit >= DEFAULT_PRIME_TRUNCATION else None))
    k_rad = radical(f)
    li_x = log_integral(x) + LI_AT_2
    predicted = x / k * c1 + (2 * c2 + c1 * math.log(k_rad * k_rad / k)) * li_x / k
    return TauSumProbe(x, k, exact, predicted)


def constants_table(
    prime_truncation: int = DEFAULT_PRIME_TRUNCATION,
    k_truncation: int = DEFAULT_K_TRUNCATION,
    table: PrimeTable | None = None,
) -> list[ConstantValue]:
    """The constants reported by ``ntos constants``."""
    return [
        euler_gamma(),
        zeta3(),
        zeta_ratio(),
        prime_log_sum(prime_truncation, table),
        stephens_c(prime_truncation, table),
        c1_of_k(1),
        c2_of_k(1, truncation=prime_truncation, table=table),
        c1_mobius_sum(k_truncation),
        theorem_C(k_truncation, prime_truncation, table),
    ]
