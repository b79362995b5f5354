"""
Multiplicative orders l_a(p), per-prime order spectra, roots of unity modulo p
and the rectangle aggregates over a <= y, p <= x.
"""
from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction
from typing import TextIO

import numpy as np

from .arith import Factorization
from .arith import PrimeTable
from .arith import divisors_with_phi
from .arith import factor
from .arith import factor_integer
from .arith import trial_division
from .errors import PreconditionError
from .errors import ResourceError
from .errors import UndefinedOrderError

logger = logging.getLogger(__name__)

# Largest modulus whose square still fits in int64.
VECTOR_MODULUS_CAP = 3_037_000_499
DEFAULT_ENUMERATION_BOUND = 10 ** 4
DEFAULT_WORK_BUDGET = 2 * 10 ** 11

Threshold = float | Callable[[int], float]


def factor_pm1(p: int, fact_pm1: Factorization | None = None) -> Factorization:
    """Factorization of p - 1, checked against ``fact_pm1`` when one is given."""
    if p < 2:
        raise PreconditionError(f"{p} is not a prime")
    if fact_pm1 is not None:
        if fact_pm1.n != p - 1:
            raise PreconditionError(f"Factorization of {fact_pm1.n} given for p - 1 = {p - 1}")
        return fact_pm1
    return factor_integer(p - 1)


def multiplicative_order(a: int, p: int, fact_pm1: Factorization | None = None) -> int:
    """
    The least d >= 1 with a^d ≡ 1 (mod p).

    Starts from t = p - 1 and, for every prime power q^e exactly dividing
    p - 1, keeps dividing t by q while a^(t/q) ≡ 1.

    Raises:
        UndefinedOrderError: If p divides a
    """
    if a % p == 0:
        raise UndefinedOrderError(f"{p} divides {a}; the order is undefined")
    f = factor_pm1(p, fact_pm1)
    t = p - 1
    for q, e in f.factors:
        for _ in range(e):
            if pow(a, t // q, p) != 1:
                break
            t //= q
    return t


def _vector_pow(base: np.ndarray, exponent: int, modulus: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % modulus
    e = exponent
    while e:
        if e & 1:
            result = result * b % modulus
        e >>= 1
        if e:
            b = b * b % modulus
    return result


def orders_mod_p(
    residues: Iterable[int] | np.ndarray,
    p: int,
    fact_pm1: Factorization | None = None,
) -> np.ndarray:
    """
    Orders of many residues modulo one prime, vectorised over numpy int64.

    For each prime power q^e exactly dividing p - 1, a^((p-1)/q^e) has order
    q^k for some k <= e; k is found by raising it to the q-th power until it
    reaches 1. Every exponentiation shares one scalar exponent.
    """
    f = factor_pm1(p, fact_pm1)
    residues = np.asarray(residues, dtype=np.int64) % p
    if np.any(residues == 0):
        raise UndefinedOrderError(f"{p} divides one of the residues")
    if p >= VECTOR_MODULUS_CAP:
        return np.array([multiplicative_order(int(a), p, f) for a in residues], dtype=np.int64)
    t = np.ones(residues.shape, dtype=np.int64)
    for q, e in f.factors:
        current = _vector_pow(residues, (p - 1) // q ** e, p)
        done = current == 1
        part = np.ones_like(t)
        for k in range(1, e + 1):
            if done.all():
                break
            current = _vector_pow(current, q, p)
            reached = ~done & (current == 1)
            part[reached] = q ** k
            done |= reached
        t *= part
    return t


@dataclass(frozen=True)
class OrderSpectrum:
    """For one prime p, the number of residues in [1, p - 1] of each order d."""

    p: int
    entries: dict[int, int]

    def total(self) -> int:
        return sum(self.entries.values())


def order_spectrum(
    p: int,
    fact_pm1: Factorization | None = None,
    enumerate_below: int = DEFAULT_ENUMERATION_BOUND,
    method: str = 'auto',
) -> OrderSpectrum:
    """
    Count the residues of every order modulo p.

    Args:
        p: Prime modulus
        fact_pm1: Factorization of p - 1 (computed when omitted)
        enumerate_below: Largest p for which ``auto`` enumerates orders
        method: ``auto``, ``enumerate`` (compute every l_a(p)) or ``formula``
            (cyclic group: φ(d) residues of each order d | p - 1)

    Returns:
        OrderSpectrum: Map d -> count, ascending in d
    """
    f = factor_pm1(p, fact_pm1)
    if method == 'auto':
        method = 'enumerate' if p <= enumerate_below else 'formula'
    if method == 'enumerate':
        orders = orders_mod_p(np.arange(1, p, dtype=np.int64), p, f)
        ds, counts = np.unique(orders, return_counts=True)
        entries = dict(zip(ds.tolist(), counts.tolist()))
    elif method == 'formula':
        entries = dict(divisors_with_phi(f))
    else:
        raise PreconditionError(f"Unknown spectrum method {method!r}")
    return OrderSpectrum(p, entries)


def primitive_root(p: int, fact_pm1: Factorization | None = None) -> int:
    """Least g >= 2 generating (Z/pZ)^*; 1 for p = 2."""
    f = factor_pm1(p, fact_pm1)
    if p == 2:
        return 1
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in f.primes):
            return g
    raise PreconditionError(f"{p} has no primitive root; it is not prime")


def roots_of_unity(p: int, d: int, fact_pm1: Factorization | None = None) -> list[int]:
    """
    The d residues with a^d ≡ 1 (mod p), ascending.

    Raises:
        PreconditionError: If d does not divide p - 1
    """
    if d < 1 or (p - 1) % d:
        raise PreconditionError(f"{d} does not divide p - 1 = {p - 1}")
    h = pow(primitive_root(p, fact_pm1), (p - 1) // d, p)
    roots = []
    r = 1
    for _ in range(d):
        roots.append(r)
        r = r * h % p
    roots.sort()
    return roots


def count_roots(p: int, d: int, y: int, fact_pm1: Factorization | None = None) -> int:
    """#{a in [1, y) : a^d ≡ 1 (mod p)} counted by lifting the d roots below y."""
    if y < 1:
        raise PreconditionError(f"y must be positive, got {y}")
    roots = np.asarray(roots_of_unity(p, d, fact_pm1), dtype=np.int64)
    roots = roots[roots < y]
    return int(((y - 1 - roots) // p + 1).sum())


def alpha(n: int, fact: Factorization | None = None) -> Fraction:
    """Average element order of Z/nZ: (1/n) Σ_{d|n} d·φ(d)."""
    if n < 1:
        raise PreconditionError(f"alpha needs n >= 1, got {n}")
    f = fact if fact is not None else factor_integer(n)
    if f.n != n:
        raise PreconditionError(f"Factorization of {f.n} given for n = {n}")
    return Fraction(sum(d * phi for d, phi in divisors_with_phi(f)), n)


@dataclass(frozen=True)
class PrimeOrderRecord:
    """Aggregates of l_a(p) over a in [1, y] with p ∤ a, for one prime p."""

    p: int
    recip_sum: float
    count_above_threshold: int
    order_sum: int
    histogram: Mapping[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class OrderRectangleSummary:
    x: int
    y: int
    threshold: float
    records: tuple[PrimeOrderRecord, ...]

    @property
    def reciprocal_total(self) -> float:
        return math.fsum(r.recip_sum for r in self.records)

    @property
    def count_total(self) -> int:
        return sum(r.count_above_threshold for r in self.records)

    @property
    def order_total(self) -> int:
        return sum(r.order_sum for r in self.records)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(['p', 'recip_sum', 'count_above_threshold', 'order_sum'])
        for r in self.records:
            writer.writerow([r.p, f"{r.recip_sum:.17g}", r.count_above_threshold, r.order_sum])


def exact_reciprocal_sum(histogram: Mapping[int, int]) -> float:
    """
    Correctly rounded Σ count·fl(1/d).

    Equals ``math.fsum`` over the expanded multiset of float reciprocals, so
    the result does not depend on the order in which orders were produced.
    """
    parts = []
    for d, count in histogram.items():
        num, den = (1.0 / d).as_integer_ratio()
        parts.append((count * num, den))
    if not parts:
        return 0.0
    common = max(den for _, den in parts)
    return sum(num * (common // den) for num, den in parts) / common


def order_histogram(p: int, y: int, fact_pm1: Factorization) -> dict[int, int]:
    """
    Orders of a in [1, y], p ∤ a, as d -> count.

    The ⌊y/p⌋ complete periods contribute φ(d) residues of each order d; only
    the residues 1..(y mod p) of the last partial period are computed.
    """
    hist: Counter[int] = Counter()
    full, rest = divmod(y, p)
    if full:
        for d, phi in divisors_with_phi(fact_pm1):
            hist[d] += full * phi
    if rest:
        orders = orders_mod_p(np.arange(1, rest + 1, dtype=np.int64), p, fact_pm1)
        ds, counts = np.unique(orders, return_counts=True)
        for d, c in zip(ds.tolist(), counts.tolist()):
            hist[d] += c
    return dict(sorted(hist.items()))


def _record_from_histogram(
    p: int, hist: dict[int, int], threshold: float, keep_histogram: bool,
) -> PrimeOrderRecord:
    return PrimeOrderRecord(
        p=p,
        recip_sum=exact_reciprocal_sum(hist),
        count_above_threshold=sum(c for d, c in hist.items() if d > threshold),
        order_sum=sum(d * c for d, c in hist.items()),
        histogram=hist if keep_histogram else None,
    )


def _summarize_chunk(
    primes: list[int],
    y: int,
    threshold: float,
    small_primes: tuple[int, ...],
    keep_histograms: bool,
) -> list[PrimeOrderRecord]:
    records = []
    for p in primes:
        f = trial_division(p - 1, small_primes)
        records.append(_record_from_histogram(p, order_histogram(p, y, f), threshold, keep_histograms))
    logger.debug('Summarized %d primes from %s', len(primes), primes[0] if primes else None)
    return records


def _resolve_threshold(threshold: Threshold, x: int) -> float:
    return float(threshold(x)) if callable(threshold) else float(threshold)


def _check_rectangle(x: int, y: int, table: PrimeTable) -> None:
    if x < 1 or y < 1:
        raise PreconditionError(f"Rectangle bounds must be positive, got x={x}, y={y}")
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover x={x}")


def rectangle_summary(
    x: int,
    y: int,
    threshold: Threshold,
    table: PrimeTable,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    keep_histograms: bool = False,
    chunk_size: int | None = None,
) -> OrderRectangleSummary:
    """
    Per-prime aggregates of l_a(p) over a in [1, y], p ∤ a, for every p <= x.

    Args:
        x: Prime bound
        y: Upper end of the a range (inclusive)
        threshold: Count orders strictly above this value (or a function of x)
        table: Primes covering x
        workers: Processes; each owns a contiguous chunk of primes and records
            are merged in ascending prime order
        work_budget: Largest x·y accepted
        keep_histograms: Keep the d -> count map on every record

    Returns:
        OrderRectangleSummary: One record per prime, ascending

    Raises:
        ResourceError: If x·y exceeds the work budget
    """
    _check_rectangle(x, y, table)
    if x * y > work_budget:
        raise ResourceError(f"x·y = {x * y} exceeds the work budget of {work_budget}")
    limit = _resolve_threshold(threshold, x)
    primes = table.upto(x).tolist()
    small_primes = tuple(table.upto(min(math.isqrt(x) + 1, table.limit)).tolist())

    if chunk_size is None:
        chunk_size = max(1, math.ceil(len(primes) / (4 * max(workers, 1))))
    chunks = [primes[i:i + chunk_size] for i in range(0, len(primes), chunk_size)]
    logger.info('Summarizing orders for %d primes <= %d, y = %d', len(primes), x, y)

    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                _summarize_chunk,
                chunks,
                [y] * len(chunks),
                [limit] * len(chunks),
                [small_primes] * len(chunks),
                [keep_histograms] * len(chunks),
            ))
    else:
        parts = [_summarize_chunk(c, y, limit, small_primes, keep_histograms) for c in chunks]

    records = tuple(r for part in parts for r in part)
    return OrderRectangleSummary(x, y, limit, records)


def rectangle_summary_naive(
    x: int, y: int, threshold: Threshold, table: PrimeTable,
) -> OrderRectangleSummary:
    """The plain double loop over p <= x and a in [1, y], one order at a time."""
    _check_rectangle(x, y, table)
    limit = _resolve_threshold(threshold, x)
    records = []
    for p in table.upto(x).tolist():
        f = factor(p - 1, table)
        orders = [multiplicative_order(a, p, f) for a in range(1, y + 1) if a % p]
        records.append(PrimeOrderRecord(
            p=p,
            recip_sum=math.fsum(1.0 / d for d in orders),
            count_above_threshold=sum(1 for d in orders if d > limit),
            order_sum=sum(orders),
        ))
    return OrderRectangleSummary(x, y, limit, tuple(records))


def divisor_model_sum(x: int, weight: int, table: PrimeTable) -> float:
    """
    Σ_{p<=x} (1/p) Σ_{d|p-1} d^weight·φ(d) for weight in {-1, 0, 1}.

    Exchanging the order of summation and replacing each inner count by its
    y/p main term turns the three rectangle sums into y times this quantity.
    """
    if weight not in (-1, 0, 1):
        raise PreconditionError(f"Weight must be -1, 0 or 1, got {weight}")
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover x={x}")
    terms = []
    for p in table.upto(x).tolist():
        pairs = divisors_with_phi(factor(p - 1, table))
        if weight == -1:
            inner = sum(Fraction(phi, d) for d, phi in pairs)
        else:
            inner = Fraction(sum(phi * d ** weight for d, phi in pairs))
        terms.append(float(inner / p))
    return math.fsum(terms)
