"""
Integer-arithmetic kernels: prime sieving, factorization, multiplicative
functions, modular exponentiation and primes in arithmetic progressions.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from functools import lru_cache

import numpy as np

from .errors import EmptyRangeError
from .errors import PreconditionError
from .errors import ResourceError

logger = logging.getLogger(__name__)

DEFAULT_SEGMENT_SIZE = 2 ** 18
DEFAULT_MEMORY_BUDGET = 2 * 1024 ** 3
DEFAULT_DIVISOR_CAP = 10 ** 6


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """
    All primes up to ``limit``, ascending.

    The ``primes`` array is made read-only on construction so a table can be
    shared between worker threads and processes without copying.
    """

    limit: int
    primes: np.ndarray

    def __post_init__(self):
        primes = np.ascontiguousarray(self.primes, dtype=np.int64)
        primes.flags.writeable = False
        object.__setattr__(self, 'primes', primes)

    def __len__(self) -> int:
        return int(self.primes.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.primes, other.primes)

    def __hash__(self) -> int:
        return hash((self.limit, len(self)))

    @cached_property
    def as_list(self) -> list[int]:
        """The primes as Python ints (trial division runs on these)."""
        return self.primes.tolist()

    def pi(self, x: int) -> int:
        """Number of primes <= x, for x <= limit."""
        self._require_covers(x)
        return int(np.searchsorted(self.primes, x, side='right'))

    def upto(self, x: int) -> np.ndarray:
        """Read-only view of the primes <= x."""
        return self.primes[:self.pi(x)]

    def truncate(self, limit: int) -> PrimeTable:
        """A table over [2, limit] sharing this table's storage."""
        if limit >= self.limit:
            return self
        if limit < 2:
            raise EmptyRangeError(f"Cannot truncate a prime table to limit {limit}")
        return PrimeTable(limit, self.upto(limit))

    def is_prime(self, n: int) -> bool:
        self._require_covers(n)
        idx = int(np.searchsorted(self.primes, n))
        return idx < len(self) and int(self.primes[idx]) == n

    def validate(self) -> None:
        """
        Check the structural invariants of the table.

        Raises:
            PreconditionError: If the primes are not strictly increasing,
                do not start at 2 or exceed the limit.
        """
        if self.limit < 2:
            raise PreconditionError(f"Prime table limit {self.limit} is below 2")
        if len(self) == 0 or int(self.primes[0]) != 2:
            raise PreconditionError('Prime table does not start at 2')
        if int(self.primes[-1]) > self.limit:
            raise PreconditionError(
                f"Prime table holds {int(self.primes[-1])} above its limit {self.limit}")
        if len(self) > 1 and not bool(np.all(np.diff(self.primes) > 0)):
            raise PreconditionError('Prime table is not strictly increasing')

    def _require_covers(self, x: int) -> None:
        if x > self.limit:
            raise PreconditionError(
                f"Prime table with limit {self.limit} does not cover {x}")


@dataclass(frozen=True)
class Factorization:
    """An integer ``n`` as ascending ``(prime, exponent)`` pairs."""

    n: int
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        factors = tuple((int(p), int(e)) for p, e in self.factors)
        object.__setattr__(self, 'factors', factors)
        if self.n < 1:
            raise PreconditionError(f"Cannot factor {self.n}")
        product = 1
        previous = 1
        for p, e in factors:
            if p <= previous or e < 1:
                raise PreconditionError(f"Malformed factor list {factors!r}")
            previous = p
            product *= p ** e
        if product != self.n:
            raise PreconditionError(f"Factors {factors!r} multiply to {product}, not {self.n}")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]]) -> Factorization:
        n = 1
        for p, e in pairs:
            n *= p ** e
        return cls(n, tuple(pairs))

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


def _odd_base_primes(bound: int) -> np.ndarray:
    """Odd primes <= bound by a plain sieve of Eratosthenes."""
    if bound < 3:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(bound + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime)[1:].astype(np.int64)


def _sieve_segment(low: int, high: int, base: Sequence[int]) -> np.ndarray:
    """Odd primes in [low, high); ``low`` is odd and the mask stores odd numbers only."""
    mask = np.ones((high - low + 1) // 2, dtype=bool)
    for p in base:
        square = p * p
        if square >= high:
            break
        start = max(square, ((low + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start < high:
            mask[(start - low) // 2::p] = False
    return low + 2 * np.flatnonzero(mask).astype(np.int64)


def _estimated_table_bytes(limit: int) -> int:
    return int(8 * 1.26 * limit / math.log(limit)) + 8


def sieve_primes(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> PrimeTable:
    """
    Enumerate every prime <= limit with a segmented, odd-only sieve.

    Args:
        limit: Sieve bound (inclusive)
        segment_size: Odd entries per segment
        workers: Threads sieving segments; segments are concatenated in order
            so the result does not depend on this value
        memory_budget: Maximum estimated size of the prime array in bytes

    Returns:
        PrimeTable: The primes <= limit

    Raises:
        EmptyRangeError: If limit < 2
        ResourceError: If the table would exceed the memory budget
    """
    if limit < 2:
        raise EmptyRangeError(f"No primes below {limit}")
    if segment_size < 1:
        raise PreconditionError(f"Segment size must be positive, got {segment_size}")
    estimate = _estimated_table_bytes(limit)
    if estimate > memory_budget:
        raise ResourceError(
            f"A prime table up to {limit} needs about {estimate} bytes, "
            f"above the budget of {memory_budget}")

    base = _odd_base_primes(math.isqrt(limit)).tolist()
    span = 2 * segment_size
    bounds = [(low, min(low + span, limit + 1)) for low in range(3, limit + 1, span)]
    logger.debug('Sieving %d segments up to %d with %d worker(s)', len(bounds), limit, workers)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            segments = list(pool.map(lambda b: _sieve_segment(b[0], b[1], base), bounds))
    else:
        segments = [_sieve_segment(low, high, base) for low, high in bounds]

    primes = np.concatenate([np.array([2], dtype=np.int64), *segments])
    logger.info('Sieved %d primes up to %d', len(primes), limit)
    return PrimeTable(limit, primes)


def trial_division(n: int, primes: Sequence[int]) -> Factorization:
    """
    Factor n by the given ascending primes.

    The caller guarantees that the last prime squared is at least n, so any
    cofactor left once the loop stops is prime.
    """
    factors = []
    m = n
    for p in primes:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(factors))


def factor(n: int, table: PrimeTable) -> Factorization:
    """
    Factor n by trial division over the table.

    Raises:
        PreconditionError: If n < 1 or table.limit² < n
    """
    if n < 1:
        raise PreconditionError(f"Cannot factor {n}")
    if table.limit * table.limit < n:
        raise PreconditionError(
            f"Prime table with limit {table.limit} cannot resolve {n}; "
            f"need a limit of at least {math.isqrt(n - 1) + 1}")
    return trial_division(n, table.as_list)


def _as_factorization(value: int | Factorization, table: PrimeTable | None) -> Factorization:
    if isinstance(value, Factorization):
        return value
    if table is None:
        return factor_integer(value)
    return factor(value, table)


def mobius(n: int | Factorization, table: PrimeTable | None = None) -> int:
    f = _as_factorization(n, table)
    if not f.is_squarefree:
        return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi(f: int | Factorization, table: PrimeTable | None = None) -> int:
    f = _as_factorization(f, table)
    result = 1
    for p, e in f.factors:
        result *= p ** (e - 1) * (p - 1)
    return result


def tau(f: int | Factorization, table: PrimeTable | None = None) -> int:
    f = _as_factorization(f, table)
    return math.prod(e + 1 for _, e in f.factors)


def omega(f: int | Factorization, table: PrimeTable | None = None) -> int:
    return len(_as_factorization(f, table).factors)


def radical(f: int | Factorization, table: PrimeTable | None = None) -> int:
    """k' = product of the distinct primes dividing k."""
    return math.prod(_as_factorization(f, table).primes)


def divisors(
    f: int | Factorization,
    table: PrimeTable | None = None,
    cap: int = DEFAULT_DIVISOR_CAP,
) -> list[int]:
    """
    All divisors, ascending.

    Raises:
        ResourceError: If there are more than ``cap`` divisors
    """
    return [d for d, _ in divisors_with_phi(f, table, cap)]


def divisors_with_phi(
    f: int | Factorization,
    table: PrimeTable | None = None,
    cap: int = DEFAULT_DIVISOR_CAP,
) -> list[tuple[int, int]]:
    """Ascending ``(d, φ(d))`` pairs over the divisors d."""
    f = _as_factorization(f, table)
    count = tau(f)
    if count > cap:
        raise ResourceError(f"{f.n} has {count} divisors, above the cap of {cap}")
    pairs = [(1, 1)]
    for p, e in f.factors:
        grown = []
        for d, phi in pairs:
            grown.append((d, phi))
            power, phi_power = 1, 1
            for i in range(1, e + 1):
                power *= p
                phi_power = p - 1 if i == 1 else phi_power * p
                grown.append((d * power, phi * phi_power))
        pairs = grown
    pairs.sort()
    return pairs


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """base^exponent mod modulus on arbitrary-precision ints."""
    if modulus < 2:
        raise PreconditionError(f"Modulus must be at least 2, got {modulus}")
    if exponent < 0:
        raise PreconditionError(f"Exponent must be non-negative, got {exponent}")
    return pow(base, exponent, modulus)


def prime_count_in_ap(x: int, d: int, table: PrimeTable) -> int:
    """π(x; d, 1): primes p <= x with p ≡ 1 mod d."""
    if d < 1:
        raise PreconditionError(f"Modulus d must be positive, got {d}")
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover {x}")
    primes = table.upto(x)
    return int(np.count_nonzero((primes - 1) % d == 0))


def mobius_sieve(limit: int) -> np.ndarray:
    """μ(n) for n in [0, limit] (μ(0) is stored as 0)."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in _all_primes_upto(limit):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def phi_sieve(limit: int) -> np.ndarray:
    """φ(n) for n in [0, limit]."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in _all_primes_upto(limit):
        phi[p::p] -= phi[p::p] // p
    return phi


def smallest_prime_factors(limit: int) -> np.ndarray:
    """Least prime factor of n for n in [0, limit]; 0 and 1 map to themselves."""
    spf = np.arange(limit + 1, dtype=np.int64)
    for p in _all_primes_upto(math.isqrt(limit)):
        block = spf[p * p::p]
        block[block == np.arange(p * p, limit + 1, p)] = p
    return spf


def _all_primes_upto(limit: int) -> list[int]:
    if limit < 2:
        return []
    return [2] + _odd_base_primes(limit).tolist()


@lru_cache(maxsize=64)
def small_primes(bound: int) -> tuple[int, ...]:
    """Primes <= bound, cached for repeated trial division."""
    return tuple(_all_primes_upto(bound))


def factor_integer(n: int) -> Factorization:
    """Factor n by trial division over the primes up to √n."""
    if n < 1:
        raise PreconditionError(f"Cannot factor {n}")
    return trial_division(n, small_primes(math.isqrt(n) + 1))
