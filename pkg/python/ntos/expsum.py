"""
Exponential sums over subgroups of (Z/pZ)*, Erdős–Turán discrepancy bounds
and the counting probes built on them.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Collection
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .arith import Factorization
from .arith import PrimeTable
from .arith import divisors
from .errors import PreconditionError
from .errors import ResourceError
from .order import VECTOR_MODULUS_CAP
from .order import count_roots
from .order import factor_pm1
from .order import primitive_root
from .order import roots_of_unity

logger = logging.getLogger(__name__)

DEFAULT_SUM_BUDGET = 10 ** 9
# Cells per phase matrix block.
_BLOCK_CELLS = 1 << 22

CSV_FIELDS = ('p', 'd', 'max_abs', 'normalized', 'log_p', 'log_d')


@dataclass(frozen=True)
class SubgroupSumProfile:
    """max_{1<=k<p} |Σ_{a∈H} e(ka/p)| for the subgroup H of order d."""

    p: int
    d: int
    max_abs: float
    argmax: int

    @property
    def normalized(self) -> float:
        return self.max_abs / self.d

    @property
    def log_p(self) -> float:
        return math.log(self.p)

    @property
    def log_d(self) -> float:
        return math.log(self.d)

    def csv_row(self) -> list[str]:
        return [
            str(self.p),
            str(self.d),
            f"{self.max_abs:.17g}",
            f"{self.normalized:.17g}",
            f"{self.log_p:.17g}",
            f"{self.log_d:.17g}",
        ]


def subgroup_elements(p: int, d: int, fact_pm1: Factorization | None = None) -> frozenset[int]:
    """The unique subgroup of order d in (Z/pZ)*: the d-th roots of unity."""
    return frozenset(roots_of_unity(p, d, fact_pm1))


def exp_sum(p: int, elements: Collection[int], k: int) -> complex:
    """
    Σ_{a∈H} exp(2πi·k·a/p), reducing k·a mod p in integers before the
    phase reaches floating point.
    """
    if any(a < 0 or a >= p for a in elements):
        raise PreconditionError(f"Residues must lie in [0, {p - 1}]")
    k %= p
    angles = [2 * math.pi * (k * a % p) / p for a in elements]
    return complex(math.fsum(math.cos(t) for t in angles), math.fsum(math.sin(t) for t in angles))


def _abs_sums(p: int, elements: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """|Σ_a e(k a/p)| for each k, in row blocks so the phase matrix stays bounded."""
    out = np.empty(len(ks), dtype=np.float64)
    rows = max(1, _BLOCK_CELLS // max(len(elements), 1))
    scale = 2 * np.pi / p
    for start in range(0, len(ks), rows):
        block = ks[start:start + rows]
        residues = np.outer(block, elements) % p
        phases = residues.astype(np.float64) * scale
        re = np.cos(phases).sum(axis=1)
        im = np.sin(phases).sum(axis=1)
        out[start:start + rows] = np.hypot(re, im)
    return out


def max_subgroup_sum(
    p: int,
    d: int,
    fact_pm1: Factorization | None = None,
    use_cosets: bool = True,
    work_budget: int = DEFAULT_SUM_BUDGET,
) -> SubgroupSumProfile:
    """
    Exact maximum of |Σ_{a∈H} e(ka/p)| over k = 1..p-1.

    The sum only depends on the coset kH, so with ``use_cosets`` only the
    (p-1)/d representatives g^i, i < (p-1)/d, are evaluated; the reported
    argmax is then the coset representative.

    Raises:
        PreconditionError: If d does not divide p - 1
        ResourceError: If the number of (k, a) pairs exceeds ``work_budget``
    """
    f = factor_pm1(p, fact_pm1)
    elements = np.asarray(roots_of_unity(p, d, f), dtype=np.int64)
    if p >= VECTOR_MODULUS_CAP:
        raise ResourceError(f"Phase products overflow int64 for p = {p}")
    if use_cosets:
        g = primitive_root(p, f)
        index = (p - 1) // d
        ks = np.empty(index, dtype=np.int64)
        r = 1
        for i in range(index):
            ks[i] = r
            r = r * g % p
    else:
        ks = np.arange(1, p, dtype=np.int64)
    work = len(ks) * d
    if work > work_budget:
        raise ResourceError(
            f"max_subgroup_sum(p={p}, d={d}) needs {work} pairs, budget is {work_budget}")
    sums = _abs_sums(p, elements, ks)
    best = int(np.argmax(sums))
    logger.debug('max_subgroup_sum p=%d d=%d evaluated %d frequencies', p, d, len(ks))
    return SubgroupSumProfile(p, d, float(sums[best]), int(ks[best]))


def erdos_turan_bound(
    n_points: int,
    m_terms: int,
    weyl_sums: Sequence[float],
    c1: float = 1.0,
    c2: float = 1.0,
) -> float:
    """
    c1·N/(M+1) + c2·Σ_{m=1}^{M} |W_m|/m, an upper bound on the discrepancy
    of N points whose Weyl sums are ``weyl_sums``.

    Args:
        n_points: N
        m_terms: M, at least 1
        weyl_sums: |Σ_n e(m x_n)| for m = 1..M
        c1: constant of the N/(M+1) term
        c2: constant of the Weyl-sum term (3 gives Montgomery's form)
    """
    if m_terms < 1:
        raise PreconditionError(f"M must be at least 1, got {m_terms}")
    if len(weyl_sums) != m_terms:
        raise PreconditionError(f"Expected {m_terms} Weyl sums, got {len(weyl_sums)}")
    if n_points < 1:
        raise PreconditionError(f"N must be positive, got {n_points}")
    tail = math.fsum(s / m for m, s in enumerate(weyl_sums, start=1))
    return c1 * n_points / (m_terms + 1) + c2 * tail


def _as_points(points: Sequence[float]) -> np.ndarray:
    values = np.asarray(points, dtype=np.float64)
    if values.size == 0:
        raise PreconditionError('Discrepancy needs at least one point')
    if np.any((values < 0) | (values >= 1)):
        raise PreconditionError('Points must lie in [0, 1)')
    return values


def true_discrepancy(points: Sequence[float]) -> float:
    """
    sup over 0 <= a < b <= 1 of | #{x_n ∈ (a, b)} - (b - a)·N |.

    Candidate endpoints are 0, 1 and the distinct points. The deficit is
    largest on an open interval (e_i, e_j) between candidates; the excess is
    approached by intervals shrinking onto [e_i, e_j] with i <= j, which can
    hold every point of that closed range except those at 0.
    """
    values = _as_points(points)
    n = values.size
    uniq, counts = np.unique(values, return_counts=True)
    zeros = int(counts[0]) if uniq[0] == 0 else 0
    inner = uniq > 0
    ends = np.concatenate(([0.0], uniq[inner], [1.0]))
    at = np.concatenate(([zeros], counts[inner], [0]))
    # points an open interval can still capture at that endpoint
    reach = np.concatenate(([0], counts[inner], [0]))
    below = np.concatenate(([0], np.cumsum(at)[:-1]))

    # each side is a left-endpoint term plus a right-endpoint term
    left_excess = reach - below - at + ends * n
    right_excess = below + at * (ends > 0) - ends * n
    excess = (right_excess + np.maximum.accumulate(left_excess)).max()
    left_deficit = below + at - ends * n
    right_deficit = ends * n - below
    deficit = (right_deficit[1:] + np.maximum.accumulate(left_deficit)[:-1]).max()
    return float(max(excess, deficit, 0.0))


def star_discrepancy(points: Sequence[float]) -> float:
    """sup over anchored intervals [0, b) of | #{x_n < b} - b·N |."""
    values = np.sort(_as_points(points))
    n = values.size
    ranks = np.arange(n, dtype=np.float64)
    # just above x_i: i+1 points counted against x_i·N; at x_i: i points.
    over = (ranks + 1) - values * n
    under = values * n - ranks
    return float(max(over.max(), under.max(), 0.0))


def subgroup_weyl_sums(p: int, elements: Collection[int], m_terms: int) -> list[float]:
    """|Σ_{a∈H} e(m·a/p)| for m = 1..M, the Weyl sums of the points a/p."""
    if m_terms < 1:
        raise PreconditionError(f"M must be at least 1, got {m_terms}")
    arr = np.asarray(sorted(elements), dtype=np.int64)
    ks = np.arange(1, m_terms + 1, dtype=np.int64) % p
    return _abs_sums(p, arr, ks).tolist()


@dataclass(frozen=True)
class CountingProbe:
    exact: int
    main: float
    error: float


def counting_probe(p: int, d: int, y: int, fact_pm1: Factorization | None = None) -> CountingProbe:
    """#{a < y : a^d ≡ 1 (mod p)} against (y/p)·d."""
    exact = count_roots(p, d, y, fact_pm1)
    main = d * y / p
    return CountingProbe(exact, main, exact - main)


def decay_profile(
    table: PrimeTable,
    lo: int,
    hi: int,
    min_ratio: float = 0.25,
    work_budget: int = DEFAULT_SUM_BUDGET,
) -> list[SubgroupSumProfile]:
    """
    For each prime p in [lo, hi), the profile of the smallest subgroup order
    d > 1 with log d / log p >= ``min_ratio``.
    """
    if hi > table.limit + 1:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover {hi - 1}")
    profiles = []
    for p in table.upto(hi - 1).tolist():
        if p < max(lo, 3):
            continue
        f = factor_pm1(p)
        floor = p ** min_ratio
        candidates = [d for d in divisors(f) if d > 1 and d >= floor]
        if not candidates:
            continue
        profiles.append(max_subgroup_sum(p, candidates[0], f, work_budget=work_budget))
    return profiles


def mean_normalized(profiles: Sequence[SubgroupSumProfile]) -> float:
    if not profiles:
        raise PreconditionError('No profiles to average')
    return math.fsum(pr.normalized for pr in profiles) / len(profiles)
