"""
Theorem-level experiments over the rectangle a <= y, p <= x.

Each run assembles the empirical left-hand side from
``order.rectangle_summary`` and the analytic main terms from ``analytic``
into an ExperimentReport.
"""
from __future__ import annotations

import csv
import logging
import math
import tomllib
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any
from typing import TextIO

from .analytic import log_integral
from .analytic import stephens_c
from .analytic import theorem_C
from .arith import PrimeTable
from .arith import euler_phi
from .arith import factor
from .errors import ContractViolation
from .errors import DomainError
from .errors import PreconditionError
from .order import DEFAULT_WORK_BUDGET
from .order import alpha
from .order import divisor_model_sum
from .order import exact_reciprocal_sum
from .order import rectangle_summary

logger = logging.getLogger(__name__)

DEFAULT_CUT_EXPONENT = 0.25
# Exponent A of the log^A x error scales in reports.
ERROR_LOG_POWER = 2

REPORT_FIELDS = (
    'theorem', 'x', 'y', 'psi_spec', 'empirical', 'main_term',
    'secondary_term', 'residual',
)


@dataclass(frozen=True)
class PsiSpec:
    """
    Threshold shape ψ for the large-order count; orders above x/ψ(x) count.

    Presets:
        log2loglog: (log x)²·max(log log x, 1)
        log3: (log x)³
        power:θ: x^θ with 0 < θ < 1
    """

    tag: str
    exponent: float | None = None

    TAGS = ('log2loglog', 'log3', 'power')

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise DomainError(f"Unknown psi preset {self.tag!r}, expected one of {', '.join(self.TAGS)}")
        if self.tag == 'power':
            if self.exponent is None or not 0 < self.exponent < 1:
                raise DomainError(f"power preset needs an exponent in (0, 1), got {self.exponent}")
        elif self.exponent is not None:
            raise DomainError(f"Preset {self.tag!r} takes no exponent")

    @classmethod
    def parse(cls, text: str) -> PsiSpec:
        """
        Parse ``log2loglog``, ``log3`` or ``power:θ``.

        Example:
            >>> PsiSpec.parse('power:0.5').evaluate(100.0)
            10.0
        """
        tag, sep, rest = text.strip().partition(':')
        if not sep:
            return cls(tag)
        try:
            exponent = float(rest)
        except ValueError:
            raise DomainError(f"Bad psi exponent in {text!r}") from None
        return cls(tag, exponent)

    def evaluate(self, x: float) -> float:
        if x < 2:
            raise DomainError(f"psi is defined on [2, inf), got {x}")
        log_x = math.log(x)
        if self.tag == 'log2loglog':
            return log_x ** 2 * max(math.log(log_x), 1.0)
        if self.tag == 'log3':
            return log_x ** 3
        return x ** self.exponent

    def __str__(self) -> str:
        return self.tag if self.exponent is None else f"{self.tag}:{self.exponent:g}"


@dataclass(frozen=True)
class ExperimentReport:
    """
    Empirical left side against the analytic main and secondary terms.

    ``residual`` is stored as (empirical - main_term) - secondary_term, so the
    bookkeeping identity holds exactly in floating point.
    """

    theorem: str
    x: int
    y: int
    psi_spec: str | None
    empirical: float
    main_term: float
    secondary_term: float
    residual: float
    decomposition: tuple[tuple[str, float], ...] | None = None
    extras: dict[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @classmethod
    def build(
        cls,
        theorem: str,
        x: int,
        y: int,
        empirical: float,
        main_term: float,
        secondary_term: float = 0.0,
        psi_spec: str | None = None,
        **kwargs,
    ) -> ExperimentReport:
        residual = (empirical - main_term) - secondary_term
        return cls(theorem, x, y, psi_spec, empirical, main_term, secondary_term, residual, **kwargs)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        if self.decomposition is not None:
            data['decomposition'] = [{'label': k, 'value': v} for k, v in self.decomposition]
        data['notes'] = list(self.notes)
        return data

    def write_csv(self, stream: TextIO) -> None:
        """One header row and one value row; extras become extra columns."""
        writer = csv.writer(stream, lineterminator='\n')
        extra_keys = sorted(self.extras)
        writer.writerow([*REPORT_FIELDS, *extra_keys])
        row = [self.theorem, self.x, self.y, self.psi_spec or '']
        row += [f"{v:.17g}" for v in (self.empirical, self.main_term, self.secondary_term, self.residual)]
        row += [f"{self.extras[k]:.17g}" for k in extra_keys]
        writer.writerow(row)


@lru_cache(maxsize=4)
def default_theorem_C() -> float:
    return float(theorem_C())


@lru_cache(maxsize=4)
def default_stephens_c() -> float:
    return float(stephens_c())


def _check_contract(x: int, y: int, table: PrimeTable) -> None:
    if x < 2 or y < 1:
        raise PreconditionError(f"Need x >= 2 and y >= 1, got x={x}, y={y}")
    if y > x:
        raise ContractViolation(f"Experiments assume y <= x, got x={x}, y={y}")
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover x={x}")


def run_t1(
    x: int,
    y: int,
    table: PrimeTable,
    constant: float | None = None,
    cut_exponent: float = DEFAULT_CUT_EXPONENT,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    decompose: bool = False,
) -> ExperimentReport:
    """
    Average reciprocal order (1/y) Σ_{a<=y} Σ_{p<=x} 1/l_a(p) against
    log x + C log log x.

    Args:
        x: Prime bound
        y: Residue bound, at most x
        table: Primes covering x
        constant: C; defaults to ``analytic.theorem_C()``
        cut_exponent: Orders below x^cut_exponent form the first decomposition range
        workers: Worker processes for the rectangle sum
        work_budget: Largest x·y accepted
        decompose: Add the per-range partial sums, the a = 1 share and the divisor model

    Raises:
        ContractViolation: If y > x
    """
    _check_contract(x, y, table)
    c = default_theorem_C() if constant is None else constant
    summary = rectangle_summary(
        x, y, 0.0, table, workers=workers, work_budget=work_budget, keep_histograms=decompose)
    empirical = summary.reciprocal_total / y
    log_log_x = math.log(math.log(x))

    decomposition = None
    if decompose:
        cut = x ** cut_exponent
        below = math.fsum(
            exact_reciprocal_sum({d: n for d, n in r.histogram.items() if d < cut})
            for r in summary.records)
        above = math.fsum(
            exact_reciprocal_sum({d: n for d, n in r.histogram.items() if d >= cut})
            for r in summary.records)
        decomposition = (
            (f"d < x^{cut_exponent:g}", below / y),
            (f"d >= x^{cut_exponent:g}", above / y),
            ('a = 1', table.pi(x) / y),
            ('divisor model', divisor_model_sum(x, -1, table)),
        )
    logger.info('t1 x=%d y=%d empirical=%.6f', x, y, empirical)
    return ExperimentReport.build(
        'T1', x, y, empirical, math.log(x), c * log_log_x,
        decomposition=decomposition,
        extras={'C': c, 'log_log_x': log_log_x},
    )


def run_t2(
    x: int,
    y: int,
    psi: PsiSpec,
    table: PrimeTable,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    decompose: bool = False,
) -> ExperimentReport:
    """
    (1/y)·#{(a, p) : l_a(p) > x/ψ(x)} against π(x).

    Only the effective error scale x·log x/ψ(x) is modeled; the remaining
    error terms involve a non-effective exponent.
    """
    _check_contract(x, y, table)
    psi_x = psi.evaluate(x)
    threshold = x / psi_x
    summary = rectangle_summary(x, y, threshold, table, workers=workers, work_budget=work_budget)
    empirical = summary.count_total / y
    scale = x * math.log(x) / psi_x
    decomposition = None
    if decompose:
        decomposition = (('divisor model', divisor_model_sum(x, 0, table)),)
    main = float(table.pi(x))
    return ExperimentReport.build(
        'T2', x, y, empirical, main, 0.0,
        psi_spec=str(psi),
        decomposition=decomposition,
        extras={
            'threshold': threshold,
            'psi': psi_x,
            'error_scale': scale,
            'scaled_residual': (empirical - main) / scale,
        },
        notes=('x^(2-delta) log^2 x / y term unmodeled',),
    )


def _order_sum_report(
    x: int, y: int, table: PrimeTable, constant: float | None,
    workers: int, work_budget: int, decompose: bool,
) -> tuple[int, float, tuple[tuple[str, float], ...] | None]:
    _check_contract(x, y, table)
    c = default_stephens_c() if constant is None else constant
    summary = rectangle_summary(x, y, x + 1, table, workers=workers, work_budget=work_budget)
    decomposition = None
    if decompose:
        decomposition = (('divisor model', divisor_model_sum(x, 1, table)),)
    return summary.order_total, c, decomposition


def run_t3(
    x: int,
    y: int,
    table: PrimeTable,
    constant: float | None = None,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    decompose: bool = False,
) -> ExperimentReport:
    """
    Average order (1/y) Σ_{a<=y} Σ_{p<=x, p∤a} l_a(p) against c·Li(x²).

    The order sum is an exact integer; it becomes a float only in the final
    division by y.
    """
    total, c, decomposition = _order_sum_report(
        x, y, table, constant, workers, work_budget, decompose)
    empirical = total / y
    main = c * log_integral(float(x) ** 2)
    pi_x = table.pi(x)
    per_prime = total / (y * pi_x)
    half_cx = c * x / 2
    logger.info('t3 x=%d y=%d ratio=%.6f', x, y, empirical / main)
    return ExperimentReport.build(
        'T3', x, y, empirical, main, 0.0,
        decomposition=decomposition,
        extras={
            'c': c,
            'ratio': empirical / main,
            'per_prime': per_prime,
            'half_cx': half_cx,
            'per_prime_ratio': per_prime / half_cx,
            'error_scale': x ** 2 / math.log(x) ** ERROR_LOG_POWER,
        },
    )


def run_c11(
    x: int,
    y: int,
    table: PrimeTable,
    constant: float | None = None,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    decompose: bool = False,
) -> ExperimentReport:
    """The order sum normalised per prime, (1/(y·π(x))) Σ l_a(p), against ½·c·x."""
    total, c, decomposition = _order_sum_report(
        x, y, table, constant, workers, work_budget, decompose)
    pi_x = table.pi(x)
    empirical = total / (y * pi_x)
    main = c * x / 2
    return ExperimentReport.build(
        'C1.1', x, y, empirical, main, 0.0,
        decomposition=decomposition,
        extras={
            'c': c,
            'ratio': empirical / main,
            'error_scale': x / math.log(x) ** ERROR_LOG_POWER,
        },
    )


@dataclass(frozen=True)
class LucaProbe:
    x: int
    empirical: float
    c: float
    average_order: float
    half_cx: float

    @property
    def deviation(self) -> float:
        return abs(self.empirical - self.c)


def luca_average_probe(x: int, table: PrimeTable, constant: float | None = None) -> LucaProbe:
    """
    (1/π(x)) Σ_{p<x} α(p-1)/(p-1) against c, with α exact, plus the average
    order (1/π(x)) Σ_{p<x} α(p-1) against ½·c·x.
    """
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover x={x}")
    primes = table.upto(x - 1).tolist()
    if not primes:
        raise PreconditionError(f"No primes below x={x}")
    c = default_stephens_c() if constant is None else constant
    density = Fraction(0)
    order_sum = Fraction(0)
    for p in primes:
        a = alpha(p - 1, factor(p - 1, table))
        density += a / (p - 1)
        order_sum += a
    count = len(primes)
    return LucaProbe(x, float(density / count), c, float(order_sum / count), c * x / 2)


@dataclass(frozen=True)
class HarmonicProbe:
    x: int
    d: int
    sum: float
    predicted: float

    @property
    def deviation(self) -> float:
        """|sum·φ(d) - log log x|, to be compared with a multiple of log d."""
        return abs(self.sum * euler_phi(self.d) - math.log(math.log(self.x)))


def harmonic_ap_probe(x: int, d: int, table: PrimeTable) -> HarmonicProbe:
    """Σ_{p<x, p≡1 (mod d)} 1/p against (log log x)/φ(d)."""
    if d < 1:
        raise PreconditionError(f"Modulus must be positive, got {d}")
    if x < 3:
        raise PreconditionError(f"Need x >= 3 for log log x, got {x}")
    if table.limit < x:
        raise PreconditionError(f"Prime table with limit {table.limit} does not cover x={x}")
    primes = table.upto(x - 1)
    chosen = primes[(primes - 1) % d == 0].tolist()
    total = math.fsum(1.0 / p for p in chosen)
    return HarmonicProbe(x, d, total, math.log(math.log(x)) / euler_phi(d))


def load_expectations() -> dict[str, Any]:
    """Artifact-derived tolerances shipped with the package."""
    text = resources.files('ntos').joinpath('expectations.toml').read_text(encoding='utf-8')
    data = tomllib.loads(text)
    if data.get('version') != 1:
        raise PreconditionError(f"Unsupported expectations version {data.get('version')!r}")
    return data
