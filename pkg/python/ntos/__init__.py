"""
ntos - multiplicative-order statistics modulo primes, the analytic constants
behind their averages, and subgroup exponential sums.
"""
from __future__ import annotations

__version__ = '0.1.0'

from .analytic import ConstantValue
from .analytic import c1_of_k
from .analytic import c2_of_k
from .analytic import log_integral
from .analytic import prime_log_sum
from .analytic import stephens_c
from .analytic import tau_identity_check
from .analytic import theorem_C
from .analytic import zeta_ratio
from .arith import Factorization
from .arith import PrimeTable
from .arith import divisors
from .arith import divisors_with_phi
from .arith import euler_phi
from .arith import factor
from .arith import mobius
from .arith import sieve_primes
from .arith import tau
from .config import Config
from .config import load_config
from .errors import CacheError
from .errors import ContractViolation
from .errors import DomainError
from .errors import EmptyRangeError
from .errors import NtosError
from .errors import PreconditionError
from .errors import ResourceError
from .errors import UndefinedOrderError
from .errors import VerificationFailed
from .experiments import ExperimentReport
from .experiments import PsiSpec
from .experiments import harmonic_ap_probe
from .experiments import luca_average_probe
from .experiments import run_c11
from .experiments import run_t1
from .experiments import run_t2
from .experiments import run_t3
from .expsum import SubgroupSumProfile
from .expsum import counting_probe
from .expsum import erdos_turan_bound
from .expsum import exp_sum
from .expsum import max_subgroup_sum
from .expsum import subgroup_elements
from .expsum import true_discrepancy
from .order import OrderSpectrum
from .order import count_roots
from .order import multiplicative_order
from .order import order_spectrum
from .order import rectangle_summary
from .order import roots_of_unity

__all__ = [
    'CacheError',
    'Config',
    'ConstantValue',
    'ContractViolation',
    'DomainError',
    'EmptyRangeError',
    'ExperimentReport',
    'Factorization',
    'NtosError',
    'OrderSpectrum',
    'PrimeTable',
    'PreconditionError',
    'PsiSpec',
    'ResourceError',
    'SubgroupSumProfile',
    'UndefinedOrderError',
    'VerificationFailed',
    'c1_of_k',
    'c2_of_k',
    'count_roots',
    'counting_probe',
    'divisors',
    'divisors_with_phi',
    'erdos_turan_bound',
    'euler_phi',
    'exp_sum',
    'factor',
    'harmonic_ap_probe',
    'load_config',
    'log_integral',
    'luca_average_probe',
    'max_subgroup_sum',
    'mobius',
    'multiplicative_order',
    'order_spectrum',
    'prime_log_sum',
    'rectangle_summary',
    'roots_of_unity',
    'run_c11',
    'run_t1',
    'run_t2',
    'run_t3',
    'sieve_primes',
    'stephens_c',
    'subgroup_elements',
    'tau',
    'tau_identity_check',
    'theorem_C',
    'true_discrepancy',
    'zeta_ratio',
]
