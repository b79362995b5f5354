"""
Command-line entry point: ``ntos <subcommand> [options]``.

Exit codes: 0 on success, 1 when a verification or computation fails,
2 on usage errors (bad flags or arguments outside an operation's domain).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any
from typing import TextIO

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from . import analytic
from . import expsum
from . import experiments
from . import verify
from .arith import PrimeTable
from .arith import factor_integer
from .arith import sieve_primes
from .cache import find_cached
from .cache import load_table
from .cache import save_table
from .cache import table_filename
from .config import OUTPUT_FORMATS
from .config import Config
from .config import load_config
from .errors import CacheError
from .errors import DomainError
from .errors import EmptyRangeError
from .errors import NtosError
from .errors import PreconditionError
from .order import factor_pm1
from .order import order_spectrum
from .order import rectangle_summary

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
FAILURE = 1


def configure_logging(verbosity: int) -> None:
    """Route log records to standard error through rich."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    logging.basicConfig(level=level, format='%(message)s', datefmt='[%X]', handlers=[handler], force=True)


def load_or_build_table(limit: int, config: Config) -> PrimeTable:
    """
    Primes up to ``limit`` from the cache, or a fresh sieve written to it.

    A cached table with a larger limit is truncated to ``limit``. A corrupt
    cache file, or one covering less than its name claims, is removed and
    rebuilt; an unwritable cache directory only costs the write.
    """
    if limit < 2:
        raise EmptyRangeError(f"No primes below {limit}")
    cached = find_cached(config.cache_dir, limit)
    if cached is not None:
        try:
            table = load_table(cached)
            if table.limit < limit:
                raise CacheError(f"{cached.name} covers {table.limit}, below the requested {limit}")
            logger.info('Loaded %d primes from %s', len(table), cached)
            return table.truncate(limit)
        except (CacheError, OSError) as e:
            logger.warning('Rebuilding prime table, cache file %s is unusable: %s', cached, e)
            try:
                cached.unlink()
            except OSError:
                pass

    table = sieve_primes(limit, workers=config.threads)
    try:
        save_table(table, config.cache_dir / table_filename(limit))
    except OSError as e:
        logger.warning('Not caching primes, %s is not writable: %s', config.cache_dir, e)
    return table


def _positive_int(text: str) -> int:
    try:
        if any(c in text for c in 'eE.'):
            # allows 1e5 on the command line
            number = float(text)
            if not number.is_integer():
                raise ValueError(text)
            value = int(number)
        else:
            value = int(text)
    except (ValueError, OverflowError):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ntos',
        description='Multiplicative-order statistics modulo primes.',
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--cache-dir', type=Path, help='prime table cache directory')
    parser.add_argument('--threads', help="worker count or 'auto'")
    parser.add_argument('--work-budget', help='largest accepted x*y')
    parser.add_argument('--config', type=Path, help='config file (key = value TOML)')
    parser.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, help='output format')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='more logging (repeatable)')
    sub = parser.add_subparsers(dest='command', required=True, metavar='command')

    p = sub.add_parser('sieve', help='count or list the primes up to a limit')
    p.add_argument('--limit', type=_positive_int, required=True)
    p.add_argument('--list', action='store_true', help='emit every prime')

    p = sub.add_parser('orders', help='per-prime order aggregates over a <= y, p <= x')
    p.add_argument('--x', type=_positive_int)
    p.add_argument('--y', type=_positive_int)
    p.add_argument('--threshold', type=float, default=0.0, help='count orders above this value')
    p.add_argument('--p', type=_positive_int, help='print the order spectrum of one prime instead')

    p = sub.add_parser('constants', help='print the analytic constants with tail bounds')
    p.add_argument('--truncation', type=_positive_int, default=analytic.DEFAULT_PRIME_TRUNCATION)
    p.add_argument('--k-truncation', type=_positive_int, default=analytic.DEFAULT_K_TRUNCATION)

    p = sub.add_parser('expsum', help='maximal subgroup exponential sums as CSV')
    p.add_argument('--p-min', type=_positive_int, default=3)
    p.add_argument('--p-max', type=_positive_int, required=True, help='exclusive upper bound')
    p.add_argument('--d', type=_positive_int, help='subgroup order; primes with d not dividing p-1 are skipped')
    p.add_argument('--min-ratio', type=float, default=0.25,
                   help='without --d, the smallest d with log d / log p >= this ratio')

    p = sub.add_parser('experiment', help='run a theorem-level experiment')
    p.add_argument('--theorem', choices=('t1', 't2', 't3', 'c11'), required=True)
    p.add_argument('--x', type=_positive_int, required=True)
    p.add_argument('--y', type=_positive_int, required=True)
    p.add_argument('--psi', default='log3', help='log2loglog, log3 or power:θ (t2 only)')
    p.add_argument('--out', choices=('csv', 'json'), default='json')
    p.add_argument('--decompose', action='store_true')

    p = sub.add_parser('probe', help='auxiliary probes')
    p.add_argument('kind', choices=('luca', 'harmonic', 'tau'))
    p.add_argument('--x', type=_positive_int, required=True)
    p.add_argument('--d', type=_positive_int, default=1, help='modulus (harmonic) or k (tau)')

    p = sub.add_parser('verify', help='run the invariant suite')
    p.add_argument('--full', action='store_true', help='acceptance-scale checks')
    return parser


def _emit_json(out: TextIO, payload: Any) -> None:
    out.write(json.dumps(payload, indent=2, sort_keys=False))
    out.write('\n')


def _cmd_sieve(args, config: Config, out: TextIO) -> int:
    table = load_or_build_table(args.limit, config)
    if config.output_format == 'json':
        payload = {'limit': table.limit, 'count': len(table)}
        if args.list:
            payload['primes'] = table.as_list
        _emit_json(out, payload)
    elif config.output_format == 'csv' or args.list:
        out.write('p\n')
        out.writelines(f"{p}\n" for p in table.as_list)
    else:
        out.write(f"pi({table.limit}) = {len(table)}\n")
    return 0


def _cmd_orders(args, config: Config, out: TextIO) -> int:
    if args.p is not None:
        if factor_integer(args.p).factors != ((args.p, 1),):
            raise PreconditionError(f"--p {args.p} is not a prime")
        spectrum = order_spectrum(args.p, factor_pm1(args.p))
        if config.output_format == 'json':
            _emit_json(out, {'p': spectrum.p, 'spectrum': {str(d): n for d, n in spectrum.entries.items()}})
        else:
            out.write('d,count\n')
            out.writelines(f"{d},{n}\n" for d, n in spectrum.entries.items())
        return 0
    if args.x is None or args.y is None:
        raise PreconditionError('orders needs --x and --y, or --p')
    table = load_or_build_table(max(args.x, 2), config)
    summary = rectangle_summary(
        args.x, args.y, args.threshold, table,
        workers=config.threads, work_budget=config.work_budget)
    if config.output_format == 'json':
        _emit_json(out, {
            'x': summary.x,
            'y': summary.y,
            'threshold': summary.threshold,
            'reciprocal_total': summary.reciprocal_total,
            'count_total': summary.count_total,
            'order_total': summary.order_total,
        })
    else:
        summary.write_csv(out)
    return 0


def _cmd_constants(args, config: Config, out: TextIO) -> int:
    rows = analytic.constants_table(args.truncation, args.k_truncation)
    if config.output_format == 'json':
        _emit_json(out, [
            {
                'name': c.name,
                'value': _fmt_value(c.value),
                'tail_bound': c.tail_bound,
                'truncation': c.truncation,
                'meta': c.meta,
            }
            for c in rows
        ])
    elif config.output_format == 'csv':
        out.write('name,value,tail_bound,truncation\n')
        for c in rows:
            out.write(f"{c.name},{_fmt_value(c.value)},{c.tail_bound:.3e},{c.truncation or ''}\n")
    else:
        table = Table(title='Constants')
        table.add_column('name')
        table.add_column('value', justify='right')
        table.add_column('tail_bound', justify='right')
        table.add_column('truncation', justify='right')
        for c in rows:
            table.add_row(c.name, _fmt_value(c.value), f"{c.tail_bound:.3e}", str(c.truncation or '-'))
        Console(file=out, width=120).print(table)
    return 0


def _fmt_value(value) -> str:
    """15 significant digits."""
    return f"{float(value):.15g}"


def _cmd_expsum(args, config: Config, out: TextIO) -> int:
    table = load_or_build_table(max(args.p_max, 2), config)
    if args.d is None:
        profiles = expsum.decay_profile(table, args.p_min, args.p_max, args.min_ratio, work_budget=config.work_budget)
    else:
        profiles = []
        for p in table.upto(args.p_max - 1).tolist():
            if p >= args.p_min and (p - 1) % args.d == 0:
                profiles.append(expsum.max_subgroup_sum(p, args.d, work_budget=config.work_budget))
    if config.output_format == 'json':
        _emit_json(out, [dict(zip(expsum.CSV_FIELDS, pr.csv_row())) for pr in profiles])
        return 0
    out.write(','.join(expsum.CSV_FIELDS) + '\n')
    for pr in profiles:
        out.write(','.join(pr.csv_row()) + '\n')
    return 0


def _cmd_experiment(args, config: Config, out: TextIO) -> int:
    table = load_or_build_table(max(args.x, 2), config)
    common = {'workers': config.threads, 'work_budget': config.work_budget, 'decompose': args.decompose}
    if args.theorem == 't1':
        report = experiments.run_t1(args.x, args.y, table, **common)
    elif args.theorem == 't2':
        report = experiments.run_t2(args.x, args.y, experiments.PsiSpec.parse(args.psi), table, **common)
    elif args.theorem == 't3':
        report = experiments.run_t3(args.x, args.y, table, **common)
    else:
        report = experiments.run_c11(args.x, args.y, table, **common)
    if args.out == 'csv':
        report.write_csv(out)
    else:
        _emit_json(out, report.to_dict())
    return 0


def _cmd_probe(args, config: Config, out: TextIO) -> int:
    table = load_or_build_table(max(args.x, 2), config)
    if args.kind == 'luca':
        probe = experiments.luca_average_probe(args.x, table)
        payload = {
            'x': probe.x,
            'empirical': probe.empirical,
            'c': probe.c,
            'deviation': probe.deviation,
            'average_order': probe.average_order,
            'half_cx': probe.half_cx,
        }
    elif args.kind == 'harmonic':
        probe = experiments.harmonic_ap_probe(args.x, args.d, table)
        payload = {
            'x': probe.x,
            'd': probe.d,
            'sum': probe.sum,
            'predicted': probe.predicted,
            'deviation': probe.deviation,
        }
    else:
        probe = analytic.tau_sum_probe(args.x, args.d, table)
        payload = {
            'x': probe.x,
            'k': probe.k,
            'exact': probe.exact,
            'predicted': probe.predicted,
            'ratio': probe.ratio,
        }
    if config.output_format == 'csv':
        out.write(','.join(payload) + '\n')
        out.write(','.join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in payload.values()) + '\n')
    else:
        _emit_json(out, payload)
    return 0


def _cmd_verify(args, config: Config, out: TextIO) -> int:
    scale = verify.FULL if args.full else verify.QUICK
    table = load_or_build_table(scale.table_limit, config)
    results = verify.run_suite(table, scale, workers=config.threads)
    if config.output_format == 'json':
        _emit_json(out, [
            {'name': r.name, 'passed': r.passed, 'seconds': r.seconds, 'detail': r.detail}
            for r in results
        ])
    else:
        grid = Table(title=f"ntos verify ({scale.name})")
        grid.add_column('check')
        grid.add_column('status')
        grid.add_column('seconds', justify='right')
        grid.add_column('detail')
        for r in results:
            status = '[green]ok[/green]' if r.passed else '[red]FAILED[/red]'
            grid.add_row(r.name, status, f"{r.seconds:.2f}", r.detail)
        Console(file=out, width=120).print(grid)
    return 0 if all(r.passed for r in results) else FAILURE


COMMANDS = {
    'sieve': _cmd_sieve,
    'orders': _cmd_orders,
    'constants': _cmd_constants,
    'expsum': _cmd_expsum,
    'experiment': _cmd_experiment,
    'probe': _cmd_probe,
    'verify': _cmd_verify,
}


def dispatch(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    """
    Parse ``argv`` and run the selected subcommand.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])
        out: Result stream (defaults to standard output)

    Returns:
        int: Process exit code
    """
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE_ERROR if e.code not in (0, None) else 0

    configure_logging(args.verbose)
    try:
        config = load_config(
            {
                'cache_dir': args.cache_dir,
                'threads': args.threads,
                'work_budget': args.work_budget,
                'output_format': args.output_format,
            },
            config_file=args.config,
        )
        return COMMANDS[args.command](args, config, out)
    except (PreconditionError, DomainError, EmptyRangeError) as e:
        logger.error('%s', e)
        return USAGE_ERROR
    except NtosError as e:
        logger.error('%s', e)
        return FAILURE


def main() -> None:
    sys.exit(dispatch())
