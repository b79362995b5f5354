#!/usr/bin/env python3
"""Simple example comparing the average multiplicative order with its main term"""
from __future__ import annotations

from rich.console import Console
from rich.table import Table

from ntos import run_t3
from ntos import sieve_primes

if __name__ == '__main__':
    table = sieve_primes(20_000)
    grid = Table(title='Average order against c Li(x^2)')
    grid.add_column('x', justify='right')
    grid.add_column('empirical', justify='right')
    grid.add_column('main term', justify='right')
    grid.add_column('ratio', justify='right')
    for x in (1000, 5000, 20_000):
        # y stays well below x so the rectangle is cheap
        report = run_t3(x, 200, table)
        grid.add_row(str(x), f"{report.empirical:.6g}", f"{report.main_term:.6g}", f"{report.extras['ratio']:.4f}")
    Console().print(grid)
