"""Quadratic-residue rejection filter.

If n! + 1 is a perfect square then n! + 1 is a quadratic residue (or
zero) modulo every prime. A pool prime p with Legendre symbol
(n! + 1 | p) == -1 therefore disproves n without computing n! itself.
The filter is sound by construction: it can only reject non-solutions.
Each pool prime passes a random non-solution with probability about 1/2,
so a 48-prime pool leaks a false survivor roughly once in 2**48 trials.
"""

from __future__ import annotations

from dataclasses import dataclass

from .factorial_engine import FactorialState, PrimePool


@dataclass(frozen=True)
class FilterOutcome:
    passed: bool
    rejecting_prime: int | None
    symbols_evaluated: int


def passes(state: FactorialState, pool: PrimePool) -> FilterOutcome:
    """Evaluate (n! + 1 | p) over the pool in order, stopping at the first -1.

    The rejecting prime, when any prime rejects, is the earliest in pool
    order, so the outcome is independent of evaluation strategy.
    """
    assert len(state.residues) == len(pool.primes)
    evaluated = 0
    for r, p in zip(state.residues, pool.primes):
        evaluated += 1
        a = r + 1
        if a == p:
            # symbol is 0; a square can be divisible by p
            continue
        if pow(a, (p - 1) >> 1, p) == p - 1:
            return FilterOutcome(passed=False, rejecting_prime=p, symbols_evaluated=evaluated)
    return FilterOutcome(passed=True, rejecting_prime=None, symbols_evaluated=evaluated)
