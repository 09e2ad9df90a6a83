"""Factorial values, exact and as streams of residues modulo a prime pool.

The scan never materializes n! per step. It carries n! mod p for each
pool prime and multiplies by n to advance, which keeps the per-step cost
flat. Exact factorials are computed on demand for the few n that survive
filtering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exact_arith import is_prime_64

# Largest factorial the engine will materialize without an explicit override.
EXACT_FACTORIAL_CEILING = 10**7

# Scan ceiling; pool primes must exceed max_n yet stay comfortably 64-bit.
MAX_SUPPORTED_N = (1 << 32) - 1


class CeilingError(ValueError):
    """A requested value lies beyond a configured or structural limit."""


@dataclass(frozen=True)
class PrimePool:
    """Odd primes strictly above max_n, strictly increasing.

    Every pool prime is coprime to every n! with n <= max_n, so residues
    in a factorial stream over this pool are never zero.
    """

    max_n: int
    primes: tuple[int, ...]

    def __post_init__(self) -> None:
        assert self.primes, "pool must be non-empty"
        prev = max(self.max_n, 2)
        for p in self.primes:
            assert p > prev and p % 2 == 1, "pool must be odd, increasing, above max_n"
            prev = p


@dataclass
class FactorialState:
    """Position n of a factorial residue stream over some pool.

    residues[i] == n! mod pool.primes[i]. The exact value is optional and
    only carried when a caller asked for it.
    """

    n: int
    residues: list[int] = field(repr=False)
    exact: int | None = field(default=None, repr=False)


def build_prime_pool(max_n: int, count: int) -> PrimePool:
    """The count smallest odd primes strictly greater than max_n."""
    if max_n < 0:
        raise ValueError("max_n must be non-negative")
    if max_n > MAX_SUPPORTED_N:
        raise CeilingError(f"max_n {max_n} exceeds supported ceiling {MAX_SUPPORTED_N}")
    if count < 1:
        raise ValueError("count must be positive")
    primes = []
    c = max(max_n + 1, 3)
    if c % 2 == 0:
        c += 1
    while len(primes) < count:
        if is_prime_64(c):
            primes.append(c)
        c += 2
    return PrimePool(max_n=max_n, primes=tuple(primes))


def initial_state(pool: PrimePool, with_exact: bool = False) -> FactorialState:
    """Stream positioned at n = 0, where n! = 1."""
    return FactorialState(
        n=0,
        residues=[1] * len(pool.primes),
        exact=1 if with_exact else None,
    )


def advance(state: FactorialState, pool: PrimePool) -> FactorialState:
    """The stream one step later: multiply every residue by n + 1."""
    if state.n >= pool.max_n:
        raise CeilingError(f"stream at n={state.n} cannot advance past pool max_n={pool.max_n}")
    n = state.n + 1
    residues = [r * n % p for r, p in zip(state.residues, pool.primes)]
    exact = state.exact * n if state.exact is not None else None
    return FactorialState(n=n, residues=residues, exact=exact)


def factorial_exact(n: int, *, ceiling: int = EXACT_FACTORIAL_CEILING) -> int:
    """n! as an exact integer. Refuses n above the ceiling."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > ceiling:
        raise CeilingError(f"n={n} exceeds exact factorial ceiling {ceiling}")
    return math.factorial(n)


def is_factorial(x: int) -> int | None:
    """The n with n! == x, or None.

    Division chain: strip 2, then 3, and so on until the quotient hits 1
    or a division fails. x == 1 reports 0 (the smaller of the two valid
    preimages 0 and 1).
    """
    if x < 1:
        return None
    if x == 1:
        return 0
    d = 2
    while x > 1:
        if x % d:
            return None
        x //= d
        d += 1
    return d - 1
