"""Solution predicates for n! + 1 = m**2, in exact integer form.

With k = isqrt(n!), the only candidate is m = k + 1, and n is a solution
exactly when n! - k**2 == 2k, equivalently n! == k(k + 2). No square
roots of non-squares are ever materialized; every predicate is an
integer identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_arith import isqrt
from .factorial_engine import EXACT_FACTORIAL_CEILING, factorial_exact


class NotASolutionError(ValueError):
    """Raised when a decomposition only defined at solutions is requested elsewhere."""


@dataclass(frozen=True)
class VerifyReport:
    n: int
    k: int
    m_candidate: int
    k_even: bool
    product_matches: bool
    defect: int
    is_solution: bool
    m: int | None


@dataclass(frozen=True)
class FactorStructure:
    """n! = 2a * 2**(e-1) * b with a, b odd, e the 2-adic valuation of n!.

    half_even is the factor of {k, k+2} congruent to 2 mod 4 (it equals
    2a); half_pow is the other, carrying all remaining powers of two.
    """

    n: int
    a: int
    b: int
    e: int
    half_even: int
    half_pow: int


def candidate_m(n: int, *, ceiling: int = EXACT_FACTORIAL_CEILING) -> int:
    """The only integer whose square can equal n! + 1, namely isqrt(n!) + 1."""
    return isqrt(factorial_exact(n, ceiling=ceiling)) + 1


def defect(n: int, *, ceiling: int = EXACT_FACTORIAL_CEILING) -> int:
    """n! - isqrt(n!)**2. Lies in [0, 2k]; equals 2k exactly at solutions."""
    f = factorial_exact(n, ceiling=ceiling)
    k = isqrt(f)
    d = f - k * k
    assert 0 <= d <= 2 * k
    return d


def verify(n: int, *, ceiling: int = EXACT_FACTORIAL_CEILING) -> VerifyReport:
    """Full exact verdict for a single n."""
    f = factorial_exact(n, ceiling=ceiling)
    k = isqrt(f)
    d = f - k * k
    product = k * (k + 2)
    sol = d == 2 * k
    assert sol == (product == f)
    if sol:
        m = k + 1
        assert m * m == f + 1
        assert k % 2 == 0
    return VerifyReport(
        n=n,
        k=k,
        m_candidate=k + 1,
        k_even=k % 2 == 0,
        product_matches=sol,
        defect=d,
        is_solution=sol,
        m=k + 1 if sol else None,
    )


def bound_check(n: int, *, ceiling: int = EXACT_FACTORIAL_CEILING) -> bool:
    """n! <= k(k + 2), with equality exactly at solutions."""
    f = factorial_exact(n, ceiling=ceiling)
    k = isqrt(f)
    product = k * (k + 2)
    assert f <= product
    assert (f < product) == (f - k * k != 2 * k)
    return True


def factor_structure(n: int, *, ceiling: int = EXACT_FACTORIAL_CEILING) -> FactorStructure:
    """Decompose n! = (m-1)(m+1) at a solution into 2a and 2**(e-1) b.

    Of k and k + 2 exactly one is 2 mod 4; that factor is 2a with a odd,
    and the other absorbs the remaining e - 1 factors of two.
    """
    report = verify(n, ceiling=ceiling)
    if not report.is_solution:
        raise NotASolutionError(f"n={n} is not a solution, factor structure undefined")
    f = factorial_exact(n, ceiling=ceiling)
    k = report.k
    e = (f & -f).bit_length() - 1
    lo, hi = k, k + 2
    if lo % 4 == 2:
        half_even, half_pow = lo, hi
    else:
        half_even, half_pow = hi, lo
    assert half_even % 4 == 2
    a = half_even // 2
    assert half_pow % (1 << (e - 1)) == 0
    b = half_pow >> (e - 1)
    assert a % 2 == 1 and b % 2 == 1
    assert abs(2 * a - half_pow) == 2
    assert 2 * a * half_pow == f
    return FactorStructure(n=n, a=a, b=b, e=e, half_even=half_even, half_pow=half_pow)
