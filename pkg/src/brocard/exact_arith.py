"""Exact integer arithmetic primitives.

Everything here is exact: no floats, no rounding. Fractional values are
carried as truncated decimal fixed-point numbers (ScaledDecimal), so a
digit once printed never changes when more precision is requested.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

# Bit budget for scaled operands, overridable via environment.
DEFAULT_BIT_BUDGET = 1 << 26
BIT_BUDGET_ENV = "BROCARD_BIT_BUDGET"

# log2(10), rounded up a little; only used to estimate operand sizes.
_LOG2_10 = 3.3219280948873626

# Deterministic Miller-Rabin witness set for moduli below 2^64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class BitBudgetError(Exception):
    """Scaled operand would exceed the configured bit budget."""


def _dec_padded(v: int, width: int) -> str:
    """Decimal digits of v, zero-padded to width. Requires 0 <= v < 10**width.

    Splits recursively at a power of ten, so widths far beyond the
    interpreter's int-to-str conversion guard still render.
    """
    if width <= 3800:
        return str(v).zfill(width)
    half = width >> 1
    hi, lo = divmod(v, 10**half)
    return _dec_padded(hi, width - half) + _dec_padded(lo, half)


def decimal_str(v: int) -> str:
    """str(v) for any non-negative int, regardless of conversion limits."""
    if v < 0:
        raise ValueError("v must be non-negative")
    if v.bit_length() <= 12000:
        return str(v)
    width = v.bit_length() * 30103 // 100000 + 2
    return _dec_padded(v, width).lstrip("0") or "0"


def isqrt(x: int) -> int:
    """Floor of the square root of a non-negative integer."""
    return math.isqrt(x)


def root_floor(x: int, r: int) -> int:
    """Floor of the r-th root of x (x >= 0, r >= 1).

    Newton iteration from a power-of-two seed at least as large as the
    root, clamped afterwards so the bracket y**r <= x < (y+1)**r holds
    unconditionally.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    if r < 1:
        raise ValueError("r must be positive")
    if r == 1 or x < 2:
        return x
    if r == 2:
        return math.isqrt(x)
    if x.bit_length() <= r:
        return 1
    y = 1 << -(-x.bit_length() // r)
    while True:
        t = ((r - 1) * y + x // y ** (r - 1)) // r
        if t >= y:
            break
        y = t
    while y**r > x:
        y -= 1
    while (y + 1) ** r <= x:
        y += 1
    return y


def root_defect(x: int, r: int) -> int:
    """x minus the r-th power of root_floor(x, r). Zero iff x is a perfect r-th power."""
    d = x - root_floor(x, r) ** r
    assert d >= 0
    return d


@dataclass(frozen=True)
class ScaledDecimal:
    """mantissa * 10**-frac_digits, truncated, never rounded.

    Field equality is canonical for a fixed precision; values produced at
    different precisions compare via their digit strings.
    """

    mantissa: int
    frac_digits: int

    def __post_init__(self) -> None:
        if self.mantissa < 0:
            raise ValueError("mantissa must be non-negative")
        if self.frac_digits < 0:
            raise ValueError("frac_digits must be non-negative")

    @property
    def integer_part(self) -> int:
        return self.mantissa // 10**self.frac_digits

    def fraction_digits(self) -> str:
        """The fractional digit string, zero-padded to frac_digits."""
        if self.frac_digits == 0:
            return ""
        return _dec_padded(self.mantissa % 10**self.frac_digits, self.frac_digits)

    def __str__(self) -> str:
        if self.frac_digits == 0:
            return decimal_str(self.mantissa)
        return f"{decimal_str(self.integer_part)}.{self.fraction_digits()}"


def current_bit_budget() -> int:
    raw = os.environ.get(BIT_BUDGET_ENV)
    if raw is None:
        return DEFAULT_BIT_BUDGET
    budget = int(raw)
    if budget < 1:
        raise ValueError(f"{BIT_BUDGET_ENV} must be positive")
    return budget


def sqrt_digits(x: int, d: int, bit_budget: int | None = None) -> ScaledDecimal:
    """First d fractional digits of sqrt(x), truncated.

    Computes isqrt(x * 10**(2d)), which is exactly floor(sqrt(x) * 10**d).
    Raises BitBudgetError before materializing an operand whose size would
    exceed the budget (default 2**26 bits, env BROCARD_BIT_BUDGET).
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    if d < 0:
        raise ValueError("d must be non-negative")
    if bit_budget is None:
        bit_budget = current_bit_budget()
    est_bits = x.bit_length() + int(2 * d * _LOG2_10) + 2
    if est_bits > bit_budget:
        raise BitBudgetError(
            f"sqrt_digits operand needs about {est_bits} bits, budget is {bit_budget}"
        )
    mantissa = math.isqrt(x * 10 ** (2 * d))
    return ScaledDecimal(mantissa, d)


def modpow(a: int, e: int, p: int) -> int:
    """a**e mod p for 0 <= a < p, e >= 0, p >= 2."""
    if p < 2:
        raise ValueError("modulus must be >= 2")
    if not 0 <= a < p:
        raise ValueError("base must be reduced mod p")
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return pow(a, e, p)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a | p) for odd prime p, via Euler's criterion.

    Returns 0 if p divides a, +1 for quadratic residues, -1 otherwise.
    Caller guarantees p is an odd prime.
    """
    if not 0 <= a < p:
        raise ValueError("a must be reduced mod p")
    s = pow(a, (p - 1) >> 1, p)
    if s == 0:
        return 0
    if s == 1:
        return 1
    assert s == p - 1, "modulus is not an odd prime"
    return -1


def is_prime_64(p: int) -> bool:
    """Deterministic primality for 0 <= p < 2**64.

    Miller-Rabin with the first twelve prime witnesses, a set known to be
    exact for all 64-bit inputs.
    """
    if p >= 1 << 64:
        raise ValueError("input exceeds 64 bits")
    if p < 2:
        return False
    for q in _MR_WITNESSES:
        if p % q == 0:
            return p == q
    d = p - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_WITNESSES:
        x = pow(a, d, p)
        if x == 1 or x == p - 1:
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True
