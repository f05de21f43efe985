"""Signed prime-power products with rational exponents.

Closed forms such as ``2**(w*w/24 - 3*w/4 + k + 1/3)`` are only integral once
all exponents of a term are combined, so they are carried symbolically and
collapsed at the end; there is no floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Mapping, Union

from .errors import NonIntegralError

Exponent = Union[int, Fraction]

TRIAL_DIVISION_LIMIT = 10**7


def factorint(n: int, limit: int = TRIAL_DIVISION_LIMIT) -> tuple[dict[int, int], int]:
    """Trial-divide ``n > 0`` by primes up to ``limit``; return (factors, cofactor)."""
    if n < 1:
        raise ValueError("factorint needs a positive integer")
    out: dict[int, int] = {}
    for f in (2, 3):
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
    f, step = 5, 2
    bound = min(limit, isqrt(n))
    while f <= bound:
        if n % f == 0:
            while n % f == 0:
                out[f] = out.get(f, 0) + 1
                n //= f
            bound = min(limit, isqrt(n))
        f += step
        step = 6 - step
    if n > 1 and n <= limit * limit:
        out[n] = out.get(n, 0) + 1
        n = 1
    return out, n


def _legendre(n: int, p: int) -> int:
    e, q = 0, p
    while q <= n:
        e += n // q
        q *= p
    return e


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, ok in enumerate(sieve) if ok]


@dataclass(frozen=True)
class FactoredValue:
    """sign * residual * prod(p ** e) with rational exponents ``e``.

    ``residual`` holds an unfactored positive cofactor (usually 1).
    """

    sign: int = 1
    exponents: Mapping[int, Fraction] = field(default_factory=dict)
    residual: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        clean = {p: Fraction(e) for p, e in self.exponents.items() if e != 0}
        object.__setattr__(self, "exponents", dict(sorted(clean.items())))
        object.__setattr__(self, "residual", Fraction(self.residual))
        if self.sign == 0:
            object.__setattr__(self, "exponents", {})
            object.__setattr__(self, "residual", Fraction(1))

    @classmethod
    def from_int(cls, n: int) -> FactoredValue:
        if n == 0:
            return cls(0)
        factors, rest = factorint(abs(n))
        return cls(1 if n > 0 else -1, {p: Fraction(e) for p, e in factors.items()}, Fraction(rest))

    @classmethod
    def from_fraction(cls, x: Fraction) -> FactoredValue:
        x = Fraction(x)
        return cls.from_int(x.numerator) / cls.from_int(x.denominator)

    @classmethod
    def from_factors(cls, factors: Mapping[int, Exponent], sign: int = 1) -> FactoredValue:
        return cls(sign, {p: Fraction(e) for p, e in factors.items()})

    @classmethod
    def prime_power(cls, p: int, e: Exponent) -> FactoredValue:
        return cls(1, {p: Fraction(e)})

    @classmethod
    def factorial(cls, n: int) -> FactoredValue:
        return cls(1, {p: Fraction(_legendre(n, p)) for p in _primes_upto(n)})

    @classmethod
    def product(cls, values: Iterable[FactoredValue]) -> FactoredValue:
        acc = cls()
        for v in values:
            acc = acc * v
        return acc

    def __mul__(self, other: FactoredValue | int) -> FactoredValue:
        if isinstance(other, int):
            other = FactoredValue.from_int(other)
        if self.sign == 0 or other.sign == 0:
            return FactoredValue(0)
        exps = dict(self.exponents)
        for p, e in other.exponents.items():
            exps[p] = exps.get(p, Fraction(0)) + e
        return FactoredValue(self.sign * other.sign, exps, self.residual * other.residual)

    __rmul__ = __mul__

    def inverse(self) -> FactoredValue:
        if self.sign == 0:
            raise ZeroDivisionError("inverse of zero")
        return FactoredValue(self.sign, {p: -e for p, e in self.exponents.items()}, 1 / self.residual)

    def __truediv__(self, other: FactoredValue | int) -> FactoredValue:
        if isinstance(other, int):
            other = FactoredValue.from_int(other)
        return self * other.inverse()

    def __pow__(self, e: Exponent) -> FactoredValue:
        e = Fraction(e)
        if self.sign == 0:
            if e <= 0:
                raise ZeroDivisionError("zero to a non-positive power")
            return self
        if e.denominator != 1 and (self.sign < 0 or self.residual != 1):
            raise NonIntegralError("fractional power of a negative or partly unfactored value")
        sign = self.sign if e.denominator == 1 and e.numerator % 2 else 1
        residual = self.residual ** int(e) if e.denominator == 1 else Fraction(1)
        return FactoredValue(sign, {p: x * e for p, x in self.exponents.items()}, residual)

    def is_rational(self) -> bool:
        return all(e.denominator == 1 for e in self.exponents.values())

    def to_fraction(self) -> Fraction:
        if self.sign == 0:
            return Fraction(0)
        bad = {p: e for p, e in self.exponents.items() if e.denominator != 1}
        if bad:
            raise NonIntegralError(f"non-integral prime exponents {bad}")
        num, den = 1, 1
        for p, e in self.exponents.items():
            if e > 0:
                num *= p ** int(e)
            else:
                den *= p ** int(-e)
        return self.sign * Fraction(num, den) * self.residual

    def to_int(self) -> int:
        x = self.to_fraction()
        if x.denominator != 1:
            raise NonIntegralError(f"value {x} is not an integer")
        return x.numerator


def collapse_sum(terms: Iterable[FactoredValue]) -> Fraction:
    """Exact sum of factored terms; each term must have integral exponents."""
    return sum((t.to_fraction() for t in terms), Fraction(0))
