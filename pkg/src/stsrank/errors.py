"""Exception hierarchy shared by the library and the CLI exit-code mapping."""

from __future__ import annotations


class StsRankError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class DesignError(StsRankError, ValueError):
    """An object violates its defining combinatorial property or a precondition."""


class UnknownConstantError(StsRankError, KeyError):
    """A base constant (Psi, Lambda, Pi) is not available in the registry."""

    exit_code = 2

    def __init__(self, symbol: str, order: int) -> None:
        self.symbol = symbol
        self.order = order
        super().__init__(f"unknown constant {symbol}_{order}")

    def __str__(self) -> str:
        return self.args[0]


class GuardExceeded(StsRankError, ValueError):
    """A brute-force routine was asked for an instance beyond its desk-scale guard."""

    exit_code = 3


class NonIntegralError(StsRankError, ArithmeticError):
    """An exact quantity that must be an integer collapsed to a non-integer."""
