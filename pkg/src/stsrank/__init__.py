"""Counting, structure and brute-force oracles for Steiner triple systems of deficient p-rank."""

from __future__ import annotations

from .counting import count_by_rank2, count_by_rank3, corollary2, corollary3
from .design import LatinSquare, SteinerTripleSystem, rank_profile, validate_sts
from .errors import DesignError, GuardExceeded, StsRankError, UnknownConstantError
from .registry import CountRegistry, registry_default, registry_load

__all__ = [
    "CountRegistry",
    "DesignError",
    "GuardExceeded",
    "LatinSquare",
    "SteinerTripleSystem",
    "StsRankError",
    "UnknownConstantError",
    "corollary2",
    "corollary3",
    "count_by_rank2",
    "count_by_rank3",
    "rank_profile",
    "registry_default",
    "registry_load",
    "validate_sts",
]
__version__ = "0.1.0"
