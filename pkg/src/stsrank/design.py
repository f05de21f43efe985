"""Steiner triple systems, latin squares, 1-factorizations and their bijections."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Sequence

from .errors import DesignError
from .gf_linalg import GfMatrix, is_prime, rank

Block = tuple[int, int, int]
Edge = tuple[int, int]


def sts_order_admissible(v: int) -> bool:
    return v in (0, 1) or v % 6 in (1, 3)


@dataclass(frozen=True)
class SteinerTripleSystem:
    """Canonical STS: points 1..v, sorted triples in lexicographic order.

    Build instances through :func:`validate_sts`; the constructor trusts its input.
    """

    v: int
    blocks: tuple[Block, ...]

    def incidence_matrix(self, p: int) -> GfMatrix:
        rows = []
        for b in self.blocks:
            row = [0] * self.v
            for x in b:
                row[x - 1] = 1
            rows.append(row)
        return GfMatrix.from_rows(p, rows, self.v)

    def p_rank(self, p: int) -> int:
        if self.v == 0:
            return 0
        return rank(self.incidence_matrix(p))

    def third_point(self, x: int, y: int) -> int:
        return self._third[(x, y)]

    @cached_property
    def _third(self) -> dict[tuple[int, int], int]:
        table = {}
        for a, b, c in self.blocks:
            for x, y, z in ((a, b, c), (a, c, b), (b, c, a)):
                table[(x, y)] = table[(y, x)] = z
        return table

    def to_json(self) -> dict[str, Any]:
        return {"v": self.v, "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> SteinerTripleSystem:
        try:
            return validate_sts(int(data["v"]), data["blocks"])
        except (KeyError, TypeError) as exc:
            raise DesignError(f"malformed STS JSON: {exc}") from None


def validate_sts(v: int, raw_blocks: Iterable[Iterable[int]]) -> SteinerTripleSystem:
    """Check pair coverage exactly and return the canonical system."""
    if not sts_order_admissible(v):
        raise DesignError(f"no STS of order {v}: v must be 1 or 3 mod 6")
    blocks = []
    for raw in raw_blocks:
        b = tuple(sorted(int(x) for x in raw))
        if len(b) != 3 or len(set(b)) != 3:
            raise DesignError(f"block {list(raw)} is not a 3-subset")
        if b[0] < 1 or b[2] > v:
            raise DesignError(f"block {list(b)} has a point outside 1..{v}")
        blocks.append(b)
    expected = v * (v - 1) // 6
    if len(blocks) != expected:
        raise DesignError(f"STS({v}) needs {expected} blocks, got {len(blocks)}")
    seen: dict[tuple[int, int], Block] = {}
    for b in blocks:
        for pair in itertools.combinations(b, 2):
            if pair in seen:
                raise DesignError(f"pair {set(pair)} covered twice")
            seen[pair] = b
    for pair in itertools.combinations(range(1, v + 1), 2):
        if pair not in seen:
            raise DesignError(f"pair {set(pair)} not covered")
    return SteinerTripleSystem(v, tuple(sorted(blocks)))


@dataclass(frozen=True)
class LatinSquare:
    """Order-n latin square with symbols 1..n; ``table[x-1][y-1] = f(x, y)``."""

    n: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        full = set(range(1, self.n + 1))
        if len(self.table) != self.n or any(len(r) != self.n for r in self.table):
            raise DesignError(f"latin square of order {self.n} must be {self.n}x{self.n}")
        for r in self.table:
            if set(r) != full:
                raise DesignError(f"row {list(r)} is not a permutation of 1..{self.n}")
        for c in range(self.n):
            if {r[c] for r in self.table} != full:
                raise DesignError(f"column {c + 1} is not a permutation of 1..{self.n}")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> LatinSquare:
        return cls(len(rows), tuple(tuple(int(x) for x in r) for r in rows))

    def f(self, x: int, y: int) -> int:
        return self.table[x - 1][y - 1]

    @property
    def symmetric(self) -> bool:
        return all(self.table[x][y] == self.table[y][x] for x in range(self.n) for y in range(x))

    @property
    def idempotent(self) -> bool:
        return all(self.table[x][x] == x + 1 for x in range(self.n))

    @property
    def totally_symmetric(self) -> bool:
        t = self.table
        for x in range(self.n):
            for y in range(self.n):
                z = t[x][y] - 1
                if t[y][x] != z + 1 or t[x][z] != y + 1 or t[z][x] != y + 1:
                    return False
                if t[y][z] != x + 1 or t[z][y] != x + 1:
                    return False
        return True

    @property
    def constant_diagonal(self) -> int | None:
        diag = {self.table[x][x] for x in range(self.n)}
        return diag.pop() if len(diag) == 1 else None

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "rows": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> LatinSquare:
        try:
            n = int(data["n"])
            sq = cls.of(data["rows"]) if n else cls(0, ())
        except (KeyError, TypeError, ValueError) as exc:
            raise DesignError(f"malformed latin square JSON: {exc}") from None
        if sq.n != n:
            raise DesignError(f"declared order {n} but table has {sq.n} rows")
        return sq


@dataclass(frozen=True)
class OneFactorization:
    """Ordered 1-factorization of K_n: ``factors[c-1]`` is colour class c."""

    n: int
    factors: tuple[frozenset[Edge], ...]

    def __post_init__(self) -> None:
        n = self.n
        if n < 2 or n % 2:
            raise DesignError(f"1-factorizations need an even order >= 2, got {n}")
        if len(self.factors) != n - 1:
            raise DesignError(f"K_{n} needs {n - 1} factors, got {len(self.factors)}")
        seen: set[Edge] = set()
        for factor in self.factors:
            pts = [x for e in factor for x in e]
            if len(factor) != n // 2 or sorted(pts) != list(range(1, n + 1)):
                raise DesignError(f"factor {sorted(factor)} is not a perfect matching")
            if seen & factor:
                raise DesignError("an edge occurs in two factors")
            seen |= factor

    @classmethod
    def of(cls, n: int, factors: Iterable[Iterable[Iterable[int]]]) -> OneFactorization:
        norm = tuple(frozenset(tuple(sorted(e)) for e in f) for f in factors)
        return cls(n, norm)

    def unordered(self) -> frozenset[frozenset[Edge]]:
        return frozenset(self.factors)


@dataclass(frozen=True)
class RankProfile:
    v: int
    rank2: int
    rank3: int

    def __post_init__(self) -> None:
        if self.v > 0 and (self.rank3 > self.v - 1 or self.rank2 > self.v):
            raise DesignError(f"impossible rank profile {self}")


def sts_to_itsls(sts: SteinerTripleSystem) -> LatinSquare:
    """f(x, x) = x and f(x, y) = z for every block {x, y, z}."""
    v = sts.v
    table = [[0] * v for _ in range(v)]
    for x in range(v):
        table[x][x] = x + 1
    for a, b, c in sts.blocks:
        for x, y, z in itertools.permutations((a, b, c)):
            table[x - 1][y - 1] = z
    return LatinSquare(v, tuple(tuple(r) for r in table))


def itsls_to_sts(ls: LatinSquare) -> SteinerTripleSystem:
    if not (ls.idempotent and ls.totally_symmetric):
        raise DesignError("square must be idempotent and totally symmetric")
    blocks = {
        tuple(sorted((x, y, ls.f(x, y))))
        for x in range(1, ls.n + 1)
        for y in range(x + 1, ls.n + 1)
    }
    return validate_sts(ls.n, blocks)


def sls_lift(g: LatinSquare) -> LatinSquare:
    """Odd-order symmetric square -> order n+1 symmetric square with diagonal n+1.

    The order-0 square lifts to ``[[1]]``, the degenerate case used by
    composition over groups of size one.
    """
    n = g.n
    if n % 2 == 0 and n != 0:
        raise DesignError(f"sls_lift needs odd order, got {n}")
    if not g.symmetric:
        raise DesignError("sls_lift needs a symmetric square")
    m = n + 1
    table = [[0] * m for _ in range(m)]
    for x in range(n):
        for y in range(n):
            table[x][y] = g.table[x][y] if x != y else m
        table[x][n] = table[n][x] = g.table[x][x]
    table[n][n] = m
    return LatinSquare(m, tuple(tuple(r) for r in table))


def sls_drop(f: LatinSquare) -> LatinSquare:
    """Inverse of :func:`sls_lift`; ``[[1]]`` drops to the order-0 square."""
    m = f.n
    if not f.symmetric or f.constant_diagonal != m:
        raise DesignError(f"sls_drop needs a symmetric square with diagonal constantly {m}")
    if m % 2 and m != 1:
        raise DesignError(f"sls_drop needs even order, got {m}")
    n = m - 1
    table = [[f.table[x][y] if x != y else f.table[x][n] for y in range(n)] for x in range(n)]
    return LatinSquare(n, tuple(tuple(r) for r in table))


def sls_to_factorization(f: LatinSquare) -> OneFactorization:
    n = f.n
    if n % 2 or not f.symmetric or f.constant_diagonal != n:
        raise DesignError(f"need a symmetric square of even order with diagonal constantly {n}")
    factors: list[set[Edge]] = [set() for _ in range(n - 1)]
    for x in range(1, n + 1):
        for y in range(x + 1, n + 1):
            factors[f.f(x, y) - 1].add((x, y))
    return OneFactorization(n, tuple(frozenset(s) for s in factors))


def factorization_to_sls(fac: OneFactorization) -> LatinSquare:
    n = fac.n
    table = [[n] * n for _ in range(n)]
    for c, factor in enumerate(fac.factors, start=1):
        for x, y in factor:
            table[x - 1][y - 1] = table[y - 1][x - 1] = c
    return LatinSquare(n, tuple(tuple(r) for r in table))


def rank_profile(sts: SteinerTripleSystem) -> RankProfile:
    return RankProfile(sts.v, sts.p_rank(2), sts.p_rank(3))


def full_rank_over(sts: SteinerTripleSystem, p: int) -> bool:
    """For primes other than 2 and 3 every STS has full p-rank v."""
    if not is_prime(p):
        raise DesignError(f"{p} is not prime")
    return sts.p_rank(p) == sts.v


def check_rank_exclusion(sts: SteinerTripleSystem) -> bool:
    """False only for a system deficient in both 2-rank and 3-rank (never expected)."""
    if sts.v <= 3:
        raise DesignError("the exclusion statement concerns orders v > 3")
    prof = rank_profile(sts)
    return not (prof.rank2 < sts.v and prof.rank3 < sts.v - 1)


def fano_plane() -> SteinerTripleSystem:
    """Cyclic Fano plane {i, i+1, i+3} mod 7 on points 1..7."""
    return validate_sts(7, [[(i + d) % 7 + 1 for d in (0, 1, 3)] for i in range(7)])


def affine_plane_3() -> SteinerTripleSystem:
    """Lines of AG(2, 3); point (a, b) is labelled 3a + b + 1."""
    pts = [(a, b) for a in range(3) for b in range(3)]
    lines = set()
    for p, q in itertools.combinations(pts, 2):
        r = ((-p[0] - q[0]) % 3, (-p[1] - q[1]) % 3)
        lines.add(tuple(sorted(3 * a + b + 1 for a, b in (p, q, r))))
    return validate_sts(9, lines)
