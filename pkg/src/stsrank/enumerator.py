"""Backtracking oracles at desk scale: latin squares, STS, 1-factorizations, rank censuses.

Latin squares are filled row-major against row/column availability bitmasks.
STS search always covers the lexicographically least uncovered pair next and
branches on its third point.  Parallel counts split the search tree at the
first decision and sum the independent subtree counts.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

from .design import LatinSquare, OneFactorization, SteinerTripleSystem, validate_sts
from .errors import DesignError, GuardExceeded
from .gf_linalg import Subspace

LATIN_GUARD = 7
STS_GUARD = 9
FACTORIZATION_GUARD = 8
ORTHOGONAL_BUDGET = 2_000_000

CONSTRAINTS = ("none", "symmetric", "idempotent_totally_symmetric", "constant_diagonal")


# -- latin squares --------------------------------------------------------------

def _latin_guard(n: int) -> None:
    if n < 0:
        raise DesignError(f"order must be >= 0, got {n}")
    if n > LATIN_GUARD:
        raise GuardExceeded(f"latin square order {n} exceeds guard {LATIN_GUARD}")


class _LatinSearch:
    """Mutable search state; one instance per (sub)search."""

    def __init__(self, n: int, symmetric: bool, diagonal: int | None) -> None:
        if diagonal is not None and not 1 <= diagonal <= n:
            raise DesignError(f"diagonal symbol {diagonal} outside 1..{n}")
        self.n = n
        self.symmetric = symmetric
        self.diagonal = diagonal
        self.full = (1 << n) - 1
        self.table = [[0] * n for _ in range(n)]
        self.rows = [0] * n
        self.cols = [0] * n
        self.cells = [(r, c) for r in range(n) for c in range(n) if not symmetric or c >= r]

    def candidates(self, r: int, c: int) -> int:
        if r == c and self.diagonal is not None:
            avail = 1 << (self.diagonal - 1)
        else:
            avail = self.full
        avail &= ~(self.rows[r] | self.cols[c])
        if self.symmetric:
            avail &= ~(self.rows[c] | self.cols[r])
        return avail

    def place(self, r: int, c: int, bit: int, sym: int) -> None:
        self.table[r][c] = sym
        self.rows[r] |= bit
        self.cols[c] |= bit
        if self.symmetric and r != c:
            self.table[c][r] = sym
            self.rows[c] |= bit
            self.cols[r] |= bit

    def unplace(self, r: int, c: int, bit: int) -> None:
        self.table[r][c] = 0
        self.rows[r] ^= bit
        self.cols[c] ^= bit
        if self.symmetric and r != c:
            self.table[c][r] = 0
            self.rows[c] ^= bit
            self.cols[r] ^= bit

    def preset(self, fixed: dict[tuple[int, int], int]) -> bool:
        for (r, c), sym in fixed.items():
            bit = 1 << (sym - 1)
            if self.table[r][c] or not self.candidates(r, c) & bit:
                return False
            self.place(r, c, bit, sym)
        return True

    def count(self, idx: int = 0) -> int:
        cells = self.cells
        while idx < len(cells) and self.table[cells[idx][0]][cells[idx][1]]:
            idx += 1
        if idx == len(cells):
            return 1
        r, c = cells[idx]
        avail = self.candidates(r, c)
        total = 0
        while avail:
            bit = avail & -avail
            avail ^= bit
            self.place(r, c, bit, bit.bit_length())
            total += self.count(idx + 1)
            self.unplace(r, c, bit)
        return total

    def walk(self, idx: int = 0) -> Iterator[None]:
        cells = self.cells
        while idx < len(cells) and self.table[cells[idx][0]][cells[idx][1]]:
            idx += 1
        if idx == len(cells):
            yield None
            return
        r, c = cells[idx]
        avail = self.candidates(r, c)
        while avail:
            bit = avail & -avail
            avail ^= bit
            self.place(r, c, bit, bit.bit_length())
            yield from self.walk(idx + 1)
            self.unplace(r, c, bit)

    def first_free(self) -> tuple[int, int] | None:
        return next(((r, c) for r, c in self.cells if not self.table[r][c]), None)


def iter_latin(n: int, *, symmetric: bool = False, diagonal: int | None = None) -> Iterator[LatinSquare]:
    """Every latin square of order n satisfying the constraints, in row-major search order."""
    _latin_guard(n)
    if n == 0:
        yield LatinSquare(0, ())
        return
    s = _LatinSearch(n, symmetric, diagonal)
    for _ in s.walk():
        yield LatinSquare(n, tuple(tuple(r) for r in s.table))


def _normal_form(n: int, symmetric: bool, diagonal: int | None) -> tuple[dict, int]:
    """Cells fixed by symmetry reduction and the multiplier restoring the full count."""
    if diagonal is not None or n <= 1:
        return {}, 1
    fixed = {(0, c): c + 1 for c in range(n)}
    if symmetric:
        # symbol relabelling acts freely and preserves symmetry
        return fixed, factorial(n)
    fixed.update({(r, 0): r + 1 for r in range(1, n)})
    # symbols fix row 1, then row permutations fix column 1
    return fixed, factorial(n) * factorial(n - 1)


def _latin_subcount(args: tuple) -> int:
    n, symmetric, diagonal, fixed = args
    s = _LatinSearch(n, symmetric, diagonal)
    if not s.preset(fixed):
        return 0
    return s.count()


def count_latin(
    n: int,
    *,
    symmetric: bool = False,
    diagonal: int | None = None,
    normalize: bool = True,
    workers: int = 1,
) -> int:
    """Exact number of order-n latin squares under the constraints.

    ``normalize`` enumerates only squares with a fixed first row (and first
    column when not symmetric) and multiplies back by the free group orbit size.
    """
    _latin_guard(n)
    if n == 0:
        return 1
    fixed, mult = _normal_form(n, symmetric, diagonal) if normalize else ({}, 1)
    if workers <= 1:
        return mult * _latin_subcount((n, symmetric, diagonal, fixed))
    s = _LatinSearch(n, symmetric, diagonal)
    if not s.preset(fixed):
        return 0
    cell = s.first_free()
    if cell is None:
        return mult
    avail = s.candidates(*cell)
    tasks = [
        (n, symmetric, diagonal, {**fixed, cell: sym})
        for sym in range(1, n + 1)
        if avail >> (sym - 1) & 1
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return mult * sum(pool.map(_latin_subcount, tasks))


def enum_symmetric_latin(n: int, workers: int = 1) -> int:
    return count_latin(n, symmetric=True, workers=workers)


# -- idempotent totally symmetric squares ------------------------------------------

def iter_itsls(n: int) -> Iterator[LatinSquare]:
    """Idempotent totally symmetric squares, built cell by cell on the table itself."""
    if n > STS_GUARD:
        raise GuardExceeded(f"order {n} exceeds guard {STS_GUARD}")
    table = [[0] * n for _ in range(n)]
    for x in range(n):
        table[x][x] = x + 1
    cells = [(x, y) for x in range(n) for y in range(x + 1, n)]

    def rec(idx: int) -> Iterator[None]:
        while idx < len(cells) and table[cells[idx][0]][cells[idx][1]]:
            idx += 1
        if idx == len(cells):
            yield None
            return
        x, y = cells[idx]
        row_x, row_y = set(table[x]), set(table[y])
        for z in range(n):
            s = z + 1
            if z in (x, y) or table[x][z] or table[y][z] or s in row_x or s in row_y:
                continue
            if x + 1 in table[z] or y + 1 in table[z]:
                continue
            for a, b, c in itertools.permutations((x, y, z)):
                table[a][b] = c + 1
            yield from rec(idx + 1)
            for a, b, _ in itertools.permutations((x, y, z)):
                table[a][b] = 0

    for _ in rec(0):
        yield LatinSquare(n, tuple(tuple(r) for r in table))


# -- Steiner triple systems -----------------------------------------------------------

def _sts_guard(v: int) -> None:
    if v > STS_GUARD:
        raise GuardExceeded(f"STS order {v} exceeds guard {STS_GUARD}")
    if v < 0:
        raise DesignError(f"order must be >= 0, got {v}")


def _sts_walk(v: int, covered: list[int], blocks: list[tuple[int, int, int]]) -> Iterator[None]:
    full = (1 << v) - 1
    x = next((p for p in range(v) if covered[p] != full), None)
    if x is None:
        yield None
        return
    free = full & ~covered[x]
    y = (free & -free).bit_length() - 1
    cand = free & ~covered[y] & ~(1 << y)
    while cand:
        bit = cand & -cand
        cand ^= bit
        z = bit.bit_length() - 1
        bx, by, bz = 1 << x, 1 << y, bit
        covered[x] |= by | bz
        covered[y] |= bx | bz
        covered[z] |= bx | by
        blocks.append((x + 1, y + 1, z + 1))
        yield from _sts_walk(v, covered, blocks)
        blocks.pop()
        covered[x] ^= by | bz
        covered[y] ^= bx | bz
        covered[z] ^= bx | by


def _sts_start(v: int, first: tuple[int, int, int] | None) -> tuple[list[int], list]:
    covered = [1 << p for p in range(v)]
    blocks: list[tuple[int, int, int]] = []
    if first is not None:
        a, b, c = (t - 1 for t in first)
        covered[a] |= 1 << b | 1 << c
        covered[b] |= 1 << a | 1 << c
        covered[c] |= 1 << a | 1 << b
        blocks.append(first)
    return covered, blocks


def iter_sts(v: int, first: tuple[int, int, int] | None = None) -> Iterator[SteinerTripleSystem]:
    """Every labeled STS(v) exactly once; ``first`` optionally fixes the block through {1, 2}."""
    _sts_guard(v)
    if v in (0, 1):
        yield validate_sts(v, [])
        return
    if v % 6 not in (1, 3):
        return
    covered, blocks = _sts_start(v, first)
    for _ in _sts_walk(v, covered, blocks):
        yield SteinerTripleSystem(v, tuple(sorted(tuple(sorted(b)) for b in blocks)))


def _first_blocks(v: int) -> list[tuple[int, int, int]]:
    return [(1, 2, z) for z in range(3, v + 1)]


def _sts_subcount(args: tuple[int, tuple[int, int, int] | None]) -> int:
    v, first = args
    return sum(1 for _ in iter_sts(v, first))


def enum_sts(v: int, workers: int = 1) -> int:
    _sts_guard(v)
    if workers <= 1 or v < 7:
        return _sts_subcount((v, None))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_sts_subcount, [(v, b) for b in _first_blocks(v)]))


# -- 1-factorizations ---------------------------------------------------------------

def iter_one_factorizations(n: int) -> Iterator[OneFactorization]:
    """Unordered 1-factorizations of K_n, each once: factor t holds the edge {1, t+1}."""
    if n < 2 or n % 2:
        raise DesignError(f"1-factorizations need an even order >= 2, got {n}")
    if n > FACTORIZATION_GUARD:
        raise GuardExceeded(f"K_{n} exceeds guard K_{FACTORIZATION_GUARD}")
    used = [0] * n  # used[x]: bitmask of partners already joined to x
    factors: list[list[tuple[int, int]]] = []

    def matchings(free: int, edges: list[tuple[int, int]]) -> Iterator[None]:
        if not free:
            yield None
            return
        x = (free & -free).bit_length() - 1
        rest = free ^ (1 << x)
        cand = rest & ~used[x]
        while cand:
            bit = cand & -cand
            cand ^= bit
            y = bit.bit_length() - 1
            edges.append((x, y))
            yield from matchings(rest ^ bit, edges)
            edges.pop()

    def rec(t: int) -> Iterator[None]:
        if t == n:
            yield None
            return
        if used[0] >> t & 1:
            return
        free = ((1 << n) - 1) ^ 1 ^ (1 << t)
        edges: list[tuple[int, int]] = [(0, t)]
        for _ in matchings(free, edges):
            for a, b in edges:
                used[a] |= 1 << b
                used[b] |= 1 << a
            factors.append(list(edges))
            yield from rec(t + 1)
            factors.pop()
            for a, b in edges:
                used[a] ^= 1 << b
                used[b] ^= 1 << a

    for _ in rec(1):
        yield OneFactorization.of(n, [[(a + 1, b + 1) for a, b in f] for f in factors])


def enum_one_factorizations(n: int) -> int:
    return sum(1 for _ in iter_one_factorizations(n))


# -- dispatch ------------------------------------------------------------------------

def enum_latin(
    n: int, constraint: str = "none", diagonal: int | None = None, *, workers: int = 1
) -> int:
    """Count squares under one named constraint (``constant_diagonal`` needs ``diagonal``)."""
    if constraint == "none":
        return count_latin(n, workers=workers)
    if constraint == "symmetric":
        return count_latin(n, symmetric=True, diagonal=diagonal, workers=workers)
    if constraint == "idempotent_totally_symmetric":
        return sum(1 for _ in iter_itsls(n))
    if constraint == "constant_diagonal":
        if diagonal is None:
            raise DesignError("constant_diagonal needs a diagonal symbol")
        return count_latin(n, diagonal=diagonal, workers=workers)
    raise DesignError(f"unknown constraint {constraint!r}; choose from {CONSTRAINTS}")


# -- pools for structure ---------------------------------------------------------------

POOL_GUARD = {"sts": 9, "latin": 5, "symmetric": 5}


@lru_cache(maxsize=None)
def sts_pool(v: int) -> tuple[SteinerTripleSystem, ...]:
    if v > POOL_GUARD["sts"]:
        raise GuardExceeded(f"STS({v}) pool is not enumerable")
    return tuple(iter_sts(v))


@lru_cache(maxsize=None)
def latin_pool(n: int) -> tuple[LatinSquare, ...]:
    if n > POOL_GUARD["latin"]:
        raise GuardExceeded(f"order-{n} latin square pool is not enumerable")
    return tuple(iter_latin(n))


@lru_cache(maxsize=None)
def symmetric_pool(n: int) -> tuple[LatinSquare, ...]:
    if n > POOL_GUARD["symmetric"]:
        raise GuardExceeded(f"order-{n} symmetric latin square pool is not enumerable")
    return tuple(iter_latin(n, symmetric=True))


# -- censuses -------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusReport:
    order: int
    p: int
    histogram: dict[int, int] = field(default_factory=dict)
    total: int = 0
    seconds: float = 0.0

    def __post_init__(self) -> None:
        if sum(self.histogram.values()) != self.total:
            raise DesignError("census histogram does not sum to its total")


def _census_sub(args: tuple) -> Counter:
    v, p, first = args
    return Counter(s.p_rank(p) for s in iter_sts(v, first))


def census_rank(v: int, p: int, workers: int = 1) -> CensusReport:
    """p-rank histogram over every labeled STS(v)."""
    _sts_guard(v)
    t0 = time.perf_counter()
    if workers <= 1 or v < 7:
        hist = _census_sub((v, p, None))
    else:
        hist = Counter()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for h in pool.map(_census_sub, [(v, p, b) for b in _first_blocks(v)]):
                hist.update(h)
    hist_d = dict(sorted(hist.items()))
    return CensusReport(v, p, hist_d, sum(hist_d.values()), time.perf_counter() - t0)


# -- orthogonal systems via composition ---------------------------------------------------

def iter_orthogonal_sts(s: Subspace, budget: int = ORTHOGONAL_BUDGET) -> Iterator[SteinerTripleSystem]:
    """All systems orthogonal to an admissible subspace, one per ingredient tuple."""
    from .structure import assemble, compose, ingredient_pools, partition_from_dual

    gp = partition_from_dual(s)
    orders = ingredient_pools(gp)
    n_sts = len(gp.groups) if gp.p == 3 else 1
    n_sym = len(gp.groups) - 1 if gp.p == 2 else 0
    stss = sts_pool(orders["sts"])
    lat = latin_pool(orders["latin"]) if gp.triples else (None,)
    sym = symmetric_pool(orders["symmetric"]) if n_sym else ()
    size = len(stss) ** n_sts * len(lat) ** len(gp.triples) * len(sym) ** n_sym
    if size > budget:
        raise GuardExceeded(f"{size} ingredient tuples exceed the budget {budget}")
    for parts in itertools.product(stss, repeat=n_sts):
        for syms in itertools.product(sym, repeat=n_sym):
            for lats in itertools.product(lat, repeat=len(gp.triples)):
                yield compose(gp, assemble(gp, parts, lats, syms))


def enum_orthogonal_sts(s: Subspace, budget: int = ORTHOGONAL_BUDGET) -> int:
    return sum(1 for _ in iter_orthogonal_sts(s, budget))


def ordered_factorization_count(n: int) -> int:
    """(n-1)! times the unordered count: the number of ordered 1-factorizations of K_n."""
    return factorial(n - 1) * enum_one_factorizations(n)


def registry_additions(orders: Sequence[int] = (5,)) -> dict[str, dict[int, int]]:
    """Counts the enumerator can add to the registry (e.g. Lambda_5, Pi_5)."""
    return {
        "lambda": {n: count_latin(n) for n in orders},
        "pi": {n: count_latin(n, symmetric=True) for n in orders if n % 2},
    }
