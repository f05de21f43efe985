"""Exact linear algebra over prime fields GF(p).

Rows over GF(2) are packed into Python ints (bit ``c`` is column ``c``) so
that elimination is word-parallel XOR; other primes use tuples of residues.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol, Sequence

from .errors import DesignError, GuardExceeded

SUBSPACE_GUARD = 6


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class GfVector:
    p: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise DesignError("vector must have length >= 1")
        if any(not 0 <= e < self.p for e in self.entries):
            raise DesignError(f"entries must be residues in [0, {self.p})")

    @classmethod
    def of(cls, p: int, values: Iterable[int]) -> GfVector:
        return cls(p, tuple(int(x) % p for x in values))

    def __len__(self) -> int:
        return len(self.entries)

    def dot(self, other: GfVector) -> int:
        if other.p != self.p or len(other) != len(self):
            raise DesignError("dot product of incompatible vectors")
        return sum(a * b for a, b in zip(self.entries, other.entries)) % self.p


@dataclass(frozen=True)
class GfMatrix:
    """Dense matrix over GF(p); rows stored as tuples of least residues."""

    p: int
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise DesignError(f"modulus {self.p} is not prime")
        for row in self.rows:
            if len(row) != self.ncols:
                raise DesignError("all rows must share the same length")
            if any(not 0 <= e < self.p for e in row):
                raise DesignError(f"entries must be residues in [0, {self.p})")

    @classmethod
    def from_rows(
        cls, p: int, rows: Iterable[Sequence[int]], ncols: int | None = None
    ) -> GfMatrix:
        rows = [tuple(int(x) % p for x in r) for r in rows]
        if ncols is None:
            if not rows:
                raise DesignError("ncols required for a matrix without rows")
            ncols = len(rows[0])
        return cls(p, tuple(rows), ncols)

    @classmethod
    def identity(cls, p: int, n: int) -> GfMatrix:
        return cls(p, tuple(tuple(int(r == c) for c in range(n)) for r in range(n)), n)

    @classmethod
    def zeros(cls, p: int, nrows: int, ncols: int) -> GfMatrix:
        return cls(p, tuple((0,) * ncols for _ in range(nrows)), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(r[c] for r in self.rows) for c in range(self.ncols)]

    def vectors(self) -> list[GfVector]:
        return [GfVector(self.p, r) for r in self.rows]

    def to_text(self) -> str:
        lines = [f"{self.p} {self.nrows} {self.ncols}"]
        lines += [" ".join(map(str, r)) for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> GfMatrix:
        """Parse ``p nrows ncols`` followed by ``nrows`` lines of residues."""
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise DesignError("empty matrix file")
        try:
            p, nrows, ncols = (int(t) for t in lines[0].split())
            rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
        except ValueError as exc:
            raise DesignError(f"malformed matrix file: {exc}") from None
        if len(rows) != nrows:
            raise DesignError(f"header says {nrows} rows, found {len(rows)}")
        if any(len(r) != ncols for r in rows):
            raise DesignError(f"every row must have {ncols} entries")
        if any(not 0 <= x < p for r in rows for x in r):
            raise DesignError("entries must be least nonnegative residues")
        return cls(p, tuple(tuple(r) for r in rows), ncols)


# -- GF(2) bitset kernel -----------------------------------------------------

def _pack(row: Sequence[int]) -> int:
    word = 0
    for c, x in enumerate(row):
        if x & 1:
            word |= 1 << c
    return word


def _unpack(word: int, ncols: int) -> tuple[int, ...]:
    return tuple((word >> c) & 1 for c in range(ncols))


def gf2_rank_packed(words: Iterable[int]) -> int:
    """Rank of packed GF(2) rows, keyed on each row's highest set bit."""
    basis: dict[int, int] = {}
    for w in words:
        while w:
            top = w.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = w
                break
            w ^= b
    return len(basis)


def _gf2_rref(m: GfMatrix) -> GfMatrix:
    work = [_pack(r) for r in m.rows]
    out: list[int] = []
    for c in range(m.ncols):
        bit = 1 << c
        piv = next((k for k, w in enumerate(work) if w & bit), None)
        if piv is None:
            continue
        prow = work.pop(piv)
        work = [w ^ prow if w & bit else w for w in work]
        out = [w ^ prow if w & bit else w for w in out]
        out.append(prow)
    return GfMatrix(2, tuple(_unpack(w, m.ncols) for w in out), m.ncols)


# -- general prime kernel ----------------------------------------------------

def _gfp_rref(m: GfMatrix) -> GfMatrix:
    p = m.p
    work = [list(r) for r in m.rows]
    out: list[list[int]] = []
    for c in range(m.ncols):
        piv = next((k for k, r in enumerate(work) if r[c]), None)
        if piv is None:
            continue
        prow = work.pop(piv)
        inv = pow(prow[c], p - 2, p)
        prow = [x * inv % p for x in prow]
        for rows in (work, out):
            for r in rows:
                f = r[c]
                if f:
                    for t in range(c, m.ncols):
                        r[t] = (r[t] - f * prow[t]) % p
        out.append(prow)
    return GfMatrix(p, tuple(tuple(r) for r in out), m.ncols)


def rref(m: GfMatrix) -> GfMatrix:
    """Reduced row-echelon form with zero rows dropped."""
    if m.p == 2:
        return _gf2_rref(m)
    return _gfp_rref(m)


def rank(m: GfMatrix) -> int:
    if m.p == 2:
        return gf2_rank_packed(_pack(r) for r in m.rows)
    return rref(m).nrows


def pivot_columns(m: GfMatrix) -> list[int]:
    """Pivot columns of a matrix already in RREF."""
    return [next(c for c, x in enumerate(r) if x) for r in m.rows]


@dataclass(frozen=True)
class Subspace:
    """Row space over GF(p), held by its unique RREF basis."""

    p: int
    ambient_dim: int
    basis: GfMatrix

    @classmethod
    def span(cls, p: int, ambient_dim: int, vectors: Iterable[Sequence[int]]) -> Subspace:
        m = GfMatrix.from_rows(p, list(vectors), ambient_dim)
        return cls(p, ambient_dim, rref(m))

    @classmethod
    def of_matrix(cls, m: GfMatrix) -> Subspace:
        return cls(m.p, m.ncols, rref(m))

    @classmethod
    def zero(cls, p: int, ambient_dim: int) -> Subspace:
        return cls(p, ambient_dim, GfMatrix(p, (), ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def contains(self, vec: Sequence[int]) -> bool:
        vec = [x % self.p for x in vec]
        m = GfMatrix.from_rows(self.p, [*self.basis.rows, vec], self.ambient_dim)
        return rank(m) == self.dim

    def is_subspace_of(self, other: Subspace) -> bool:
        return all(other.contains(r) for r in self.basis.rows)


def dual_basis(s: Subspace) -> Subspace:
    """Orthogonal complement under the standard dot product."""
    n, p = s.ambient_dim, s.p
    if n < 1:
        raise DesignError("ambient dimension must be >= 1")
    pivots = pivot_columns(s.basis)
    free = [c for c in range(n) if c not in set(pivots)]
    vecs = []
    for f in free:
        x = [0] * n
        x[f] = 1
        for row, pc in zip(s.basis.rows, pivots):
            x[pc] = -row[f] % p
        vecs.append(x)
    return Subspace.span(p, n, vecs) if vecs else Subspace.zero(p, n)


class _Design(Protocol):
    v: int
    blocks: Sequence[Sequence[int]]


def is_orthogonal_design(sts: _Design, s: Subspace) -> bool:
    """True iff every block's characteristic vector is orthogonal to ``s``."""
    if sts.v != s.ambient_dim:
        raise DesignError(f"design order {sts.v} != ambient dimension {s.ambient_dim}")
    for row in s.basis.rows:
        for b in sts.blocks:
            if sum(row[x - 1] for x in b) % s.p:
                return False
    return True


def _base_digits(value: int, base: int, length: int) -> tuple[int, ...]:
    digits = []
    for _ in range(length):
        value, d = divmod(value, base)
        digits.append(d)
    return tuple(reversed(digits))


def canonical_dual_matrix_3(v: int, j: int) -> GfMatrix:
    """All-one row over the 3^j base-3 column patterns, each repeated v/3^j times."""
    if j < 0 or v < 1 or v % 3**j:
        raise DesignError(f"3^{j} does not divide {v}")
    reps = v // 3**j
    cols = [d for t in range(3**j) for d in [_base_digits(t, 3, j)] * reps]
    rows = [(1,) * v] + [tuple(c[r] for c in cols) for r in range(j)]
    return GfMatrix(3, tuple(rows), v)


def canonical_dual_matrix_2(w: int, j: int) -> GfMatrix:
    """Height-j binary columns: zero pattern w/2^j - 1 times, the rest w/2^j times."""
    if j < 1 or w < 2 or w % 2**j:
        raise DesignError(f"2^{j} does not divide {w} (or j < 1)")
    reps = w // 2**j
    cols = [_base_digits(0, 2, j)] * (reps - 1)
    cols += [d for t in range(1, 2**j) for d in [_base_digits(t, 2, j)] * reps]
    rows = [tuple(c[r] for c in cols) for r in range(j)]
    return GfMatrix(2, tuple(rows), w - 1)


def enumerate_subspaces(p: int, ambient_dim: int, dim: int) -> Iterator[Subspace]:
    """Every ``dim``-dimensional subspace of GF(p)^n, once each, as RREF bases."""
    n = ambient_dim
    if n > SUBSPACE_GUARD:
        raise GuardExceeded(f"ambient dimension {n} exceeds guard {SUBSPACE_GUARD}")
    if not 0 <= dim <= n:
        raise DesignError(f"dimension {dim} out of range for ambient {n}")
    if not is_prime(p):
        raise DesignError(f"modulus {p} is not prime")
    for pivots in itertools.combinations(range(n), dim):
        pset = set(pivots)
        slots = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pset]
        for fill in itertools.product(range(p), repeat=len(slots)):
            rows = [[0] * n for _ in range(dim)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), x in zip(slots, fill):
                rows[r][c] = x
            yield Subspace(p, n, GfMatrix(p, tuple(tuple(r) for r in rows), n))
