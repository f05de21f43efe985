"""Compose and decompose Steiner triple systems orthogonal to an admissible dual subspace.

An admissible subspace splits the points into groups by generator-matrix
column.  Over GF(3) there are 3^j groups of size m = v/3^j; over GF(2) there
is a zero-column group of size m-1 and 2^j-1 groups of size m = (v+1)/2^j.
Every orthogonal system is a set of small systems on groups plus one latin
square per "rule triple" of groups whose columns sum to zero (and, over GF(2),
one symmetric square per nonzero group pairing it with the zero group).

Groups are ordered by their smallest point (the zero group first over GF(2));
for the canonical generator matrices this is ascending column-pattern order.
Inside a rule triple the first group indexes rows, the second columns and the
third symbols.  Inside a group, points are numbered 1..size in ascending order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Sequence

from .design import (
    LatinSquare,
    SteinerTripleSystem,
    sls_drop,
    sls_lift,
    sts_order_admissible,
    validate_sts,
)
from .errors import DesignError
from .gf_linalg import (
    GfMatrix,
    Subspace,
    canonical_dual_matrix_2,
    canonical_dual_matrix_3,
    dual_basis,
    is_orthogonal_design,
)

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class GroupPartition:
    p: int
    v: int
    j: int
    groups: tuple[tuple[int, ...], ...]
    triples: tuple[Triple, ...]

    @property
    def m(self) -> int:
        """Size of a full group (over GF(2) the zero group has one point less)."""
        return (self.v + 1) // 2**self.j if self.p == 2 else self.v // 3**self.j

    def locate(self) -> dict[int, tuple[int, int]]:
        """point -> (group index, 1-based position inside the group)."""
        return {pt: (g, x) for g, grp in enumerate(self.groups) for x, pt in enumerate(grp, 1)}


def canonical_subspace(p: int, v: int, j: int) -> Subspace:
    """Row space of the canonical dual generator matrix for STS(v)."""
    if p == 3:
        return Subspace.of_matrix(canonical_dual_matrix_3(v, j))
    if p == 2:
        if j == 0:
            return Subspace.zero(2, v)
        return Subspace.of_matrix(canonical_dual_matrix_2(v + 1, j))
    raise DesignError(f"structure theory exists only over GF(2) and GF(3), not GF({p})")


def partition_from_dual(s: Subspace) -> GroupPartition:
    """Group the points by column pattern after checking the admissible column structure."""
    p, v = s.p, s.ambient_dim
    cols = s.basis.columns() if s.dim else [()] * v
    classes: dict[tuple[int, ...], list[int]] = {}
    for pt, col in enumerate(cols, 1):
        classes.setdefault(col, []).append(pt)

    if p == 3:
        if not s.contains([1] * v):
            raise DesignError("ternary dual subspace must contain the all-one vector")
        j = s.dim - 1
        m, rem = divmod(v, 3**j)
        if rem or len(classes) != 3**j or any(len(g) != m for g in classes.values()):
            raise DesignError(f"columns do not form 3^{j} equal groups: not admissible")
        if not sts_order_admissible(m):
            raise DesignError(f"groups of size {m} carry no STS: not admissible")
        order = sorted(classes, key=lambda c: classes[c][0])
    elif p == 2:
        j = s.dim
        w = v + 1
        m, rem = divmod(w, 2**j)
        zero = (0,) * j
        sizes_ok = (
            not rem
            and len(classes) == 2**j
            and len(classes.get(zero, ())) == m - 1
            and all(len(g) == m for c, g in classes.items() if c != zero)
        )
        if m - 1 == 0:
            sizes_ok = sizes_ok or (not rem and len(classes) == 2**j - 1 and zero not in classes)
        if not sizes_ok:
            raise DesignError(f"columns do not match the binary pattern for dimension {j}: not admissible")
        if not sts_order_admissible(m - 1):
            raise DesignError(f"zero group of size {m - 1} carries no STS: not admissible")
        classes.setdefault(zero, [])
        order = [zero] + sorted((c for c in classes if c != zero), key=lambda c: classes[c][0])
    else:
        raise DesignError(f"structure theory exists only over GF(2) and GF(3), not GF({p})")

    first = 1 if p == 2 else 0
    triples = tuple(
        (a, b, c)
        for a, b, c in itertools.combinations(range(first, len(order)), 3)
        if all((x + y + z) % p == 0 for x, y, z in zip(order[a], order[b], order[c]))
    )
    groups = tuple(tuple(classes[c]) for c in order)
    return GroupPartition(p, v, j, groups, triples)


@dataclass(frozen=True)
class Ingredients3:
    j: int
    sts_parts: tuple[SteinerTripleSystem, ...]
    latin: tuple[tuple[Triple, LatinSquare], ...]


@dataclass(frozen=True)
class Ingredients2:
    """``symmetric`` holds the odd-order (dropped) squares, one per nonzero group."""

    j: int
    sts_zero: SteinerTripleSystem
    symmetric: tuple[LatinSquare, ...]
    latin: tuple[tuple[Triple, LatinSquare], ...]


Ingredients = Ingredients3 | Ingredients2


def _check_latin(gp: GroupPartition, latin: Sequence[tuple[Triple, LatinSquare]]) -> None:
    if tuple(t for t, _ in latin) != gp.triples:
        raise DesignError(f"latin squares must be given for the rule triples {list(gp.triples)}")
    for t, sq in latin:
        if sq.n != gp.m:
            raise DesignError(f"latin square for {list(t)} has order {sq.n}, need {gp.m}")


def _cross_blocks(gp: GroupPartition, latin: Sequence[tuple[Triple, LatinSquare]]) -> list[Triple]:
    blocks = []
    for (a, b, c), sq in latin:
        A, B, C = gp.groups[a], gp.groups[b], gp.groups[c]
        for x in range(1, gp.m + 1):
            for y in range(1, gp.m + 1):
                blocks.append((A[x - 1], B[y - 1], C[sq.f(x, y) - 1]))
    return blocks


def _embed(sts: SteinerTripleSystem, group: Sequence[int]) -> list[Triple]:
    return [(group[a - 1], group[b - 1], group[c - 1]) for a, b, c in sts.blocks]


def compose3(gp: GroupPartition, ing: Ingredients3) -> SteinerTripleSystem:
    if gp.p != 3:
        raise DesignError("compose3 needs a ternary partition")
    if len(ing.sts_parts) != len(gp.groups):
        raise DesignError(f"need {len(gp.groups)} small systems, got {len(ing.sts_parts)}")
    blocks: list[Triple] = []
    for sts, grp in zip(ing.sts_parts, gp.groups):
        if sts.v != gp.m:
            raise DesignError(f"small system has order {sts.v}, need {gp.m}")
        blocks += _embed(sts, grp)
    _check_latin(gp, ing.latin)
    blocks += _cross_blocks(gp, ing.latin)
    return validate_sts(gp.v, blocks)


def compose2(gp: GroupPartition, ing: Ingredients2) -> SteinerTripleSystem:
    if gp.p != 2:
        raise DesignError("compose2 needs a binary partition")
    m = gp.m
    zero = gp.groups[0]
    if ing.sts_zero.v != m - 1:
        raise DesignError(f"zero-group system has order {ing.sts_zero.v}, need {m - 1}")
    if len(ing.symmetric) != len(gp.groups) - 1:
        raise DesignError(f"need {len(gp.groups) - 1} symmetric squares, got {len(ing.symmetric)}")
    blocks = _embed(ing.sts_zero, zero)
    for grp, g in zip(gp.groups[1:], ing.symmetric):
        if g.n != m - 1:
            raise DesignError(f"symmetric square has order {g.n}, need {m - 1}")
        f = sls_lift(g)
        for x in range(1, m + 1):
            for y in range(x + 1, m + 1):
                blocks.append((grp[x - 1], grp[y - 1], zero[f.f(x, y) - 1]))
    _check_latin(gp, ing.latin)
    blocks += _cross_blocks(gp, ing.latin)
    return validate_sts(gp.v, blocks)


def compose(gp: GroupPartition, ing: Ingredients) -> SteinerTripleSystem:
    return compose3(gp, ing) if gp.p == 3 else compose2(gp, ing)


def _square(table: list[list[int]], what: str) -> LatinSquare:
    if any(x == 0 for row in table for x in row):
        raise DesignError(f"{what} is incomplete")
    return LatinSquare(len(table), tuple(tuple(r) for r in table))


def _split_blocks(sts: SteinerTripleSystem, s: Subspace):
    if not is_orthogonal_design(sts, s):
        raise DesignError(f"design is not orthogonal to the subspace over GF({s.p})")
    gp = partition_from_dual(s)
    where = gp.locate()
    m = gp.m
    inner: dict[int, list[Triple]] = {g: [] for g in range(len(gp.groups))}
    tables = {t: [[0] * m for _ in range(m)] for t in gp.triples}
    pairs: dict[int, list[tuple[int, int, int]]] = {}
    for block in sts.blocks:
        loc = sorted(where[pt] for pt in block)
        gs = [g for g, _ in loc]
        if gs[0] == gs[2]:
            inner[gs[0]].append(tuple(x for _, x in loc))
        elif len(set(gs)) == 3 and tuple(gs) in tables:
            (_, x), (_, y), (_, z) = loc
            tables[tuple(gs)][x - 1][y - 1] = z
        elif gp.p == 2 and gs[0] == 0 and gs[1] == gs[2]:
            pairs.setdefault(gs[1], []).append((loc[1][1], loc[2][1], loc[0][1]))
        else:
            raise DesignError(f"block {list(block)} spans groups {gs} outside the rule")
    latin = tuple((t, _square(tables[t], f"latin square for {list(t)}")) for t in gp.triples)
    return gp, inner, latin, pairs


def decompose3(sts: SteinerTripleSystem, s: Subspace) -> Ingredients3:
    if s.p != 3:
        raise DesignError("decompose3 needs a ternary subspace")
    gp, inner, latin, _ = _split_blocks(sts, s)
    parts = tuple(validate_sts(gp.m, inner[g]) for g in range(len(gp.groups)))
    return Ingredients3(gp.j, parts, latin)


def decompose2(sts: SteinerTripleSystem, s: Subspace) -> Ingredients2:
    if s.p != 2:
        raise DesignError("decompose2 needs a binary subspace")
    gp, inner, latin, pairs = _split_blocks(sts, s)
    m = gp.m
    sts_zero = validate_sts(m - 1, inner[0])
    symmetric = []
    for g in range(1, len(gp.groups)):
        if inner[g]:
            raise DesignError(f"block inside nonzero group {g}: not orthogonal")
        table = [[m] * m for _ in range(m)]
        for x, y, z in pairs.get(g, []):
            table[x - 1][y - 1] = table[y - 1][x - 1] = z
        symmetric.append(sls_drop(_square(table, f"symmetric square of group {g}")))
    return Ingredients2(gp.j, sts_zero, tuple(symmetric), latin)


def decompose(sts: SteinerTripleSystem, s: Subspace) -> Ingredients:
    return decompose3(sts, s) if s.p == 3 else decompose2(sts, s)


def full_dual(sts: SteinerTripleSystem, p: int) -> Subspace:
    """B-perp: every vector orthogonal to all blocks over GF(p)."""
    return dual_basis(Subspace.of_matrix(sts.incidence_matrix(p)))


# -- ingredient pools ---------------------------------------------------------

def ingredient_pools(gp: GroupPartition) -> dict[str, int]:
    """Orders of the small objects needed: keys 'sts', 'latin', and for GF(2) 'symmetric'."""
    if gp.p == 3:
        return {"sts": gp.m, "latin": gp.m}
    return {"sts": gp.m - 1, "symmetric": gp.m - 1, "latin": gp.m}


def assemble(
    gp: GroupPartition,
    sts_parts: Sequence[SteinerTripleSystem],
    latin: Sequence[LatinSquare],
    symmetric: Sequence[LatinSquare] = (),
) -> Ingredients:
    pairs = tuple(zip(gp.triples, latin))
    if len(pairs) != len(gp.triples) or len(latin) != len(gp.triples):
        raise DesignError(f"need {len(gp.triples)} latin squares, got {len(latin)}")
    if gp.p == 3:
        return Ingredients3(gp.j, tuple(sts_parts), pairs)
    (zero,) = sts_parts
    return Ingredients2(gp.j, zero, tuple(symmetric), pairs)


def random_ingredients(gp: GroupPartition, rng: random.Random) -> Ingredients:
    """Draw every ingredient uniformly from its fully enumerated pool.

    Raises GuardExceeded when a pool is beyond the enumerator's guard.
    """
    from .enumerator import latin_pool, sts_pool, symmetric_pool

    orders = ingredient_pools(gp)
    stss = sts_pool(orders["sts"])
    lat = latin_pool(orders["latin"])
    n_sts = len(gp.groups) if gp.p == 3 else 1
    parts = [rng.choice(stss) for _ in range(n_sts)]
    latin = [rng.choice(lat) for _ in gp.triples]
    symmetric: list[LatinSquare] = []
    if gp.p == 2:
        sym = symmetric_pool(orders["symmetric"])
        symmetric = [rng.choice(sym) for _ in gp.groups[1:]]
    return assemble(gp, parts, latin, symmetric)


def random_symmetric_square(n: int, rng: random.Random) -> LatinSquare:
    """A symmetric square of odd order from a random relabelling of Z_n addition.

    Not uniform; meant for sampling orders whose pools cannot be enumerated.
    """
    perm = list(range(n))
    sym = list(range(1, n + 1))
    rng.shuffle(perm)
    rng.shuffle(sym)
    rows = [[sym[(perm[x] + perm[y]) % n] for y in range(n)] for x in range(n)]
    return LatinSquare.of(rows) if n else LatinSquare(0, ())


# -- JSON ---------------------------------------------------------------------

def ingredients_to_json(ing: Ingredients, subspace: Subspace | None = None) -> dict[str, Any]:
    latin = [{"triple": list(t), "square": sq.to_json()} for t, sq in ing.latin]
    if isinstance(ing, Ingredients3):
        out = {
            "kind": "gf3",
            "j": ing.j,
            "sts_parts": [s.to_json() for s in ing.sts_parts],
            "latin": latin,
            "symmetric": [],
        }
    else:
        out = {
            "kind": "gf2",
            "j": ing.j,
            "sts_parts": [ing.sts_zero.to_json()],
            "latin": latin,
            "symmetric": [g.to_json() for g in ing.symmetric],
        }
    if subspace is not None:
        out["subspace"] = subspace_to_json(subspace)
    return out


def ingredients_from_json(data: dict[str, Any]) -> Ingredients:
    try:
        kind = data["kind"]
        j = int(data["j"])
        parts = tuple(SteinerTripleSystem.from_json(s) for s in data["sts_parts"])
        latin = tuple(
            (tuple(int(x) for x in e["triple"]), LatinSquare.from_json(e["square"]))
            for e in data["latin"]
        )
        symmetric = tuple(LatinSquare.from_json(g) for g in data.get("symmetric", []))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DesignError):
            raise
        raise DesignError(f"malformed ingredients JSON: {exc}") from None
    if kind == "gf3":
        return Ingredients3(j, parts, latin)
    if kind == "gf2":
        if len(parts) != 1:
            raise DesignError("gf2 ingredients carry exactly one zero-group system")
        return Ingredients2(j, parts[0], symmetric, latin)
    raise DesignError(f"unknown ingredients kind {kind!r}")


def subspace_to_json(s: Subspace) -> dict[str, Any]:
    return {"p": s.p, "n": s.ambient_dim, "basis": [list(r) for r in s.basis.rows]}


def subspace_from_json(data: dict[str, Any]) -> Subspace:
    try:
        m = GfMatrix.from_rows(int(data["p"]), data["basis"], int(data["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DesignError):
            raise
        raise DesignError(f"malformed subspace JSON: {exc}") from None
    return Subspace.of_matrix(m)


def partition_for(p: int, v: int, j: int) -> tuple[Subspace, GroupPartition]:
    s = canonical_subspace(p, v, j)
    return s, partition_from_dual(s)

