from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stsrank import counting as ct
from stsrank.design import check_rank_exclusion, fano_plane, rank_profile
from stsrank.enumerator import iter_orthogonal_sts, iter_sts, symmetric_pool
from stsrank.errors import DesignError, GuardExceeded
from stsrank.gf_linalg import Subspace, is_orthogonal_design
from stsrank.structure import (
    Ingredients2,
    assemble,
    canonical_subspace,
    compose,
    decompose,
    full_dual,
    ingredient_pools,
    ingredients_from_json,
    ingredients_to_json,
    partition_for,
    partition_from_dual,
    random_ingredients,
    random_symmetric_square,
    subspace_from_json,
    subspace_to_json,
)

CASES = [(3, 9, 1), (3, 9, 2), (3, 3, 1), (3, 9, 0), (2, 7, 1), (2, 7, 2), (2, 7, 3), (2, 7, 0), (2, 15, 4)]


def _phi(p: int, v: int, j: int) -> int:
    return ct.phi3(v, j) if p == 3 else ct.phi2(v + 1, j)


@pytest.mark.parametrize("p,v,j", CASES)
def test_orthogonal_systems_count_and_round_trip(p, v, j):
    s, gp = partition_for(p, v, j)
    systems = list(iter_orthogonal_sts(s))
    assert len(systems) == len(set(systems)) == _phi(p, v, j)
    for x in systems:
        assert is_orthogonal_design(x, s)
        ing = decompose(x, s)
        assert compose(gp, ing) == x
        assert ingredients_from_json(json.loads(json.dumps(ingredients_to_json(ing)))) == ing


@pytest.mark.parametrize("v,p", [(7, 2), (9, 3)])
def test_orthogonal_systems_are_those_in_the_census(v, p):
    """Composition finds exactly the enumerated systems orthogonal to the subspace."""
    for j in range(1, ct.max_power(v if p == 3 else v + 1, p) + 1):
        s, _ = partition_for(p, v, j)
        direct = {x for x in iter_sts(v) if is_orthogonal_design(x, s)}
        assert direct == set(iter_orthogonal_sts(s))


def test_partition_of_canonical_subspaces():
    gp = partition_for(3, 9, 1)[1]
    assert gp.m == 3 and gp.groups == ((1, 2, 3), (4, 5, 6), (7, 8, 9))
    assert gp.triples == ((0, 1, 2),)
    gp = partition_for(2, 7, 2)[1]
    assert gp.m == 2 and gp.groups[0] == (1,) and len(gp.groups) == 4
    assert gp.triples == ((1, 2, 3),)
    assert gp.locate()[gp.groups[2][1]] == (2, 2)
    assert partition_for(2, 7, 3)[1].groups[0] == ()


def test_partition_ignores_generating_set():
    s = canonical_subspace(3, 9, 2)
    shuffled = Subspace.span(3, 9, [[(a + 2 * b) % 3 for a, b in zip(*s.basis.rows[:2])], *s.basis.rows[1:]])
    assert shuffled == s
    assert partition_from_dual(shuffled) == partition_from_dual(s)


def test_inadmissible_subspace_rejected():
    with pytest.raises(DesignError):
        partition_from_dual(Subspace.span(3, 9, [[1] * 9, [1, 0, 0, 0, 0, 0, 0, 0, 2]]))
    with pytest.raises(DesignError):
        partition_from_dual(Subspace.span(3, 9, [[1, 2, 0, 0, 0, 0, 0, 0, 0]]))


def test_decompose_requires_orthogonality():
    s, _ = partition_for(2, 7, 3)
    non_orth = next(x for x in iter_sts(7) if not is_orthogonal_design(x, s))
    with pytest.raises(DesignError, match="not orthogonal"):
        decompose(non_orth, s)


def test_compose_rejects_wrong_ingredients():
    s, gp = partition_for(3, 9, 1)
    ing = decompose(next(iter_orthogonal_sts(s)), s)
    with pytest.raises(DesignError):
        compose(partition_for(3, 9, 2)[1], ing)
    with pytest.raises(DesignError):
        assemble(gp, ing.sts_parts, [])


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(3, 9, 1), (2, 7, 1), (2, 15, 2), (2, 15, 3)]), st.integers(0, 2**32))
def test_random_composition_round_trip(case, seed):
    p, v, j = case
    s, gp = partition_for(p, v, j)
    x = compose(gp, random_ingredients(gp, random.Random(seed)))
    assert is_orthogonal_design(x, s)
    assert compose(gp, decompose(x, s)) == x
    assert check_rank_exclusion(x) if v > 3 else True


def test_random_ingredients_deterministic_and_guarded():
    _, gp = partition_for(2, 15, 2)
    a = random_ingredients(gp, random.Random(7))
    b = random_ingredients(gp, random.Random(7))
    assert a == b
    _, gp = partition_for(2, 15, 1)
    assert ingredient_pools(gp) == {"sts": 7, "symmetric": 7, "latin": 8}
    with pytest.raises(GuardExceeded):
        random_ingredients(gp, random.Random(0))


def test_sts15_over_a_single_hyperplane_pair():
    """j=1 at w=16: one STS(7) and one symmetric square of order 7 (dropped form)."""
    s, gp = partition_for(2, 15, 1)
    rng = random.Random(3)
    zero = random.Random(1).choice(list(iter_sts(7)))
    for _ in range(5):
        ing = Ingredients2(1, zero, (random_symmetric_square(7, rng),), ())
        x = compose(gp, ing)
        assert rank_profile(x).rank2 <= 14 and check_rank_exclusion(x)
        assert decompose(x, s) == ing


def test_full_dual_of_known_systems():
    d = full_dual(fano_plane(), 2)
    assert d.dim == 3
    gp = partition_from_dual(d)
    assert gp.j == 3 and gp.m == 1
    x = compose(gp, decompose(fano_plane(), d))
    assert x == fano_plane()


def test_json_formats():
    s, _ = partition_for(2, 7, 2)
    assert subspace_from_json(json.loads(json.dumps(subspace_to_json(s)))) == s
    with pytest.raises(DesignError):
        ingredients_from_json({"kind": "gf5", "j": 1, "sts_parts": [], "latin": []})
    with pytest.raises(DesignError, match="malformed"):
        ingredients_from_json({"kind": "gf3"})


def test_symmetric_pool_is_every_symmetric_square():
    assert len(symmetric_pool(3)) == 6 and len(symmetric_pool(5)) == 720


@pytest.mark.parametrize("p,v,j,rank", [(3, 9, 1, 6), (2, 7, 1, 4), (2, 7, 2, 4)])
def test_rank_witness(p, v, j, rank):
    """Orthogonal systems have rank at most the bound; Υ = 0 forces the smaller rank."""
    s, _ = partition_for(p, v, j)
    assert {x.p_rank(p) for x in iter_orthogonal_sts(s)} == {rank}
