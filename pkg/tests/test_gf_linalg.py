from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stsrank.counting import gaussian_binomial
from stsrank.errors import DesignError, GuardExceeded
from stsrank.gf_linalg import (
    GfMatrix,
    GfVector,
    Subspace,
    _gf2_rref,
    _gfp_rref,
    canonical_dual_matrix_2,
    canonical_dual_matrix_3,
    dual_basis,
    enumerate_subspaces,
    is_prime,
    pivot_columns,
    rank,
    rref,
)


@st.composite
def matrices(draw, primes=(2, 3, 5, 7)):
    p = draw(st.sampled_from(primes))
    ncols = draw(st.integers(1, 8))
    nrows = draw(st.integers(0, 8))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=ncols, max_size=ncols),
                         min_size=nrows, max_size=nrows))
    return GfMatrix.from_rows(p, rows, ncols)


def _row_space_equal(a: GfMatrix, b: GfMatrix) -> bool:
    return Subspace.of_matrix(a) == Subspace.of_matrix(b)


@given(matrices())
def test_rank_is_rref_row_count(m):
    r = rank(m)
    assert r == rref(m).nrows
    assert r <= min(m.nrows, m.ncols)


@given(matrices())
def test_rref_is_idempotent_and_spans_same_space(m):
    e = rref(m)
    assert rref(e) == e
    assert all(Subspace.of_matrix(m).contains(r) for r in e.rows)
    assert all(Subspace.of_matrix(e).contains(r) for r in m.rows)
    piv = pivot_columns(e)
    assert piv == sorted(piv)
    for k, c in enumerate(piv):
        assert [row[c] for row in e.rows] == [int(k == t) for t in range(e.nrows)]


@given(matrices(primes=(2,)))
def test_bitset_kernel_matches_general_kernel(m):
    assert _gf2_rref(m) == _gfp_rref(m)


@given(matrices())
def test_dual_dimensions_add_up_and_double_dual(m):
    s = Subspace.of_matrix(m)
    d = dual_basis(s)
    assert s.dim + d.dim == s.ambient_dim
    assert dual_basis(d) == s
    for a in s.basis.rows:
        for b in d.basis.rows:
            assert GfVector(s.p, a).dot(GfVector(s.p, b)) == 0


@given(matrices(), matrices())
def test_subspace_inclusion_of_sum(a, b):
    if a.p != b.p or a.ncols != b.ncols:
        return
    total = GfMatrix.from_rows(a.p, [*a.rows, *b.rows], a.ncols)
    assert Subspace.of_matrix(a).is_subspace_of(Subspace.of_matrix(total))
    assert rank(total) <= rank(a) + rank(b)


@pytest.mark.parametrize("p,n", [(2, 4), (3, 3), (2, 5)])
def test_subspace_enumeration_counts_gaussian_binomial(p, n):
    for d in range(n + 1):
        subs = list(enumerate_subspaces(p, n, d))
        assert len(subs) == len(set(subs)) == gaussian_binomial(n, d, p)
        assert all(s.dim == d for s in subs)


def test_subspace_enumeration_guard():
    with pytest.raises(GuardExceeded):
        next(enumerate_subspaces(2, 7, 1))


def test_text_round_trip():
    m = GfMatrix.from_rows(3, [[1, 2, 0], [0, 1, 1]])
    assert GfMatrix.from_text(m.to_text()) == m
    with pytest.raises(DesignError, match="header says"):
        GfMatrix.from_text("3 3 3\n1 2 0\n")
    with pytest.raises(DesignError, match="residues"):
        GfMatrix.from_text("3 1 2\n1 3\n")


def test_invalid_modulus_and_vectors():
    assert [q for q in range(20) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19]
    with pytest.raises(DesignError):
        GfMatrix.from_rows(4, [[1, 0]])
    with pytest.raises(DesignError):
        GfVector(3, (1, 3))
    with pytest.raises(DesignError):
        GfVector.of(3, [1]).dot(GfVector.of(3, [1, 1]))


@pytest.mark.parametrize("v,j", [(9, 1), (9, 2), (27, 2), (3, 1)])
def test_canonical_ternary_matrix(v, j):
    m = canonical_dual_matrix_3(v, j)
    assert m.rows[0] == (1,) * v
    assert rank(m) == j + 1
    cols = m.columns()
    assert all(cols.count(c) == v // 3**j for c in set(cols))
    assert len(set(cols)) == 3**j


@pytest.mark.parametrize("w,j", [(8, 1), (8, 3), (16, 2), (16, 4)])
def test_canonical_binary_matrix(w, j):
    m = canonical_dual_matrix_2(w, j)
    assert m.ncols == w - 1 and rank(m) == j
    cols = m.columns()
    zero = (0,) * j
    assert cols.count(zero) == w // 2**j - 1
    assert all(cols.count(c) == w // 2**j for c in set(cols) - {zero})


def test_canonical_matrix_bad_parameters():
    with pytest.raises(DesignError):
        canonical_dual_matrix_3(15, 2)
    with pytest.raises(DesignError):
        canonical_dual_matrix_2(8, 0)


@settings(max_examples=30)
@given(st.integers(1, 6), st.sampled_from([2, 3]))
def test_zero_and_full_subspaces(n, p):
    z = Subspace.zero(p, n)
    full = Subspace.of_matrix(GfMatrix.identity(p, n))
    assert dual_basis(z) == full and dual_basis(full) == z
    assert z.is_subspace_of(full)
    assert _row_space_equal(GfMatrix.zeros(p, 2, n), GfMatrix(p, (), n))
