from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import rank_by_enumeration, solvable_by_enumeration
from plie.modp import (ModMatrix, PrimePower, kernel_fp, rank_fp, rref_fp, solve_fp, solve_mod_pk,
                       span_fp, valuation)

F3 = PrimePower(3)


def small_matrix(p, max_rows=3, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
                               min_size=r, max_size=r)))


def test_prime_power_validation():
    with pytest.raises(ValueError):
        PrimePower(2)
    with pytest.raises(ValueError):
        PrimePower(9)
    with pytest.raises(ValueError):
        PrimePower(5, 0)
    assert PrimePower(5, 2).modulus == 25
    assert str(PrimePower(7)) == "F_7"


def test_half_is_inverse_of_two_mod_pk():
    # (p+1)/2 only inverts 2 modulo p, not modulo p^k
    for p in (3, 5, 7):
        for k in (1, 2, 3):
            R = PrimePower(p, k)
            assert (2 * R.half) % R.modulus == 1


def test_valuation():
    assert valuation(54, 3) == 3
    assert valuation(7, 3) == 0


@given(small_matrix(3))
def test_rank_matches_enumeration(rows):
    m = ModMatrix(F3, rows)
    assert rank_fp(m) == rank_by_enumeration(rows, 3, len(rows[0]))


@given(small_matrix(3))
def test_kernel_is_annihilated_and_has_right_dimension(rows):
    m = ModMatrix(F3, rows)
    ker = kernel_fp(m)
    assert ker.dim == m.cols - rank_fp(m)
    for v in ker.basis:
        assert not (m @ v).any()


@given(small_matrix(3))
def test_rref_is_reduced(rows):
    e, rank, pivots = rref_fp(ModMatrix(F3, rows))
    a = e.entries
    for r, c in enumerate(pivots):
        assert a[r, c] == 1
        assert np.count_nonzero(a[:, c]) == 1
    assert not a[rank:].any()
    assert list(pivots) == sorted(pivots)


@given(small_matrix(3), st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_solve_fp_agrees_with_enumeration(rows, rhs):
    b = rhs[: len(rows)]
    m = ModMatrix(F3, rows)
    v = solve_fp(m, b)
    assert (v is not None) == solvable_by_enumeration(rows, b, 3, len(rows[0]))
    if v is not None:
        assert np.array_equal(m @ v, np.array(b) % 3)


@given(small_matrix(9, max_rows=3, max_cols=3), st.lists(st.integers(0, 8), min_size=3, max_size=3))
def test_solve_mod_p2_agrees_with_enumeration(rows, rhs):
    R = PrimePower(3, 2)
    b = rhs[: len(rows)]
    m = ModMatrix(R, rows)
    v = solve_mod_pk(m, b)
    assert (v is not None) == solvable_by_enumeration(rows, b, 9, len(rows[0]))
    if v is not None:
        assert np.array_equal(m @ v, np.array(b) % 9)


def test_solve_mod_pk_singular_layers():
    R = PrimePower(3, 2)
    # 3x = 3 is solvable, 3x = 1 is not
    assert solve_mod_pk(ModMatrix(R, [[3]]), [3]) is not None
    assert solve_mod_pk(ModMatrix(R, [[3]]), [1]) is None
    # mixed valuations across columns
    m = ModMatrix(R, [[3, 0], [6, 3]])
    assert solve_mod_pk(m, [3, 0]) is not None
    assert solve_mod_pk(m, [3, 1]) is None


def test_span_and_contains():
    S = span_fp(F3, [[1, 1, 0], [2, 2, 0], [0, 1, 1]], 3)
    assert S.dim == 2
    assert S.contains([1, 2, 1])
    assert not S.contains([0, 0, 1])


def test_field_only_functions_reject_prime_powers():
    with pytest.raises(ValueError):
        rank_fp(ModMatrix(PrimePower(3, 2), [[1]]))


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        solve_fp(ModMatrix(F3, [[1, 0]]), [1, 1])


def test_mod_matrix_is_immutable_and_hashable():
    m = ModMatrix(F3, [[4, -1]])
    assert m.entries.tolist() == [[1, 2]]
    with pytest.raises(AttributeError):
        m.ring = PrimePower(5)
    assert hash(m) == hash(ModMatrix(F3, [[1, 2]]))
    assert m @ ModMatrix.identity(F3, 2) == m
