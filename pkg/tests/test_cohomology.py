from __future__ import annotations

from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import (bracket, rank_by_enumeration, cochain_from_vector, cohomology_dims_by_enumeration, differential_oracle,
                     evaluate, vector_from_cochain)
from plie.algebra import BracketAlgebra, named_algebra
from plie.cohomology import (CochainError, ModuleAxiomError, build_complex, cohomology,
                             cohomology_dims, form_to_polynomial, is_coboundary, killing_form, module_ad,
                             module_poly, module_sym, module_trivial, polynomial_to_form)
from plie.lifting import random_lie_algebra
from plie.modp import PrimePower, rank_fp

NON_LIE = BracketAlgebra.from_brackets(PrimePower(5), 3, {(0, 1): [0, 0, 1], (0, 2): [1, 0, 0]})


def lie_algebras(n=3, p=3):
    return st.integers(0, 2 ** 32 - 1).map(lambda s: random_lie_algebra(n, p, np.random.default_rng(s)))


@pytest.mark.parametrize("p", [5, 7])
def test_sl2_trivial_and_s1(p):
    L = named_algebra("sl2", p)
    assert cohomology(L).dims == (1, 0, 0, 1)
    assert cohomology(L, module_sym(L, 1)).dims == (0, 0, 0, 0)


def test_sl2_s2_invariant_is_the_killing_form():
    L = named_algebra("sl2", 5)
    rep = cohomology(L, module_sym(L, 2), representatives=True)
    assert rep.dims[0] == 1
    v = rep.representatives[0][0]
    K = killing_form(L)
    assert K.tolist() == [8 % 5, 0, 0, 0, 4, 0]
    # proportional: some scalar multiple agrees
    assert any(np.array_equal((a * v) % 5, K) for a in range(1, 5))
    assert form_to_polynomial(K, 3, 2, 5) == {(2, 0, 0): 8 % 5, (0, 1, 1): 8 % 5}


def test_killing_form_is_annihilated():
    L = named_algebra("sl2", 7)
    M = module_sym(L, 2)
    K = killing_form(L)
    for r in M.rho:
        assert not (r @ K % 7).any()


def test_sym_zero_and_ad_of_abelian():
    L = named_algebra("abelian(3)", 5)
    assert module_sym(L, 0).dim == 1
    assert all(not r.any() for r in module_ad(L).rho)


def test_sym_module_dimension():
    L = named_algebra("gl2", 5)
    for k in range(4):
        assert module_sym(L, k).dim == comb(4 + k - 1, k)


def test_sym_action_is_a_left_module_without_flip():
    for name in ("sl2", "so3", "heisenberg", "solvable_S", "gl2"):
        L = named_algebra(name, 5)
        for k in (1, 2, 3):
            assert not module_sym(L, k).flipped


def test_non_module_is_rejected():
    L = named_algebra("sl2", 5)
    rho = [np.eye(3, dtype=np.int64) * (i + 1) for i in range(3)]
    with pytest.raises(ModuleAxiomError):
        module_ad(NON_LIE)
    from plie.cohomology import _checked
    with pytest.raises(ModuleAxiomError):
        _checked(L, rho, "junk")


def test_abelian_trivial_dims():
    for n in (1, 2, 3, 4):
        L = named_algebra(f"abelian({n})", 5)
        assert cohomology(L).dims == tuple(comb(n, l) for l in range(n + 1))
        assert all(m.is_zero() for m in build_complex(L).d)


def test_sl2_d1_is_injective():
    # H^1 = 0 with d^0 = 0 forces rank d^1 = 3; enumeration agrees
    cx = build_complex(named_algebra("sl2", 5))
    assert rank_fp(cx.d[1]) == 3
    assert rank_by_enumeration(cx.d[1].entries.tolist(), 5, 3) == 3


def test_heisenberg_d1():
    # the displayed differential gives d(z*) = -x* ^ y*
    cx = build_complex(named_algebra("heisenberg", 5))
    d1 = cx.d[1].entries
    assert d1[:, 2].tolist() == [4, 0, 0]
    assert not d1[:, :2].any()


def test_unimodular_top_cohomology():
    for name in ("sl2", "heisenberg", "abelian(3)", "so3"):
        assert cohomology(named_algebra(name, 5)).dims[-1] == 1
    # solvable_S is not unimodular
    assert cohomology(named_algebra("solvable_S", 5)).dims[-1] == 0


def test_non_lie_has_dd_defect():
    cx = build_complex(NON_LIE, check=False)
    assert cx.dd_defects() == [1]
    with pytest.raises(CochainError):
        build_complex(NON_LIE)


@given(lie_algebras(), st.sampled_from(["trivial", "ad", "sym1", "sym2"]))
def test_d_squared_vanishes(L, which):
    M = {"trivial": module_trivial, "ad": module_ad,
         "sym1": lambda L: module_sym(L, 1), "sym2": lambda L: module_sym(L, 2)}[which](L)
    assert build_complex(L, M).dd_defects() == []


@given(lie_algebras(), st.sampled_from(["trivial", "ad", "sym1"]))
def test_euler_characteristic(L, which):
    M = {"trivial": module_trivial, "ad": module_ad, "sym1": lambda L: module_sym(L, 1)}[which](L)
    dims = cohomology(L, M).dims
    assert sum((-1) ** l * d for l, d in enumerate(dims)) == 0


@settings(max_examples=15)
@given(lie_algebras(), st.sampled_from(["trivial", "ad", "sym1"]))
def test_dims_match_enumeration_oracle(L, which):
    M = {"trivial": module_trivial, "ad": module_ad, "sym1": lambda L: module_sym(L, 1)}[which](L)
    oracle = cohomology_dims_by_enumeration(L.c.tolist(), [r.tolist() for r in M.rho], 3, M.dim, 3)
    assert list(cohomology(L, M).dims) == oracle


@given(lie_algebras(p=5), st.sampled_from([1, 2]), st.integers(0, 2 ** 32 - 1))
def test_matrix_matches_formula_evaluated_on_vectors(L, l, seed):
    M = module_ad(L)
    n, m, p = 3, 3, 5
    cx = build_complex(L, M)
    vec = np.random.default_rng(seed).integers(0, p, cx.dims[l])
    omega = cochain_from_vector(vec, l, n, m)
    oracle = vector_from_cochain(differential_oracle(L.c.tolist(), [r.tolist() for r in M.rho], omega, l, n, m, p),
                                 l + 1, n, m)
    assert cx.apply(l, vec).tolist() == oracle


@given(lie_algebras(p=5), st.integers(0, 2 ** 32 - 1))
def test_compact_form_on_one_and_two_forms(L, seed):
    # d w = -w o br + ad o (1 ^ w), evaluated on random vectors rather than basis tuples
    rng = np.random.default_rng(seed)
    p, n = 5, 3
    M = module_ad(L)
    cx = build_complex(L, M)
    c = L.c.tolist()
    rho = [r.tolist() for r in M.rho]

    def act(u, w):
        return [sum(u[i] * rho[i][a][b] * w[b] for i in range(n) for b in range(n)) % p for a in range(n)]

    vec1 = rng.integers(0, p, cx.dims[1])
    w1 = cochain_from_vector(vec1, 1, n, 3)
    dw1 = cochain_from_vector(cx.apply(1, vec1), 2, n, 3)
    u, v = rng.integers(0, p, n).tolist(), rng.integers(0, p, n).tolist()
    want = [(-x + y - z) % p for x, y, z in
            zip(evaluate(w1, [bracket(c, u, v, p)], 3, p), act(u, evaluate(w1, [v], 3, p)), act(v, evaluate(w1, [u], 3, p)))]
    assert evaluate(dw1, [u, v], 3, p) == want

    vec2 = rng.integers(0, p, cx.dims[2])
    w2 = cochain_from_vector(vec2, 2, n, 3)
    dw2 = cochain_from_vector(cx.apply(2, vec2), 3, n, 3)
    us = [rng.integers(0, p, n).tolist() for _ in range(3)]
    boundary = [[bracket(c, us[0], us[1], p), us[2]], [bracket(c, us[0], us[2], p), us[1]],
                [bracket(c, us[1], us[2], p), us[0]]]
    signs = [-1, 1, -1]
    total = [0] * 3
    for s, args in zip(signs, boundary):
        total = [t + s * x for t, x in zip(total, evaluate(w2, args, 3, p))]
    for i, s in enumerate([1, -1, 1]):
        rest = [us[a] for a in range(3) if a != i]
        total = [t + s * x for t, x in zip(total, act(us[i], evaluate(w2, rest, 3, p)))]
    assert evaluate(dw2, us, 3, p) == [t % p for t in total]


def test_is_coboundary_examples():
    L = named_algebra("sl2", 5)
    cx = build_complex(L)
    assert not is_coboundary(cx, 3, [0]).any()
    assert is_coboundary(cx, 3, [1]) is None  # h* ^ x+* ^ x-*
    rng = np.random.default_rng(7)
    for _ in range(5):
        mu = rng.integers(0, 5, cx.dims[1])
        pre = is_coboundary(cx, 2, cx.apply(1, mu))
        assert pre is not None
        assert np.array_equal(cx.apply(1, pre), cx.apply(1, mu))
    with pytest.raises(ValueError):
        is_coboundary(cx, 1, [1, 0, 0])  # h* is not closed


def test_sym_and_poly_agree_below_p():
    for name in ("sl2", "heisenberg", "so3"):
        L = named_algebra(name, 5)
        for k in range(5):
            assert cohomology_dims(build_complex(L, module_sym(L, k))) == \
                cohomology_dims(build_complex(L, module_poly(L, k)))


def test_sym_and_poly_differ_at_p():
    # symmetric forms and polynomials part ways in degree k = p
    L = named_algebra("sl2", 3)
    assert cohomology_dims(build_complex(L, module_sym(L, 3))) != \
        cohomology_dims(build_complex(L, module_poly(L, 3)))


def test_form_polynomial_round_trip():
    K = killing_form(named_algebra("sl2", 5))
    poly = form_to_polynomial(K, 3, 2, 5)
    assert np.array_equal(polynomial_to_form(poly, 3, 2, 5), K)
    with pytest.raises(ValueError):
        polynomial_to_form(poly, 3, 5, 5)


def test_report_dict():
    L = named_algebra("sl2", 5)
    d = cohomology(L, module_ad(L)).to_dict()
    assert d["dims"] == [0, 0, 0, 0] and d["module"] == "ad"
