"""Acceptance gate: one check per criterion, each timed against its limit.

Run under pytest (lines are collected into the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import os
import sys
import time
from itertools import combinations

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import cochain_from_vector, differential_oracle, jacobi_values, vector_from_cochain  # noqa: E402
from plie.algebra import BracketAlgebra, ExteriorElement, named_algebra  # noqa: E402
from plie.bockstein import (BocksteinData, b2_direct, b2_via_lie, beta, beta_squared_defect,  # noqa: E402
                            free_ring_dims, lhs_e3_dims, regauge, ring_dims)
from plie.cohomology import cohomology, form_to_polynomial, killing_form, module_sym  # noqa: E402
from plie.groups import (check_associativity, exp_group, gamma_group, gamma_log_matches_gl,  # noqa: E402
                         is_central, log_bracket, predicates, uniform_tower_check)
from plie.lifting import LiftProblem, brute_force_lift_oracle, obstruction, random_lie_algebra  # noqa: E402
from plie.modp import PrimePower, span_fp  # noqa: E402

NON_LIE = BracketAlgebra.from_brackets(PrimePower(5), 3, {(0, 1): [0, 0, 1], (0, 2): [1, 0, 0]})


def criterion_1():
    for p in (5, 7):
        L = named_algebra("sl2", p)
        assert cohomology(L).dims == (1, 0, 0, 1)
        assert cohomology(L, module_sym(L, 1)).dims == (0, 0, 0, 0)
        rep = cohomology(L, module_sym(L, 2), representatives=True)
        assert rep.dims[0] == 1
        target = {(2, 0, 0): 8 % p, (0, 1, 1): 8 % p}  # 8 (H^2 + X+ X-)
        v = rep.representatives[0][0]
        assert any(form_to_polynomial((a * v) % p, 3, 2, p) == target for a in range(1, p))
        assert form_to_polynomial(killing_form(L), 3, 2, p) == target
    return "sl2 over F_5, F_7: (1,0,0,1), S^1 acyclic, H^0(S^2) spanned by 8(H^2+X+X-)"


def criterion_2():
    names = ["abelian(2)", "heisenberg", "solvable_S", "sl2", "so3", "gl2"]
    for name in names:
        L = named_algebra(name, 5)
        assert b2_direct(BocksteinData(L), 10).dims() == b2_via_lie(L, 10).dims(), name
    return f"{len(names)} algebras over F_5, degrees 0..9"


def _is_nonzero_class(bd, el, d, D):
    R = bd.ring(D)
    if beta(bd, el, D):
        return False
    ext, poly = bd.generator_images(R)
    image = R.derivation_matrix(ext, poly, d - 1).entries.T
    return not span_fp(PrimePower(bd.p), image, R.count(d)).contains(R.vector(el, d))


def criterion_3():
    L = named_algebra("sl2", 5)
    bd = BocksteinData(L)
    dims = b2_direct(bd, 6).dims()
    assert dims[1:5] == [0, 0, 1, 1], dims
    R = bd.ring(6)
    assert _is_nonzero_class(bd, R.ext(0, 1, 2), 3, 6)
    H, Xp, Xm = (R.gen_poly(i) for i in range(3))
    killing = R.add(R.mul(H, H), R.mul(Xp, Xm), coeffs=[8, 8])
    assert _is_nonzero_class(bd, killing, 4, 6)
    return "B2^1..4 = 0,0,1,1 with classes h x+ x- and 8(H^2+X+X-)"


def criterion_4():
    got = b2_direct(BocksteinData(named_algebra("solvable_S", 5)), 12).dims()
    want = free_ring_dims([1, 9, 2, 10], [True, True, False, False], 12)
    assert got == want, (got, want)
    return f"dims {got}"


def criterion_5():
    names = ["abelian(1)", "abelian(2)", "abelian(3)", "heisenberg", "solvable_S", "sl2", "so3"]
    count = 0
    for p in (3, 5):
        for name in names:
            L = named_algebra(name, p)
            G = exp_group(L)
            assert G.order == p ** (2 * L.dim)
            assert check_associativity(G).associative
            pr = predicates(G)
            assert pr.mode == "exact" and pr.exponent == p * p
            assert pr.omega1.same_as(pr.power) and pr.power.same_as(pr.frattini)
            assert is_central(G, pr.omega1)
            assert log_bracket(G).same_constants(L)
            count += 1
    return f"{count} (algebra, p) pairs"


def criterion_6():
    G1, G2 = gamma_group(2, 1, 3), gamma_group(2, 2, 3)
    assert G1.order == 81 and G2.order == 6561
    for G in (G1, G2):
        pr = predicates(G)
        assert pr.powerful and pr.p_central
    verdict = uniform_tower_check([G2, G1], [G2.reduction()])
    assert verdict.uniform
    assert all(s.kernel_is_omega1 and s.phi_bijective for s in verdict.stages)
    assert gamma_log_matches_gl(G2)
    return "orders 81, 6561; uniform; Log = gl2(F_3)"


def _random_brackets(rng, n, p):
    c = np.zeros((n, n, n), dtype=np.int64)
    for i, j in combinations(range(n), 2):
        c[i, j] = rng.integers(0, p, n)
        c[j, i] = -c[i, j]
    return BracketAlgebra(PrimePower(p), c)


def criterion_7(trials=600):
    rng = np.random.default_rng(7)
    n, p = 3, 3
    outcomes = {True: 0, False: 0}
    for r in range(trials):
        L = random_lie_algebra(n, p, rng) if r % 2 else _random_brackets(rng, n, p)
        eta_vec = rng.integers(0, p, n)  # C^3(L; ad) has one triple, n coordinates
        eta = tuple(ExteriorElement.from_dict(n, p, {(0, 1, 2): int(v)}) for v in eta_vec)
        c = L.c.tolist()
        j_zero = not any(any(v) for v in jacobi_values(c, p).values())
        rho = [[[int(c[i][b][a]) for b in range(n)] for a in range(n)] for i in range(n)]
        d_eta = differential_oracle(c, rho, cochain_from_vector(eta_vec, 3, n, n), 3, n, n, p)
        d_zero = not any(vector_from_cochain(d_eta, 4, n, n))
        zero = beta_squared_defect(BocksteinData(L, eta)) is None
        assert zero == (j_zero and d_zero)
        outcomes[zero] += 1
    assert outcomes[True] and outcomes[False]
    return f"{trials} pairs, {outcomes[True]} with beta^2 = 0"


def criterion_8(trials=220):
    rng = np.random.default_rng(8)
    for _ in range(trials):
        problem = LiftProblem(random_lie_algebra(3, 3, rng), 2)
        rep = obstruction(problem)
        assert rep.obstruction_zero == brute_force_lift_oracle(problem)
        if rep.obstruction_zero:
            c = rep.corrected.c.tolist()
            assert not any(any(v) for v in jacobi_values(c, 9).values())
            assert rep.corrected.reduce(1).same_constants(problem.L)
    return f"{trials} algebras over F_3, all verdicts agree"


def criterion_9(trials=10):
    L = named_algebra("sl2", 5)
    bd = BocksteinData(L)
    base = b2_direct(bd, 8).dims()
    rng = np.random.default_rng(9)
    for _ in range(trials):
        mu = [ExteriorElement.from_dict(3, 5, {T: int(rng.integers(0, 5)) for T in combinations(range(3), 2)})
              for _ in range(3)]
        assert b2_direct(regauge(bd, mu), 8).dims() == base
    return f"{trials} random mu, dims {base}"


def criterion_10():
    for L in (named_algebra("sl2", 5), named_algebra("heisenberg", 5), NON_LIE):
        assert lhs_e3_dims(L, 6) == ring_dims(L.dim, 6)
    return "sl2, heisenberg, non-Lie agree through degree 5"


CRITERIA = [
    (1, criterion_1, 1.0),
    (2, criterion_2, 30.0),
    (3, criterion_3, 5.0),
    (4, criterion_4, 5.0),
    (5, criterion_5, 60.0),
    (6, criterion_6, 60.0),
    (7, criterion_7, 60.0),
    (8, criterion_8, 600.0),
    (9, criterion_9, 10.0),
    (10, criterion_10, 5.0),
]


def evaluate(number, fn, limit):
    start = time.perf_counter()
    try:
        detail, ok = fn(), True
    except AssertionError as exc:
        detail, ok = f"assertion failed {exc}", False
    elapsed = time.perf_counter() - start
    if ok and elapsed > limit:
        ok, detail = False, f"{detail}; over the {limit:g} s limit"
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s, limit {limit:g}s) {detail}"
    return ok, line


@pytest.mark.parametrize("number,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, fn, limit, acceptance_log):
    ok, line = evaluate(number, fn, limit)
    acceptance_log.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
