# # Lifting a Lie algebra one level up
#
# Read structure constants over Z/p^{k-1} as integers mod p^k.  The Jacobi
# tensor is then divisible by p^{k-1}; the quotient is a 3-cocycle with
# adjoint coefficients and its class decides whether a lift exists.

import numpy as np

from plie import named_algebra
from plie.algebra import BracketAlgebra
from plie.cohomology import build_complex, module_ad
from plie.lifting import LiftProblem, brute_force_lift_oracle, cochain_to_constants, obstruction, random_lie_algebra
from plie.modp import PrimePower

rep = obstruction(LiftProblem(named_algebra("gl2", 3), 2))
print("gl2 over F_3:", rep.tower_verdict, " correction zero:", not rep.mu.any())

# Every three-dimensional algebra over F_3 lifts to Z/9.  From Z/9 to Z/27 the
# obstruction can fire, so build algebras over Z/9 by pushing a lift along a
# random 2-cocycle and compare with exhaustive search.

rng = np.random.default_rng(3)
tally = {True: 0, False: 0}
for _ in range(200):
    L = random_lie_algebra(3, 3, rng)
    c = obstruction(LiftProblem(L, 2)).corrected.c
    cx = build_complex(L, module_ad(L))
    for _ in range(30):
        z = rng.integers(0, 3, cx.dims[2])
        if not cx.apply(2, z).any():
            c = (c + 3 * cochain_to_constants(z, 3)) % 9
            break
    problem = LiftProblem(BracketAlgebra(PrimePower(3, 2), c), 3)
    verdict = obstruction(problem).obstruction_zero
    assert verdict == brute_force_lift_oracle(problem)
    tally[verdict] += 1
print("Z/9 -> Z/27: liftable", tally[True], " obstructed", tally[False])
