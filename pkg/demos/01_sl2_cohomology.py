# # Cohomology of sl2 over a finite field
#
# Structure constants go in, Chevalley-Eilenberg dimensions come out.  We
# look at trivial coefficients, the adjoint module and symmetric powers.

import numpy as np

from plie import named_algebra
from plie.cohomology import cohomology, form_to_polynomial, killing_form, module_ad, module_sym

L = named_algebra("sl2", 5)
print(L)

# Trivial coefficients: only degrees 0 and 3 survive.

print("H^*(sl2; F_5)   ", cohomology(L).dims)

# The adjoint module and S^1 are acyclic.

print("H^*(sl2; ad)    ", cohomology(L, module_ad(L)).dims)
print("H^*(sl2; S^1)   ", cohomology(L, module_sym(L, 1)).dims)

# S^2 has a single invariant, and it is the Killing form.

rep = cohomology(L, module_sym(L, 2), representatives=True)
print("H^*(sl2; S^2)   ", rep.dims)
v = rep.representatives[0][0]
K = killing_form(L)
print("invariant       ", form_to_polynomial(v, 3, 2, 5))
print("Killing form    ", form_to_polynomial(K, 3, 2, 5))
print("proportional:   ", any(np.array_equal(a * v % 5, K) for a in range(1, 5)))
