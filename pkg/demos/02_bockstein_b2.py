# # The Bockstein spectral sequence page B2
#
# The mod-p cohomology of Exp(L) is modelled by Lambda(x) (x) F_p[s] with a
# derivation beta.  Its cohomology B2 splits by polynomial weight into Lie
# algebra cohomology with symmetric-power coefficients.

from plie import named_algebra
from plie.bockstein import BocksteinData, b2_direct, b2_via_lie, free_ring_dims

# Below degree 2p = 10 symmetric forms and polynomials give the same answer.
# From 2p on only polynomial coefficients S^k = F_p[x]_k match, since the two
# modules differ once k >= p.

for name in ("sl2", "heisenberg", "solvable_S"):
    L = named_algebra(name, 5)
    direct = b2_direct(BocksteinData(L), 12).dims()
    forms = b2_via_lie(L, 12).dims()
    poly = b2_via_lie(L, 12, coefficients="poly").dims()
    print(f"{name:<11} direct {direct}")
    print(f"{'':<11} forms  {forms}   equal below 2p: {direct[:10] == forms[:10]}")
    print(f"{'':<11} poly   {poly}   equal: {direct == poly}")

# For the two-dimensional solvable algebra B2 is free on classes of degree
# 1, 2p-1, 2 and 2p.

print(free_ring_dims([1, 9, 2, 10], [True, True, False, False], 12))

# The same happens at p = 3, already from degree 6.

L = named_algebra("sl2", 3)
print("p=3 direct", b2_direct(BocksteinData(L), 10).dims())
print("p=3 forms ", b2_via_lie(L, 10).dims())
print("p=3 poly  ", b2_via_lie(L, 10, coefficients="poly").dims())
