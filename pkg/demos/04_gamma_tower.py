# # Congruence subgroups of GL_n(Z/p^{k+1})
#
# Gamma_{n,k}(p) = { I + pA mod p^{k+1} }.  Reducing one level is a uniform
# step: the kernel is Omega_1 and the p-th power map is a bijection.

from plie import gamma_group
from plie.groups import gamma_log_matches_gl, predicates, uniform_tower_check

G2, G1 = gamma_group(2, 2, 3), gamma_group(2, 1, 3)
for G in (G2, G1):
    pr = predicates(G)
    print(f"{G.name}: order {G.order}, powerful {pr.powerful}, p-central {pr.p_central}")

verdict = uniform_tower_check([G2, G1], [G2.reduction()])
for stage in verdict.stages:
    print(stage)
print("uniform:", verdict.uniform)

# Its Lie algebra is gl2(F_3) once the basis is rescaled by 2.

print("Log(Gamma_{2,2}(3)) = gl2(F_3):", gamma_log_matches_gl(G2))
