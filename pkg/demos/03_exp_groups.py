# # From a bracket to a p-group and back
#
# Exp(L) is Z/p^2 ^ n with  l o m = l + m + p [l, m].  The group is powerful
# and p-central, and the commutator and p-power forms return the bracket.

from plie import named_algebra
from plie.groups import check_associativity, exp_group, log_bracket, predicates

for name in ("heisenberg", "sl2", "so3"):
    L = named_algebra(name, 3)
    G = exp_group(L)
    pr = predicates(G)
    print(f"{name:<11} order {G.order:>4}  exponent {pr.exponent}  powerful {pr.powerful}  "
          f"p-central {pr.p_central}  associative {check_associativity(G).associative}  "
          f"Log = L {log_bracket(G).same_constants(L)}")

# The multiplication stays associative even when the bracket breaks Jacobi;
# the failure only shows one level up.

from plie.algebra import BracketAlgebra
from plie.modp import PrimePower

bad = BracketAlgebra.from_brackets(PrimePower(3), 3, {(0, 1): [0, 0, 1], (0, 2): [1, 0, 0]})
print("non-Lie bracket, Exp associative:", check_associativity(exp_group(bad)).associative)
