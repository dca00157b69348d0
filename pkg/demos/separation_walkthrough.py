"""Greedy separating lift for S3 acting on the sum-zero plane over F_5.

Gamma = M x| S3 has order 150.  We ask for a lift of a transposition g on
which psi_1 stays nonzero modulo (g - 1)M, then count every witness.
"""
from galois_lift.cocycle import (
    FiniteGroupData,
    build_extension,
    exhaustive_witnesses,
    h1_finite,
    semisimple_on,
    separating_lift,
    simple_module_checks,
)
from galois_lift.linalg import Matrix
from galois_lift.rings import FieldSpec

k = FieldSpec(5)
grp = FiniteGroupData.from_matrices(k, [Matrix(k, [[-1, 1], [0, 1]]), Matrix(k, [[0, -1], [1, -1]])])
print("|G| =", grp.order, " simple:", simple_module_checks(grp).to_json())
print("H^1(G, M) =", h1_finite(grp).dim)
gam = build_extension(grp, 1)
g = grp.generators[0]
print("g acts semisimply:", semisimple_on(grp.act(g)))
res = separating_lift(gam, [[1]], g, seed=0)
print("witness:", res.to_json())
wit = exhaustive_witnesses(gam, [[1]], g)
print(f"{len(wit)} of {k.size ** 2} lifts of g separate; greedy output among them:", res.element in wit)
