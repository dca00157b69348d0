"""Lift the 2-dim tame pair T = [[1,1],[0,1]], S = diag(2,1) over F_5 to Z/125."""
from galois_lift.linalg import Matrix
from galois_lift.rings import FieldSpec
from galois_lift.tame import TamePair, lift_tame, type_of

k = FieldSpec(5)
p = TamePair(2, Matrix(k, [[1, 1], [0, 1]]), Matrix.diag(k, [k(2), k(1)]))
t, _ = type_of(p)
print("type:", t.to_json())
for m in (2, 3):
    L, C = lift_tame(p, m)
    print(f"m={m}: tau={L.tau.to_json()} sigma={L.sigma.to_json()}")
    print("  relation exact:", L.relation_defect().is_zero(), " reduces to input:", L.reduce() == p.conjugate(C))
