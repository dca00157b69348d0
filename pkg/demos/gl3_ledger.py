"""Dimension bookkeeping for N = 3 over Q, and the local shapes at p = 2, 3."""
from galois_lift.errors import PreconditionError
from galois_lift.ledger import EllShapeGL3, classify_ell_gl3, main_theorem_ledger

out = main_theorem_ledger(3, 1, 1)
print({k: out[k] for k in ("ell_term", "infinity_term", "margin", "variables", "tangent_inequality")})
for ell, p, shape, eps in [(13, 2, "A", None), (13, 2, "B", 0), (13, 2, "B", 1), (7, 2, "C", None),
                           (11, 2, "C", None)]:
    try:
        r = classify_ell_gl3(EllShapeGL3(ell, p, shape, epsilon=eps))
        print(f"ell={ell} p={p} {shape} eps={eps}: case {r['case']}, dim N = {r['dim_N']}")
    except PreconditionError as exc:
        print(f"ell={ell} p={p} {shape}: refused ({exc})")
