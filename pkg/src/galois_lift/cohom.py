"""Local cohomology dimensions at a place v not dividing ell.

A LocalModule is a finite k-vector space with commuting-up-to-relation
actions of Frobenius (phi) and tame inertia (iota).  H^0 is a fixed space,
H^2 comes from local duality, and H^1 is computed twice: from the Euler
characteristic (h1 = h0 + h2) and from the explicit cocycle system of the
two-generator tame group.  The two must agree.
"""

from __future__ import annotations

from .errors import InternalDefect, PreconditionError
from .linalg import Matrix, is_similar_pair, kernel, rank, solve_k
from .rings import FieldSpec, mult_order
from .tame import TamePair, tate_twist


class LocalModule:
    """k-linear actions phi (Frobenius) and iota (inertia) with phi iota phi^-1 = iota^q."""

    def __init__(self, spec: FieldSpec, q: int, phi: Matrix, iota: Matrix, derived_from=None):
        if not spec.is_field:
            raise PreconditionError("local modules are defined over the residue field")
        self.spec = spec
        self.q = q
        self.phi = phi
        self.iota = iota
        self.derived_from = derived_from

    @property
    def dim(self) -> int:
        return self.phi.n_rows

    def violations(self) -> list[dict]:
        out = []
        if self.dim == 0:
            return out
        if not self.phi.is_invertible():
            out.append({"kind": "phi_not_invertible"})
        if not self.iota.is_invertible():
            out.append({"kind": "iota_not_invertible"})
        elif self.phi @ self.iota != (self.iota ** self.q) @ self.phi:
            out.append({"kind": "relation_fails"})
        return out

    def is_unramified(self) -> bool:
        return self.iota.is_identity()

    def as_pair(self) -> TamePair:
        return TamePair(self.q, self.iota, self.phi)

    def to_json(self):
        return {
            "ell": self.spec.ell,
            "r": self.spec.r,
            "q": self.q,
            "dim": self.dim,
            "phi": self.phi.to_json(),
            "iota": self.iota.to_json(),
            "derived_from": self.derived_from,
        }

    def __repr__(self):
        return f"LocalModule(dim={self.dim}, q={self.q}, spec={self.spec!r}, from={self.derived_from!r})"


def _empty(spec, q, note):
    Z = Matrix.zeros(spec, 0, 0)
    return LocalModule(spec, q, Z, Z, note)


def module_of(p: TamePair) -> LocalModule:
    """The underlying space of a pair over k."""
    if not p.ring.is_field:
        raise PreconditionError("local modules need a pair over the residue field")
    return LocalModule(p.ring, p.q, p.sigma, p.tau, "pair")


def _conj_action(A: Matrix, B: Matrix) -> Matrix:
    """Action X -> A X B^-1 on row-major vec(X)."""
    return A.kron(B.inverse().transpose())


def ad(p: TamePair) -> LocalModule:
    """n x n matrices with g acting by conjugation."""
    if not p.ring.is_field:
        raise PreconditionError("ad expects a pair over the residue field")
    return LocalModule(p.ring, p.q, _conj_action(p.sigma, p.sigma),
                       _conj_action(p.tau, p.tau), "ad")


def ad0_basis(spec: FieldSpec, n: int) -> list[list]:
    """Trace-zero basis: E_ij (i != j, row-major order), then E_ii - E_nn."""
    basis = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = [spec.zero] * (n * n)
                v[i * n + j] = spec.one
                basis.append(v)
    for i in range(n - 1):
        v = [spec.zero] * (n * n)
        v[i * n + i] = spec.one
        v[(n - 1) * n + (n - 1)] = -spec.one
        basis.append(v)
    return basis


def restrict_action(A: Matrix, basis) -> Matrix:
    """Matrix of A on the invariant subspace spanned by ``basis``."""
    spec = A.ring
    if not basis:
        return Matrix.zeros(spec, 0, 0)
    B = Matrix.from_columns(spec, basis)
    cols = []
    for v in basis:
        sol = solve_k(B, A @ v)
        if not sol.consistent:
            raise PreconditionError("subspace is not invariant")
        cols.append(sol.particular)
    return Matrix.from_columns(spec, cols)


def ad0(p: TamePair, require_split: bool = False) -> LocalModule:
    """Trace-zero matrices under conjugation.

    The subspace is always invariant.  With require_split=True we insist on
    ell not dividing n, which is when ad = ad0 + scalars.
    """
    n = p.n
    spec = p.ring
    if require_split and n % spec.ell == 0:
        raise PreconditionError(f"ell={spec.ell} divides n={n}: ad0 is not a direct summand")
    if n == 1:
        return _empty(spec, p.q, "ad0")
    full = ad(p)
    basis = ad0_basis(spec, n)
    return LocalModule(spec, p.q, restrict_action(full.phi, basis),
                       restrict_action(full.iota, basis), "ad0")


def hom(p1: TamePair, p2: TamePair) -> LocalModule:
    """Hom(V1, V2): n2 x n1 matrices X with g X = rho2(g) X rho1(g)^-1."""
    if p1.ring != p2.ring or p1.q != p2.q:
        raise PreconditionError("hom needs pairs over the same field with the same q")
    if not p1.ring.is_field:
        raise PreconditionError("hom expects pairs over the residue field")
    return LocalModule(p1.ring, p1.q, _conj_action(p2.sigma, p1.sigma),
                       _conj_action(p2.tau, p1.tau), "hom")


def twist(M: LocalModule, j: int) -> LocalModule:
    """M(j): phi multiplied by q^j."""
    c = M.spec(M.q) ** j
    return LocalModule(M.spec, M.q, M.phi * c, M.iota, {"twist": j, "of": M.derived_from})


def dual(M: LocalModule) -> LocalModule:
    if M.dim == 0:
        return M
    return LocalModule(M.spec, M.q, M.phi.inverse().transpose(), M.iota.inverse().transpose(),
                       {"dual": M.derived_from})


# ---------------------------------------------------------------------------
# dimensions

def _stack(*mats):
    return Matrix.from_blocks(mats[0].ring, [[A] for A in mats])


def h0_dim(M: LocalModule) -> int:
    if M.dim == 0:
        return 0
    I = Matrix.identity(M.spec, M.dim)
    return len(kernel(_stack(M.phi - I, M.iota - I)))


def h2_dim(M: LocalModule) -> int:
    """Defined through local duality: h0 of the dual twisted by 1."""
    return h0_dim(twist(dual(M), 1))


def h1_formula(M: LocalModule) -> int:
    """Euler characteristic route (zero at v not dividing ell)."""
    return h0_dim(M) + h2_dim(M)


def h1_oracle(M: LocalModule) -> int:
    """Cocycles minus coboundaries for the tame group <sigma, tau | s t s^-1 = t^q>.

    A cocycle is fixed by a = c(sigma), b = c(tau) subject to
    a + phi b - iota^q a = (1 + iota + ... + iota^(q-1)) b.
    """
    n = M.dim
    if n == 0:
        return 0
    spec = M.spec
    I = Matrix.identity(spec, n)
    Nm = Matrix.zeros(spec, n)
    P = I
    for _ in range(M.q):
        Nm = Nm + P
        P = P @ M.iota
    cocycle = Matrix.from_blocks(spec, [[I - M.iota ** M.q, M.phi - Nm]])
    z1 = len(kernel(cocycle))
    b1 = rank(_stack(M.phi - I, M.iota - I))
    return z1 - b1


def h1_dim(M: LocalModule) -> int:
    f = h1_formula(M)
    o = h1_oracle(M)
    if f != o:
        raise InternalDefect("h1 formula and cocycle oracle disagree",
                             residual={"formula": f, "oracle": o, "module": M.to_json()})
    return f


def invariants_basis(A: Matrix) -> list:
    return kernel(A - Matrix.identity(A.ring, A.n_rows))


def h1nr_dim(M: LocalModule) -> int:
    """dim ker(phi - 1) on the inertia invariants."""
    if M.dim == 0:
        return 0
    basis = invariants_basis(M.iota)
    if not basis:
        return 0
    phi_i = restrict_action(M.phi, basis)
    return len(invariants_basis(phi_i))


def unramified_h1_dim(M: LocalModule) -> int:
    """dim coker(phi - 1) on the inertia invariants: H^1 of the unramified quotient."""
    if M.dim == 0:
        return 0
    basis = invariants_basis(M.iota)
    if not basis:
        return 0
    phi_i = restrict_action(M.phi, basis)
    return len(basis) - rank(phi_i - Matrix.identity(M.spec, len(basis)))


def cyclotomic_order(spec: FieldSpec, q: int) -> int:
    """Order of q mod ell, the period of Tate twisting."""
    return mult_order(spec(q))


def hom_vanishing_all_twists(p1: TamePair, p2: TamePair) -> bool:
    """Hom(p1, p2(r)) = 0 for every r (checked over one twist period)."""
    period = cyclotomic_order(p1.ring, p1.q)
    return all(h0_dim(hom(p1, tate_twist(p2, r))) == 0 for r in range(period))


def s_value(p: TamePair) -> int:
    """Least s >= 1 with p(s) similar to p."""
    period = cyclotomic_order(p.ring, p.q)
    for s in range(1, period + 1):
        if is_similar_pair(p, tate_twist(p, s)) is not None:
            return s
    raise InternalDefect("twisting by the full period did not return to p")


def s_small_check(twists, s: int) -> bool:
    """True when every twist index lies in [0, s-2]."""
    return all(0 <= j <= s - 2 for j in twists)


def well_behaved_dims(p: TamePair):
    """(tangent dimension of the minimally ramified condition, h0(ad p)).

    The tangent space is H^1 of the unramified quotient acting on the inertia
    invariants of ad p; well-behavedness says the two numbers agree.
    """
    A = ad(p)
    tangent = unramified_h1_dim(A)
    h0 = h0_dim(A)
    if tangent != h0:
        raise InternalDefect("tangent dimension differs from h0(ad)",
                             residual={"tangent": tangent, "h0": h0})
    return tangent, h0


def character_line(spec: FieldSpec, q: int, j: int) -> TamePair:
    """The 1-dim unramified pair omega^j."""
    return TamePair(q, Matrix.identity(spec, 1), Matrix.diag(spec, [spec(q) ** j]))


def ramakrishna_tangent_dim(n: int, q: int, spec: FieldSpec) -> int:
    """Sum over consecutive diagonal lines of h1(Hom(line_{i+1}, line_i))."""
    o = cyclotomic_order(spec, q)
    if o <= n:
        raise PreconditionError(f"order of q mod ell is {o}, must exceed n={n}",
                                [{"kind": "order_too_small", "order": o, "n": n}])
    lines = [character_line(spec, q, n - 1 - i) for i in range(n)]
    return sum(h1_dim(hom(lines[i + 1], lines[i])) for i in range(n - 1))
