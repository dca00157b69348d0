"""Tame local representations as matrix pairs (T, S) with S T S^-1 = T^q.

T is the image of a tame inertia generator and S the image of a Frobenius
lift.  The type function records, for each q-power orbit of eigenvalues, the
exponents of the orbit polynomial in the primary decomposition of T; it
classifies the inertia action and drives the lifting engine.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import HenselDefect, InternalDefect, PreconditionError
from .linalg import (
    Matrix,
    commutation_space,
    companion,
    primary_decomposition,
    random_invertible,
    solve_k,
)
from .rings import (
    FieldSpec,
    WittSpec,
    embedding,
    mult_order,
    orbit_of,
    poly_from_roots,
    poly_pow,
    principal_unit_nth_root,
    q_orbits,
    teichmuller,
)


# ---------------------------------------------------------------------------
# data types

class TamePair:
    """Matrices (tau, sigma) over k or W_m(k) for a local field of residue size q."""

    def __init__(self, q: int, tau: Matrix, sigma: Matrix):
        if tau.ring != sigma.ring:
            raise PreconditionError("tau and sigma live in different rings")
        if tau.shape != sigma.shape or tau.n_rows != tau.n_cols:
            raise PreconditionError("tau and sigma must be square of equal size")
        self.q = int(q)
        self.tau = tau
        self.sigma = sigma

    @property
    def ring(self):
        return self.tau.ring

    @property
    def n(self) -> int:
        return self.tau.n_rows

    @property
    def ell(self) -> int:
        return self.ring.ell

    @property
    def m(self) -> int:
        return self.ring.m

    @property
    def field(self) -> FieldSpec:
        return self.ring.field

    def relation_defect(self) -> Matrix:
        """S T - T^q S, which vanishes exactly on a valid pair."""
        return self.sigma @ self.tau - (self.tau ** self.q) @ self.sigma

    def reduce(self) -> "TamePair":
        return TamePair(self.q, self.tau.reduce(), self.sigma.reduce())

    def conjugate(self, C: Matrix) -> "TamePair":
        """The pair C^-1 (T, S) C."""
        Ci = C.inverse()
        return TamePair(self.q, Ci @ self.tau @ C, Ci @ self.sigma @ C)

    def __eq__(self, other):
        if not isinstance(other, TamePair):
            return NotImplemented
        return self.q == other.q and self.tau == other.tau and self.sigma == other.sigma

    def __repr__(self):
        return f"TamePair(q={self.q}, tau={self.tau.to_json()}, sigma={self.sigma.to_json()}, ring={self.ring!r})"


def pair_validate(p: TamePair) -> list[dict]:
    """All violated invariants of a pair, as a list of reports (empty when ok)."""
    out = []
    if math.gcd(p.q, p.ell) != 1:
        out.append({"kind": "q_not_coprime_to_ell", "q": p.q, "ell": p.ell})
    if p.q < 2:
        out.append({"kind": "q_too_small", "q": p.q})
    if not p.tau.is_invertible():
        out.append({"kind": "tau_not_invertible"})
    if not p.sigma.is_invertible():
        out.append({"kind": "sigma_not_invertible"})
    if p.q >= 1:
        defect = p.relation_defect()
        if not defect.is_zero():
            entries = [[i, j] for i in range(defect.n_rows) for j in range(defect.n_cols)
                       if defect[i, j]]
            out.append({"kind": "relation_fails", "defect": defect.to_json(), "entries": entries})
    return out


def _assert_valid(p: TamePair, what: str) -> TamePair:
    bad = pair_validate(p)
    if bad:
        raise InternalDefect(f"{what} produced an invalid pair", residual=bad)
    return p


def _require_valid(p: TamePair):
    bad = pair_validate(p)
    if bad:
        raise PreconditionError(f"invalid tame pair: {bad[0]['kind']}", bad)


class TypeFunction:
    """Map (orbit, part index) -> exponent, stored as an ordered list of blocks.

    ``blocks`` is a list of (orbit, exponents): orbit is a tuple of field
    elements as returned by ``orbit_of``, exponents a non-increasing tuple.
    Blocks are kept sorted by the least element of the orbit.
    """

    def __init__(self, spec: FieldSpec, q: int, blocks):
        self.spec = spec
        self.q = q
        norm = []
        for orbit, exps in blocks:
            orbit = tuple(spec(a) for a in orbit)
            exps = tuple(int(e) for e in exps)
            if not orbit or not exps:
                raise PreconditionError("empty orbit or exponent list in a type function")
            if orbit_of(orbit[0], q) != orbit:
                raise PreconditionError(f"{[a.to_json() for a in orbit]} is not a normalised {q}-orbit")
            if any(e < 1 for e in exps) or any(a < b for a, b in zip(exps, exps[1:])):
                raise PreconditionError("exponents must be positive and non-increasing")
            norm.append((orbit, exps))
        norm.sort(key=lambda b: b[0][0].to_int())
        if len({b[0] for b in norm}) != len(norm):
            raise PreconditionError("orbit listed twice in a type function")
        self.blocks = norm

    @property
    def dimension(self) -> int:
        return sum(len(orbit) * e for orbit, exps in self.blocks for e in exps)

    def __call__(self, orbit, i: int) -> int:
        """t(orbit, i) with 1-based part index; zero outside the support."""
        for o, exps in self.blocks:
            if o == tuple(orbit):
                return exps[i - 1] if i <= len(exps) else 0
        return 0

    def to_json(self):
        return [{"orbit": [a.to_json() for a in orbit], "exponents": list(exps)}
                for orbit, exps in self.blocks]

    @classmethod
    def from_json(cls, spec, q, data):
        return cls(spec, q, [(tuple(spec(a) for a in d["orbit"]), d["exponents"]) for d in data])

    def __eq__(self, other):
        if not isinstance(other, TypeFunction):
            return NotImplemented
        return self.spec == other.spec and self.q == other.q and self.blocks == other.blocks

    def __repr__(self):
        return f"TypeFunction({self.to_json()})"


@dataclass(frozen=True)
class DetTarget:
    """Values of a tame character on sigma and tau."""

    on_sigma: object
    on_tau: object

    def violations(self, q: int) -> list[dict]:
        out = []
        if not self.on_sigma.is_unit():
            out.append({"kind": "on_sigma_not_unit"})
        if not self.on_tau.is_unit():
            out.append({"kind": "on_tau_not_unit"})
        elif self.on_tau ** (q - 1) != 1:
            # a character kills tau^(q-1) because sigma tau sigma^-1 = tau^q
            out.append({"kind": "on_tau_not_a_character_value", "q": q})
        return out


# ---------------------------------------------------------------------------
# standard forms

def p_poly(orbit, ring, q: int | None = None):
    """Monic polynomial whose roots are the (Teichmuller lifts of the) orbit."""
    orbit = tuple(orbit)
    if not orbit:
        raise PreconditionError("empty orbit")
    k = ring.field
    if any(a.ring != k for a in orbit) or len(set(orbit)) != len(orbit):
        raise PreconditionError("malformed orbit")
    if q is not None and set(orbit_of(orbit[0], q)) != set(orbit):
        raise PreconditionError(f"not a {q}-orbit")
    if ring.is_field:
        roots = list(orbit)
    else:
        roots = [teichmuller(ring, a) for a in orbit]
    return poly_from_roots(roots, ring)


def standard_tau(t: TypeFunction, ring) -> Matrix:
    """Block-diagonal companion matrices of P_orbit^e, one block per part."""
    if ring.field != t.spec:
        raise PreconditionError("type function and ring have different residue fields")
    blocks = []
    for orbit, exps in t.blocks:
        P = p_poly(orbit, ring)
        for e in exps:
            blocks.append(companion(poly_pow(P, e), ring))
    return Matrix.block_diag(ring, blocks)


def type_of(p: TamePair):
    """(TypeFunction, C) with C^-1 T C = standard_tau(type) over k."""
    if not p.ring.is_field:
        raise PreconditionError("type_of expects a pair over the residue field")
    _require_valid(p)
    blocks, C = primary_decomposition(p.tau, p.q)
    return TypeFunction(p.ring, p.q, blocks), C


# ---------------------------------------------------------------------------
# lifting

def _frobenius_operator(Tbar: Matrix, q: int) -> Matrix:
    """Matrix of X -> X T - T^q X on row-major vec(X)."""
    n = Tbar.n_rows
    k = Tbar.ring
    I = Matrix.identity(k, n)
    return I.kron(Tbar.transpose()) - (Tbar ** q).kron(I)


def lift_tame(p: TamePair, m: int):
    """Lift a pair over k to W_m with tau in standard form.

    Returns (lifted pair, C) where C over k satisfies
    (C^-1 T C, C^-1 S C) = lifted pair mod ell.
    """
    if m < 1:
        raise PreconditionError("precision m must be >= 1")
    t, C = type_of(p)
    k = p.ring
    W = k.witt(m)
    q = p.q
    T = standard_tau(t, W)
    S0 = C.inverse() @ p.sigma @ C
    if m == 1:
        return _assert_valid(TamePair(q, T.reduce(), S0), "lift_tame"), C
    Tq = T ** q
    L = _frobenius_operator(T.reduce(), q)
    S = S0.lift(W)
    ell = k.ell
    for j in range(1, m):
        R = S @ T - Tq @ S
        if not R.divisible_by_ell_power(j):
            raise HenselDefect(f"relation fails below layer {j}", residual=R.to_json())
        Rj = R.map(lambda a: a.digit(j), ring=k)
        sol = solve_k(L, [-x for x in Rj.vec()])
        if not sol.consistent:
            raise HenselDefect(f"Hensel step at layer {j} is inconsistent",
                               residual={"layer": j, "residual": Rj.to_json(),
                                         "tau": T.to_json(), "sigma": S.to_json()})
        X = Matrix.unvec(k, sol.particular, p.n).lift(W)
        S = S + X * (ell ** j)
    out = TamePair(q, T, S)
    return _assert_valid(out, "lift_tame"), C


def lift_with_teichmuller_det(p: TamePair, m: int) -> TamePair:
    """Lift to W_m and twist so that det takes Teichmuller values."""
    if p.n % p.ell == 0:
        raise PreconditionError("n divisible by ell: determinant twisting unavailable")
    lifted, _ = lift_tame(p, m)
    W = lifted.ring
    if W.is_field:
        return lifted
    target = DetTarget(teichmuller(W, p.sigma.det()), teichmuller(W, p.tau.det()))
    return twist_to_determinant(lifted, target)


# ---------------------------------------------------------------------------
# constructions

def _embed_witt(src: WittSpec, dst: WittSpec):
    """Embedding W_m(k) -> W_m(k') lifting the residue field embedding."""
    from .rings import poly_eval
    ksrc, kdst = src.field, dst.field
    z0 = embedding(ksrc, kdst)(ksrc.gen)
    f = [dst(c) for c in src.modulus]
    df = [f[i] * i for i in range(1, len(f))]
    z = dst.lift(z0)
    for _ in range(dst.m + 1):
        z = z - poly_eval(f, z) / poly_eval(df, z)
    powers = [dst.one]
    for _ in range(src.r - 1):
        powers.append(powers[-1] * z)

    def embed(x):
        total = dst.zero
        for c, pw in zip(x.c, powers):
            if c:
                total = total + pw * c
        return total

    return embed


def extend_scalars(p: TamePair, r_new: int) -> TamePair:
    """The pair with entries pushed into GF(ell^r_new) (or its Witt ring)."""
    ring = p.ring
    if r_new % ring.r:
        raise PreconditionError(f"r={ring.r} does not divide r'={r_new}")
    if r_new == ring.r:
        return p
    knew = FieldSpec(ring.ell, r_new)
    if ring.is_field:
        f = embedding(ring, knew)
        new_ring = knew
    else:
        new_ring = knew.witt(ring.m)
        f = _embed_witt(ring, new_ring)
    out = TamePair(p.q, p.tau.map(f, new_ring), p.sigma.map(f, new_ring))
    return _assert_valid(out, "extend_scalars")


def tensor(p1: TamePair, p2: TamePair) -> TamePair:
    """Tensor product in the basis v1 w1, ..., v1 wm, v2 w1, ..."""
    if p1.ring != p2.ring or p1.q != p2.q:
        raise PreconditionError("tensor needs the same ring and q")
    out = TamePair(p1.q, p1.tau.kron(p2.tau), p1.sigma.kron(p2.sigma))
    return _assert_valid(out, "tensor")


def direct_sum(*pairs: TamePair) -> TamePair:
    ring, q = pairs[0].ring, pairs[0].q
    if any(p.ring != ring or p.q != q for p in pairs):
        raise PreconditionError("direct sum needs the same ring and q")
    return TamePair(q, Matrix.block_diag(ring, [p.tau for p in pairs]),
                    Matrix.block_diag(ring, [p.sigma for p in pairs]))


def cyclotomic_value(ring, q: int, j: int):
    """omega(sigma)^j: the integer q (reduced into the ring) to the power j."""
    return ring(q) ** j


def tate_twist(p: TamePair, j: int) -> TamePair:
    """Multiply S by q^j; T is unchanged."""
    c = cyclotomic_value(p.ring, p.q, j)
    return TamePair(p.q, p.tau, p.sigma * c)


def twist_unramified(p: TamePair, c) -> TamePair:
    """Multiply S by the unit c."""
    c = p.ring(c)
    if not c.is_unit():
        raise PreconditionError("unramified twist needs a unit")
    return TamePair(p.q, p.tau, p.sigma * c)


def twist_to_determinant(p: TamePair, chi: DetTarget) -> TamePair:
    """psi * p for the unique psi = 1 mod ell with psi^n = chi / det(p)."""
    n = p.n
    W = p.ring
    if n % p.ell == 0:
        raise PreconditionError(f"ell={p.ell} divides n={n}")
    chi = DetTarget(W(chi.on_sigma), W(chi.on_tau))
    bad = chi.violations(p.q)
    if bad:
        raise PreconditionError(f"invalid determinant target: {bad[0]['kind']}", bad)
    ratio_s = chi.on_sigma / p.sigma.det()
    ratio_t = chi.on_tau / p.tau.det()
    for name, r in (("sigma", ratio_s), ("tau", ratio_t)):
        if r.reduce() != 1:
            raise PreconditionError(
                f"chi / det is not a principal unit on {name}",
                [{"kind": "ratio_not_principal_unit", "generator": name, "ratio": r.to_json()}])
    psi_s = principal_unit_nth_root(ratio_s, n)
    psi_t = principal_unit_nth_root(ratio_t, n)
    out = TamePair(p.q, p.tau * psi_t, p.sigma * psi_s)
    _assert_valid(out, "twist_to_determinant")
    if out.sigma.det() != chi.on_sigma or out.tau.det() != chi.on_tau:
        raise InternalDefect("determinant twist missed its target")
    return out


def induce_unramified(p: TamePair, n: int, q: int) -> TamePair:
    """Induction from the unramified degree-n subextension.

    ``p`` is a pair for the subgroup generated by sigma^n and tau, so its
    relation uses p.q = q^n.  Block i of the output carries tau as
    S'^-1 T^(q^(n-i)) S' (block 0 carries T), sigma maps block i to block
    i+1 by the identity and block n-1 back to block 0 by S'.
    """
    if n < 2:
        raise PreconditionError("induction degree must be >= 2")
    if p.q != q ** n:
        raise PreconditionError(f"pair has q={p.q}, expected q^n={q ** n}")
    ring = p.ring
    d = p.n
    T, Sp = p.tau, p.sigma
    Spi = Sp.inverse()
    tau_blocks = [T] + [Spi @ (T ** (q ** (n - i))) @ Sp for i in range(1, n)]
    Z = Matrix.zeros(ring, d)
    I = Matrix.identity(ring, d)
    grid = [[Z] * n for _ in range(n)]
    for i in range(n - 1):
        grid[i + 1][i] = I
    grid[0][n - 1] = Sp
    out = TamePair(q, Matrix.block_diag(ring, tau_blocks), Matrix.from_blocks(ring, grid))
    return _assert_valid(out, "induce_unramified")


def restrict_unramified(p: TamePair, n: int) -> TamePair:
    """Restriction to the subgroup generated by sigma^n and tau."""
    return TamePair(p.q ** n, p.tau, p.sigma ** n)


def _check_ramakrishna(n: int, q: int, spec: FieldSpec):
    if spec.ell <= n:
        raise PreconditionError(f"need ell > n, got ell={spec.ell}, n={n}")
    if math.gcd(q, spec.ell) != 1:
        raise PreconditionError("q must be prime to ell")
    o = mult_order(spec(q))
    if o <= n:
        raise PreconditionError(
            f"order of q mod ell is {o}, must exceed n={n}",
            [{"kind": "order_too_small", "order": o, "n": n}])


def build_ramakrishna_pair(n: int, q: int, spec: FieldSpec) -> TamePair:
    """S = diag(q^(n-1), ..., q, 1) and T = exp(N) for the regular nilpotent N."""
    _check_ramakrishna(n, q, spec)
    S = Matrix.diag(spec, [spec(q) ** (n - 1 - i) for i in range(n)])
    N = Matrix(spec, [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)])
    T = Matrix.zeros(spec, n)
    P = Matrix.identity(spec, n)
    fact = 1
    for k in range(n):
        T = T + P * spec(fact).inverse()
        P = P @ N
        fact *= k + 1
    return _assert_valid(TamePair(q, T, S), "build_ramakrishna_pair")


def ramakrishna_residual(n: int, q: int, spec: FieldSpec) -> TamePair:
    """The diagonal residual diag(omega^(n-1), ..., omega, 1): unramified, T = I."""
    _check_ramakrishna(n, q, spec)
    S = Matrix.diag(spec, [spec(q) ** (n - 1 - i) for i in range(n)])
    return TamePair(q, Matrix.identity(spec, n), S)


# ---------------------------------------------------------------------------
# block decomposition

def _block_offsets(sizes):
    out = [0]
    for s in sizes:
        out.append(out[-1] + s)
    return out


def decompose_blocks(p: TamePair, residual_blocks):
    """Conjugate a lift of a block-diagonal residual pair into block-diagonal form.

    Returns (C, blocks): C = I mod ell, C^-1 (T, S) C is block diagonal and
    its blocks are the returned pairs, each reducing to the given residual
    block.  Refuses when two residual blocks share a constituent up to
    twist, since then the decomposition is not unique.
    """
    from .cohom import hom_vanishing_all_twists

    W = p.ring
    if W.is_field:
        raise PreconditionError("decompose_blocks expects a pair over W_m")
    k = W.field
    sizes = [b.n for b in residual_blocks]
    if sum(sizes) != p.n:
        raise PreconditionError("residual block sizes do not add up to n")
    for b in residual_blocks:
        if b.ring != k or b.q != p.q:
            raise PreconditionError("residual block over the wrong field or q")
    bar = p.reduce()
    expected = direct_sum(*residual_blocks)
    if bar != expected:
        raise PreconditionError("pair does not reduce to the block-diagonal residual")
    s = len(residual_blocks)
    for a in range(s):
        for b in range(s):
            if a != b and not hom_vanishing_all_twists(residual_blocks[a], residual_blocks[b]):
                raise PreconditionError(
                    f"Hom between residual blocks {a} and {b} is nonzero for some twist",
                    [{"kind": "hom_vanishing_fails", "blocks": [a, b]}])
    off = _block_offsets(sizes)
    ell = W.ell
    C = Matrix.identity(W, p.n)
    cur = p
    for j in range(1, W.m):
        X = Matrix.zeros(k, p.n)
        for a in range(s):
            for b in range(s):
                if a == b:
                    continue
                Xab = _solve_offblock(cur, residual_blocks, off, a, b, j)
                X = X.replace_block(off[a], off[b], Xab)
        Y = Matrix.identity(W, p.n) + X.lift(W) * (ell ** j)
        C = C @ Y
        cur = cur.conjugate(Y)
    for a in range(s):
        for b in range(s):
            if a != b:
                for M in (cur.tau, cur.sigma):
                    if not M.submatrix(off[a], off[a + 1], off[b], off[b + 1]).is_zero():
                        raise InternalDefect("off-diagonal block survived the layer corrections")
    blocks = [TamePair(p.q, cur.tau.submatrix(off[a], off[a + 1], off[a], off[a + 1]),
                       cur.sigma.submatrix(off[a], off[a + 1], off[a], off[a + 1]))
              for a in range(s)]
    for b in blocks:
        _assert_valid(b, "decompose_blocks")
    return C, blocks


def _solve_offblock(cur, residual_blocks, off, a, b, j):
    """X_ab with M_a X - X M_b = -E_ab for both generators (E = layer-j part)."""
    k = residual_blocks[0].ring
    na, nb = residual_blocks[a].n, residual_blocks[b].n
    Ia, Ib = Matrix.identity(k, na), Matrix.identity(k, nb)
    ops = []
    rhs = []
    for M, Ma, Mb in ((cur.tau, residual_blocks[a].tau, residual_blocks[b].tau),
                      (cur.sigma, residual_blocks[a].sigma, residual_blocks[b].sigma)):
        E = M.submatrix(off[a], off[a + 1], off[b], off[b + 1])
        if not E.divisible_by_ell_power(j):
            raise InternalDefect(f"off-diagonal block not divisible by ell^{j}")
        Ej = E.map(lambda x: x.digit(j), ring=k)
        # Y^-1 M Y with Y = I + ell^j X changes the (a,b) block by ell^j (Ma X_ab - X_ab Mb)
        ops.append(Ma.kron(Ib) - Ia.kron(Mb.transpose()))
        rhs.extend([-x for x in Ej.vec()])
    L = Matrix.from_blocks(k, [[o] for o in ops])
    sol = solve_k(L, rhs)
    if not sol.consistent:
        raise HenselDefect(f"off-diagonal correction at layer {j} is inconsistent",
                           residual={"layer": j, "blocks": [a, b]})
    return Matrix.unvec(k, sol.particular, na, nb)


# ---------------------------------------------------------------------------
# random instances

def random_type_function(spec: FieldSpec, q: int, n: int, rng: random.Random) -> TypeFunction:
    """A uniformly built random type function of total dimension n."""
    orbits = [o for o in q_orbits(spec, q) if len(o) <= n]
    while True:
        remaining = n
        chosen = {}
        while remaining > 0:
            fits = [o for o in orbits if len(o) <= remaining]
            if not fits:
                break
            o = rng.choice(fits)
            e = rng.randint(1, remaining // len(o))
            chosen.setdefault(o, []).append(e)
            remaining -= e * len(o)
        if remaining == 0:
            return TypeFunction(spec, q, [(o, sorted(es, reverse=True)) for o, es in chosen.items()])


def random_sigma_for(T: Matrix, q: int, rng: random.Random) -> Matrix:
    """A random invertible S with S T = T^q S; requires one to exist."""
    k = T.ring
    basis = commutation_space([(T, T ** q)], k, T.n_rows, T.n_rows)
    elems = list(k.elements())
    for _ in range(500):
        S = Matrix.zeros(k, T.n_rows)
        for B in basis:
            S = S + B * rng.choice(elems)
        if S.is_invertible():
            return S
    raise PreconditionError("no invertible Frobenius found for this inertia matrix")


def random_tame_pair(spec: FieldSpec, q: int, n: int, rng: random.Random, hide: bool = True) -> TamePair:
    """A random valid pair over spec; with hide=True conjugated out of standard form."""
    t = random_type_function(spec, q, n, rng)
    T = standard_tau(t, spec)
    S = random_sigma_for(T, q, rng)
    p = TamePair(q, T, S)
    if hide:
        p = p.conjugate(random_invertible(spec, n, rng))
    return _assert_valid(p, "random_tame_pair")
