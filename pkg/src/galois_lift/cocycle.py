"""Finite models of splitting fields of cohomology classes.

A finite group G acts on a k-vector space M.  The group
Gamma = M^m x| G, with (v, g)(w, h) = (v + g.w, gh), stands in for the Galois
group of the compositum of the splitting fields of m independent classes;
its projections psi_i(v, g) = v_i are those classes.  Elements of Gamma
above a fixed g play the role of Frobenius elements at auxiliary places,
and ``separating_lift`` searches for one on which prescribed classes stay
independent.

Heavy linear algebra runs over the prime field F_ell after restriction of
scalars (numpy integer arrays); k-linear statements are checked with
``Matrix`` over k.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalDefect, PreconditionError, SearchLimitExceeded, max_exhaustive
from .linalg import (
    FpSpan,
    Matrix,
    commutation_space,
    fp_nullspace,
    fp_rank,
    kernel,
    minimal_polynomial,
    rank,
    rref,
)
from .rings import FieldSpec

DEFAULT_GROUP_LIMIT = 2000


# ---------------------------------------------------------------------------
# restriction of scalars k -> F_ell

def _mult_matrix(a) -> np.ndarray:
    """Matrix over F_ell of multiplication by a on k (power basis)."""
    k = a.ring
    cols = []
    x = k.one
    for _ in range(k.r):
        cols.append((a * x).c)
        x = x * k.gen
    return np.array(cols, dtype=np.int64).T


def restrict_scalars(A: Matrix) -> np.ndarray:
    k = A.ring
    r = k.r
    out = np.zeros((A.n_rows * r, A.n_cols * r), dtype=np.int64)
    for i, row in enumerate(A.rows):
        for j, a in enumerate(row):
            if a:
                out[i * r:(i + 1) * r, j * r:(j + 1) * r] = _mult_matrix(a)
    return out


def vec_to_fp(v) -> np.ndarray:
    return np.array([c for a in v for c in a.c], dtype=np.int64)


def fp_to_vec(spec: FieldSpec, x) -> list:
    r = spec.r
    return [spec([int(c) for c in x[i * r:(i + 1) * r]]) for i in range(len(x) // r)]


# ---------------------------------------------------------------------------
# groups

class FiniteGroupData:
    """A finite group (elements 0..order-1) acting k-linearly on k^dim.

    ``mul`` is a callable on indices; ``action[i]`` the matrix of element i.
    """

    def __init__(self, spec: FieldSpec, order: int, mul, identity: int, generators, action,
                 labels=None, faithful_matrices=False):
        self.spec = spec
        self.order = order
        self._mul = mul
        self.identity = identity
        self.generators = list(generators)
        self.action = list(action)
        self.labels = labels
        self.faithful_matrices = faithful_matrices
        self._fp = {}

    @property
    def dim(self) -> int:
        return self.action[0].n_rows

    def mul(self, a, b):
        return self._mul(a, b)

    def elements(self):
        return range(self.order)

    def act(self, i) -> Matrix:
        return self.action[i]

    def act_fp(self, i) -> np.ndarray:
        if i not in self._fp:
            self._fp[i] = restrict_scalars(self.action[i])
        return self._fp[i]

    def inverse(self, i):
        for j in range(self.order):
            if self.mul(i, j) == self.identity:
                return j
        raise PreconditionError(f"element {i} has no inverse")

    # constructors --------------------------------------------------------

    @classmethod
    def from_table(cls, spec, table, action, generators=None, labels=None):
        n = len(table)
        action = [a if isinstance(a, Matrix) else Matrix(spec, a) for a in action]
        ident = next((e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))),
                     None)
        if ident is None:
            raise PreconditionError("multiplication table has no identity", [{"kind": "no_identity"}])
        if generators is None:
            generators = _greedy_generators(n, lambda a, b: table[a][b], ident)
        grp = cls(spec, n, lambda a, b: table[a][b], ident, generators, action, labels)
        bad = grp.violations()
        if bad:
            raise PreconditionError(f"invalid group data: {bad[0]['kind']}", bad)
        return grp

    @classmethod
    def from_matrices(cls, spec, gens, limit=DEFAULT_GROUP_LIMIT):
        """The matrix group generated by ``gens`` acting on k^d through itself."""
        gens = [g if isinstance(g, Matrix) else Matrix(spec, g) for g in gens]
        if not gens:
            raise PreconditionError("need at least one generator")
        for g in gens:
            if not g.is_invertible():
                raise PreconditionError("generator is not invertible")
        d = gens[0].n_rows
        elems = [Matrix.identity(spec, d)]
        index = {elems[0]: 0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for g in gens:
                y = elems[i] @ g
                if y not in index:
                    if len(elems) >= limit:
                        raise SearchLimitExceeded(f"matrix group exceeds {limit} elements")
                    index[y] = len(elems)
                    elems.append(y)
                    queue.append(index[y])
        cache = {}

        def mul(a, b):
            key = (a, b)
            if key not in cache:
                cache[key] = index[elems[a] @ elems[b]]
            return cache[key]

        gen_ids = [index[g] for g in gens]
        return cls(spec, len(elems), mul, 0, gen_ids, elems, faithful_matrices=True)

    @classmethod
    def cyclic(cls, spec, n, gen_action):
        gen_action = gen_action if isinstance(gen_action, Matrix) else Matrix(spec, gen_action)
        if not (gen_action ** n).is_identity():
            raise PreconditionError(f"action of the generator does not have order dividing {n}")
        action = [gen_action ** i for i in range(n)]
        table = [[(i + j) % n for j in range(n)] for i in range(n)]
        return cls.from_table(spec, table, action, generators=[1 % n])

    @classmethod
    def trivial(cls, spec, d):
        return cls.from_table(spec, [[0]], [Matrix.identity(spec, d)], generators=[])

    # checks --------------------------------------------------------------

    def violations(self, budget=None) -> list[dict]:
        """Group axioms and the homomorphism property of the action."""
        budget = max_exhaustive() if budget is None else budget
        out = []
        n = self.order
        e = self.identity
        for x in range(n):
            if self.mul(e, x) != x or self.mul(x, e) != x:
                out.append({"kind": "identity_fails", "element": x})
                break
        if not self.action[e].is_identity():
            out.append({"kind": "identity_acts_nontrivially"})
        # every element must reach the identity on the right
        for x in range(n):
            if not any(self.mul(x, y) == e for y in range(n)):
                out.append({"kind": "no_inverse", "element": x})
                break
        if not self.faithful_matrices:
            out.extend(_associativity_violations(self, budget))
        # the action is a homomorphism iff act(x s) = act(x) act(s) for every generator s
        for x in range(n):
            for s in self.generators:
                if self.action[self.mul(x, s)] != self.action[x] @ self.action[s]:
                    out.append({"kind": "action_not_homomorphism", "element": x, "generator": s})
                    return out
        if _generated_order(self) != n:
            out.append({"kind": "generators_do_not_generate"})
        return out


def _greedy_generators(n, mul, ident):
    gens = []
    reached = {ident}
    for x in range(n):
        if x not in reached:
            gens.append(x)
            reached = _closure(gens, mul, ident)
    return gens


def _closure(gens, mul, ident):
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = mul(x, s)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def _generated_order(grp):
    return len(_closure(grp.generators, grp.mul, grp.identity))


def _associativity_violations(grp, budget, seed=0):
    """Exhaustive triples when affordable, else Light's test, else random triples."""
    n = grp.order
    elems = list(grp.elements())
    if n ** 3 <= budget:
        triples = itertools.product(elems, repeat=3)
        mode = "exhaustive"
    elif n * n * max(1, len(grp.generators)) <= budget:
        # Light's test: associativity of all triples follows from triples (x, s, y) with s a generator
        triples = ((x, s, y) for s in grp.generators for x in elems for y in elems)
        mode = "light"
    else:
        rng = random.Random(seed)
        triples = ((rng.choice(elems), rng.choice(elems), rng.choice(elems)) for _ in range(budget // 10))
        mode = "sampled"
    mul = grp.mul
    for a, b, c in triples:
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            return [{"kind": "not_associative", "triple": [repr(a), repr(b), repr(c)], "mode": mode}]
    return []


def associativity_mode(order, n_gens, budget=None):
    budget = max_exhaustive() if budget is None else budget
    if order ** 3 <= budget:
        return "exhaustive"
    if order * order * max(1, n_gens) <= budget:
        return "light"
    return "sampled"


# ---------------------------------------------------------------------------
# H^1 of a finite group

@dataclass
class H1Result:
    """dim H^1 over k, with cocycle and coboundary dimensions (also over k).

    ``representatives`` are cocycles given by their values on the group's
    generators (lists of k-vectors in generator order); together with the
    coboundaries they span Z^1.
    """

    dim: int
    z1_dim: int
    b1_dim: int
    representatives: list = field(default_factory=list)


def _cayley_cocycle_system(grp, D, p):
    """Cocycle values as linear functions of the values on generators.

    Returns (coefficient map element -> D x (D s) array, constraint rows).
    """
    gens = grp.generators
    s = len(gens)
    U = D * s
    ident = grp.identity
    coef = {ident: np.zeros((D, U), dtype=np.int64)}
    queue = deque([ident])
    rows = []
    while queue:
        x = queue.popleft()
        Ax = grp.act_fp(x)
        cx = coef[x]
        for t, g in enumerate(gens):
            y = grp.mul(x, g)
            val = cx.copy()
            val[:, t * D:(t + 1) * D] = (val[:, t * D:(t + 1) * D] + Ax) % p
            if y in coef:
                diff = (coef[y] - val) % p
                if diff.any():
                    rows.append(diff)
            else:
                coef[y] = val
                queue.append(y)
    if len(coef) != grp.order:
        raise PreconditionError("generators do not generate the group")
    cons = np.vstack(rows) if rows else np.zeros((0, U), dtype=np.int64)
    return coef, cons


def h1_finite(grp, limit: int | None = None) -> H1Result:
    """dim_k H^1(G, M) by solving the cocycle identity on the Cayley graph."""
    limit = DEFAULT_GROUP_LIMIT if limit is None else limit
    if grp.order > limit:
        raise SearchLimitExceeded(f"group of order {grp.order} exceeds the limit {limit}")
    spec = grp.spec
    p, r = spec.ell, spec.r
    D = grp.dim * r
    gens = grp.generators
    U = D * len(gens)
    if U == 0:
        return H1Result(0, 0, 0, [])
    _, cons = _cayley_cocycle_system(grp, D, p)
    Z = fp_nullspace(cons, p, n_cols=U) if cons.shape[0] else np.eye(U, dtype=np.int64)
    # coboundaries: c(s) = (s - 1) m
    I = np.eye(D, dtype=np.int64)
    # coboundary of the basis vector e_j, listed generator by generator
    bvecs = [np.concatenate([(grp.act_fp(g) - I)[:, j] % p for g in gens]) for j in range(D)]
    b1 = fp_rank(np.array(bvecs), p) if bvecs else 0
    z1 = Z.shape[0]
    span = FpSpan(U, p)
    for v in bvecs:
        span.add(v)
    reps = []
    for z in Z:
        if span.add(z):
            reps.append([fp_to_vec(spec, z[t * D:(t + 1) * D]) for t in range(len(gens))])
    if (z1 - b1) % r:
        raise InternalDefect("F_ell-dimension of H^1 not divisible by [k:F_ell]")
    # representatives were chosen over F_ell; keep a k-basis of them modulo coboundaries
    reps = _k_independent(spec, reps, bvecs, D, len(gens))
    return H1Result((z1 - b1) // r, z1 // r, b1 // r, reps)


def _k_independent(spec, reps, bvecs, D, s):
    """Thin F_ell-representatives down to k-independent ones modulo coboundaries."""
    if spec.r == 1:
        return reps
    span = FpSpan(D * s, spec.ell)
    for v in bvecs:
        span.add(v)
    out = []
    basis_k = [spec([1 if i == j else 0 for i in range(spec.r)]) for j in range(spec.r)]
    for rep in reps:
        flat = vec_to_fp([a for vec in rep for a in vec])
        if span.contains(flat):
            continue
        out.append(rep)
        for x in basis_k:
            span.add(vec_to_fp([a * x for vec in rep for a in vec]))
    return out


# ---------------------------------------------------------------------------
# module checks

@dataclass
class SimpleReport:
    simple: bool
    certified: bool
    end_dim_over_prime_field: int
    end_is_field: bool
    end_size: int
    absolutely_irreducible: bool

    def to_json(self):
        return dict(self.__dict__)


def _spin_dim(v, gens_fp, p, n):
    span = FpSpan(n, p)
    span.add(v)
    frontier = [np.array(v) % p]
    while frontier:
        new = []
        for w in frontier:
            for A in gens_fp:
                u = A @ w % p
                if span.add(u):
                    new.append(u)
        frontier = new
    return span.dim


def simple_module_checks(grp, seed: int = 0, tries: int = 30) -> SimpleReport:
    """Simplicity over F_ell and the endomorphism algebra of M."""
    spec = grp.spec
    p = spec.ell
    n = grp.dim * spec.r
    gens_fp = [grp.act_fp(g) for g in grp.generators]
    rng = random.Random(seed)
    simple = True
    certified = False
    for _ in range(tries):
        v = [rng.randrange(p) for _ in range(n)]
        if any(v) and _spin_dim(v, gens_fp, p, n) < n:
            simple, certified = False, True
            break
    if simple:
        # exhaustive over vectors with leading coordinate 1 (one per F_ell-line)
        if p ** n <= max_exhaustive():
            for lead in range(n):
                for tail in itertools.product(range(p), repeat=n - lead - 1):
                    v = [0] * lead + [1] + list(tail)
                    if _spin_dim(v, gens_fp, p, n) < n:
                        simple = False
                        break
                if not simple:
                    break
            certified = True
    # commutant over F_ell
    blocks = [np.kron(np.eye(n, dtype=np.int64), A.T) - np.kron(A, np.eye(n, dtype=np.int64))
              for A in gens_fp]
    if blocks:
        basis = fp_nullspace(np.vstack(blocks) % p, p, n_cols=n * n)
    else:
        basis = np.eye(n * n, dtype=np.int64)
    mats = [b.reshape(n, n) for b in basis]
    e = len(mats)
    commutative = all(((X @ Y - Y @ X) % p == 0).all() for X in mats for Y in mats)
    end_is_field = simple and commutative
    return SimpleReport(
        simple=simple,
        certified=certified,
        end_dim_over_prime_field=e,
        end_is_field=end_is_field,
        end_size=p ** e,
        absolutely_irreducible=simple and e == spec.r,
    )


def _poly_gcd(a, b):
    """gcd of two polynomials over a field (lists, constant term first), monic."""
    def trim(x):
        x = list(x)
        while x and not x[-1]:
            x.pop()
        return x

    a, b = trim(a), trim(b)
    while b:
        # a mod b
        a = list(a)
        inv = b[-1].inverse()
        while len(a) >= len(b):
            c = a[-1] * inv
            shift = len(a) - len(b)
            for i, y in enumerate(b):
                a[shift + i] = a[shift + i] - c * y
            a = trim(a)
            if not a:
                break
        a, b = b, a
    inv = a[-1].inverse()
    return [x * inv for x in a]


@dataclass
class SemisimpleReport:
    semisimple: bool
    fixed_dim: int | None = None
    image_dim: int | None = None
    min_poly: list | None = None


def semisimple_on(A: Matrix) -> SemisimpleReport:
    """Squarefree minimal polynomial, plus the splitting M = M^g + (g-1)M when it holds."""
    k = A.ring
    n = A.n_rows
    mp = minimal_polynomial(A)
    deriv = [mp[i] * i for i in range(1, len(mp))]
    if not any(deriv):
        # derivative vanishes identically only for p-th powers; never squarefree beyond degree 0
        squarefree = len(mp) == 1
    else:
        squarefree = len(_poly_gcd(mp, deriv)) == 1
    report = SemisimpleReport(squarefree, min_poly=[c.to_json() for c in mp])
    if not squarefree:
        return report
    I = Matrix.identity(k, n)
    fixed = kernel(A - I)
    image_cols = [c for c in (A - I).columns()]
    img_rank = rank(A - I) if n else 0
    both = fixed + image_cols
    total = rank(Matrix.from_columns(k, both)) if both else 0
    if len(fixed) + img_rank != n or total != n:
        raise InternalDefect("squarefree action without the fixed/image splitting")
    report.fixed_dim = len(fixed)
    report.image_dim = img_rank
    return report


def hom_between(g1: FiniteGroupData, g2: FiniteGroupData) -> int:
    """dim_k Hom_G(M1, M2) for two modules of the same group."""
    if g1.order != g2.order or g1.generators != g2.generators:
        raise PreconditionError("modules must be over the same group")
    pairs = [(g1.act(s), g2.act(s)) for s in g1.generators]
    if not pairs:
        return g1.dim * g2.dim
    return len(commutation_space(pairs, g1.spec, g1.dim, g2.dim))


# ---------------------------------------------------------------------------
# the extension group Gamma = M^m x| G

class ExtensionGroup:
    """Elements are pairs (v, g): v a tuple of m*dim*r integers mod ell, g in G."""

    def __init__(self, base: FiniteGroupData, m: int):
        if m < 0:
            raise PreconditionError("number of copies must be >= 0")
        self.base = base
        self.m = m
        self.spec = base.spec
        self.p = base.spec.ell
        self.D = base.dim * base.spec.r
        self._big = {}

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def order(self) -> int:
        return self.p ** (self.D * self.m) * self.base.order

    @property
    def identity(self):
        return ((0,) * (self.D * self.m), self.base.identity)

    def _block(self, g):
        if g not in self._big:
            A = self.base.act_fp(g)
            self._big[g] = np.kron(np.eye(self.m, dtype=np.int64), A) if self.m else np.zeros((0, 0), dtype=np.int64)
        return self._big[g]

    def mul(self, x, y):
        (v, g), (w, h) = x, y
        if self.m:
            u = (np.array(v, dtype=np.int64) + self._block(g) @ np.array(w, dtype=np.int64)) % self.p
            u = tuple(int(a) for a in u)
        else:
            u = ()
        return (u, self.base.mul(g, h))

    def act_fp(self, x):
        return self.base.act_fp(x[1])

    def act(self, x):
        return self.base.act(x[1])

    @property
    def generators(self):
        zero = (0,) * (self.D * self.m)
        gens = [(zero, g) for g in self.base.generators]
        for i in range(self.D * self.m):
            v = [0] * (self.D * self.m)
            v[i] = 1
            gens.append((tuple(v), self.base.identity))
        return gens

    def elements(self):
        for v in itertools.product(range(self.p), repeat=self.D * self.m):
            for g in self.base.elements():
                yield (v, g)

    def elements_above(self, g):
        for v in itertools.product(range(self.p), repeat=self.D * self.m):
            yield (v, g)

    def psi(self, i, x) -> list:
        """The i-th projection cocycle (0-based) as a k-vector."""
        v = x[0]
        return fp_to_vec(self.spec, v[i * self.D:(i + 1) * self.D])

    def element_from_vectors(self, vectors, g):
        """(v, g) from a list of m k-vectors."""
        flat = []
        for vec in vectors:
            flat.extend(int(c) for c in vec_to_fp(vec))
        return (tuple(flat), g)

    def as_group_data(self, limit=DEFAULT_GROUP_LIMIT) -> FiniteGroupData:
        """Gamma as an indexed group acting on M through G."""
        if self.order > limit:
            raise SearchLimitExceeded(f"|Gamma| = {self.order} exceeds the limit {limit}")
        elems = list(self.elements())
        index = {x: i for i, x in enumerate(elems)}
        table = [[index[self.mul(x, y)] for y in elems] for x in elems]
        gens = [index[s] for s in self.generators]
        action = [self.act(x) for x in elems]
        return FiniteGroupData(self.spec, len(elems), lambda a, b: table[a][b], index[self.identity],
                               gens, action, labels=elems)

    def violations(self, budget=None) -> list[dict]:
        out = []
        e = self.identity
        budget = max_exhaustive() if budget is None else budget
        elems = list(self.elements()) if self.order <= budget else None
        if elems is not None:
            for x in elems:
                if self.mul(e, x) != x or self.mul(x, e) != x:
                    out.append({"kind": "identity_fails"})
                    break
        out.extend(_associativity_violations(_ListGroup(self, elems), budget)
                   if elems is not None else [])
        return out

    def psi_cocycle_check(self) -> bool:
        """psi_i(x s) = psi_i(x) + x.psi_i(s) on every Cayley-graph edge."""
        if self.order > max_exhaustive():
            raise SearchLimitExceeded("Gamma too large for the edge check")
        for x in self.elements():
            A = self.act(x)
            for s in self.generators:
                y = self.mul(x, s)
                for i in range(self.m):
                    lhs = self.psi(i, y)
                    rhs = [a + b for a, b in zip(self.psi(i, x), A @ self.psi(i, s))]
                    if lhs != rhs:
                        return False
        return True

    def psi_independent(self) -> bool:
        """No nonzero k-combination of the psi_i is a coboundary (checked on generators)."""
        k = self.spec
        d = self.dim
        m = self.m
        if m == 0:
            return True
        # unknowns: a_1..a_m in k, mu in k^d; equations sum a_i psi_i(s) - (s - 1) mu = 0
        rows = []
        for s in self.generators:
            A = self.act(s)
            vals = [self.psi(i, s) for i in range(m)]
            for t in range(d):
                row = [vals[i][t] for i in range(m)]
                row += [-(A[t, j] - (1 if t == j else 0)) for j in range(d)]
                rows.append(row)
        ker = kernel(Matrix(k, rows, m + d))
        return all(not any(v[:m]) for v in ker)


class _ListGroup:
    """Adapter so the associativity checker can walk an explicit element list."""

    def __init__(self, grp, elems):
        self.grp = grp
        self._elems = elems
        self.order = len(elems)
        self.generators = grp.generators

    def elements(self):
        return self._elems

    def mul(self, a, b):
        return self.grp.mul(a, b)


def build_extension(grp: FiniteGroupData, m: int, require_simple: bool = True) -> ExtensionGroup:
    """Gamma = M^m x| G, after checking the hypotheses on M."""
    if require_simple:
        rep = simple_module_checks(grp)
        if not rep.simple:
            raise PreconditionError("M is not a simple module", [{"kind": "not_simple"}])
    h1 = h1_finite(grp)
    if h1.dim != 0:
        raise PreconditionError(f"H^1(G, M) has dimension {h1.dim}, expected 0",
                                [{"kind": "h1_nonzero", "dim": h1.dim}])
    gam = ExtensionGroup(grp, m)
    if not gam.psi_independent():
        raise InternalDefect("projection cocycles are dependent in H^1(Gamma, M)")
    if gam.order <= DEFAULT_GROUP_LIMIT and m:
        # second route: H^1(Gamma, M) must have room for the m projections
        big = h1_finite(gam)
        if big.dim < m:
            raise InternalDefect("H^1(Gamma, M) smaller than the number of projections",
                                 residual={"h1": big.dim, "m": m})
    return gam


# ---------------------------------------------------------------------------
# separating lifts

@dataclass
class SeparationResult:
    element: tuple
    values: list          # xi_i(g~) as k-vectors
    rank_mod_image: int
    transcript: dict

    def to_json(self):
        return {
            "element": {"v": list(self.element[0]), "g": self.element[1]},
            "values": [[a.to_json() for a in v] for v in self.values],
            "rank_mod_image": self.rank_mod_image,
            "transcript": self.transcript,
        }


def _image_basis(A: Matrix):
    """Column basis of (A - 1) M."""
    k = A.ring
    B = A - Matrix.identity(k, A.n_rows)
    R, pivots = rref(B)
    return [B.column(j) for j in pivots]


def rank_modulo(vectors, sub_basis, k) -> int:
    """dim of span(vectors) in M / span(sub_basis)."""
    base = rank(Matrix.from_columns(k, sub_basis)) if sub_basis else 0
    allv = list(sub_basis) + list(vectors)
    if not allv:
        return 0
    return rank(Matrix.from_columns(k, allv)) - base


def normalise_classes(coeffs, k):
    """Row-reduce the psi-coordinates of V: returns (rows, pivots)."""
    A = Matrix(k, coeffs)
    R, pivots = rref(A)
    if len(pivots) != A.n_rows:
        raise PreconditionError("the classes in V are linearly dependent",
                                [{"kind": "dependent_classes"}])
    return [list(R.rows[i]) for i in range(len(pivots))], pivots


def xi_values(gam: ExtensionGroup, coeffs, x):
    """xi_i(x) = sum_j a_ij psi_j(x)."""
    k = gam.spec
    psis = [gam.psi(j, x) for j in range(gam.m)]
    out = []
    for row in coeffs:
        val = [k.zero] * gam.dim
        for a, ps in zip(row, psis):
            a = k(a)
            if a:
                val = [u + a * w for u, w in zip(val, ps)]
        out.append(val)
    return out


def verify_separation(gam: ExtensionGroup, coeffs, x) -> int:
    """Rank of the xi_i(x) modulo (g - 1)M, g the image of x in G."""
    A = gam.act(x)
    return rank_modulo(xi_values(gam, coeffs, x), _image_basis(A), gam.spec)


def separating_lift(gam: ExtensionGroup, coeffs, g: int, seed: int = 0) -> SeparationResult:
    """An element g~ = (u, g) on which the classes xi_i stay independent.

    ``coeffs`` lists each class of V in psi-coordinates (length m rows).
    """
    k = gam.spec
    coeffs = [[k(a) for a in row] for row in coeffs]
    n = len(coeffs)
    A = gam.base.act(g)
    ss = semisimple_on(A)
    if not ss.semisimple:
        raise PreconditionError("g does not act semisimply on M", [{"kind": "not_semisimple"}])
    if ss.fixed_dim < n:
        raise PreconditionError(f"dim M^g = {ss.fixed_dim} < dim V = {n}",
                                [{"kind": "fixed_space_too_small", "fixed": ss.fixed_dim, "V": n}])
    if any(len(row) != gam.m for row in coeffs):
        raise PreconditionError("class coordinates must have length m")
    if n == 0:
        x = (gam.identity[0], g)
        return SeparationResult(x, [], 0, {"pivots": [], "chosen": []})
    rows, pivots = normalise_classes(coeffs, k)
    image = _image_basis(A)
    rng = random.Random(seed)
    order = list(range(k.size ** gam.dim))
    rng.shuffle(order)
    chosen = []
    for i in range(n):
        pick = None
        for code in order:
            cand = _decode_vector(k, code, gam.dim)
            if rank_modulo(chosen + [cand], image, k) == i + 1:
                pick = cand
                break
        if pick is None:
            raise InternalDefect("greedy search for a separating lift ran out of candidates",
                                 residual={"step": i})
        chosen.append(pick)
    vecs = [[k.zero] * gam.dim for _ in range(gam.m)]
    for i, c in enumerate(pivots):
        vecs[c] = chosen[i]
    x = gam.element_from_vectors(vecs, g)
    r = verify_separation(gam, coeffs, x)
    if r != n:
        raise InternalDefect("separating lift failed its verification", residual={"rank": r, "n": n})
    return SeparationResult(x, xi_values(gam, coeffs, x), r,
                            {"pivots": pivots, "normalised": [[a.to_json() for a in row] for row in rows],
                             "chosen": [[a.to_json() for a in v] for v in chosen],
                             "fixed_dim": ss.fixed_dim, "image_dim": ss.image_dim})


def _decode_vector(k, code, d):
    out = []
    for _ in range(d):
        out.append(k.from_int(code % k.size))
        code //= k.size
    return out


def exhaustive_witnesses(gam: ExtensionGroup, coeffs, g: int):
    """All (v, g) in Gamma above g passing the separation check."""
    if gam.order > max_exhaustive():
        raise SearchLimitExceeded(f"|Gamma| = {gam.order} exceeds the exhaustive cap")
    n = len(coeffs)
    return [x for x in gam.elements_above(g) if verify_separation(gam, coeffs, x) == n]


def multi_module_separating_lift(instances, g: int, seed: int = 0):
    """Separating lifts for several modules of one group at once.

    ``instances`` is a list of (ExtensionGroup, coeffs).  The combined
    witness is the tuple of per-instance vector parts over the shared g,
    an element of the fibre product of the Gamma_i over G.
    """
    if not instances:
        raise PreconditionError("no instances")
    base0 = instances[0][0].base
    for gam, _ in instances:
        if gam.base.order != base0.order or gam.base.generators != base0.generators:
            raise PreconditionError("instances must share the group G")
    for i in range(len(instances)):
        for j in range(i + 1, len(instances)):
            if hom_between(instances[i][0].base, instances[j][0].base):
                raise PreconditionError(f"modules {i} and {j} are not inequivalent",
                                        [{"kind": "modules_equivalent", "pair": [i, j]}])
    results = [separating_lift(gam, coeffs, g, seed=seed + t) for t, (gam, coeffs) in enumerate(instances)]
    return {"g": g, "parts": results}


def exhaustive_multi_witnesses(instances, g: int) -> int:
    """Number of elements of the fibre product above g separating every instance."""
    total = 1
    for gam, _ in instances:
        total *= gam.p ** (gam.D * gam.m)
    if total > max_exhaustive():
        raise SearchLimitExceeded(f"fibre product of size {total} exceeds the exhaustive cap")
    per = [set(x[0] for x in exhaustive_witnesses(gam, coeffs, g)) for gam, coeffs in instances]
    count = 1
    for s in per:
        count *= len(s)
    return count, per
