"""Exact linear algebra over k = GF(ell^r) and over W_m(k)."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .errors import (
    EigenvalueOutsideField,
    OrbitNotClosed,
    PreconditionError,
    SearchLimitExceeded,
    max_exhaustive,
)
from .rings import FieldSpec, WittSpec, mult_order, orbit_of, poly_eval, poly_pow


class Matrix:
    """Immutable dense matrix with entries in a FieldSpec or WittSpec ring."""

    __slots__ = ("ring", "rows", "n_rows", "n_cols")

    def __init__(self, ring, rows, n_cols=None):
        self.ring = ring
        self.rows = tuple(tuple(ring(x) for x in row) for row in rows)
        self.n_rows = len(self.rows)
        if n_cols is None:
            n_cols = len(self.rows[0]) if self.rows else 0
        self.n_cols = n_cols
        for row in self.rows:
            if len(row) != n_cols:
                raise PreconditionError("ragged matrix")

    @classmethod
    def _raw(cls, ring, rows, n_cols):
        # skips coercion; rows must already be tuples of ring elements
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.rows = rows
        obj.n_rows = len(rows)
        obj.n_cols = n_cols
        return obj

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, ring, n):
        one, zero = ring.one, ring.zero
        return cls._raw(ring, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, ring, n_rows, n_cols=None):
        n_cols = n_rows if n_cols is None else n_cols
        z = ring.zero
        return cls._raw(ring, tuple((z,) * n_cols for _ in range(n_rows)), n_cols)

    @classmethod
    def diag(cls, ring, values):
        values = [ring(v) for v in values]
        n = len(values)
        z = ring.zero
        return cls._raw(ring, tuple(tuple(values[i] if i == j else z for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, ring, cols):
        cols = [list(c) for c in cols]
        if not cols:
            raise PreconditionError("no columns")
        return cls(ring, [list(r) for r in zip(*cols)], len(cols))

    @classmethod
    def block_diag(cls, ring, blocks):
        n = sum(b.n_rows for b in blocks)
        c = sum(b.n_cols for b in blocks)
        out = [[ring.zero] * c for _ in range(n)]
        i0 = j0 = 0
        for b in blocks:
            for i in range(b.n_rows):
                for j in range(b.n_cols):
                    out[i0 + i][j0 + j] = b.rows[i][j]
            i0 += b.n_rows
            j0 += b.n_cols
        return cls._raw(ring, tuple(tuple(r) for r in out), c)

    @classmethod
    def from_blocks(cls, ring, grid):
        """Assemble from a 2-D grid of matrices (None means a zero block)."""
        heights = [next(b.n_rows for b in row if b is not None) for row in grid]
        widths = [next(grid[i][j].n_cols for i in range(len(grid)) if grid[i][j] is not None)
                  for j in range(len(grid[0]))]
        out = []
        for bi, row in enumerate(grid):
            for i in range(heights[bi]):
                line = []
                for bj, b in enumerate(row):
                    if b is None:
                        line.extend([ring.zero] * widths[bj])
                    else:
                        line.extend(b.rows[i])
                out.append(tuple(line))
        return cls._raw(ring, tuple(out), sum(widths))

    # access ---------------------------------------------------------------

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def column(self, j):
        return [row[j] for row in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.n_cols)]

    def submatrix(self, r0, r1, c0, c1):
        return Matrix._raw(self.ring, tuple(row[c0:c1] for row in self.rows[r0:r1]), c1 - c0)

    def replace_block(self, r0, c0, block):
        rows = [list(r) for r in self.rows]
        for i in range(block.n_rows):
            for j in range(block.n_cols):
                rows[r0 + i][c0 + j] = block.rows[i][j]
        return Matrix._raw(self.ring, tuple(tuple(r) for r in rows), self.n_cols)

    # arithmetic -----------------------------------------------------------

    def _check_same(self, other):
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if other.shape != self.shape:
            raise PreconditionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        return Matrix._raw(self.ring, tuple(tuple(a + b for a, b in zip(r, s))
                                            for r, s in zip(self.rows, other.rows)), self.n_cols)

    def __sub__(self, other):
        self._check_same(other)
        return Matrix._raw(self.ring, tuple(tuple(a - b for a, b in zip(r, s))
                                            for r, s in zip(self.rows, other.rows)), self.n_cols)

    def __neg__(self):
        return Matrix._raw(self.ring, tuple(tuple(-a for a in r) for r in self.rows), self.n_cols)

    def __mul__(self, scalar):
        if isinstance(scalar, Matrix):
            return self @ scalar
        return Matrix._raw(self.ring, tuple(tuple(a * scalar for a in r) for r in self.rows), self.n_cols)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.n_cols != other.n_rows:
                raise PreconditionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            zero = self.ring.zero
            out = []
            for row in self.rows:
                line = []
                for col in cols:
                    acc = zero
                    for a, b in zip(row, col):
                        if a.c != zero.c and b.c != zero.c:
                            acc = acc + a * b
                    line.append(acc)
                out.append(tuple(line))
            return Matrix._raw(self.ring, tuple(out), other.n_cols)
        # vector
        vec = list(other)
        if len(vec) != self.n_cols:
            raise PreconditionError("vector length mismatch")
        zero = self.ring.zero
        out = []
        for row in self.rows:
            acc = zero
            for a, b in zip(row, vec):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def __pow__(self, e):
        if self.n_rows != self.n_cols:
            raise PreconditionError("power of a non-square matrix")
        if e < 0:
            return self.inverse() ** (-e)
        result = Matrix.identity(self.ring, self.n_rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.ring == other.ring and all(
            a.c == b.c for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash(tuple(a.c for r in self.rows for a in r))

    def is_zero(self):
        return not any(a for r in self.rows for a in r)

    def is_identity(self):
        return self == Matrix.identity(self.ring, self.n_rows)

    def transpose(self):
        return Matrix._raw(self.ring, tuple(zip(*self.rows)) if self.rows else (), self.n_rows)

    T = property(transpose)

    def map(self, fn, ring=None):
        ring = ring or self.ring
        return Matrix(ring, [[fn(a) for a in r] for r in self.rows], self.n_cols)

    def kron(self, other):
        """Kronecker product; vec (row-major) of A X B is (A kron B^T) vec X."""
        rows = []
        for r in self.rows:
            for s in other.rows:
                rows.append(tuple(a * b for a in r for b in s))
        return Matrix._raw(self.ring, tuple(rows), self.n_cols * other.n_cols)

    def vec(self):
        """Row-major flattening."""
        return [a for r in self.rows for a in r]

    @classmethod
    def unvec(cls, ring, v, n_rows, n_cols=None):
        n_cols = n_rows if n_cols is None else n_cols
        v = list(v)
        return cls(ring, [v[i * n_cols:(i + 1) * n_cols] for i in range(n_rows)], n_cols)

    # change of ring --------------------------------------------------------

    def reduce(self):
        """Entry-wise reduction W_m -> k (identity on field matrices)."""
        if self.ring.is_field:
            return self
        k = self.ring.field
        return Matrix._raw(k, tuple(tuple(a.reduce() for a in r) for r in self.rows), self.n_cols)

    def lift(self, W: WittSpec):
        """Entry-wise lift k -> W_m by least non-negative residues."""
        return Matrix._raw(W, tuple(tuple(W._make(a.c) for a in r) for r in self.rows), self.n_cols)

    def truncate(self, m):
        return Matrix._raw(self.ring.with_precision(m),
                           tuple(tuple(a.truncate(m) for a in r) for r in self.rows), self.n_cols)

    def shift(self, j):
        """Exact division by ell^j into W_{m-j}."""
        return Matrix._raw(self.ring.with_precision(self.ring.m - j),
                           tuple(tuple(a.shift(j) for a in r) for r in self.rows), self.n_cols)

    def divisible_by_ell_power(self, j):
        q = self.ring.ell ** j
        return all(x % q == 0 for r in self.rows for a in r for x in a.c)

    def to_json(self):
        return [[a.to_json() for a in r] for r in self.rows]

    def __repr__(self):
        return f"Matrix({self.ring!r}, {[[a for a in r] for r in self.rows]})"

    # determinants and inverses --------------------------------------------

    def charpoly(self):
        """Characteristic polynomial det(X - A), constant term first.

        Berkowitz's algorithm: division free, so it is valid over W_m too.
        """
        n = self.n_rows
        if n != self.n_cols:
            raise PreconditionError("charpoly of a non-square matrix")
        ring = self.ring
        A = self.rows
        # vect holds coefficients highest degree first
        vect = [ring.one, -A[0][0]] if n else [ring.one]
        for r in range(1, n):
            R = [A[i][r] for i in range(r)]      # column above the diagonal
            Srow = [A[r][j] for j in range(r)]   # row left of the diagonal
            a = A[r][r]
            sub = [A[i][:r] for i in range(r)]
            # C = Toeplitz column [1, -a, -S R, -S A R, ..., -S A^{r-1} R]
            col = [ring.one, -a]
            v = R
            for _ in range(r):
                s = ring.zero
                for x, y in zip(Srow, v):
                    s = s + x * y
                col.append(-s)
                v = [sum((sub[i][j] * v[j] for j in range(r)), ring.zero) for i in range(r)]
            new = []
            for i in range(r + 2):
                acc = ring.zero
                for j in range(min(i, r) + 1):
                    if i - j < len(col):
                        acc = acc + col[i - j] * vect[j]
                new.append(acc)
            vect = new
        return list(reversed(vect))

    def det(self):
        n = self.n_rows
        if n == 0:
            return self.ring.one
        if self.ring.is_field:
            _, pivots, d = _rref(self, want_det=True)
            return d
        c = self.charpoly()
        return c[0] if n % 2 == 0 else -c[0]

    def inverse(self):
        if self.n_rows != self.n_cols:
            raise PreconditionError("inverse of a non-square matrix")
        n = self.n_rows
        if self.ring.is_field:
            aug = Matrix.from_blocks(self.ring, [[self, Matrix.identity(self.ring, n)]])
            R, pivots = rref(aug)
            if pivots[:n] != list(range(n)) or len([p for p in pivots if p < n]) < n:
                raise ZeroDivisionError("singular matrix")
            return R.submatrix(0, n, n, 2 * n)
        inv0 = self.reduce().inverse().lift(self.ring)
        # Newton: X <- X (2I - A X) doubles the ell-adic precision
        two = Matrix.identity(self.ring, n) * 2
        X = inv0
        prec = 1
        while prec < self.ring.m:
            X = X @ (two - self @ X)
            prec *= 2
        return X

    def is_invertible(self):
        if self.n_rows != self.n_cols:
            return False
        d = self.reduce().det()
        return bool(d)


# ---------------------------------------------------------------------------
# row reduction over a field

def _rref(A: Matrix, want_det=False):
    ring = A.ring
    rows = [list(r) for r in A.rows]
    n_rows, n_cols = A.n_rows, A.n_cols
    pivots = []
    det = ring.one
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        p = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if p is None:
            if want_det and c < n_rows:
                det = ring.zero
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            det = -det
        piv = rows[r][c]
        det = det * piv
        inv = piv.inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if want_det and len(pivots) < n_rows:
        det = ring.zero
    R = Matrix._raw(ring, tuple(tuple(x) for x in rows), n_cols)
    return R, pivots, det


def rref(A: Matrix):
    """Reduced row echelon form over a field and the pivot columns."""
    if not A.ring.is_field:
        raise PreconditionError("rref needs a field")
    R, pivots, _ = _rref(A)
    return R, pivots


def rank(A: Matrix) -> int:
    if A.n_rows == 0 or A.n_cols == 0:
        return 0
    return len(rref(A)[1])


def kernel(A: Matrix) -> list[list]:
    """Basis of the right kernel {x : A x = 0} over a field."""
    ring = A.ring
    n = A.n_cols
    if A.n_rows == 0:
        return [[ring.one if i == j else ring.zero for i in range(n)] for j in range(n)]
    R, pivots = rref(A)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [ring.zero] * n
        v[f] = ring.one
        for i, p in enumerate(pivots):
            v[p] = -R.rows[i][f]
        basis.append(v)
    return basis


def span_rank(vectors, ring) -> int:
    if not vectors:
        return 0
    return rank(Matrix(ring, vectors))


def extend_to_basis(current, candidates, ring):
    """Greedily add candidates that are independent of span(current)."""
    chosen = list(current)
    added = []
    r = span_rank(chosen, ring)
    for v in candidates:
        r2 = span_rank(chosen + [v], ring)
        if r2 > r:
            chosen.append(v)
            added.append(v)
            r = r2
    return added


@dataclass
class SolveResult:
    """Particular solution (None when inconsistent) and kernel generators.

    Over W_m the kernel list generates ker A as a W_m-module; ``failed_layer``
    is the ell-adic layer where an inconsistent system first breaks.
    """

    particular: list | None
    kernel: list = field(default_factory=list)
    failed_layer: int | None = None

    @property
    def consistent(self):
        return self.particular is not None


def solve_k(A: Matrix, b) -> SolveResult:
    """Solve A x = b over a field."""
    b = [A.ring(x) for x in b]
    if len(b) != A.n_rows:
        raise PreconditionError(f"right-hand side has length {len(b)}, expected {A.n_rows}")
    ring = A.ring
    n = A.n_cols
    ker = kernel(A) if A.n_rows else kernel(Matrix.zeros(ring, 0, n))
    if A.n_rows == 0:
        return SolveResult([ring.zero] * n, ker)
    aug = Matrix(ring, [list(r) + [x] for r, x in zip(A.rows, b)], n + 1)
    R, pivots = rref(aug)
    if n in pivots:
        return SolveResult(None, ker, failed_layer=0)
    x = [ring.zero] * n
    for i, p in enumerate(pivots):
        x[p] = R.rows[i][n]
    return SolveResult(x, ker)


def solve_w(A: Matrix, b) -> SolveResult:
    """Solve A x = b over W_m by lifting solutions one ell-adic layer at a time."""
    W = A.ring
    if W.is_field:
        return solve_k(A, b)
    b = [W(x) for x in b]
    if len(b) != A.n_rows:
        raise PreconditionError(f"right-hand side has length {len(b)}, expected {A.n_rows}")
    n = A.n_cols
    base = solve_k(A.reduce(), [x.reduce() for x in b])
    if not base.consistent:
        return SolveResult(None, [], failed_layer=0)
    p0 = [W._make(x.c) for x in base.particular]
    K0 = [[W._make(x.c) for x in v] for v in base.kernel]
    if W.m == 1:
        return SolveResult(p0, K0)
    d = len(K0)
    ell = W.ell
    # A p0 - b and A K0 vanish mod ell; divide them out
    resid = [bi - ai for bi, ai in zip(b, A @ p0)]
    rhs = [x.shift(1) for x in resid]
    AK = [A @ v for v in K0]  # columns
    W1 = W.with_precision(W.m - 1)
    new_rows = []
    for i in range(A.n_rows):
        row = [AK[t][i].shift(1) for t in range(d)] + [a.truncate(W.m - 1) for a in A.rows[i]]
        new_rows.append(row)
    A1 = Matrix(W1, new_rows, d + n)
    sub = solve_w(A1, rhs)
    if not sub.consistent:
        return SolveResult(None, [], failed_layer=sub.failed_layer + 1)

    def back(sol, with_p0):
        y = [W._make(t.c) for t in sol[:d]]
        z = [W._make(t.c) for t in sol[d:]]
        x = list(p0) if with_p0 else [W.zero] * n
        for t in range(d):
            if y[t]:
                x = [xi + y[t] * vi for xi, vi in zip(x, K0[t])]
        return [xi + zi * ell for xi, zi in zip(x, z)]

    x = back(sub.particular, True)
    kern = [back(v, False) for v in sub.kernel]
    top = ell ** (W.m - 1)
    kern += [[vi * top for vi in v] for v in K0]
    uniq = {}
    for v in kern:
        if any(v):
            uniq.setdefault(tuple(t.c for t in v), v)
    return SolveResult(x, list(uniq.values()))


# ---------------------------------------------------------------------------
# polynomials and canonical forms

def companion(poly, ring) -> Matrix:
    """Companion matrix of a monic polynomial (constant term first).

    Basis w, Tw, ..., T^(d-1) w: ones on the subdiagonal and the last column
    equal to minus the lower coefficients.
    """
    poly = [ring(c) for c in poly]
    d = len(poly) - 1
    if poly[-1] != 1:
        raise PreconditionError("companion needs a monic polynomial")
    rows = [[ring.zero] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = ring.one
    for i in range(d):
        rows[i][d - 1] = -poly[i]
    return Matrix(ring, rows, d)


def minimal_polynomial(A: Matrix):
    """Monic minimal polynomial over a field, via linear dependence of powers."""
    ring = A.ring
    n = A.n_rows
    powers = [Matrix.identity(ring, n)]
    while True:
        vecs = [P.vec() for P in powers]
        M = Matrix.from_columns(ring, vecs + [(powers[-1] @ A).vec()])
        ker = kernel(M)
        if ker:
            v = ker[0]
            lead = v[-1]
            if lead:
                inv = lead.inverse()
                return [x * inv for x in v]
        powers.append(powers[-1] @ A)
        if len(powers) > n + 1:
            raise AssertionError("minimal polynomial degree exceeds n")


def _poly_roots_with_mult(poly, spec):
    """Roots of a polynomial over the finite field spec, by exhaustive evaluation."""
    if spec.size > max_exhaustive():
        raise SearchLimitExceeded(f"root search over {spec!r} exceeds the exhaustive cap")
    roots = []
    for a in spec.elements():
        if not poly_eval(poly, a):
            mult = 0
            p = list(poly)
            while len(p) > 1 and not poly_eval(p, a):
                # synthetic division by (X - a)
                out = [spec.zero] * (len(p) - 1)
                acc = spec.zero
                for i in range(len(p) - 1, 0, -1):
                    acc = acc * a + p[i]
                    out[i - 1] = acc
                p = out
                mult += 1
            roots.append((a, mult))
    return roots


def _jordan_tops(T, alpha, mult):
    """Generators of the Jordan chains of T at alpha, largest chains first.

    Returns a list of (size, top vector).
    """
    ring = T.ring
    n = T.n_rows
    Nm = T - Matrix.identity(ring, n) * alpha
    kers = [[]]
    P = Matrix.identity(ring, n)
    for j in range(1, mult + 1):
        P = P @ Nm
        kers.append(kernel(P))
        if len(kers[-1]) == mult:
            break
    top = len(kers) - 1
    if len(kers[top]) != mult:
        raise AssertionError("generalised eigenspace dimension mismatch")
    tops = []
    for j in range(top, 0, -1):
        U = list(kers[j - 1])
        for size, w in tops:
            v = w
            for _ in range(size - j):
                v = Nm @ v
            U.append(v)
        for w in extend_to_basis(U, kers[j], ring):
            tops.append((j, w))
    return tops


def primary_decomposition(T: Matrix, q: int):
    """Type and adapted basis of T acting on k^n.

    Returns (blocks, C) where blocks is a list of (orbit, exponents) with
    non-increasing exponents, orbits sorted by their least element, and
    C^-1 T C is block-diagonal with the companion matrices of
    P_orbit^e in that order.
    """
    spec = T.ring
    if not spec.is_field:
        raise PreconditionError("primary_decomposition works over the residue field")
    n = T.n_rows
    cp = T.charpoly()
    roots = _poly_roots_with_mult(cp, spec)
    if sum(m for _, m in roots) != n:
        raise EigenvalueOutsideField(
            "T has eigenvalues outside the coefficient field; extend scalars first",
            [{"kind": "eigenvalue_outside_field", "charpoly": [c.to_json() for c in cp]}])
    eig = {a: m for a, m in roots}
    if spec.zero in eig:
        raise PreconditionError("T is not invertible")
    for a in eig:
        if math.gcd(mult_order(a), q) != 1:
            raise PreconditionError(
                f"eigenvalue {a!r} has order sharing a factor with q={q}",
                [{"kind": "order_not_prime_to_q", "eigenvalue": a.to_json()}])
    orbits = []
    seen = set()
    for a in sorted(eig, key=lambda x: x.to_int()):
        if a in seen:
            continue
        orb = orbit_of(a, q)
        missing = [b for b in orb if b not in eig]
        if missing:
            raise OrbitNotClosed(
                f"eigenvalues not closed under x -> x^{q}: {a!r} present, {missing[0]!r} missing",
                [{"kind": "orbit_not_closed", "present": a.to_json(), "missing": missing[0].to_json()}])
        seen.update(orb)
        orbits.append(orb)
    orbits.sort(key=lambda o: o[0].to_int())

    blocks = []
    columns = []
    for orb in orbits:
        per_beta = [_jordan_tops(T, b, eig[b]) for b in orb]
        parts = [tuple(s for s, _ in tops) for tops in per_beta]
        if len(set(parts)) != 1:
            raise PreconditionError(
                "Jordan structure differs across the orbit; T is not of any type",
                [{"kind": "orbit_partition_mismatch", "orbit": [b.to_json() for b in orb]}])
        exps = list(parts[0])
        for i, e in enumerate(exps):
            w = [spec.zero] * n
            for tops in per_beta:
                w = [x + y for x, y in zip(w, tops[i][1])]
            v = w
            for _ in range(len(orb) * e):
                columns.append(v)
                v = T @ v
        blocks.append((orb, exps))
    C = Matrix.from_columns(spec, columns)
    std = Matrix.block_diag(spec, [companion(poly_pow(_orbit_poly(orb, spec), e), spec)
                                   for orb, exps in blocks for e in exps])
    if not C.is_invertible() or C.inverse() @ T @ C != std:
        raise AssertionError("primary decomposition failed to reach the standard form")
    return blocks, C


def _orbit_poly(orbit, spec):
    poly = [spec.one]
    for b in orbit:
        new = [spec.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - b * c
        poly = new
    return poly


# ---------------------------------------------------------------------------
# similarity of pairs

def commutation_space(pairs, ring, n1, n2):
    """Basis of {C (n2 x n1) : C A = B C for every (A, B) in pairs}."""
    blocks = []
    I1 = Matrix.identity(ring, n1)
    I2 = Matrix.identity(ring, n2)
    for A, B in pairs:
        blocks.append(I2.kron(A.transpose()) - B.kron(I1))
    M = Matrix.from_blocks(ring, [[b] for b in blocks])
    return [Matrix.unvec(ring, v, n2, n1) for v in kernel(M)]


def is_similar_pair(p1, p2, seed=0):
    """An invertible C with C T1 C^-1 = T2 and C S1 C^-1 = S2, or None.

    None is only returned when absence is proven: the solution space is
    zero, the characteristic polynomials differ, or an exhaustive search
    found no invertible element.  Otherwise SearchLimitExceeded is raised.
    """
    T1, S1, T2, S2 = p1.tau, p1.sigma, p2.tau, p2.sigma
    if T1.shape != T2.shape or p1.q != p2.q:
        raise PreconditionError("pairs differ in dimension or q")
    ring = T1.ring
    if not ring.is_field:
        raise PreconditionError("is_similar_pair works over the residue field")
    n = T1.n_rows
    if T1.charpoly() != T2.charpoly() or S1.charpoly() != S2.charpoly():
        return None
    basis = commutation_space([(T1, T2), (S1, S2)], ring, n, n)
    if not basis:
        return None
    rng = random.Random(seed)
    elems = list(ring.elements())

    def combo(coeffs):
        C = Matrix.zeros(ring, n)
        for c, B in zip(coeffs, basis):
            if c:
                C = C + B * c
        return C

    for _ in range(200):
        C = combo([rng.choice(elems) for _ in basis])
        if C.is_invertible():
            return C
    total = len(elems) ** len(basis)
    if total > max_exhaustive():
        raise SearchLimitExceeded(
            f"similarity search space {total} exceeds the exhaustive cap",
            [{"kind": "search_limit", "size": total}])
    for coeffs in itertools.product(elems, repeat=len(basis)):
        C = combo(coeffs)
        if C.is_invertible():
            return C
    return None


def random_matrix(ring, n_rows, n_cols, rng):
    N = ring.N
    r = ring.r
    return Matrix(ring, [[[rng.randrange(N) for _ in range(r)] for _ in range(n_cols)]
                         for _ in range(n_rows)], n_cols)


def random_invertible(ring, n, rng):
    while True:
        A = random_matrix(ring, n, n, rng)
        if A.is_invertible():
            return A


# ---------------------------------------------------------------------------
# dense integer arrays over F_ell (used where group sizes make Matrix too slow)

def fp_rref(A, p):
    """Row echelon form of an integer array mod p: (R, pivot columns)."""
    import numpy as np

    R = np.array(A, dtype=np.int64) % p
    if R.ndim != 2 or R.size == 0:
        return R.reshape(R.shape[0] if R.ndim else 0, -1), []
    n_rows, n_cols = R.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = R[r] * pow(int(R[r, c]), -1, p) % p
        col = R[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            R[mask] = (R[mask] - np.outer(col[mask], R[r])) % p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def fp_rank(A, p) -> int:
    return len(fp_rref(A, p)[1])


def fp_nullspace(A, p, n_cols=None):
    """Basis (rows) of {x : A x = 0 mod p}."""
    import numpy as np

    A = np.array(A, dtype=np.int64)
    if A.size == 0:
        n = n_cols if n_cols is not None else (A.shape[1] if A.ndim == 2 else 0)
        return np.eye(n, dtype=np.int64)
    R, pivots = fp_rref(A, p)
    n = A.shape[1]
    free = [j for j in range(n) if j not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, pc in enumerate(pivots):
            basis[t, pc] = (-R[i, f]) % p
    return basis


class FpSpan:
    """Incrementally grown subspace of F_p^n kept in echelon form."""

    def __init__(self, n, p):
        import numpy as np

        self.n = n
        self.p = p
        self.rows = np.zeros((0, n), dtype=np.int64)
        self.pivots = []

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, v):
        import numpy as np

        v = np.array(v, dtype=np.int64) % self.p
        for row, c in zip(self.rows, self.pivots):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return v

    def add(self, v) -> bool:
        import numpy as np

        v = self.reduce(v)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        c = int(nz[0])
        v = v * pow(int(v[c]), -1, self.p) % self.p
        # keep rows fully reduced against the new pivot
        for i, row in enumerate(self.rows):
            if row[c]:
                self.rows[i] = (row - row[c] * v) % self.p
        self.rows = np.vstack([self.rows, v])
        self.pivots.append(c)
        return True

    def contains(self, v) -> bool:
        return not self.reduce(v).any()
