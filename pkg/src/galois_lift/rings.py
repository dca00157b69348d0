"""Finite fields GF(ell^r) and truncated Witt rings W(k)/ell^m.

Both rings are realised as (Z/N)[x]/(f) with f the monic field modulus:
N = ell for the field k, N = ell^m for W_m(k).  Elements are immutable
coefficient tuples in the power basis, constant term first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import PreconditionError, SearchLimitExceeded, max_exhaustive


# ---------------------------------------------------------------------------
# integer helpers

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of n as ((p, e), ...), by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def multiplicative_order_mod(a: int, n: int) -> int:
    """Order of the integer a in (Z/n)^x."""
    if math.gcd(a, n) != 1:
        raise PreconditionError(f"{a} is not a unit mod {n}")
    a %= n
    k, x = 1, a
    while x != 1 % n:
        x = x * a % n
        k += 1
    return k


# ---------------------------------------------------------------------------
# integer polynomials mod N (tuples, constant term first)

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(a, b, N):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % N for c in out])


def _pmod(a, f, N):
    """Remainder of a modulo f, where f has a unit leading coefficient mod N."""
    a = [c % N for c in a]
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, N)
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k] * inv_lead % N
        if c:
            for i in range(df + 1):
                a[k - df + i] = (a[k - df + i] - c * f[i]) % N
    return _trim(a[:df])


def _psub(a, b, N):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % N for x, y in zip(a, b)])


def _ppowmod(a, e, f, N):
    result = [1]
    base = _pmod(a, f, N)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, N), f, N)
        base = _pmod(_pmul(base, base, N), f, N)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible_mod(f, ell: int) -> bool:
    """Ben-Or test for a monic f over Z/ell."""
    f = _trim(f)
    r = len(f) - 1
    if r < 1:
        return False
    if r == 1:
        return True
    x = [0, 1]
    xp = x
    for _ in range(r // 2):
        xp = _ppowmod(xp, ell, f, ell)
        if len(_pgcd(f, _psub(xp, x, ell), ell)) > 1:
            return False
    return True


def _is_primitive_mod(f, ell: int) -> bool:
    r = len(f) - 1
    order = ell ** r - 1
    for p, _ in factorize(order):
        if _ppowmod([0, 1], order // p, f, ell) == [1]:
            return False
    return True


@lru_cache(maxsize=None)
def default_modulus(ell: int, r: int) -> tuple[int, ...]:
    """The first primitive monic polynomial of degree r over F_ell.

    Candidates are enumerated by the integer sum c_i ell^i of their lower
    coefficients, so the choice is reproducible.
    """
    if r == 1:
        return (0, 1)
    for n in range(ell ** r):
        low = [(n // ell ** i) % ell for i in range(r)]
        f = low + [1]
        if low[0] and is_irreducible_mod(f, ell) and _is_primitive_mod(f, ell):
            return tuple(f)
    raise AssertionError("no primitive polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# rings

class _RingMixin:
    """Shared arithmetic for (Z/N)[x]/(f)."""

    def _make(self, coeffs):
        return self._elem_cls(self, coeffs)

    def _mul(self, a, b):
        N = self.N
        r = self.r
        if r == 1:
            return ((a[0] * b[0]) % N,)
        prod = [0] * (2 * r - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        f = self.modulus
        for k in range(2 * r - 2, r - 1, -1):
            c = prod[k]
            if c:
                for i in range(r):
                    prod[k - r + i] -= c * f[i]
        return tuple(x % N for x in prod[:r])

    def __call__(self, x):
        if isinstance(x, _Elem):
            if x.ring is self or x.ring == self:
                return x
            if isinstance(self, WittSpec) and isinstance(x, FieldElem) and x.ring == self.field:
                return self.lift(x)
            raise TypeError(f"cannot coerce {x!r} into {self!r}")
        if isinstance(x, int):
            return self._make((x % self.N,) + (0,) * (self.r - 1))
        coeffs = [int(c) for c in x]
        if len(coeffs) > self.r:
            raise PreconditionError(f"too many coefficients for degree {self.r}")
        coeffs += [0] * (self.r - len(coeffs))
        return self._make(tuple(c % self.N for c in coeffs))

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    @property
    def gen(self):
        """The class of x in the power basis."""
        if self.r == 1:
            return self(-self.modulus[0])
        return self([0, 1])

    def from_int(self, n: int):
        """Inverse of ``_Elem.to_int``: base-N digits as coefficients."""
        N = self.N
        return self._make(tuple((n // N ** i) % N for i in range(self.r)))

    @property
    def cardinality(self) -> int:
        return self.N ** self.r

    def elements(self):
        for n in range(self.cardinality):
            yield self.from_int(n)


@dataclass(frozen=True)
class FieldSpec(_RingMixin):
    """The finite field GF(ell^r) with a fixed irreducible modulus."""

    ell: int
    r: int = 1
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.ell):
            raise PreconditionError(f"ell={self.ell} is not prime")
        if self.r < 1:
            raise PreconditionError("extension degree must be >= 1")
        if self.modulus is None:
            object.__setattr__(self, "modulus", default_modulus(self.ell, self.r))
        mod = tuple(int(c) % self.ell for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.r + 1 or mod[-1] != 1:
            raise PreconditionError(f"modulus must be monic of degree {self.r}")
        if not is_irreducible_mod(mod, self.ell):
            raise PreconditionError(f"modulus {mod} is reducible over F_{self.ell}")

    @property
    def N(self) -> int:
        return self.ell

    @property
    def m(self) -> int:
        return 1

    @property
    def field(self) -> "FieldSpec":
        return self

    @property
    def is_field(self) -> bool:
        return True

    @property
    def _elem_cls(self):
        return FieldElem

    @property
    def size(self) -> int:
        return self.ell ** self.r

    def witt(self, m: int) -> "WittSpec":
        return WittSpec(self, m)

    def nonzero(self):
        for n in range(1, self.size):
            yield self.from_int(n)

    def generator(self) -> "FieldElem":
        """Smallest (in to_int order) generator of the multiplicative group."""
        return _field_generator(self)

    def __repr__(self):
        if self.r == 1:
            return f"GF({self.ell})"
        return f"GF({self.ell}^{self.r}, modulus={list(self.modulus)})"


@lru_cache(maxsize=None)
def _field_generator(spec):
    for a in spec.nonzero():
        if mult_order(a) == spec.size - 1:
            return a
    raise AssertionError("finite field without a generator")  # unreachable


@dataclass(frozen=True)
class WittSpec(_RingMixin):
    """W(k)/ell^m realised as (Z/ell^m)[x]/(lifted modulus)."""

    field: FieldSpec
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise PreconditionError("precision m must be >= 1")

    @property
    def ell(self) -> int:
        return self.field.ell

    @property
    def r(self) -> int:
        return self.field.r

    @property
    def N(self) -> int:
        return self.field.ell ** self.m

    @property
    def modulus(self) -> tuple[int, ...]:
        return self.field.modulus

    lifted_modulus = modulus

    @property
    def is_field(self) -> bool:
        return False

    @property
    def _elem_cls(self):
        return WittElem

    def lift(self, x: "FieldElem") -> "WittElem":
        """Entry-wise lift of a field element (least non-negative residues)."""
        if x.ring != self.field:
            raise TypeError("field mismatch in lift")
        return self._make(x.c)

    def with_precision(self, m: int) -> "WittSpec":
        return WittSpec(self.field, m)

    def __repr__(self):
        return f"W_{self.m}({self.field!r})"


# ---------------------------------------------------------------------------
# elements

class _Elem:
    __slots__ = ("ring", "c")

    def __init__(self, ring, c):
        self.ring = ring
        self.c = c

    def _other(self, other):
        if isinstance(other, _Elem):
            if other.ring is self.ring or other.ring == self.ring:
                return other.c
            raise TypeError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
        if isinstance(other, int):
            return self.ring(other).c
        return None

    def __add__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        N = self.ring.N
        return self.ring._make(tuple((x + y) % N for x, y in zip(self.c, b)))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        N = self.ring.N
        return self.ring._make(tuple((x - y) % N for x, y in zip(self.c, b)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        N = self.ring.N
        return self.ring._make(tuple((-x) % N for x in self.c))

    def __mul__(self, other):
        if isinstance(other, int):
            N = self.ring.N
            return self.ring._make(tuple((x * other) % N for x in self.c))
        b = self._other(other)
        if b is None:
            return NotImplemented
        return self.ring._make(self.ring._mul(self.c, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.ring(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.c == self.ring(other).c
        if isinstance(other, _Elem):
            return self.c == other.c and (other.ring is self.ring or other.ring == self.ring)
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def to_int(self) -> int:
        N = self.ring.N
        return sum(x * N ** i for i, x in enumerate(self.c))

    def to_json(self):
        return self.c[0] if self.ring.r == 1 else list(self.c)

    def __repr__(self):
        if self.ring.r == 1:
            return str(self.c[0])
        return "[" + ",".join(map(str, self.c)) + "]"


class FieldElem(_Elem):
    """Element of GF(ell^r)."""

    __slots__ = ()

    def inverse(self) -> "FieldElem":
        if not self:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.ring.r == 1:
            return self.ring._make((pow(self.c[0], -1, self.ring.ell),))
        return self ** (self.ring.size - 2)

    def is_unit(self) -> bool:
        return bool(self)

    def reduce(self) -> "FieldElem":
        return self

    def order(self) -> int:
        return mult_order(self)


class WittElem(_Elem):
    """Element of W(k)/ell^m."""

    __slots__ = ()

    def reduce(self) -> FieldElem:
        """Image in the residue field k."""
        ell = self.ring.ell
        return self.ring.field._make(tuple(x % ell for x in self.c))

    def is_unit(self) -> bool:
        return any(x % self.ring.ell for x in self.c)

    def valuation(self) -> int:
        """ell-adic valuation, equal to m for zero."""
        ell, m = self.ring.ell, self.ring.m
        v = m
        for x in self.c:
            if x:
                k = 0
                while x % ell == 0:
                    x //= ell
                    k += 1
                v = min(v, k)
        return v

    def inverse(self) -> "WittElem":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self!r} is not a unit in {self.ring!r}")
        W = self.ring
        if W.r == 1:
            return W._make((pow(self.c[0], -1, W.N),))
        y = W.lift(self.reduce().inverse())
        prec = 1
        while prec < W.m:
            y = y * (2 - self * y)
            prec *= 2
        return y

    def digit(self, j: int) -> FieldElem:
        """The coefficient of ell^j, for an element divisible by ell^j."""
        ell = self.ring.ell
        q = ell ** j
        if any(x % q for x in self.c):
            raise ValueError(f"{self!r} is not divisible by {ell}^{j}")
        return self.ring.field._make(tuple((x // q) % ell for x in self.c))

    def shift(self, j: int) -> "WittElem":
        """Exact division by ell^j, landing in W_{m-j}."""
        ell = self.ring.ell
        q = ell ** j
        if any(x % q for x in self.c):
            raise ValueError(f"{self!r} is not divisible by {ell}^{j}")
        W = self.ring.with_precision(self.ring.m - j)
        return W._make(tuple((x // q) % W.N for x in self.c))

    def truncate(self, m: int) -> "WittElem":
        """Image in W_{m} for m <= current precision."""
        W = self.ring.with_precision(m)
        return W._make(tuple(x % W.N for x in self.c))


# ---------------------------------------------------------------------------
# operations

def mult_order(a: FieldElem) -> int:
    """Multiplicative order of a nonzero field element."""
    if not a:
        raise PreconditionError("mult_order of zero")
    n = a.ring.size - 1
    order = n
    for p, e in factorize(n):
        for _ in range(e):
            if a ** (order // p) == 1:
                order //= p
            else:
                break
    return order


def q_orbits(spec: FieldSpec, q: int) -> list[tuple[FieldElem, ...]]:
    """Orbits of a -> a^q on the elements of k^x of order prime to q.

    Each orbit is listed cyclically (a, a^q, a^(q^2), ...) starting from its
    smallest element; orbits are sorted by that element.
    """
    if math.gcd(q, spec.ell) != 1:
        raise PreconditionError(f"q={q} is not coprime to ell={spec.ell}")
    seen = set()
    orbits = []
    for a in spec.nonzero():
        if a in seen or math.gcd(mult_order(a), q) != 1:
            continue
        orbit = [a]
        b = a ** q
        while b != a:
            orbit.append(b)
            b = b ** q
        seen.update(orbit)
        orbits.append(tuple(orbit))
    return orbits


def orbit_of(a: FieldElem, q: int) -> tuple[FieldElem, ...]:
    """The q-orbit through a, normalised as in ``q_orbits``."""
    if math.gcd(mult_order(a), q) != 1:
        raise PreconditionError(f"{a!r} has order sharing a factor with q={q}")
    orbit = [a]
    b = a ** q
    while b != a:
        orbit.append(b)
        b = b ** q
    i = min(range(len(orbit)), key=lambda j: orbit[j].to_int())
    return tuple(orbit[i:] + orbit[:i])


def teichmuller(spec: WittSpec, x: FieldElem) -> WittElem:
    """The Teichmuller lift of x: the unique lift fixed by y -> y^(ell^r)."""
    if x.ring != spec.field:
        raise TypeError("field mismatch in teichmuller")
    size = spec.field.size
    a = spec.lift(x)
    for _ in range(spec.m - 1):
        a = a ** size
    if a ** size != a:
        raise AssertionError("Teichmuller iteration did not reach a fixed point")
    return a


def principal_unit_nth_root(u: WittElem, N: int) -> WittElem:
    """The unique psi = 1 mod ell with psi^N = u, for u = 1 mod ell."""
    W = u.ring
    if u.reduce() != 1:
        raise PreconditionError(f"{u!r} is not a principal unit")
    if N % W.ell == 0:
        raise PreconditionError(f"N={N} is divisible by ell={W.ell}")
    psi = W.one
    for _ in range(W.m + 1):
        err = psi ** N - u
        if not err:
            return psi
        psi = psi - err / (N * psi ** (N - 1))
    raise AssertionError("Newton iteration for the N-th root did not converge")


def embedding(src: FieldSpec, dst: FieldSpec):
    """A field embedding src -> dst sending x to a root of src.modulus."""
    if src.ell != dst.ell or dst.r % src.r:
        raise PreconditionError(f"{src!r} does not embed in {dst!r}")
    root = _modulus_root(src, dst)
    powers = [dst.one]
    for _ in range(src.r - 1):
        powers.append(powers[-1] * root)

    def embed(x: FieldElem) -> FieldElem:
        total = dst.zero
        for c, pw in zip(x.c, powers):
            if c:
                total = total + pw * c
        return total

    return embed


@lru_cache(maxsize=None)
def _modulus_root(src, dst):
    if src.r == 1:
        return dst(-src.modulus[0])
    if dst.size > max_exhaustive():
        raise SearchLimitExceeded(f"root search in {dst!r} exceeds the exhaustive cap")
    for z in dst.elements():
        if not poly_eval([dst(c) for c in src.modulus], z):
            return z
    raise AssertionError("irreducible modulus without a root in the extension")


# ---------------------------------------------------------------------------
# polynomials with ring-element coefficients (lists, constant term first)

def poly_mul(a, b):
    ring = a[0].ring
    out = [ring.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def poly_pow(a, e: int):
    out = [a[0].ring.one]
    for _ in range(e):
        out = poly_mul(out, a)
    return out


def poly_from_roots(roots, ring):
    out = [ring.one]
    for z in roots:
        out = poly_mul(out, [-z, ring.one])
    return out


def poly_eval(p, x):
    acc = x.ring.zero
    for c in reversed(p):
        acc = acc * x + c
    return acc
