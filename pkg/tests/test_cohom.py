import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from galois_lift.cohom import (
    LocalModule,
    ad,
    ad0,
    character_line,
    dual,
    h0_dim,
    h1_dim,
    h1_formula,
    h1_oracle,
    h1nr_dim,
    h2_dim,
    hom,
    hom_vanishing_all_twists,
    module_of,
    ramakrishna_tangent_dim,
    s_small_check,
    s_value,
    twist,
    unramified_h1_dim,
    well_behaved_dims,
)
from galois_lift.errors import PreconditionError
from galois_lift.linalg import Matrix
from galois_lift.rings import FieldSpec, poly_from_roots
from galois_lift.tame import (
    TamePair,
    build_ramakrishna_pair,
    extend_scalars,
    ramakrishna_residual,
    random_tame_pair,
    tate_twist,
    tensor,
)

F5, F7, F13 = FieldSpec(5), FieldSpec(7), FieldSpec(13)


def line(k, q, c, t=1):
    return TamePair(q, Matrix.diag(k, [k(t)]), Matrix.diag(k, [k(c)]))


def random_module(rng):
    ell = rng.choice([5, 7, 13])
    q = rng.choice([q for q in (2, 3, 4) if q % ell])
    k = FieldSpec(ell)
    n = rng.randint(1, 4)
    p = random_tame_pair(k, q, n, rng)
    kind = rng.choice(["pair", "pair", "ad", "dual", "twist"])
    if kind == "ad" and n <= 2:
        return ad(p)
    if kind == "dual":
        return dual(module_of(p))
    if kind == "twist":
        return twist(module_of(p), rng.randint(-3, 3))
    return module_of(p)


def test_module_constructors():
    triv = line(F5, 2, 1)
    assert ad(triv).dim == 1 and ad0(triv).dim == 0
    r = ramakrishna_residual(3, 3, F7)
    A = ad0(r)
    assert A.dim == 8
    M = module_of(r)
    assert twist(twist(M, 2), -2).phi == M.phi
    with pytest.raises(PreconditionError):
        ad0(TamePair(2, Matrix.identity(F5, 5), Matrix.identity(F5, 5)), require_split=True)


def test_ad0_lines_of_the_residual():
    # phi on ad0 of diag(w^2, w, 1) has eigenvalues q^(j-i) on E_ij and 1 on the diagonal
    q = 3
    A = ad0(ramakrishna_residual(3, q, F7))
    cp = A.phi.charpoly()
    roots = [F7(q) ** (j - i) for i in range(3) for j in range(3) if i != j] + [F7(1), F7(1)]
    assert cp == poly_from_roots(roots, F7)


def test_h0_h2_examples():
    assert h0_dim(module_of(line(F5, 2, 1))) == 1
    k1 = module_of(line(F5, 2, 2))
    assert h0_dim(k1) == 0
    assert h0_dim(ad0(ramakrishna_residual(3, 3, F7))) == 2
    assert h2_dim(module_of(line(F5, 2, 1))) == 0
    assert h2_dim(k1) == 1
    assert h2_dim(ad0(ramakrishna_residual(3, 3, F7))) == 2


def test_h1_examples():
    assert h1_dim(module_of(line(F5, 2, 1))) == 1
    assert h1_dim(module_of(line(F5, 2, 2))) == 1
    # k(j) with q^j != 1 and q^(j-1) != 1
    assert h1_dim(module_of(line(F5, 2, 4))) == 0
    assert h1nr_dim(module_of(line(F5, 2, 1))) == 1
    assert h1nr_dim(module_of(line(F5, 2, 2))) == 0


def test_h1_routes_agree_on_random_modules():
    rng = random.Random(11)
    for _ in range(150):
        M = random_module(rng)
        assert h1_formula(M) == h1_oracle(M)
        if M.is_unramified():
            assert h1nr_dim(M) == h0_dim(M) == unramified_h1_dim(M)


@given(st.integers(0, 10 ** 6))
def test_h0_invariant_under_scalar_extension(seed):
    rng = random.Random(seed)
    p = random_tame_pair(F5, 2, rng.randint(1, 3), rng)
    big = extend_scalars(p, 2)
    assert h0_dim(module_of(p)) == h0_dim(module_of(big))
    assert h0_dim(ad(p)) == h0_dim(ad(big))


def test_hom_vanishing_examples():
    p = random_tame_pair(F7, 2, 2, random.Random(4))
    assert not hom_vanishing_all_twists(p, p)
    # a 1-dim pair needs t^q = t; with q = 4, t = 2 is a nontrivial inertia value mod 7
    ram = TamePair(4, Matrix.diag(F7, [F7(2)]), Matrix.diag(F7, [F7(1)]))
    assert hom_vanishing_all_twists(line(F7, 4, 1), ram)
    # c2 / c1 = 4 is a power of q = 2 mod 7: the twist r = 2 identifies the lines
    a, b = line(F7, 2, 1), line(F7, 2, 4)
    assert not hom_vanishing_all_twists(a, b)
    assert h0_dim(hom(a, tate_twist(b, -2))) == 1
    # 3 is not a power of 2 mod 7
    assert hom_vanishing_all_twists(a, line(F7, 2, 3))


def test_s_value_and_small_twists():
    # q = 2 has order 4 mod 5
    assert s_value(line(F5, 2, 1)) == 4
    assert s_small_check([0, 1, 2], 4) and not s_small_check([3], 4)
    # on hom(k, k(j)): all three dimensions vanish exactly when q^j != 1 and q^(j-1) != 1
    triv = line(F5, 2, 1)
    vanish = []
    for j in range(4):
        M = hom(triv, tate_twist(triv, j))
        if h0_dim(M) == h1_dim(M) == h2_dim(M) == 0:
            vanish.append(j)
    # q = 2 mod 5 has order 4: j = 0 and j = 1 fail, j = 2 and j = 3 vanish
    assert vanish == [2, 3]
    assert [j for j in vanish if j in (1, 2)] == [2]


def test_tensor_invariance_of_hom_dims():
    rng = random.Random(9)
    theta = line(F7, 2, 3)
    for _ in range(10):
        p1 = random_tame_pair(F7, 2, 2, rng)
        p2 = random_tame_pair(F7, 2, 1, rng)
        a = hom(p1, p2)
        b = hom(tensor(p1, theta), tensor(p2, theta))
        assert (h0_dim(a), h1_dim(a), h2_dim(a)) == (h0_dim(b), h1_dim(b), h2_dim(b))


def test_well_behaved():
    triv = TamePair(2, Matrix.identity(F5, 2), Matrix.identity(F5, 2))
    assert well_behaved_dims(triv) == (4, 4)
    t, h = well_behaved_dims(build_ramakrishna_pair(3, 3, F7))
    assert t == h


@pytest.mark.parametrize("n,ell,q,expected", [(2, 5, 2, 1), (3, 7, 3, 2), (3, 13, 2, 2)])
def test_ramakrishna_tangent(n, ell, q, expected):
    assert ramakrishna_tangent_dim(n, q, FieldSpec(ell)) == expected


def test_ramakrishna_tangent_needs_large_order():
    with pytest.raises(PreconditionError):
        ramakrishna_tangent_dim(4, 2, F7)  # 2 has order 3 mod 7


def test_complement_property_on_the_diagonal_residual():
    for n, ell, q in [(2, 5, 2), (3, 7, 3), (3, 13, 2)]:
        A = ad0(ramakrishna_residual(n, q, FieldSpec(ell)))
        assert h1_dim(A) == h1nr_dim(A) + (n - 1)


def test_literal_exponential_pair_has_no_cohomology_on_ad0():
    """The exp(N) pair is ramified: its ad0 has h0 = h1 = h2 = 0, so the
    complement identity cannot hold there (it is stated for the diagonal residual)."""
    for n, ell, q in [(2, 5, 2), (3, 7, 3), (3, 13, 2)]:
        A = ad0(build_ramakrishna_pair(n, q, FieldSpec(ell)))
        assert (h0_dim(A), h1_dim(A), h2_dim(A), h1nr_dim(A)) == (0, 0, 0, 0)


def test_local_module_violations():
    k = F5
    M = LocalModule(k, 2, Matrix.identity(k, 1), Matrix.diag(k, [k(2)]))
    assert [v["kind"] for v in M.violations()] == ["relation_fails"]
