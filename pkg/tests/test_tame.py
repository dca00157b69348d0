import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from galois_lift.errors import PreconditionError
from galois_lift.linalg import Matrix, companion, is_similar_pair, random_invertible, random_matrix
from galois_lift.rings import FieldSpec, teichmuller
from galois_lift.tame import (
    DetTarget,
    TamePair,
    TypeFunction,
    build_ramakrishna_pair,
    decompose_blocks,
    direct_sum,
    extend_scalars,
    induce_unramified,
    lift_tame,
    lift_with_teichmuller_det,
    p_poly,
    pair_validate,
    random_tame_pair,
    restrict_unramified,
    standard_tau,
    tate_twist,
    tensor,
    twist_to_determinant,
    twist_unramified,
    type_of,
)

F5, F7 = FieldSpec(5), FieldSpec(7)


def ints(v):
    return [a.to_int() for a in v]


def ram2():
    return TamePair(2, Matrix(F5, [[1, 1], [0, 1]]), Matrix.diag(F5, [F5(2), F5(1)]))


def orbit24_pair():
    """T = companion(T^2 + T + 1) over F_7 with S swapping the eigenlines 2 -> 4."""
    T = companion([F7(1), F7(1), F7(1)], F7)
    # eigenvectors for 2 and 4, then S maps v2 -> v4 and v4 -> v2, so S T S^-1 = T^2
    from galois_lift.linalg import kernel
    v2 = kernel(T - Matrix.identity(F7, 2) * F7(2))[0]
    v4 = kernel(T - Matrix.identity(F7, 2) * F7(4))[0]
    P = Matrix.from_columns(F7, [v2, v4])
    swap = Matrix(F7, [[0, 1], [1, 0]])
    S = P @ swap @ P.inverse()
    return TamePair(2, T, S)


def test_pair_validate_examples():
    I = Matrix.identity(F5, 2)
    assert pair_validate(TamePair(2, I, I)) == []
    assert pair_validate(ram2()) == []
    bad = pair_validate(TamePair(2, Matrix.diag(F5, [F5(2), F5(1)]), I))
    assert [b["kind"] for b in bad] == ["relation_fails"]
    assert bad[0]["entries"] == [[0, 0]]
    assert [b["kind"] for b in pair_validate(TamePair(5, I, I))] == ["q_not_coprime_to_ell"]


def test_p_poly_examples():
    assert ints(p_poly((F5(1),), F5)) == [4, 1]
    orbit = (F7(2), F7(4))
    assert ints(p_poly(orbit, F7, 2)) == [1, 1, 1]
    W = F7.witt(2)
    assert ints(p_poly(orbit, W, 2)) == [1, 1, 1]
    assert sorted(teichmuller(W, a).to_int() for a in orbit) == [18, 30]
    with pytest.raises(PreconditionError):
        p_poly((F7(2),), F7, 2)


def test_standard_tau_examples():
    t = TypeFunction(F5, 2, [((F5(1),), (1, 1, 1))])
    assert standard_tau(t, F5).is_identity()
    t3 = TypeFunction(F5, 2, [((F5(1),), (3,))])
    assert standard_tau(t3, F5).to_json() == [[0, 0, 1], [1, 0, 2], [0, 1, 3]]
    t24 = TypeFunction(F7, 2, [((F7(2), F7(4)), (1,))])
    assert standard_tau(t24, F7).to_json() == [[0, 6], [1, 6]]


def test_type_of_examples():
    I3 = Matrix.identity(F5, 3)
    t, _ = type_of(TamePair(2, I3, random_invertible(F5, 3, random.Random(0))))
    assert t.to_json() == [{"orbit": [1], "exponents": [1, 1, 1]}]
    t, C = type_of(ram2())
    assert t.to_json() == [{"orbit": [1], "exponents": [2]}]
    p = orbit24_pair()
    assert pair_validate(p) == []
    t, C = type_of(p)
    assert t.to_json() == [{"orbit": [2, 4], "exponents": [1]}]
    assert C.inverse() @ p.tau @ C == standard_tau(t, F7)


def test_lift_examples():
    # T = I lifts trivially
    S = random_invertible(F5, 2, random.Random(1))
    L, C = lift_tame(TamePair(3, Matrix.identity(F5, 2), S), 3)
    assert L.tau.is_identity() and L.relation_defect().is_zero()
    # the integer witness already satisfies the relation mod 25
    W = F5.witt(2)
    witness = TamePair(2, Matrix(W, [[1, 1], [0, 1]]), Matrix(W, [[2, 0], [0, 1]]))
    assert pair_validate(witness) == []
    L, C = lift_tame(ram2(), 2)
    assert L.relation_defect().is_zero() and L.reduce() == ram2().conjugate(C)
    p = orbit24_pair()
    L, C = lift_tame(p, 2)
    assert L.relation_defect().is_zero() and L.reduce() == p.conjugate(C)


@given(st.sampled_from([5, 7, 13]), st.sampled_from([2, 3, 4, 9]), st.integers(1, 4),
       st.integers(1, 3), st.integers(0, 10 ** 6))
def test_lift_properties(ell, q, n, m, seed):
    k = FieldSpec(ell)
    p = random_tame_pair(k, q, n, random.Random(seed))
    L, C = lift_tame(p, m)
    assert L.relation_defect().is_zero()
    assert L.reduce() == p.conjugate(C)
    assert type_of(L.reduce())[0] == type_of(p)[0]


def test_extend_scalars():
    p = ram2()
    assert extend_scalars(p, 1) is p
    big = extend_scalars(p, 2)
    assert big.ring == FieldSpec(5, 2) and pair_validate(big) == []
    # T^2 = 2 has eigenvalues of order 8 outside F_5; q = 9 fixes them
    T = companion([F5(-2), F5(0), F5(1)], F5)
    p9 = TamePair(9, T, Matrix.identity(F5, 2))
    assert pair_validate(p9) == []
    with pytest.raises(PreconditionError):
        type_of(p9)
    t, _ = type_of(extend_scalars(p9, 2))
    assert t.dimension == 2 and len(t.blocks) == 2
    # similarity classes survive the extension
    p7 = TamePair(2, Matrix.diag(F7, [F7(2), F7(4)]), Matrix(F7, [[0, 1], [1, 0]]))
    other = p7.conjugate(random_invertible(F7, 2, random.Random(2)))
    assert is_similar_pair(extend_scalars(p7, 2), extend_scalars(other, 2)) is not None
    lifted = extend_scalars(lift_tame(ram2(), 2)[0], 2)
    assert lifted.ring.m == 2 and pair_validate(lifted) == []


def test_tensor_and_direct_sum():
    one = TamePair(2, Matrix.identity(F5, 1), Matrix.identity(F5, 1))
    p = ram2()
    assert tensor(p, one) == p
    a = TamePair(2, Matrix.identity(F5, 1), Matrix.diag(F5, [F5(3)]))
    b = TamePair(2, Matrix.identity(F5, 1), Matrix.diag(F5, [F5(4)]))
    ab = tensor(a, b)
    assert ab.sigma.to_json() == [[2]]
    assert pair_validate(tensor(p, p)) == [] and tensor(p, p).n == 4
    assert direct_sum(p, a).n == 3


def test_twists():
    one = TamePair(2, Matrix.identity(F5, 1), Matrix.identity(F5, 1))
    assert tate_twist(one, 1).sigma.to_json() == [[2]]
    p = ram2()
    assert tate_twist(p, 0) == p
    assert tate_twist(tate_twist(p, 3), -3) == p
    assert twist_unramified(p, 1) == p
    assert twist_unramified(twist_unramified(p, 3), F5(3).inverse()) == p
    assert twist_unramified(p, 3).sigma.det() == p.sigma.det() * 9


def test_twist_to_determinant():
    W = F5.witt(2)
    p3 = TamePair(2, Matrix.identity(W, 3), Matrix.identity(W, 3))
    out = twist_to_determinant(p3, DetTarget(W(6), W(1)))
    assert out.sigma.to_json() == [[11, 0, 0], [0, 11, 0], [0, 0, 11]]
    L, _ = lift_tame(ram2(), 2)
    same = twist_to_determinant(L, DetTarget(L.sigma.det(), L.tau.det()))
    assert same == L
    # 7 is not a principal unit ratio on tau and 7^(q-1) != 1
    with pytest.raises(PreconditionError):
        twist_to_determinant(p3, DetTarget(W(6), W(7)))


def test_lift_with_teichmuller_det():
    W = F5.witt(2)
    L = lift_with_teichmuller_det(ram2(), 2)
    assert L.sigma.det() == teichmuller(W, F5(2)) and L.tau.det() == 1
    one = TamePair(2, Matrix.identity(F7, 1), Matrix.diag(F7, [F7(3)]))
    L1 = lift_with_teichmuller_det(one, 3)
    assert L1.sigma[0, 0] == teichmuller(F7.witt(3), F7(3))


def test_induce_unramified():
    t, s = F7(2), F7(3)
    q = 2
    p = TamePair(q ** 2, Matrix.diag(F7, [t]), Matrix.diag(F7, [s]))
    # t^(q^2) = 2^4 = 2 mod 7, so p is a valid pair for sigma^2
    assert pair_validate(p) == []
    ind = induce_unramified(p, 2, q)
    assert ind.tau.to_json() == [[2, 0], [0, 4]]
    assert ind.sigma.to_json() == [[0, 3], [1, 0]]
    res = restrict_unramified(ind, 2)
    # restriction contains p as the first block
    assert res.tau.submatrix(0, 1, 0, 1) == p.tau and res.sigma.submatrix(0, 1, 0, 1) == p.sigma
    assert res.sigma.submatrix(0, 1, 1, 2).is_zero()
    triv = TamePair(4, Matrix.identity(F5, 1), Matrix.identity(F5, 1))
    assert induce_unramified(triv, 2, 2).sigma.to_json() == [[0, 1], [1, 0]]


def test_ramakrishna_pairs():
    p = build_ramakrishna_pair(2, 2, F5)
    assert p.sigma.to_json() == [[2, 0], [0, 1]] and p.tau.to_json() == [[1, 1], [0, 1]]
    p = build_ramakrishna_pair(3, 3, F7)
    assert p.sigma.to_json() == [[2, 0, 0], [0, 3, 0], [0, 0, 1]]
    assert p.tau.to_json() == [[1, 1, 4], [0, 1, 1], [0, 0, 1]]
    with pytest.raises(PreconditionError):
        build_ramakrishna_pair(2, 4, F5)


def _block_instance(rng, W):
    k = W.field
    b1 = TamePair(2, Matrix.identity(k, 1), Matrix.diag(k, [k(3)]))
    blocks = [b1, orbit24_pair()]
    L = [lift_tame(b, W.m)[0] for b in blocks]
    # conjugate the residual blocks back so the residual of the sum is exactly block-diagonal
    red = [x.reduce() for x in L]
    big = direct_sum(*L)
    X = random_matrix(k, 3, 3, rng).lift(W)
    C = Matrix.identity(W, 3) + X * k.ell
    return big.conjugate(C), red


def test_decompose_blocks_round_trip():
    W = F7.witt(2)
    rng = random.Random(5)
    for _ in range(5):
        p, red = _block_instance(rng, W)
        C, blocks = decompose_blocks(p, red)
        assert C.reduce().is_identity()
        conj = p.conjugate(C)
        assert conj == direct_sum(*blocks)
        assert [b.reduce() for b in blocks] == red


def test_decompose_blocks_refuses_equal_blocks():
    b = TamePair(2, Matrix.identity(F7, 1), Matrix.diag(F7, [F7(3)]))
    L, _ = lift_tame(direct_sum(b, b), 2)
    with pytest.raises(PreconditionError):
        decompose_blocks(L, [b, b])


def test_decompose_blocks_already_diagonal():
    a = lift_tame(TamePair(2, Matrix.identity(F7, 1), Matrix.diag(F7, [F7(3)])), 2)[0]
    b = lift_tame(orbit24_pair(), 2)[0]
    C, blocks = decompose_blocks(direct_sum(a, b), [a.reduce(), b.reduce()])
    assert C.is_identity() and blocks == [a, b]
