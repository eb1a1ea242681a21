import random

import pytest

from godex.errors import AmbientMismatch, NotContained
from godex.exactlin import (
    GF, QQ, Field, Matrix, Subspace, image, kernel, preimage, random_invertible,
    random_matrix, subquotient,
)

from conftest import naive_rank


def test_field_primality():
    GF(2)
    GF(97)
    with pytest.raises(ValueError):
        Field(6)
    with pytest.raises(ValueError):
        Field(1)


def test_kernel_identity_is_zero(qq):
    K = kernel(Matrix.identity(qq, 2))
    assert K.dim == 0


def test_kernel_zero_map_is_everything(qq):
    K = kernel(Matrix.zeros(qq, 2, 3))
    assert K.dim == 3


def test_kernel_random_f5_rank_nullity(f5):
    rng = random.Random(11)
    for _ in range(10):
        M = random_matrix(f5, 4, 6, rng)
        K = kernel(M)
        assert K.dim == 6 - naive_rank(M)
        assert (M @ K.basis).is_zero()


@pytest.mark.parametrize("field", [QQ, GF(5), GF(2)])
def test_rank_nullity_property(field):
    rng = random.Random(3)
    for _ in range(8):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        M = random_matrix(field, r, c, rng)
        assert kernel(M).dim + M.rank() == c
        assert M.rank() == naive_rank(M)


def test_entries_canonical_mod_p(f5):
    rng = random.Random(5)
    A = random_matrix(f5, 3, 3, rng)
    B = random_matrix(f5, 3, 3, rng)
    for m in (A @ B, A + B, A.scale(-1), A.rref()[0], A.kernel_matrix()):
        for row in m.rows_list():
            for v in row:
                assert 0 <= v < 5


def test_subquotient_full_by_zero(qq):
    Z = Subspace.full(qq, 3)
    B = Subspace.zero(qq, 3)
    dim, proj, section = subquotient(Z, B)
    assert dim == 3
    assert (proj @ section) == Matrix.identity(qq, 3)
    assert proj.rank() == 3


def test_subquotient_equal_spaces_is_zero(f5):
    rng = random.Random(1)
    Z = image(random_matrix(f5, 4, 3, rng))
    dim, proj, section = subquotient(Z, Z)
    assert dim == 0


def test_subquotient_nested_5_2_in_7(qq):
    rng = random.Random(2)
    Zb = random_matrix(qq, 7, 5, rng)
    while Zb.rank() < 5:
        Zb = random_matrix(qq, 7, 5, rng)
    Z = Subspace(qq, 7, Zb)
    B = Subspace.spanned_by(qq, 7, Z.basis @ random_matrix(qq, 5, 2, rng))
    while B.dim < 2:
        B = Subspace.spanned_by(qq, 7, Z.basis @ random_matrix(qq, 5, 2, rng))
    dim, proj, section = subquotient(Z, B)
    assert dim == 3
    assert (proj @ section) == Matrix.identity(qq, 3)
    assert proj.rank() == 3  # full row rank equal to the quotient dim


def test_subquotient_errors(f5):
    Z = Subspace.full(f5, 3)
    B = Subspace.full(f5, 4)
    with pytest.raises(AmbientMismatch):
        subquotient(Z, B)
    rng = random.Random(9)
    Z2 = image(random_matrix(f5, 4, 2, rng))
    outside = Subspace.full(f5, 4)
    if not Z2.contains(outside):
        with pytest.raises(NotContained):
            subquotient(Z2, outside)


def test_solve_and_inverse_roundtrip():
    rng = random.Random(7)
    for field in (QQ, GF(7)):
        A = random_invertible(field, 5, rng)
        X = A.inverse()
        assert A @ X == Matrix.identity(field, 5)
        B = random_matrix(field, 5, 2, rng)
        Y = A.solve(B)
        assert A @ Y == B


def test_subspace_operations_consistency(f5):
    rng = random.Random(13)
    for _ in range(6):
        V = image(random_matrix(f5, 6, 3, rng))
        W = image(random_matrix(f5, 6, 3, rng))
        I = V.intersect(W)
        S = V.add(W)
        # modular law of dimensions
        assert I.dim + S.dim == V.dim + W.dim
        assert V.contains(I) and W.contains(I)
        assert S.contains(V) and S.contains(W)
        M = random_matrix(f5, 6, 4, rng)
        pre = preimage(M, V)
        assert V.contains_matrix(M @ pre.basis) or pre.dim == 0


def test_backend_agreement_q_vs_f5():
    # identical integer matrices reduced over Q and over F_101 agree on rank
    rng = random.Random(17)
    for _ in range(6):
        rows = [[rng.randint(0, 4) for _ in range(5)] for _ in range(4)]
        mq = Matrix(QQ, 4, 5, rows)
        mp = Matrix(GF(101), 4, 5, rows)
        assert mq.rank() == mp.rank() == naive_rank(mq)
