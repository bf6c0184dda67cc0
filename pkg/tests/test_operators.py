import numpy as np
import pytest

from blackbox_linalg import (ButterflyOperator, DenseOperator,
                             DiagonalOperator, EmbeddedOperator,
                             IdentityOperator, LeadingMinorOperator,
                             PrimeField, SparseOperator, ToeplitzLowerUnit,
                             ToeplitzUpperUnit, compose, dense_rank, matmul_mod,
                             precond_apply, sparse_apply)
from blackbox_linalg.errors import DimensionError

F = PrimeField(10007)
P = F.p


def test_sparse_identity_triples():
    S = SparseOperator(3, [(i, i, 1) for i in range(3)], F)
    v = np.array([5, 6, 7], dtype=np.int64)
    assert np.array_equal(sparse_apply(S, v), v)


def test_sparse_shift_matrix():
    S = SparseOperator(2, [(0, 1, 1)], F)  # [[0, 1], [0, 0]]
    v = np.array([3, 4], dtype=np.int64)
    assert np.array_equal(sparse_apply(S, v), [4, 0])
    assert np.array_equal(sparse_apply(S, v, transposed=True), [0, 3])


def test_sparse_random_against_dense():
    rng = np.random.default_rng(20)
    n = 50
    seen = set()
    triples = []
    while len(triples) < 200:
        i, j = int(rng.integers(0, n)), int(rng.integers(0, n))
        if (i, j) in seen:
            continue
        seen.add((i, j))
        triples.append((i, j, int(rng.integers(1, P))))
    S = SparseOperator(n, triples, F)
    M = S.to_dense_matrix()
    V = rng.integers(0, P, size=(n, 4), dtype=np.int64)
    assert np.array_equal(S.apply_matrix(V), matmul_mod(M, V, P))
    assert np.array_equal(S.apply_transpose_matrix(V), matmul_mod(M.T, V, P))


def test_sparse_validation():
    with pytest.raises(ValueError):
        SparseOperator(2, [(0, 0, 1), (0, 0, 2)], F)  # duplicate
    with pytest.raises(ValueError):
        SparseOperator(2, [(0, 0, 0)], F)  # explicit zero
    with pytest.raises(DimensionError):
        SparseOperator(2, [(2, 0, 1)], F)  # out of range
    with pytest.raises(DimensionError):
        SparseOperator(2, [(0, 0, 1)], F).apply(np.zeros(3, dtype=np.int64))


def test_diagonal_ones_is_identity():
    D = DiagonalOperator(np.ones(5, dtype=np.int64), F)
    v = np.arange(5, dtype=np.int64)
    assert np.array_equal(precond_apply(D, v), v)
    assert np.array_equal(precond_apply(D, v, inverted=True), v)


def test_toeplitz_forward_and_inverse():
    # first column (1, c, 0, ...): e1 -> e1 + c e2, then solve back
    c = 17
    col = np.zeros(5, dtype=np.int64)
    col[0], col[1] = 1, c
    L = ToeplitzLowerUnit(col, F)
    e1 = np.zeros(5, dtype=np.int64)
    e1[0] = 1
    y = precond_apply(L, e1)
    expect = np.zeros(5, dtype=np.int64)
    expect[0], expect[1] = 1, c
    assert np.array_equal(y, expect)
    assert np.array_equal(precond_apply(L, y, inverted=True), e1)


def test_toeplitz_matches_dense_materialization():
    rng = np.random.default_rng(21)
    n = 9
    col = rng.integers(0, P, size=n, dtype=np.int64)
    L = ToeplitzLowerUnit(col, F)
    M = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1):
            M[i, j] = L.coeffs[i - j]
    v = rng.integers(0, P, size=n, dtype=np.int64)
    assert np.array_equal(L.apply(v), matmul_mod(M, v.reshape(-1, 1), P).ravel())
    assert np.array_equal(L.apply_transpose(v),
                          matmul_mod(M.T, v.reshape(-1, 1), P).ravel())
    U = ToeplitzUpperUnit(col, F)
    assert np.array_equal(U.apply(v), matmul_mod(M.T, v.reshape(-1, 1), P).ravel())


def test_butterfly_dense_equivalence_and_rank():
    rng = np.random.default_rng(22)
    for n in (8, 12):  # power of two and not
        B = ButterflyOperator(n, F, rng)
        M = B.to_dense()
        assert dense_rank(M, P) == n
        v = rng.integers(0, P, size=n, dtype=np.int64)
        assert np.array_equal(B.apply(v), matmul_mod(M, v.reshape(-1, 1), P).ravel())
        assert np.array_equal(B.apply_transpose(v),
                              matmul_mod(M.T, v.reshape(-1, 1), P).ravel())


def test_butterfly_determinant_is_one():
    from blackbox_linalg import dense_det
    rng = np.random.default_rng(23)
    for n in (4, 8, 11):
        B = ButterflyOperator(n, F, rng)
        assert dense_det(B.to_dense(), P) == 1


def test_compose_identity_sandwich():
    rng = np.random.default_rng(24)
    A = DenseOperator(rng.integers(0, P, size=(6, 6), dtype=np.int64), F)
    C = compose([IdentityOperator(6, F), A, IdentityOperator(6, F)])
    v = rng.integers(0, P, size=6, dtype=np.int64)
    assert np.array_equal(C.apply(v), A.apply(v))


def test_compose_scalar_diagonal():
    rng = np.random.default_rng(25)
    S = SparseOperator(4, [(i, (i + 1) % 4, 3) for i in range(4)], F)
    D = DiagonalOperator(2 * np.ones(4, dtype=np.int64), F)
    C = compose([D, S, D])
    v = rng.integers(0, P, size=4, dtype=np.int64)
    assert np.array_equal(C.apply(v), 4 * S.apply(v) % P)


def test_compose_ldu_materialization():
    rng = np.random.default_rng(26)
    n = 6
    L = ToeplitzLowerUnit.random(n, F, rng)
    U = ToeplitzUpperUnit.random(n, F, rng)
    d = rng.integers(1, P, size=n, dtype=np.int64)
    D2 = DiagonalOperator(d * d % P, F)
    R = compose([L, D2, U])
    got = R.to_dense()
    I = np.eye(n, dtype=np.int64)
    expect = matmul_mod(L.apply_matrix(I),
                        matmul_mod(np.diag(d * d % P), U.apply_matrix(I), P), P)
    assert np.array_equal(got, expect)


def _operator_zoo(rng):
    n = 8
    triples = [(int(i), int(j), int(rng.integers(1, P)))
               for i, j in zip(rng.integers(0, n, 20), rng.integers(0, n, 20))]
    triples = list({(i, j): (i, j, v) for i, j, v in triples}.values())
    return [
        SparseOperator(n, triples, F),
        DiagonalOperator.random(n, F, rng),
        ButterflyOperator(n, F, rng),
        ToeplitzLowerUnit.random(n, F, rng),
        ToeplitzUpperUnit.random(n, F, rng),
        DenseOperator(rng.integers(0, P, size=(n, n), dtype=np.int64), F),
        EmbeddedOperator(DenseOperator(rng.integers(0, P, size=(5, 5),
                                                    dtype=np.int64), F), n),
        LeadingMinorOperator(DenseOperator(
            rng.integers(0, P, size=(11, 11), dtype=np.int64), F), n),
    ]


def test_adjoint_consistency_all_kinds():
    # w^T (A v) == (A^T w)^T v, 100 random trials per operator kind
    rng = np.random.default_rng(27)
    for op in _operator_zoo(rng):
        for _ in range(100):
            v = rng.integers(0, P, size=op.n, dtype=np.int64)
            w = rng.integers(0, P, size=op.n, dtype=np.int64)
            left = int(np.dot(w.astype(object), op.apply(v).astype(object))) % P
            right = int(np.dot(op.apply_transpose(w).astype(object),
                               v.astype(object))) % P
            assert left == right


def test_inverted_then_plain_is_identity():
    rng = np.random.default_rng(28)
    n = 8
    kinds = [DiagonalOperator.random(n, F, rng),
             ButterflyOperator(n, F, rng),
             ToeplitzLowerUnit.random(n, F, rng),
             ToeplitzUpperUnit.random(n, F, rng)]
    for op in kinds:
        for transposed in (False, True):
            v = rng.integers(0, P, size=n, dtype=np.int64)
            w = precond_apply(op, v, transposed=transposed, inverted=True)
            back = precond_apply(op, w, transposed=transposed)
            assert np.array_equal(back, v), type(op).__name__


def test_counter_totals_under_composition():
    rng = np.random.default_rng(29)
    n = 6
    A = DenseOperator(rng.integers(0, P, size=(n, n), dtype=np.int64), F)
    D = DiagonalOperator.random(n, F, rng)
    C = compose([D, A, D])
    V = rng.integers(0, P, size=(n, 3), dtype=np.int64)
    C.apply_matrix(V)
    C.apply(V[:, 0])
    assert C.apply_count == 4
    assert A.apply_count == 4
    assert D.apply_count == 8  # applied twice per composition pass
    A.apply_transpose(V[:, 0])
    assert A.transpose_apply_count == 1
    assert A.total_applications == 5


def test_linearity_spot_check_all_kinds():
    # apply(a v + b w) == a apply(v) + b apply(w) for every operator kind
    rng = np.random.default_rng(30)
    for op in _operator_zoo(rng):
        for _ in range(10):
            a, b = (int(x) for x in rng.integers(0, P, size=2))
            v = rng.integers(0, P, size=op.n, dtype=np.int64)
            w = rng.integers(0, P, size=op.n, dtype=np.int64)
            left = op.apply((a * v + b * w) % P)
            right = (a * op.apply(v) + b * op.apply(w)) % P
            assert np.array_equal(left, right), type(op).__name__


def test_leading_minor_matches_dense_submatrix():
    # embed-truncate restriction agrees with dense submatrix extraction
    rng = np.random.default_rng(31)
    for _ in range(10):
        n = int(rng.integers(4, 12))
        r = int(rng.integers(1, n))
        M = rng.integers(0, P, size=(n, n), dtype=np.int64)
        op = LeadingMinorOperator(DenseOperator(M, F), r)
        V = rng.integers(0, P, size=(r, 3), dtype=np.int64)
        assert np.array_equal(op.apply_matrix(V), matmul_mod(M[:r, :r], V, P))
        assert np.array_equal(op.apply_transpose_matrix(V),
                              matmul_mod(M[:r, :r].T, V, P))
