import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorid.exceptions import InvalidArgumentError
from tensorid.rng import SketchSeed, as_seed
from tensorid.sketch import (KFJLT, SRHT, CountSketch, GaussianSketch, TensorSketch, count_sketch_apply_matrix,
                             count_sketch_apply_modes, empirical_se_distortion, fwht, kfjlt_apply_cp,
                             network_matrix, network_operators, sparse_sketch_network, srht_apply,
                             tensor_sketch_apply_cp)
from tensorid.synthetic import gen_sparse_random
from tensorid.tensors import CPTensor, SparseTensor, cp_flatten_gram, flatten, mode_contract


def kron_cols(factors, w=None):
    p = factors[0].shape[1]
    cols = []
    for k in range(p):
        v = np.ones(1)
        for F in factors:
            v = np.kron(v, F[:, k])
        cols.append(v)
    M = np.stack(cols, axis=1)
    return M if w is None else M * w


# --------------------------------------------------------------------------- seeds


def test_seed_children_are_distinct_and_stable():
    a = SketchSeed(5)
    assert a.child(1) == SketchSeed(5).child(1)
    assert a.child(1) != a.child(2)
    assert a.child(1).child(1) != a.child(1)
    g1, g2 = a.generator().random(4), SketchSeed(5).generator().random(4)
    np.testing.assert_array_equal(g1, g2)


def test_hash_determinism_and_range():
    S = CountSketch(7, (5, 6), SketchSeed(3, 9))
    idx = np.array([[i, j] for i in range(5) for j in range(6)])
    b1, s1 = S.bucket_sign(idx)
    b2, s2 = CountSketch(7, (5, 6), SketchSeed(3, 9)).bucket_sign(idx)
    np.testing.assert_array_equal(b1, b2)
    np.testing.assert_array_equal(s1, s2)
    assert b1.min() >= 0 and b1.max() < 7
    assert set(np.unique(s1)) <= {-1.0, 1.0}


# --------------------------------------------------------------------------- count sketch


def test_count_sketch_zero_and_injective(rng):
    S = CountSketch(5, (12,), 1)
    np.testing.assert_array_equal(count_sketch_apply_matrix(S, np.zeros((12, 3))), np.zeros((5, 3)))
    P = CountSketch(12, (12,), 1, injective=True)
    A = rng.standard_normal((12, 4))
    Y = count_sketch_apply_matrix(P, A)
    np.testing.assert_allclose(np.linalg.norm(Y, axis=0), np.linalg.norm(A, axis=0))
    M = P.to_matrix()
    np.testing.assert_array_equal(np.abs(M) @ np.ones(12), np.ones(12))  # signed permutation


def test_count_sketch_matches_materialized(rng):
    S = CountSketch(6, (4, 5), 3)
    A = sps.random(20, 7, density=0.3, random_state=1, format="csr")
    np.testing.assert_allclose(count_sketch_apply_matrix(S, A), S.to_matrix() @ A.toarray(), atol=1e-13)
    D = rng.standard_normal((20, 3))
    np.testing.assert_allclose(count_sketch_apply_matrix(S, D), S.to_matrix() @ D, atol=1e-13)
    with pytest.raises(InvalidArgumentError):
        count_sketch_apply_matrix(S, np.ones((19, 2)))


def test_count_sketch_apply_modes_cases(rng):
    T = SparseTensor((3, 1, 4), [[0, 0, 1], [2, 0, 3]], [1.5, -2.0])
    out = count_sketch_apply_modes(T, [1], 1, 4)
    assert out.shape == (3, 1, 4)
    np.testing.assert_array_equal(np.abs(out.values), np.abs(T.values))
    D = SparseTensor((4, 4, 4, 4), [[i] * 4 for i in range(4)], [1.0, 2.0, 3.0, 4.0])
    out = count_sketch_apply_modes(D, [1, 2], None, 5)
    assert out.nnz == 4 and out.shape == (4, 16, 4)
    X = gen_sparse_random((3, 4, 5, 2), 0.4, seed=2)
    S = CountSketch(6, (4, 2), 7)
    out = count_sketch_apply_modes(X, [1, 3], 6, 7)
    dense = np.transpose(X.to_dense(), (1, 3, 0, 2)).reshape(8, -1)
    expect = (S.to_matrix() @ dense).reshape(6, 3, 5).transpose(1, 0, 2)
    np.testing.assert_allclose(out.to_dense(), expect, atol=1e-13)


# --------------------------------------------------------------------------- SRHT


def test_fwht_matches_hadamard(rng):
    import scipy.linalg
    X = rng.standard_normal((16, 3))
    np.testing.assert_allclose(fwht(X), scipy.linalg.hadamard(16) @ X, atol=1e-12)


def test_srht_cases(rng):
    S = SRHT(4, 10, 2)
    np.testing.assert_array_equal(srht_apply(S, np.zeros((10, 2))), np.zeros((4, 2)))
    F = SRHT(16, 16, 3)
    X = rng.standard_normal((16, 5))
    np.testing.assert_allclose(np.linalg.norm(srht_apply(F, X), axis=0), np.linalg.norm(X, axis=0))
    X = rng.standard_normal((10, 3))
    np.testing.assert_allclose(srht_apply(S, X), S.to_matrix() @ X, atol=1e-12)
    with pytest.raises(InvalidArgumentError):
        srht_apply(S, np.ones((9, 1)))
    with pytest.raises(InvalidArgumentError):
        SRHT(17, 10, 0)


# --------------------------------------------------------------------------- KFJLT / tensor sketch


def test_kfjlt_single_factor_is_srht(rng):
    A = rng.standard_normal((8, 3))
    K = KFJLT((8,), 8, 4)
    # full-dimension KFJLT on one mode is an orthogonal map, like a full SRHT
    np.testing.assert_allclose(np.linalg.norm(K.apply_cp([A]), axis=0), np.linalg.norm(A, axis=0))


def test_kfjlt_matches_materialized(rng):
    fac = [rng.standard_normal((n, 4)) for n in (3, 5, 2)]
    w = rng.standard_normal(4)
    K = KFJLT((3, 5, 2), 11, 9)
    np.testing.assert_allclose(K.apply_cp(fac, w), K.to_matrix() @ kron_cols(fac, w), atol=1e-12)
    np.testing.assert_allclose(kfjlt_apply_cp(fac, w, 11, 9), K.apply_cp(fac, w))
    coords = np.array([[0, 1, 1], [2, 4, 0]])
    np.testing.assert_allclose(K.apply_coo(coords, [1.0, -2.0]),
                               K.to_matrix()[:, np.ravel_multi_index(tuple(coords.T), (3, 5, 2))] @ [1.0, -2.0])
    with pytest.raises(InvalidArgumentError):
        kfjlt_apply_cp([], None, 4, 0)


def test_kfjlt_full_rows_orthogonal(rng):
    fac = [rng.standard_normal((4, 2)), rng.standard_normal((4, 2))]
    Y = KFJLT((4, 4), 16, 1).apply_cp(fac)
    np.testing.assert_allclose(np.linalg.norm(Y, axis=0), np.linalg.norm(kron_cols(fac), axis=0))


def test_kfjlt_mean_norm_ratio(rng):
    fac = [rng.standard_normal((n, 3)) for n in (5, 6, 7)]
    x = kron_cols(fac)
    r = np.mean([np.sum(kfjlt_apply_cp(fac, None, 64, s) ** 2, axis=0) / np.sum(x * x, axis=0)
                 for s in range(200)], axis=0)
    assert np.all((r > 0.9) & (r < 1.1))


def test_kfjlt_jlt_property_on_cp_flattening():
    # the n = 32 columns of mat_{.,1} of a 32 x 32 x 32 CP tensor, sketched over modes 2, 3
    g = np.random.default_rng(1)
    C = CPTensor([g.standard_normal((32, 200)) for _ in range(3)])
    exact = np.diag(cp_flatten_gram(C, 0))
    ok = 0
    for s in range(100):
        Y = KFJLT((32, 32), 128, s).apply_cp(list(C.factors[1:]), C.weights)
        est = np.sum((Y @ C.factors[0].T) ** 2, axis=0)
        ok += np.all(np.abs(est / exact - 1) <= 0.5)
    assert ok >= 95


def test_tensor_sketch_cases(rng):
    A = rng.standard_normal((6, 3))
    S = TensorSketch((6,), 5, 2)
    np.testing.assert_allclose(S.apply_cp([A]), count_sketch_apply_matrix(S.parts[0], A))
    fac = [rng.standard_normal((n, 3)) for n in (3, 4, 2)]
    fac0 = [fac[0], np.zeros((4, 3)), fac[2]]
    np.testing.assert_allclose(tensor_sketch_apply_cp(fac0, None, 7, 1), 0, atol=1e-14)
    T = TensorSketch((3, 4, 2), 7, 1)
    np.testing.assert_allclose(T.apply_cp(fac), T.to_matrix() @ kron_cols(fac), atol=1e-12)


def test_tensor_sketch_mean_norm_ratio(rng):
    fac = [rng.standard_normal((n, 2)) for n in (5, 6, 7)]
    x = kron_cols(fac)
    r = np.mean([np.sum(tensor_sketch_apply_cp(fac, None, 64, s) ** 2, axis=0) / np.sum(x * x, axis=0)
                 for s in range(300)], axis=0)
    assert np.all((r > 0.9) & (r < 1.1))


@pytest.mark.parametrize("kind", ["count", "srht", "kfjlt", "tensor", "gaussian"])
def test_operator_determinism(kind, rng):
    fac = [rng.standard_normal((n, 2)) for n in (4, 5)]
    x = kron_cols(fac)

    def run(seed):
        if kind == "count":
            return CountSketch(6, (20,), seed).apply(x)
        if kind == "srht":
            return SRHT(6, 20, seed).apply(x)
        if kind == "kfjlt":
            return KFJLT((4, 5), 6, seed).apply_cp(fac)
        if kind == "tensor":
            return TensorSketch((4, 5), 6, seed).apply_cp(fac)
        return GaussianSketch(6, 20, as_seed(seed)).apply(x)

    a, b = run(SketchSeed(11, 3)), run(SketchSeed(11, 3))
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, run(SketchSeed(12, 3)))


# --------------------------------------------------------------------------- sparse sketch network


def _network_oracle(T, processed, target, dims, seed, outer="srht"):
    ops = network_operators(T.shape, processed, target, dims, seed, outer)
    R = T.to_dense()
    for mode, J, L in processed:
        R = mode_contract(np.take(R, J, axis=mode), mode, np.asarray(L).T)
    order = [p[0] for p in processed] + list(ops.rest_modes) + [target]
    M = np.transpose(R, order).reshape(-1, T.shape[target])
    return network_matrix(ops, processed) @ M


def test_network_no_processed_modes_is_count_sketch():
    T = gen_sparse_random((5, 4, 6), 0.3, seed=1)
    B = sparse_sketch_network(T, [], 1, (None, 8, 7), seed=2)
    ops = network_operators(T.shape, [], 1, (None, 8, 7), 2)
    C = count_sketch_apply_modes(T, [0, 2], 7, ops.count.seed)  # shape (7, 4): bucket, target
    np.testing.assert_allclose(B, C.to_dense(), atol=1e-13)


@pytest.mark.parametrize("dims,outer", [((400, 400, 2000), "srht"), ((50, 8, 30), "srht"),
                                        ((20, 8, 30), "countsketch"), ((None, None, None), "srht")])
def test_network_matches_dense_oracle(dims, outer):
    T = gen_sparse_random((6, 6, 6, 6), 0.05, seed=3)
    L = np.tril(np.random.default_rng(0).standard_normal((3, 3)))
    processed = [(0, [1, 3, 4], L)]
    B = sparse_sketch_network(T, processed, 2, dims, seed=5, outer=outer)
    ref = _network_oracle(T, processed, 2, dims, 5, outer)
    assert np.linalg.norm(B - ref) <= 1e-10 * np.linalg.norm(ref)


def test_network_two_processed_modes():
    T = gen_sparse_random((5, 6, 4, 5), 0.2, seed=4)
    g = np.random.default_rng(1)
    processed = [(3, [0, 2], np.tril(g.standard_normal((2, 2)))), (1, [5, 1, 3], np.tril(g.standard_normal((3, 3))))]
    for dims in [(30, 16, 9), (None, None, None)]:
        B = sparse_sketch_network(T, processed, 0, dims, seed=6)
        ref = _network_oracle(T, processed, 0, dims, 6)
        assert np.linalg.norm(B - ref) <= 1e-10 * np.linalg.norm(ref)


def test_network_full_orthogonal_preserves_norms():
    T = gen_sparse_random((4, 4, 4), 0.3, seed=2)
    Q = np.linalg.qr(np.random.default_rng(0).standard_normal((2, 2)))[0]
    processed = [(0, [1, 2], Q)]
    B = sparse_sketch_network(T, processed, 2, (None, None, None), seed=1)
    R = mode_contract(np.take(T.to_dense(), [1, 2], axis=0), 0, Q.T)
    np.testing.assert_allclose(np.linalg.norm(B, axis=0), np.linalg.norm(flatten(R, [0, 1]), axis=0), atol=1e-12)


def test_network_rejects_bad_input():
    T = gen_sparse_random((4, 4, 4), 0.3, seed=2)
    with pytest.raises(InvalidArgumentError):
        sparse_sketch_network(T, [(0, [1, 2], np.eye(3))], 2, seed=1)
    with pytest.raises(InvalidArgumentError):
        sparse_sketch_network(T, [(0, [1, 9], np.eye(2))], 2, seed=1)
    with pytest.raises(InvalidArgumentError):
        sparse_sketch_network(T, [(0, [1], np.eye(1))], 0, seed=1)


# --------------------------------------------------------------------------- distortion


def test_empirical_se_distortion_cases(rng):
    A = rng.standard_normal((10, 3))
    Q = np.linalg.qr(rng.standard_normal((10, 10)))[0]
    assert empirical_se_distortion(Q, A) < 1e-12
    assert np.isclose(empirical_se_distortion(2 * np.eye(10), A), 3.0)
    # m = 8 * rank; the largest squared singular value sits near (1 + 8**-0.5)**2 = 1.83, so
    # the frequency of delta < 1 grows with the rank (about 96% at rank 3, 99.8% at rank 20)
    hits = sum(empirical_se_distortion(GaussianSketch(160, 300, s).to_matrix(), rng.standard_normal((300, 20))) < 1
               for s in range(100))
    assert hits >= 97


def test_empirical_se_distortion_rank_deficient(rng):
    u = rng.standard_normal((8, 1))
    A = np.hstack([u, 2 * u])
    assert empirical_se_distortion(np.eye(8), A) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**31))
def test_count_sketch_linear(n, seed):
    g = np.random.default_rng(seed)
    S = CountSketch(5, (n,), seed)
    x, y = g.standard_normal(n), g.standard_normal(n)
    np.testing.assert_allclose(S.apply(x + 2 * y), S.apply(x) + 2 * S.apply(y), atol=1e-12)
