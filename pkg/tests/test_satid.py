import numpy as np
import pytest

from conftest import projection_residual, rel_err, tv
from tensorid.evaluation import exact_rel_error
from tensorid.exceptions import InvalidArgumentError
from tensorid.satid import (column_multi_index, cp_index_scores, cp_joint_scores, cp_sample_index, cp_sample_mode,
                            fiber, pinv, satid_cp, satid_dense, satid_reconstruct, satid_sparse, solve_core,
                            sparse_direct_scores, sparse_select_direct, sparse_select_sketched)
from tensorid.sketch import KFJLT
from tensorid.synthetic import gen_low_rank_tucker, gen_sparse_random, gen_sparse_tucker
from tensorid.tensors import CPTensor, SparseTensor, flatten, mode_contract, tucker_reconstruct

METHODS = ["normmax", "normsample", "nuclear"]


def recon(res):
    return tucker_reconstruct(satid_reconstruct(res))


# --------------------------------------------------------------------------- dense


@pytest.mark.parametrize("method", METHODS)
def test_dense_exact_rank_recovery(method):
    T = gen_low_rank_tucker((7, 6, 8), (2, 3, 2), seed=1)
    res = satid_dense(T, (2, 3, 2), method, seed=0)
    assert rel_err(recon(res), T) <= 1e-9


def test_dense_satellites_are_fibers(rng):
    T = rng.standard_normal((4, 5, 3))
    res = satid_dense(T, (2, 2, 2), "nuclear")
    for i, (J, S) in enumerate(zip(res.index_sets, res.satellites)):
        for c, b in enumerate(J):
            np.testing.assert_array_equal(S[:, c], fiber(T, i, b))


def test_dense_core_is_pinv_contraction(rng):
    T = rng.standard_normal((5, 4, 6))
    res = satid_dense(T, (2, 3, 2), "normmax")
    C = T
    for i, S in enumerate(res.satellites):
        C = mode_contract(C, i, np.linalg.pinv(S))
    np.testing.assert_allclose(res.core, C, atol=1e-12)


def test_error_bounded_by_projection_sum():
    for s in range(10):
        T = np.random.default_rng(s).standard_normal((6, 5, 7))
        res = satid_dense(T, (3, 2, 3), "normmax")
        rhs = 0.0
        for i, S in enumerate(res.satellites):
            A = flatten(T, [i])
            rhs += projection_residual(np.hstack([S, A]), list(range(S.shape[1])))
        assert np.linalg.norm(recon(res) - T) ** 2 <= rhs * (1 + 1e-10)


def test_column_multi_index_and_fiber():
    assert column_multi_index((2, 3, 4), 1, [0, 5, 7]) == [(0, 0), (1, 1), (1, 3)]
    T = np.arange(24.0).reshape(2, 3, 4)
    np.testing.assert_array_equal(fiber(T, 1, (1, 3)), T[1, :, 3])
    S = SparseTensor.from_dense(T)
    np.testing.assert_array_equal(fiber(S, 2, (1, 2)), T[1, 2, :])


# --------------------------------------------------------------------------- core / pinv


def test_solve_core_identity_and_sparse(rng):
    T = rng.standard_normal((3, 4, 2))
    np.testing.assert_allclose(solve_core(T, [np.eye(n) for n in T.shape]), T, atol=1e-13)
    X = rng.standard_normal((5, 4, 6)) * (rng.random((5, 4, 6)) < 0.3)
    sats = [rng.standard_normal((n, k)) for n, k in zip(X.shape, (2, 3, 2))]
    np.testing.assert_allclose(solve_core(SparseTensor.from_dense(X), sats), solve_core(X, sats), atol=1e-12)
    assert solve_core(SparseTensor.empty((3, 3)), [np.ones((3, 1))] * 2).shape == (1, 1)


def test_solve_core_mismatch():
    with pytest.raises(InvalidArgumentError):
        solve_core(np.zeros((3, 3)), [np.ones((2, 1)), np.ones((3, 1))])


def test_pinv_cases(rng):
    A = rng.standard_normal((6, 3))
    np.testing.assert_allclose(pinv(A), np.linalg.pinv(A), atol=1e-12)
    u = rng.standard_normal((5, 1))
    B = np.hstack([u, u])
    np.testing.assert_allclose(pinv(B) @ B, np.full((2, 2), 0.5), atol=1e-12)
    assert pinv(np.zeros((4, 0))).shape == (0, 4)


# --------------------------------------------------------------------------- CP sampling


def _cp(seed, shape=(5, 4, 6), p=3):
    g = np.random.default_rng(seed)
    return CPTensor([g.standard_normal((n, p)) for n in shape], g.standard_normal(p))


def test_cp_index_scores_match_dense():
    T = _cp(1)
    D = T.to_dense()
    # mode-1 columns of the flattening over (mode 2, mode 0): scores for the first factor index
    expect = np.sum(D ** 2, axis=(0, 2))
    np.testing.assert_allclose(cp_index_scores(T.weights, [T.factors[1], T.factors[2], T.factors[0]]), expect,
                               rtol=1e-10)
    A = np.array([[1.0, 0.0], [0.0, 2.0]])
    np.testing.assert_allclose(cp_index_scores([1.0, 1.0], [A]), [1.0, 4.0])


def test_cp_index_scores_sketch_full_rows_exact():
    T = _cp(2)
    S = KFJLT((6, 5), 64, 0)  # all 8 * 8 rows of the padded transform: an isometry
    fac = [T.factors[1], T.factors[2], T.factors[0]]
    np.testing.assert_allclose(cp_index_scores(T.weights, fac, S), cp_index_scores(T.weights, fac), rtol=1e-9)


def test_cp_marginal_chain_equals_joint():
    T = _cp(3)
    mode = 1
    joint = cp_joint_scores(T, mode)
    joint = joint / joint.sum()
    H = T.factors[mode]
    p0 = cp_index_scores(T.weights, [T.factors[0], T.factors[2], H])
    p0 = p0 / p0.sum()
    chain = np.zeros((5, 6))
    for b0 in range(5):
        p1 = cp_index_scores(T.weights * T.factors[0][b0], [T.factors[2], H])
        chain[b0] = p0[b0] * p1 / p1.sum()
    np.testing.assert_allclose(chain.reshape(-1), joint, atol=1e-10)


def test_cp_sample_index_cases():
    A = np.array([[0.0], [3.0], [0.0]])
    for s in range(5):
        assert cp_sample_index([1.0], [A], rng=s) == 1
    assert cp_sample_index([1.0], [A], rng=0, mask=np.array([False, True, False])) is None


def test_cp_sample_mode_first_pick_distribution():
    T = _cp(4, (3, 3, 4), 2)
    joint = cp_joint_scores(T, 2)
    p = joint / joint.sum()
    N = 6000
    counts = np.zeros(9)
    for s in range(N):
        J, _ = cp_sample_mode(T, 2, 1, None, seed=s)
        counts[np.ravel_multi_index(J[0], (3, 3))] += 1
    assert tv(counts / N, p) <= 0.03


def test_cp_rank_one_exact():
    g = np.random.default_rng(5)
    T = CPTensor([g.standard_normal((n, 1)) for n in (5, 4, 6)])
    res = satid_cp(T, (1, 1, 1), m=32, seed=0)
    assert rel_err(recon(res), T.to_dense()) <= 1e-12


def test_cp_exact_rank_recovery():
    T = _cp(6, (7, 8, 6), 3)
    res = satid_cp(T, (3, 3, 3), m=64, seed=1)
    assert res.ranks == (3, 3, 3)
    assert isinstance(res.core, CPTensor)
    assert rel_err(recon(res), T.to_dense()) <= 1e-9


def test_cp_satellites_are_fibers_and_distinct():
    T = _cp(7, (6, 6, 6), 8)
    res = satid_cp(T, (4, 4, 4), m=None, seed=2)
    for i, (J, S) in enumerate(zip(res.index_sets, res.satellites)):
        assert len(set(J)) == len(J)
        for c, b in enumerate(J):
            np.testing.assert_allclose(S[:, c], fiber(T, i, b), atol=1e-12)


def test_cp_ranks_zero():
    T = _cp(8)
    res = satid_cp(T, (0, 0, 0), seed=0)
    assert res.ranks == (0, 0, 0)
    assert np.all(recon(res) == 0)


def test_cp_dense_core_option():
    T = _cp(9)
    a = satid_cp(T, (2, 2, 2), m=None, seed=3)
    b = satid_cp(T, (2, 2, 2), m=None, seed=3, dense_core=True)
    np.testing.assert_allclose(b.core, a.core.to_dense(), atol=1e-12)


# --------------------------------------------------------------------------- sparse direct


def test_sparse_direct_diagonal():
    T = SparseTensor((3, 3, 3), [[i, i, i] for i in range(3)], [1.0, 3.0, 2.0])
    J, Ti, trace = sparse_select_direct(T, 0, 2)
    assert J == [(1, 1), (2, 2)]
    np.testing.assert_array_equal(Ti, [[0, 0], [3, 0], [0, 2]])
    assert trace == [9.0, 4.0]


def test_sparse_direct_zero_and_bad_method():
    J, Ti, _ = sparse_select_direct(SparseTensor.empty((3, 3, 3)), 1, 2)
    assert J == [] and Ti.shape == (3, 0)
    with pytest.raises(InvalidArgumentError):
        sparse_select_direct(SparseTensor.empty((3, 3)), 0, 1, "nuclear")


def test_sparse_direct_matches_dense_normmax():
    X = gen_sparse_random((6, 7, 5), 0.2, seed=1)
    D = X.to_dense()
    for i in range(3):
        J, _, _ = sparse_select_direct(X, i, 3)
        ref = satid_dense(D, [3 if j == i else 1 for j in range(3)], "normmax").index_sets[i]
        assert J == ref


def test_sparse_direct_downdate_matches_scratch():
    X = gen_sparse_random((8, 6, 7), 0.15, seed=2)
    J, Ti, trace = sparse_select_direct(X, 1, 4)
    Q = np.linalg.qr(Ti)[0]
    for s in range(1, len(J)):
        keys, d = sparse_direct_scores(X, 1, Q[:, :s])
        pos = [tuple(k) for k in keys].index(J[s])
        assert abs(d[pos] - trace[s]) <= 1e-10 * trace[0]
        assert abs(d.max() - trace[s]) <= 1e-10 * trace[0]


@pytest.mark.parametrize("method", ["normmax", "normsample"])
def test_sparse_exact_tucker_recovery(method):
    T = gen_sparse_tucker((9, 8, 10), (2, 2, 2), 0.5, seed=3)
    res = satid_sparse(T, (2, 2, 2), method, seed=1)
    assert rel_err(recon(res), T.to_dense()) <= 1e-9


def test_sparse_matches_dense_satid_error():
    X = gen_sparse_random((8, 8, 8), 0.1, seed=4)
    a = satid_sparse(X, (3, 3, 3), "normmax")
    b = satid_dense(X.to_dense(), (3, 3, 3), "normmax")
    assert a.index_sets == b.index_sets
    np.testing.assert_allclose(a.core, b.core, atol=1e-10)


# --------------------------------------------------------------------------- sparse sketched


def _first_pick_tv(X, mode, N, **kw):
    keys, d = sparse_direct_scores(X, mode)
    p = d / d.sum()
    lookup = {tuple(int(x) for x in k): c for c, k in enumerate(keys)}
    counts = np.zeros(len(keys))
    for s in range(N):
        J, _ = sparse_select_sketched(X, mode, 1, seed=s, **kw)
        counts[lookup[J[0]]] += 1
    return tv(counts / N, p)


def test_sketched_never_policy_is_exact_sampling():
    X = gen_sparse_random((5, 4, 6), 0.3, seed=5)
    assert _first_pick_tv(X, 0, 4000, policy="never") <= 0.05


def test_sketched_injective_is_exact_sampling():
    X = gen_sparse_random((5, 4, 6), 0.3, seed=6)
    assert _first_pick_tv(X, 2, 4000, m=None, policy="always") <= 0.05


def test_sketched_rank_one_and_zero():
    u, v, w = np.arange(1.0, 4.0), np.array([1.0, 0.0, 2.0]), np.array([0.5, 1.0])
    X = SparseTensor.from_dense(np.einsum("i,j,k->ijk", u, v, w))
    for s in range(5):
        res = satid_sparse(X, (1, 1, 1), "normsample", sketched=True, m=4, policy="always", seed=s)
        assert rel_err(recon(res), X.to_dense()) <= 1e-12
    J, Ti = sparse_select_sketched(SparseTensor.empty((3, 3, 3)), 0, 2, seed=0)
    assert J == [] and Ti.shape == (3, 0)


@pytest.mark.parametrize("policy", ["auto", "always", "never"])
@pytest.mark.parametrize("m", [None, 2, 16])
def test_sketched_selections_distinct_full_rank(policy, m):
    X = gen_sparse_random((9, 8, 10), 0.1, seed=7)
    for mode in range(3):
        J, Ti = sparse_select_sketched(X, mode, 5, m, seed=mode, policy=policy)
        assert len(set(J)) == len(J) == 5
        assert np.linalg.matrix_rank(Ti) == 5
        for c, b in enumerate(J):
            np.testing.assert_array_equal(Ti[:, c], fiber(X, mode, b))


def test_sketched_requires_normsample():
    with pytest.raises(InvalidArgumentError):
        satid_sparse(SparseTensor.empty((2, 2)), (1, 1), "normmax", sketched=True)
    with pytest.raises(InvalidArgumentError):
        sparse_select_sketched(SparseTensor.empty((2, 2)), 0, 1, policy="sometimes")


def test_sparse_sketched_error_reasonable():
    T = gen_sparse_tucker((12, 12, 12), (3, 3, 3), 0.5, seed=8)
    res = satid_sparse(T, (3, 3, 3), "normsample", sketched=True, seed=0)
    assert exact_rel_error(T, satid_reconstruct(res)).relative_error <= 1e-9
