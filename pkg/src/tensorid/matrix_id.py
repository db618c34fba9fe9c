"""Matrix interpolative decomposition by QR-based column selection.

Three greedy "QR-based" selectors share one loop: pick a column from its
residual score, orthonormalize it into the running basis, downdate the scores.

* norm maximization: argmax of the residual squared column norm (column-pivoted QR)
* norm sampling: sample proportionally to the residual squared norm (randomly pivoted QR)
* nuclear maximization: argmax of the one-step reduction of the total residual
  ``||A - Q Q^T A||_F^2``, computed from the Gram matrix

plus uniform sampling as a structure-free baseline. Selections return fewer
than ``k`` indices when the residual is exhausted.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgumentError
from .rng import SketchSeed, as_generator, as_seed
from .sketch import make_sketch

DEFAULT_TOL = 1e-12
NEAR_TIE = 1e-9


class Method(str, enum.Enum):
    NORM_MAX = "normmax"
    NORM_SAMPLE = "normsample"
    NUCLEAR = "nuclear"
    UNIFORM = "uniform"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidArgumentError(f"unknown selection method {value!r}") from None


@dataclass
class SelectionResult:
    """Selected column indices ``J`` and coefficients ``X`` with ``A ~ A[:, J] @ X``."""

    indices: list
    coeffs: np.ndarray | None = None
    scores: list = field(default_factory=list)

    def __len__(self):
        return len(self.indices)


def _check_k(k, n):
    if k < 0 or k > n:
        raise InvalidArgumentError(f"cannot select {k} of {n} columns")


def _orthonormalize(v, Q):
    """CGS2 step: project ``v`` off the columns of ``Q`` twice and normalize."""
    if Q.shape[1]:
        v = v - Q @ (Q.T @ v)
        v = v - Q @ (Q.T @ v)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return None
    return v / nrm


def _qr_select(B, k, tol, pick):
    B = np.asarray(B, dtype=float)
    m, n = B.shape
    _check_k(k, n)
    total = float(np.sum(B * B))
    scores = np.sum(B * B, axis=0)
    Q = np.zeros((m, 0))
    J, trace = [], []
    if total == 0:
        return SelectionResult(J, None, trace)
    for _ in range(k):
        d = np.maximum(scores, 0.0)
        if d.max() <= tol * total:
            break
        j = pick(d)
        q = _orthonormalize(B[:, j], Q)
        if q is None:
            break
        J.append(int(j))
        trace.append(float(d[j]))
        Q = np.column_stack([Q, q])
        scores = scores - (q @ B) ** 2
        scores[J] = 0.0
    return SelectionResult(J, None, trace)


def norm_max_select(B, k: int, tol: float = DEFAULT_TOL) -> SelectionResult:
    """Greedy column-pivoted QR; ties go to the lowest index."""
    return _qr_select(B, k, tol, np.argmax)


def norm_sample_select(B, k: int, tol: float = DEFAULT_TOL, rng=None) -> SelectionResult:
    """Randomly pivoted QR: sample each pivot proportionally to its residual norm."""
    g = as_generator(rng)
    return _qr_select(B, k, tol, lambda d: g.choice(d.shape[0], p=d / d.sum()))


def residual_scores(B, J) -> np.ndarray:
    """Squared residual norms of all columns after projecting out ``B[:, J]`` (from scratch)."""
    B = np.asarray(B, dtype=float)
    if not len(J):
        return np.sum(B * B, axis=0)
    Q, _ = np.linalg.qr(B[:, list(J)])
    R = B - Q @ (Q.T @ B)
    return np.sum(R * R, axis=0)


def _gram_select(K, k, tol, pick, score):
    K = np.array(K, dtype=float)
    n = K.shape[0]
    if K.shape != (n, n):
        raise InvalidArgumentError("Gram matrix must be square")
    _check_k(k, n)
    tr = float(np.trace(K))
    if tr < -1e-10 * max(np.abs(K).max(initial=0.0), 1.0):
        raise InvalidArgumentError("Gram matrix is not positive semidefinite")
    J, trace = [], []
    if tr <= 0:
        return SelectionResult(J, None, trace)
    for _ in range(k):
        diag = np.diag(K).copy()
        valid = diag > tol * tr
        if J:
            valid[J] = False
        if not valid.any():
            break
        s = np.where(valid, score(K, diag), -np.inf)
        j = pick(s, valid)
        trace.append(float(s[j]))
        J.append(int(j))
        col = K[:, j].copy()
        K -= np.outer(col, col) / col[j]
    return SelectionResult(J, None, trace)


def nuclear_max_select(B=None, k: int = 1, tol: float = DEFAULT_TOL, K=None) -> SelectionResult:
    """Greedy selection maximizing ``||K[:, j]||^2 / K[j, j]`` with Gram deflation.

    Pass either the matrix ``B`` (its Gram ``B^T B`` is formed) or ``K``.
    """
    if K is None:
        if B is None:
            raise InvalidArgumentError("need B or K")
        B = np.asarray(B, dtype=float)
        K = B.T @ B
    K = np.asarray(K, dtype=float)
    if not np.allclose(K, K.T, atol=1e-10 * max(np.abs(K).max(initial=0.0), 1.0)):
        raise InvalidArgumentError("Gram matrix is not symmetric")
    state = {}

    def score(K, diag):
        state["diag"] = diag
        return np.sum(K * K, axis=0) / np.where(diag > 0, diag, 1.0)

    def pick(s, valid):
        # near-ties (e.g. a rank-one residual, where every column scores the
        # same) go to the column with the largest residual norm, whose
        # direction is the most accurately known
        near = s >= s.max() * (1 - NEAR_TIE)
        return int(np.argmax(np.where(near, state["diag"], -np.inf)))

    return _gram_select(K, k, tol, pick, score)


def gram_select(K, k: int, method, tol: float = DEFAULT_TOL, rng=None) -> SelectionResult:
    """Column selection from the Gram matrix alone (pivoted-Cholesky form)."""
    method = Method.parse(method)
    if method is Method.NUCLEAR:
        return nuclear_max_select(K=K, k=k, tol=tol)
    if method is Method.UNIFORM:
        return uniform_select(np.shape(K)[0], k, rng)
    if method is Method.NORM_MAX:
        pick = lambda s, valid: int(np.argmax(s))
    else:
        g = as_generator(rng)

        def pick(s, valid):
            p = np.where(valid, s, 0.0)
            return int(g.choice(p.shape[0], p=p / p.sum()))
    return _gram_select(K, k, tol, pick, lambda K, diag: diag)


def uniform_select(n: int, k: int, rng=None) -> SelectionResult:
    _check_k(k, n)
    g = as_generator(rng)
    return SelectionResult([int(i) for i in g.choice(n, size=k, replace=False)])


def select_columns(B, k: int, method, tol: float = DEFAULT_TOL, rng=None) -> SelectionResult:
    method = Method.parse(method)
    if method is Method.NORM_MAX:
        return norm_max_select(B, k, tol)
    if method is Method.NORM_SAMPLE:
        return norm_sample_select(B, k, tol, rng)
    if method is Method.NUCLEAR:
        return nuclear_max_select(B, k, tol)
    return uniform_select(np.shape(B)[1], k, rng)


def interpolation_coeffs(A, J) -> np.ndarray:
    """Least-squares coefficients ``X = argmin ||A[:, J] X - A||_F``.

    Singular values below ``max(shape) * eps * sigma_max`` of ``A[:, J]`` are
    truncated, giving the minimum-norm solution when ``A[:, J]`` is rank
    deficient.
    """
    A = np.asarray(A, dtype=float)
    J = list(J)
    if not J:
        return np.zeros((0, A.shape[1]))
    X, *_ = np.linalg.lstsq(A[:, J], A, rcond=None)
    return X


def coeffs_from_gram(K, J) -> np.ndarray:
    """Same coefficients as :func:`interpolation_coeffs`, using only ``K = A^T A``."""
    K = np.asarray(K, dtype=float)
    J = list(J)
    if not J:
        return np.zeros((0, K.shape[0]))
    KJ = K[np.ix_(J, J)]
    w, V = np.linalg.eigh(KJ)
    cut = max(w.max(initial=0.0), 0.0) * len(J) * np.finfo(float).eps * 10
    inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    return (V * inv) @ V.T @ K[J]


def matrix_id(A, k: int, method, tol: float = DEFAULT_TOL, rng=None) -> SelectionResult:
    """Select ``k`` columns of ``A`` and solve for the interpolation coefficients."""
    sel = select_columns(A, k, method, tol, rng)
    sel.coeffs = interpolation_coeffs(A, sel.indices)
    return sel


def sketched_matrix_id(A, k: int, method, sketch="gaussian", m: int | None = None,
                       seed=None, tol: float = DEFAULT_TOL, refit: bool = False) -> SelectionResult:
    """Select columns of ``A`` from one sketch ``B = S A`` generated up front.

    ``sketch`` is a kind (``"gaussian"``, ``"srht"``, ``"countsketch"``), a
    matrix, or ``None`` for no sketch. Coefficients are the sketched
    least-squares solution on ``B`` unless ``refit`` is set, in which case they
    are recomputed on ``A``.
    """
    A = np.asarray(A, dtype=float)
    key = as_seed(seed)
    if sketch is None:
        B = A
    elif isinstance(sketch, str):
        m = max(4 * k, 64) if m is None else m
        B = make_sketch(sketch, m, A.shape[0], key).apply(A)
    else:
        B = np.asarray(sketch, dtype=float) @ A
    sel = select_columns(B, k, method, tol, SketchSeed(key.seed, key.stream + 1).generator())
    sel.coeffs = interpolation_coeffs(A if refit else B, sel.indices)
    return sel
