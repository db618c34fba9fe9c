"""Shared brute-force oracles for the test suite.

Everything here is deliberately naive (explicit loops, full enumeration,
dense pseudoinverses) so it is independent of the library code it checks.
"""
import itertools

import numpy as np
import pytest


def loop_flatten(T, row_modes):
    """Flattening by explicit enumeration of every coordinate."""
    d = T.ndim
    cols = [j for j in range(d) if j not in row_modes]
    rshape = [T.shape[j] for j in row_modes]
    cshape = [T.shape[j] for j in cols]
    M = np.zeros((int(np.prod(rshape)), int(np.prod(cshape))))
    for idx in itertools.product(*[range(n) for n in T.shape]):
        r = np.ravel_multi_index([idx[j] for j in row_modes], rshape)
        c = np.ravel_multi_index([idx[j] for j in cols], cshape) if cols else 0
        M[r, c] = T[idx]
    return M


def loop_tucker(core, sats):
    """Tucker contraction by summing over every core entry."""
    out = np.zeros(tuple(U.shape[0] for U in sats))
    for kidx in itertools.product(*[range(n) for n in core.shape]):
        term = core[kidx]
        vec = sats[0][:, kidx[0]]
        for U, k in zip(sats[1:], kidx[1:]):
            vec = np.multiply.outer(vec, U[:, k])
        out += term * vec
    return out


def loop_cp(factors, w):
    shape = tuple(F.shape[0] for F in factors)
    out = np.zeros(shape)
    for idx in itertools.product(*[range(n) for n in shape]):
        out[idx] = sum(w[k] * np.prod([F[i, k] for F, i in zip(factors, idx)]) for k in range(len(w)))
    return out


def projection_residual(A, cols):
    """||A - P A||_F^2 with P the orthogonal projector onto span(A[:, cols])."""
    if not len(cols):
        return float(np.sum(A * A))
    P = A[:, list(cols)] @ np.linalg.pinv(A[:, list(cols)])
    R = A - P @ A
    return float(np.sum(R * R))


def brute_norm_scores(A, J):
    """Residual column norms after projecting out A[:, J], via pinv."""
    if not len(J):
        return np.sum(A * A, axis=0)
    P = A[:, list(J)] @ np.linalg.pinv(A[:, list(J)])
    R = A - P @ A
    return np.sum(R * R, axis=0)


def brute_nuclear_gain(A, J):
    """Reduction of ||A - P A||^2 from adding each candidate column to J."""
    base = projection_residual(A, J)
    return np.array([base - projection_residual(A, list(J) + [i]) if i not in J else -np.inf
                     for i in range(A.shape[1])])


def tv(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def rel_err(A, B):
    return float(np.linalg.norm(np.asarray(A) - np.asarray(B)) / np.linalg.norm(np.asarray(B)))


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


# --------------------------------------------------------------------------- acceptance reporting

ACCEPTANCE_LINES = []


def acceptance_check(label, ok, detail):
    """Record one acceptance line (printed in the terminal summary), then assert."""
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
