"""File formats: FROSTT ``.tns`` text, CP factor directories, dense ``.npy``.

Floats are written with 17 significant digits so text round trips are exact.
FROSTT coordinates are 1-based on disk and 0-based in memory.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .exceptions import FormatError, InvalidArgumentError, ParseError
from .tensors import CPTensor, SparseTensor

FLOAT_FMT = "%.17g"


def _parse_line(tokens, lineno, d):
    if d is not None and len(tokens) != d + 1:
        raise ParseError(f"expected {d + 1} fields, found {len(tokens)}", lineno)
    if len(tokens) < 2:
        raise ParseError("need at least one coordinate and a value", lineno)
    try:
        idx = [int(t) for t in tokens[:-1]]
    except ValueError:
        raise ParseError(f"non-integer coordinate in {' '.join(tokens)!r}", lineno) from None
    try:
        val = float(tokens[-1])
    except ValueError:
        raise ParseError(f"bad value {tokens[-1]!r}", lineno) from None
    if min(idx) < 1:
        raise ParseError("coordinates are 1-based and must be positive", lineno)
    return idx, val


def parse_frostt(path, shape=None) -> SparseTensor:
    """Read a FROSTT coordinate file; duplicates are summed, zeros dropped.

    ``shape`` overrides the per-mode maximum coordinate and must cover it.
    """
    coords, vals = [], []
    d = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            idx, val = _parse_line(s.split(), lineno, d)
            d = len(idx)
            coords.append(idx)
            vals.append(val)
    if d is None:
        if shape is None:
            raise ParseError("empty file and no shape given")
        return SparseTensor.empty(tuple(shape))
    C = np.asarray(coords, dtype=np.int64) - 1
    inferred = tuple(int(x) + 1 for x in C.max(axis=0))
    if shape is None:
        shape = inferred
    shape = tuple(int(n) for n in shape)
    if len(shape) != d:
        raise InvalidArgumentError(f"shape has {len(shape)} modes but the file has {d}")
    if any(n < m for n, m in zip(shape, inferred)):
        raise InvalidArgumentError(f"shape {shape} does not cover coordinates up to {inferred}")
    return SparseTensor(shape, C, np.asarray(vals, dtype=float))


def write_frostt(path, T: SparseTensor) -> None:
    with open(path, "w") as fh:
        for c, v in zip(T.coords + 1, T.values):
            fh.write(" ".join(str(int(x)) for x in c) + " " + FLOAT_FMT % v + "\n")


def write_matrix(path, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        for row in M:
            fh.write(" ".join(FLOAT_FMT % x for x in row) + "\n")


def read_matrix(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split()
            if not s:
                continue
            try:
                rows.append([float(t) for t in s])
            except ValueError:
                raise ParseError(f"bad number in {path}", lineno) from None
            if len(rows[-1]) != len(rows[0]):
                raise FormatError(f"{path}: ragged row at line {lineno}")
    if not rows:
        raise FormatError(f"{path}: empty matrix file")
    return np.asarray(rows)


def write_indices(path, index_sets) -> None:
    """One index (int) or multi-index (tuple) per line, 0-based."""
    with open(path, "w") as fh:
        for J in index_sets:
            if isinstance(J, (tuple, list, np.ndarray)):
                fh.write(" ".join(str(int(x)) for x in J) + "\n")
            else:
                fh.write(f"{int(J)}\n")


def load_cp_factors(directory) -> CPTensor:
    d = Path(directory)
    files = []
    i = 1
    while (d / f"mode{i}.txt").exists():
        files.append(d / f"mode{i}.txt")
        i += 1
    if not files:
        raise FormatError(f"no mode1.txt in {directory}")
    factors = [read_matrix(f) for f in files]
    p = factors[0].shape[1]
    for f, F in zip(files, factors):
        if F.shape[1] != p:
            raise FormatError(f"{f.name} has {F.shape[1]} columns, expected {p}")
    w = None
    if (d / "weights.txt").exists():
        w = read_matrix(d / "weights.txt").reshape(-1)
        if w.shape[0] != p:
            raise FormatError(f"weights.txt has {w.shape[0]} entries, expected {p}")
    return CPTensor(factors, w)


def write_cp_factors(directory, T: CPTensor) -> None:
    os.makedirs(directory, exist_ok=True)
    for i, F in enumerate(T.factors, 1):
        write_matrix(Path(directory) / f"mode{i}.txt", F)
    write_matrix(Path(directory) / "weights.txt", T.weights[:, None])


def load_dense(path) -> np.ndarray:
    try:
        A = np.load(path, allow_pickle=False)
    except (ValueError, OSError) as exc:
        raise FormatError(f"cannot read dense tensor {path}: {exc}") from None
    if A.ndim < 1:
        raise FormatError("dense tensor must have at least one mode")
    return np.asarray(A, dtype=float)


def load_tensor(path, fmt: str, shape=None):
    fmt = fmt.lower()
    if fmt == "frostt":
        return parse_frostt(path, shape)
    if fmt == "dense":
        return load_dense(path)
    if fmt == "cp":
        return load_cp_factors(path)
    raise InvalidArgumentError(f"unknown format {fmt!r}")


def _contract(T: SparseTensor, modes) -> SparseTensor:
    keep = [j for j in range(T.ndim) if j not in modes]
    if not keep:
        raise InvalidArgumentError("cannot contract every mode")
    return SparseTensor(tuple(T.shape[j] for j in keep), T.coords[:, keep], T.values)


def subsample_sparse(T: SparseTensor, strides, contract_modes=(), contract_first: bool = False) -> SparseTensor:
    """Keep coordinates divisible by the per-mode stride, re-indexed by division.

    A mode of extent ``n`` with stride ``s`` becomes extent ``n // s + 1``.
    ``contract_modes`` are summed out, either after the subsampling (their
    stride filters first) or before it with ``contract_first``.
    """
    strides = [int(s) for s in strides]
    if len(strides) != T.ndim or min(strides) < 1:
        raise InvalidArgumentError("need one stride >= 1 per mode")
    contract_modes = sorted({int(j) for j in contract_modes})
    if any(not 0 <= j < T.ndim for j in contract_modes):
        raise InvalidArgumentError(f"contract modes {contract_modes} out of range")
    if contract_first and contract_modes:
        T = _contract(T, contract_modes)
        strides = [s for j, s in enumerate(strides) if j not in contract_modes]
        contract_modes = []
    st = np.asarray(strides, dtype=np.int64)
    keep = np.all(T.coords % st == 0, axis=1)
    shape = tuple(n // s + 1 if s > 1 else n for n, s in zip(T.shape, strides))
    out = SparseTensor(shape, T.coords[keep] // st, T.values[keep])
    return _contract(out, contract_modes) if contract_modes else out
