"""Command line driver: load a tensor, decompose it, write factors and a JSON summary.

    tensorid coreid --input T.tns --format frostt --rank 5,5,5 --method normmax --seed 0 --out run/
    tensorid satid  --input cp_dir --format cp --rank 8,8,8,8 --sketch m=128 --seed 1 --out run/
    tensorid error  --input T.tns --format frostt --approx run/ --estimate-error 200 --seed 3 --out err/

Output files: ``indices_mode{i}.txt`` (0-based; a multi-index is one
space-separated line), ``satellite_mode{i}.txt``, the core (``core.tns``
for a sparse core, ``core.txt`` for a dense one, ``core/`` for a CP one)
and ``summary.json``. Everything except the ``timings`` block of the summary
is a function of the inputs and the seed. Failures print a JSON object on
stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .coreid import coreid_cp, coreid_dense, coreid_reconstruct, coreid_sparse
from .evaluation import exact_rel_error, hosvd_baseline, sketched_rel_error
from .exceptions import InvalidArgumentError, TensorIDError
from .matrix_id import Method
from .satid import satid_cp, satid_dense, satid_reconstruct, satid_sparse
from .synthetic import gen_low_rank_tucker, gen_sparse_random, gen_sparse_tucker, gen_synthetic_cp
from .tensors import CPTensor, SparseTensor, TuckerTensor, tensor_shape

SCHEMA = 1
TASKS = ("coreid", "satid", "hosvd", "error")
SKETCH_KINDS = ("gaussian", "srht", "countsketch")


@dataclass
class RunConfig:
    task: str
    input: str
    format: str = "frostt"
    shape: tuple | None = None
    ranks: tuple = ()
    method: str = "normmax"
    sketch: dict = field(default_factory=dict)  # {"m": int} or {"m1":, "m2":, "m3":}
    sketch_kind: str = "gaussian"
    mode_order: tuple | None = None
    seed: int | None = None
    out: str = "."
    error_estimate_dim: int = 0  # 0 = exact error
    approx: str | None = None  # output directory of an earlier run (task "error")

    def randomized(self) -> bool:
        return (Method.parse(self.method) in (Method.NORM_SAMPLE, Method.UNIFORM) or bool(self.sketch)
                or self.error_estimate_dim > 0)


# --------------------------------------------------------------------------- parsing helpers


def parse_int_list(text) -> tuple:
    try:
        return tuple(int(t) for t in str(text).replace(" ", "").split(",") if t)
    except ValueError:
        raise InvalidArgumentError(f"expected comma separated integers, got {text!r}") from None


def parse_sketch(text) -> dict:
    """``m=128`` or ``m1=400,m2=400,m3=2000``."""
    if not text:
        return {}
    out = {}
    for part in str(text).split(","):
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or key not in ("m", "m1", "m2", "m3"):
            raise InvalidArgumentError(f"bad sketch spec {text!r}")
        try:
            out[key] = int(val)
        except ValueError:
            raise InvalidArgumentError(f"bad sketch dimension {val!r}") from None
        if out[key] < 1:
            raise InvalidArgumentError("sketch dimensions must be positive")
    if "m" in out and len(out) > 1:
        raise InvalidArgumentError("give either m= or m1=,m2=,m3=")
    if "m" not in out and len(out) != 3:
        raise InvalidArgumentError("network sketch needs all of m1, m2, m3")
    return out


def _network_dims(sketch):
    if not sketch:
        return (400, 400, 2000)
    if "m" in sketch:
        return (sketch["m"],) * 3
    return (sketch["m1"], sketch["m2"], sketch["m3"])


# --------------------------------------------------------------------------- writers


def write_dense_core(path, C) -> None:
    C = np.asarray(C, dtype=float)
    with open(path, "w") as fh:
        fh.write("# shape " + " ".join(str(n) for n in C.shape) + "\n")
        rows = C.reshape(C.shape[0], -1) if C.ndim > 1 else C[:, None]
        for row in rows:
            fh.write(" ".join(io.FLOAT_FMT % x for x in row) + "\n")


def read_dense_core(path) -> np.ndarray:
    with open(path) as fh:
        head = fh.readline().split()
        if head[:2] != ["#", "shape"]:
            raise InvalidArgumentError(f"{path}: missing '# shape' header")
        shape = tuple(int(t) for t in head[2:])
        vals = np.array([float(t) for line in fh for t in line.split()])
    if vals.size != math.prod(shape):
        raise InvalidArgumentError(f"{path}: {vals.size} values for shape {shape}")
    return vals.reshape(shape)


def write_sparse_core(path, T: SparseTensor) -> None:
    with open(path, "w") as fh:
        fh.write("# shape " + " ".join(str(n) for n in T.shape) + "\n")
    with open(path, "a") as fh:
        for c, v in zip(T.coords + 1, T.values):
            fh.write(" ".join(str(int(x)) for x in c) + " " + io.FLOAT_FMT % v + "\n")


def read_sparse_core(path) -> SparseTensor:
    with open(path) as fh:
        head = fh.readline().split()
    shape = tuple(int(t) for t in head[2:]) if head[:2] == ["#", "shape"] else None
    return io.parse_frostt(path, shape)


def write_core(out: Path, core) -> str:
    if isinstance(core, SparseTensor):
        write_sparse_core(out / "core.tns", core)
        return "core.tns"
    if isinstance(core, CPTensor):
        io.write_cp_factors(out / "core", core)
        return "core"
    write_dense_core(out / "core.txt", core)
    return "core.txt"


def read_approx(directory, d: int) -> TuckerTensor:
    base = Path(directory)
    sats = [io.read_matrix(base / f"satellite_mode{i + 1}.txt") for i in range(d)]
    if (base / "core.tns").exists():
        core = read_sparse_core(base / "core.tns")
    elif (base / "core").is_dir():
        core = io.load_cp_factors(base / "core")
    elif (base / "core.txt").exists():
        core = read_dense_core(base / "core.txt")
    else:
        raise InvalidArgumentError(f"no core file in {directory}")
    return TuckerTensor(core, sats)


def write_outputs(out: Path, index_sets, satellites, core) -> str:
    for i, (J, U) in enumerate(zip(index_sets, satellites), 1):
        if J is not None:
            io.write_indices(out / f"indices_mode{i}.txt", J)
        io.write_matrix(out / f"satellite_mode{i}.txt", U)
    return write_core(out, core)


# --------------------------------------------------------------------------- tasks


def _decompose(cfg: RunConfig, T):
    """Run the configured decomposition; returns (index sets, TuckerTensor)."""
    ranks, sk = cfg.ranks, cfg.sketch
    if cfg.task == "hosvd":
        A = hosvd_baseline(T if not isinstance(T, SparseTensor) else T.to_dense(), ranks, cfg.mode_order)
        return [None] * len(ranks), A
    if cfg.task == "coreid":
        if isinstance(T, SparseTensor):
            res = coreid_sparse(T, ranks, cfg.method, _network_dims(sk), cfg.mode_order, cfg.seed)
        elif isinstance(T, CPTensor):
            res = coreid_cp(T, ranks, cfg.method, sk.get("m"), mode_order=cfg.mode_order, seed=cfg.seed)
        else:
            kind = cfg.sketch_kind if sk else None
            res = coreid_dense(T, ranks, cfg.method, kind, sk.get("m"), cfg.mode_order, cfg.seed)
        return res.index_sets, coreid_reconstruct(T, res)
    if cfg.mode_order is not None:
        raise InvalidArgumentError("satid selects every mode independently; --mode-order does not apply")
    if isinstance(T, SparseTensor):
        res = satid_sparse(T, ranks, cfg.method, sketched=bool(sk), m=sk.get("m", 16), seed=cfg.seed)
    elif isinstance(T, CPTensor):
        if Method.parse(cfg.method) is not Method.NORM_SAMPLE:
            raise InvalidArgumentError("CP satid samples fibers by norm; use --method normsample")
        res = satid_cp(T, ranks, sk.get("m"), cfg.seed)
    else:
        res = satid_dense(T, ranks, cfg.method, cfg.seed)
    return res.index_sets, satid_reconstruct(res)


def _error(cfg: RunConfig, T, approx) -> dict:
    if cfg.error_estimate_dim > 0:
        rep = sketched_rel_error(T, approx, cfg.error_estimate_dim, cfg.seed)
    else:
        rep = exact_rel_error(T, approx)
    return rep.as_dict()


def validate(cfg: RunConfig) -> None:
    if cfg.task not in TASKS:
        raise InvalidArgumentError(f"unknown task {cfg.task!r}")
    Method.parse(cfg.method)
    if cfg.sketch_kind not in SKETCH_KINDS:
        raise InvalidArgumentError(f"unknown sketch kind {cfg.sketch_kind!r}")
    if cfg.error_estimate_dim < 0:
        raise InvalidArgumentError("--estimate-error must be nonnegative")
    if cfg.task == "error" and cfg.approx is None:
        raise InvalidArgumentError("task 'error' needs --approx DIR")
    if cfg.task != "error" and not cfg.ranks:
        raise InvalidArgumentError("--rank is required")
    if cfg.seed is None and cfg.randomized():
        raise InvalidArgumentError("a randomized method needs --seed")


def execute(cfg: RunConfig) -> dict:
    """Run a validated config, write artifacts and return the summary."""
    validate(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings = {}
    t0 = time.perf_counter()
    T = io.load_tensor(cfg.input, cfg.format, cfg.shape)
    timings["load"] = time.perf_counter() - t0
    shape = tensor_shape(T)
    if cfg.ranks and len(cfg.ranks) != len(shape):
        raise InvalidArgumentError(f"{len(cfg.ranks)} ranks for a tensor of order {len(shape)}")
    summary = {"schema": SCHEMA, "task": cfg.task, "input": str(cfg.input), "format": cfg.format,
               "shape": list(shape), "seed": cfg.seed}
    if isinstance(T, SparseTensor):
        summary["nnz"] = int(T.nnz)
    if cfg.task == "error":
        t0 = time.perf_counter()
        approx = read_approx(cfg.approx, len(shape))
        timings["loadApprox"] = time.perf_counter() - t0
        summary["ranks"] = [int(U.shape[1]) for U in approx.satellites]
    else:
        summary.update(ranks=list(cfg.ranks), method=Method.parse(cfg.method).value,
                       sketch=dict(cfg.sketch) or None,
                       modeOrder=list(cfg.mode_order) if cfg.mode_order is not None else None)
        if cfg.sketch and not isinstance(T, (SparseTensor, CPTensor)):
            summary["sketchKind"] = cfg.sketch_kind
        t0 = time.perf_counter()
        index_sets, approx = _decompose(cfg, T)
        timings["decompose"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        summary["coreFile"] = write_outputs(out, index_sets, approx.satellites, approx.core)
        timings["write"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    summary["error"] = _error(cfg, T, approx)
    timings["error"] = time.perf_counter() - t0
    summary["timings"] = timings
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _report(exc: Exception) -> int:
    code = getattr(exc, "code", None) or ("io-error" if isinstance(exc, OSError) else "error")
    err = {"error": code, "type": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "line", None) is not None:
        err["line"] = exc.line
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return 2 if code in ("invalid-argument", "parse-error", "format-error") else 1


def run(config: RunConfig) -> int:
    """Execute ``config``; returns the process exit code."""
    try:
        execute(config)
    except (TensorIDError, OSError, ValueError, MemoryError, np.linalg.LinAlgError) as exc:
        return _report(exc)
    return 0


# --------------------------------------------------------------------------- auxiliary commands


def generate(args) -> None:
    """Synthetic inputs: ``cp`` (mixture CP factors), ``tucker`` (dense .npy), ``sparse`` (.tns)."""
    shape = parse_int_list(args.shape) if args.shape else None
    if args.kind == "cp":
        T = gen_synthetic_cp(args.n, args.p, args.r, args.sigma, args.zero_row_frac, args.d,
                             seed=args.seed)
        io.write_cp_factors(args.out, T)
    elif args.kind == "tucker":
        if shape is None or not args.rank:
            raise InvalidArgumentError("tucker generation needs --shape and --rank")
        np.save(args.out, gen_low_rank_tucker(shape, parse_int_list(args.rank), args.seed))
    elif args.kind == "sparse":
        if shape is None:
            raise InvalidArgumentError("sparse generation needs --shape")
        if args.rank:
            T = gen_sparse_tucker(shape, parse_int_list(args.rank), args.fill, args.seed)
        else:
            T = gen_sparse_random(shape, args.fill, args.seed)
        io.write_frostt(args.out, T)
    else:
        raise InvalidArgumentError(f"unknown generator {args.kind!r}")


def subsample(args) -> None:
    T = io.parse_frostt(args.input, parse_int_list(args.shape) if args.shape else None)
    S = io.subsample_sparse(T, parse_int_list(args.strides), parse_int_list(args.contract or ""),
                            args.contract_first)
    io.write_frostt(args.out, S)
    json.dump({"shape": list(S.shape), "nnz": int(S.nnz)}, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


# --------------------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tensorid", description="CoreID / SatID tensor interpolative decompositions")
    sub = p.add_subparsers(dest="task", required=True)
    for task in TASKS:
        s = sub.add_parser(task)
        s.add_argument("--input", required=True)
        s.add_argument("--format", choices=("frostt", "dense", "cp"), default="frostt")
        s.add_argument("--shape")
        s.add_argument("--rank")
        s.add_argument("--method", default="normmax")
        s.add_argument("--sketch", help="m=M, or m1=..,m2=..,m3=.. for the sparse CoreID network")
        s.add_argument("--sketch-kind", default="gaussian", help="dense CoreID sketch: " + "|".join(SKETCH_KINDS))
        s.add_argument("--mode-order")
        s.add_argument("--seed", type=int)
        s.add_argument("--out", required=True)
        s.add_argument("--estimate-error", type=int, default=0, metavar="M")
        if task == "error":
            s.add_argument("--approx", required=True, help="output directory of a previous run")
    g = sub.add_parser("generate")
    g.add_argument("kind", choices=("cp", "tucker", "sparse"))
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--shape")
    g.add_argument("--rank")
    g.add_argument("--fill", type=float, default=0.05)
    g.add_argument("--n", type=int, default=32)
    g.add_argument("--p", type=int, default=200)
    g.add_argument("--r", type=int, default=8)
    g.add_argument("--d", type=int, default=4)
    g.add_argument("--sigma", type=float, default=0.2)
    g.add_argument("--zero-row-frac", type=float, default=0.25)
    s = sub.add_parser("subsample")
    s.add_argument("--input", required=True)
    s.add_argument("--shape")
    s.add_argument("--strides", required=True)
    s.add_argument("--contract", help="modes (0-based) to sum out")
    s.add_argument("--contract-first", action="store_true")
    s.add_argument("--out", required=True)
    return p


def config_from_args(args) -> RunConfig:
    return RunConfig(
        task=args.task, input=args.input, format=args.format,
        shape=parse_int_list(args.shape) if args.shape else None,
        ranks=parse_int_list(args.rank) if args.rank else (),
        method=args.method, sketch=parse_sketch(args.sketch), sketch_kind=args.sketch_kind,
        mode_order=parse_int_list(args.mode_order) if args.mode_order else None,
        seed=args.seed, out=args.out, error_estimate_dim=args.estimate_error,
        approx=getattr(args, "approx", None))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.task == "generate":
            generate(args)
            return 0
        if args.task == "subsample":
            subsample(args)
            return 0
        cfg = config_from_args(args)
    except (TensorIDError, OSError, ValueError) as exc:
        return _report(exc)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
