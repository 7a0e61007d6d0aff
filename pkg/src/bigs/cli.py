"""Command-line front end: single runs, stability tables, and figure data.

Commands
  biortho / rbiortho   one biorthogonalization run on a generated pair,
                       summary row (and optional per-iteration file)
  lanczos / rlanczos   one eigensolver run, leading Ritz values + residuals
  table1               14 methods on the ill-conditioned pair (n=10^4, m=200)
  table2               14 methods on a Gaussian pair (n=10^4, m=500)
  table4               uniform-high vs mixed precision, 6 randomized methods
  fig1                 Monte Carlo sketched inner products of orthonormal pairs
  fig5                 per-iteration Ritz residuals, both eigensolver drivers

All outputs are UTF-8 CSV with LF line endings and 17-significant-digit
numeric cells. A config file of key = value lines may supply any flag;
explicit flags win. Exit codes: 0 success, 2 configuration error, 3 I/O
error, 4 numerical breakdown in a single-run command.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, fields

import numpy as np
import scipy.io
import scipy.sparse

from .biortho import BiorthConfig, Variant, two_sided_gs
from .diagnostics import biorth_loss, cond2, decomposition_error
from .errors import ArgumentError, DegenerateInputError, NearBreakdownError
from .lanczos import matrix_oracle, nonsym_lanczos, rand_nonsym_lanczos, ritz_triplets
from .rbiortho import (
    PrecisionMode,
    PrecisionPolicy,
    RBiorthConfig,
    RVariant,
    randomized_two_sided_gs,
    sketch_biorth_error,
)
from .sketching import (
    Scaling,
    SketchKind,
    default_sketch_size,
    default_zeta,
    new_gaussian,
    new_identity,
    new_sparse_sign,
)
from .testmatrices import (
    SpectrumSpec,
    gen_gaussian_pair,
    gen_ill_conditioned,
    gen_prescribed_spectrum,
    leading_decay_spectrum,
    sketched_orthogonal_ip_experiment,
)

__all__ = ["RunConfig", "run", "main"]

_COMMANDS = (
    "biortho", "rbiortho", "lanczos", "rlanczos",
    "fig1", "table1", "table2", "table4", "fig5",
)

_MM_HEADER = "%%matrixmarket matrix coordinate real general"

_SUMMARY_HEADER = ("method", "time_s", "cond_Q", "cond_P", "err_X", "err_Y", "biorth")

# Row order of the stability tables: deterministic methods, then randomized.
_TABLE_METHODS = (
    "MGS", "MGS2", "CGS", "CGS2", "CGS3", "CGS_O", "CGS_O2",
    "rMGS", "rMGS2", "rCGS", "rCGS2", "rCGS3", "rCGS_O", "rCGS_O2",
)
_TABLE4_METHODS = ("rMGS2", "rCGS3", "rCGS_O2", "mp-rMGS2", "mp-rCGS3", "mp-rCGS_O2")


@dataclass
class RunConfig:
    """One fully resolved invocation."""

    command: str
    n: int = 0
    m: int = 0
    s: int = 0            # 0 = use default_sketch_size(n, m)
    zeta: int = 0         # 0 = use default_zeta(s)
    variant: str = ""
    passes: int = 0
    sketch_kind: str = "sparse_sign"
    seed: int = 1
    precision: str = "uniform_high"
    input_path: str = ""
    out_path: str = ""
    matrix: str = "illcond"   # input family for single biortho runs
    trials: int = 100
    s_grid: str = "25:25:1000"
    kinds: str = "sparse_sign,gaussian"
    k: int = 10               # Ritz triplets reported by the eigensolver runs
    diagnostics_out: str = ""


# -- method-label plumbing ----------------------------------------------------


def _parse_method(label: str):
    """Split a method label like mp-rCGS_O2 into its configuration parts."""
    name = label
    mixed = name.startswith("mp-")
    if mixed:
        name = name[3:]
    passes = 1
    if name and name[-1] in "123" and not name.endswith("_O"):
        passes = int(name[-1])
        name = name[:-1]
    randomized = name.startswith("r")
    return randomized, name, passes, mixed


def _sketch_for(cfg: RunConfig, n: int, m: int):
    s = cfg.s if cfg.s else default_sketch_size(n, m)
    kind = SketchKind(cfg.sketch_kind)
    if kind is SketchKind.SPARSE_SIGN:
        zeta = cfg.zeta if cfg.zeta else default_zeta(s)
        return new_sparse_sign(s, n, zeta, cfg.seed, Scaling.STANDARD)
    if kind is SketchKind.GAUSSIAN:
        return new_gaussian(s, n, cfg.seed)
    return new_identity(n)


def _run_method(label: str, X, Y, cfg: RunConfig):
    """Run one table method on (X, Y) and produce its summary row."""
    randomized, name, passes, mixed = _parse_method(label)
    n, m = X.shape
    start = time.perf_counter()
    if randomized:
        rcfg = RBiorthConfig(
            sketch=_sketch_for(cfg, n, m),
            variant=RVariant(name),
            passes=passes,
            precision=PrecisionPolicy(
                mode=PrecisionMode.MIXED if mixed else PrecisionMode.UNIFORM_HIGH
            ),
        )
        res = randomized_two_sided_gs(X, Y, rcfg)
        biorth = sketch_biorth_error(res.SQ, res.SP)
    else:
        bcfg = BiorthConfig(variant=Variant(name), passes=passes)
        res = two_sided_gs(X, Y, bcfg)
        biorth = biorth_loss(res.Q, res.P)
    elapsed = time.perf_counter() - start
    kcols = res.Q.shape[1]
    return (
        label,
        elapsed,
        cond2(res.Q),
        cond2(res.P),
        decomposition_error(X[:, :kcols], res.Q, res.TX),
        decomposition_error(Y[:, :kcols], res.P, res.TY),
        biorth,
    ), res


# -- CSV ----------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write_csv(path: str, header, rows, comments=()):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _write_diagnostics(path: str, series):
    header = ("step", "cond_Q", "cond_P", "biorth_loss", "inv_cos_angle", "d_i", "sketched_ips")
    rows = [
        (d.step, d.cond_Q, d.cond_P, d.biorth_loss, d.inv_cos_angle, d.d_i, d.sketched_ips)
        for d in series
    ]
    _write_csv(path, header, rows)


# -- matrix input -------------------------------------------------------------


def _read_matrix_market(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline().strip()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    if " ".join(first.lower().split()) != _MM_HEADER:
        raise OSError(
            f"{path}: expected Matrix Market header "
            f"'%%MatrixMarket matrix coordinate real general', got {first!r}"
        )
    try:
        M = scipy.io.mmread(path)
    except Exception as exc:
        raise OSError(f"{path}: malformed Matrix Market body: {exc}") from exc
    return scipy.sparse.csr_matrix(M)


# -- command bodies -----------------------------------------------------------


def _gen_pair(cfg: RunConfig):
    if cfg.matrix == "illcond":
        return gen_ill_conditioned(cfg.n, cfg.m)
    if cfg.matrix == "gaussian":
        return gen_gaussian_pair(cfg.n, cfg.m, cfg.seed)
    raise ArgumentError(f"unknown matrix family {cfg.matrix!r}")


def _cmd_biortho(cfg: RunConfig) -> int:
    X, Y = _gen_pair(cfg)
    variant = Variant(cfg.variant or "MGS")
    passes = cfg.passes or 1
    start = time.perf_counter()
    res = two_sided_gs(
        X, Y,
        BiorthConfig(variant=variant, passes=passes,
                     record_diagnostics=bool(cfg.diagnostics_out)),
    )
    elapsed = time.perf_counter() - start
    k = res.Q.shape[1]
    label = f"{variant.value}{passes}" if passes > 1 else variant.value
    row = (
        label, elapsed, cond2(res.Q), cond2(res.P),
        decomposition_error(X[:, :k], res.Q, res.TX),
        decomposition_error(Y[:, :k], res.P, res.TY),
        biorth_loss(res.Q, res.P),
    )
    _write_csv(cfg.out_path, _SUMMARY_HEADER, [row])
    if cfg.diagnostics_out:
        _write_diagnostics(cfg.diagnostics_out, res.diagnostics)
    if not res.status.complete:
        print(f"breakdown at step {res.status.breakdown_step}", file=sys.stderr)
        return 4
    return 0


def _cmd_rbiortho(cfg: RunConfig) -> int:
    X, Y = _gen_pair(cfg)
    variant = RVariant(cfg.variant or "rMGS")
    passes = cfg.passes or 1
    rcfg = RBiorthConfig(
        sketch=_sketch_for(cfg, cfg.n, cfg.m),
        variant=variant,
        passes=passes,
        precision=PrecisionPolicy(mode=PrecisionMode(cfg.precision)),
        record_diagnostics=bool(cfg.diagnostics_out),
    )
    start = time.perf_counter()
    res = randomized_two_sided_gs(X, Y, rcfg)
    elapsed = time.perf_counter() - start
    k = res.Q.shape[1]
    label = f"{variant.value}{passes}" if passes > 1 else variant.value
    if rcfg.precision.mode is PrecisionMode.MIXED:
        label = f"mp-{label}"
    row = (
        label, elapsed, cond2(res.Q), cond2(res.P),
        decomposition_error(X[:, :k], res.Q, res.TX),
        decomposition_error(Y[:, :k], res.P, res.TY),
        sketch_biorth_error(res.SQ, res.SP),
    )
    _write_csv(cfg.out_path, _SUMMARY_HEADER, [row])
    if cfg.diagnostics_out:
        _write_diagnostics(cfg.diagnostics_out, res.diagnostics)
    if not res.status.complete:
        print(f"breakdown at step {res.status.breakdown_step}", file=sys.stderr)
        return 4
    return 0


def _eigensolver_input(cfg: RunConfig):
    if cfg.input_path:
        M = _read_matrix_market(cfg.input_path)
        oracle = matrix_oracle(M)
        n = oracle.n
    else:
        n = cfg.n
        A = gen_prescribed_spectrum(
            SpectrumSpec(n=n, eigenvalues=leading_decay_spectrum(n), cond_X=100.0),
            cfg.seed,
        )
        oracle = matrix_oracle(A)
    rng = np.random.Generator(np.random.Philox(key=(1 << 64) + cfg.seed))
    q1 = rng.standard_normal(n)
    p1 = rng.standard_normal(n)
    return oracle, q1 / np.linalg.norm(q1), p1 / np.linalg.norm(p1)


_RITZ_HEADER = ("ritz", "theta_re", "theta_im", "res_right", "res_left", "warning")


def _write_ritz(path: str, res, k: int) -> None:
    triplets = ritz_triplets(res, min(k, res.H.shape[0]))
    rows = [
        (j + 1, t.theta.real, t.theta.imag, t.res_right, t.res_left, int(t.warning))
        for j, t in enumerate(triplets)
    ]
    _write_csv(path, _RITZ_HEADER, rows)


def _cmd_lanczos(cfg: RunConfig) -> int:
    oracle, q1, p1 = _eigensolver_input(cfg)
    variant = Variant(cfg.variant or "MGS")
    passes = cfg.passes or 2
    res = nonsym_lanczos(
        oracle, q1, p1, cfg.m, BiorthConfig(variant=variant, passes=passes)
    )
    _write_ritz(cfg.out_path, res, cfg.k)
    if not res.status.complete:
        print(f"breakdown at step {res.status.breakdown_step}", file=sys.stderr)
        return 4
    return 0


def _cmd_rlanczos(cfg: RunConfig) -> int:
    oracle, q1, p1 = _eigensolver_input(cfg)
    variant = RVariant(cfg.variant or "rCGS_O")
    passes = cfg.passes or 2
    rcfg = RBiorthConfig(
        sketch=_sketch_for(cfg, oracle.n, cfg.m),
        variant=variant,
        passes=passes,
        precision=PrecisionPolicy(mode=PrecisionMode(cfg.precision)),
    )
    res = rand_nonsym_lanczos(oracle, q1, p1, cfg.m, rcfg)
    _write_ritz(cfg.out_path, res, cfg.k)
    if not res.status.complete:
        print(f"breakdown at step {res.status.breakdown_step}", file=sys.stderr)
        return 4
    return 0


def _cmd_table(cfg: RunConfig, methods) -> int:
    rows = []
    for label in methods:
        if cfg.command == "table2":
            X, Y = gen_gaussian_pair(cfg.n, cfg.m, cfg.seed)
        else:
            X, Y = gen_ill_conditioned(cfg.n, cfg.m)
        row, _ = _run_method(label, X, Y, cfg)
        rows.append(row)
    _write_csv(cfg.out_path, _SUMMARY_HEADER, rows)
    return 0


def _cmd_fig1(cfg: RunConfig) -> int:
    try:
        start, step, stop = (int(part) for part in cfg.s_grid.split(":"))
        grid = list(range(start, stop + 1, step))
    except ValueError as exc:
        raise ArgumentError(f"bad s-grid {cfg.s_grid!r}; expected start:step:stop") from exc
    kinds = [SketchKind(k.strip()) for k in cfg.kinds.split(",") if k.strip()]
    if not kinds:
        raise ArgumentError("no sketch kinds given")
    rows = sketched_orthogonal_ip_experiment(cfg.n, grid, cfg.trials, kinds, cfg.seed)
    _write_csv(
        cfg.out_path,
        ("kind", "s", "trial_mean", "trial_min"),
        [(r.kind, r.s, r.trial_mean, r.trial_min) for r in rows],
        comments=("scaling: standard",),
    )
    return 0


def _cmd_fig5(cfg: RunConfig) -> int:
    oracle, q1, p1 = _eigensolver_input(cfg)
    n, m, k = oracle.n, cfg.m, cfg.k
    runs = [
        ("MGS2", nonsym_lanczos(
            oracle, q1, p1, m, BiorthConfig(variant=Variant.MGS, passes=2))),
        ("rCGS_O2", rand_nonsym_lanczos(
            oracle, q1, p1, m,
            RBiorthConfig(
                sketch=_sketch_for(cfg, n, m),
                variant=RVariant.RCGS_O,
                passes=2,
            ))),
    ]
    rows = []
    for label, res in runs:
        m_eff = res.H.shape[0]
        for i in range(1, m_eff + 1):
            theta, vecs = np.linalg.eig(res.H[:i, :i])
            order = np.lexsort((-theta.real, -np.abs(theta)))
            for rank, idx in enumerate(order[: min(k, i)], start=1):
                x = res.Q[:, :i] @ vecs[:, idx]
                x = x / np.linalg.norm(x)
                if np.iscomplexobj(x):
                    ax = oracle.apply(x.real) + 1j * oracle.apply(x.imag)
                else:
                    ax = oracle.apply(x)
                resid = float(np.linalg.norm(ax - theta[idx] * x))
                rows.append(
                    (label, i, rank, theta[idx].real, theta[idx].imag, resid)
                )
    _write_csv(
        cfg.out_path,
        ("method", "iter", "ritz", "theta_re", "theta_im", "res_right"),
        rows,
    )
    return 0


# -- configuration plumbing ---------------------------------------------------

_DEFAULTS = {
    "biortho": {"n": 1000, "m": 100, "out_path": "biortho.csv"},
    "rbiortho": {"n": 1000, "m": 100, "out_path": "rbiortho.csv"},
    "lanczos": {"n": 1000, "m": 100, "out_path": "lanczos.csv"},
    "rlanczos": {"n": 1000, "m": 100, "out_path": "rlanczos.csv"},
    "fig1": {"n": 10000, "out_path": "fig1.csv"},
    "table1": {"n": 10000, "m": 200, "out_path": "table1.csv"},
    "table2": {"n": 10000, "m": 500, "out_path": "table2.csv"},
    "table4": {"n": 10000, "m": 200, "out_path": "table4.csv"},
    "fig5": {"n": 1000, "m": 100, "out_path": "fig5.csv"},
}

_INT_KEYS = {"n", "m", "s", "zeta", "passes", "seed", "trials", "k"}
_STR_KEYS = {
    "variant", "sketch_kind", "precision", "input_path", "out_path",
    "matrix", "s_grid", "kinds", "diagnostics_out",
}


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ArgumentError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError as exc:
                raise ArgumentError(f"{path}:{lineno}: {key} needs an integer") from exc
        elif key in _STR_KEYS:
            values[key] = value
        else:
            raise ArgumentError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bigs",
        description="Randomized two-sided Gram-Schmidt and nonsymmetric Lanczos harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key = value file; flags override")
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--s", type=int, default=None)
        p.add_argument("--zeta", type=int, default=None)
        p.add_argument("--variant", default=None)
        p.add_argument("--passes", type=int, default=None)
        p.add_argument("--sketch-kind", dest="sketch_kind", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--precision", default=None)
        p.add_argument("--input", dest="input_path", default=None)
        p.add_argument("--out", dest="out_path", default=None)
        p.add_argument("--matrix", default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--s-grid", dest="s_grid", default=None)
        p.add_argument("--kinds", default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--diagnostics-out", dest="diagnostics_out", default=None)
    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_values = _load_config_file(args.config) if args.config else {}
    cfg = RunConfig(command=args.command)
    defaults = _DEFAULTS[args.command]
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        flag = getattr(args, f.name, None)
        if flag is not None:
            value = flag
        elif f.name in file_values:
            value = file_values[f.name]
        elif f.name in defaults:
            value = defaults[f.name]
        else:
            value = getattr(cfg, f.name)
        setattr(cfg, f.name, value)
    return cfg


def _validate(cfg: RunConfig) -> None:
    for name in ("n", "m", "s", "zeta", "passes", "trials", "k"):
        value = getattr(cfg, name)
        if value < 0:
            raise ArgumentError(f"{name} must be positive, got {value}")
    if cfg.command not in ("fig1",) and cfg.n and cfg.m and cfg.m > cfg.n:
        raise ArgumentError(f"need m <= n, got n={cfg.n}, m={cfg.m}")
    if not 0 <= cfg.seed < 2**64:
        raise ArgumentError(f"seed must be a 64-bit unsigned integer, got {cfg.seed}")
    try:
        SketchKind(cfg.sketch_kind)
        PrecisionMode(cfg.precision)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from exc
    if cfg.variant:
        try:
            if cfg.command in ("rbiortho", "rlanczos"):
                RVariant(cfg.variant)
            elif cfg.command in ("biortho", "lanczos"):
                Variant(cfg.variant)
        except ValueError as exc:
            raise ArgumentError(f"invalid variant {cfg.variant!r}") from exc


def run(cfg: RunConfig) -> int:
    """Execute a resolved configuration; returns the process exit code."""
    _validate(cfg)
    if cfg.command == "biortho":
        return _cmd_biortho(cfg)
    if cfg.command == "rbiortho":
        return _cmd_rbiortho(cfg)
    if cfg.command == "lanczos":
        return _cmd_lanczos(cfg)
    if cfg.command == "rlanczos":
        return _cmd_rlanczos(cfg)
    if cfg.command == "fig1":
        return _cmd_fig1(cfg)
    if cfg.command == "table1":
        return _cmd_table(cfg, _TABLE_METHODS)
    if cfg.command == "table2":
        return _cmd_table(cfg, _TABLE_METHODS)
    if cfg.command == "table4":
        return _cmd_table(cfg, _TABLE4_METHODS)
    if cfg.command == "fig5":
        return _cmd_fig5(cfg)
    raise ArgumentError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        return run(cfg)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NearBreakdownError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
