"""Randomized two-sided Gram-Schmidt with sketched oblique projections.

The deterministic inner products are replaced throughout by inner products
of sketched vectors, so the bases come out sketch-biorthonormal:
(SP)^T SQ = I where SQ = sketch(Q), SP = sketch(P). Sketches of the basis
columns are cached and updated by the same linear combinations as the full
columns; under the uniform-precision policy the working vector is also
re-sketched fresh between projection passes to arrest drift.
d_i = <sketch(p_i), sketch(q_i)> drives normalization and breakdown
detection.

The mixed-precision mode stores and updates all length-n vectors in the low
format while keeping everything sketched — sketch application outputs,
cached sketched columns, coefficient solves, gram factors, and d_i — in the
high format. It therefore never re-sketches mid-step: applying the operator
to a low-precision vector would push low-precision rounding into the
high-precision sketched recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._core import DEFAULT_BREAKDOWN_TOL, Engine, Status
from .biortho import _check_pair
from .diagnostics import IterationDiagnostics
from .errors import ArgumentError
from .sketching import SketchOperator

__all__ = [
    "RVariant",
    "PrecisionMode",
    "PrecisionPolicy",
    "RBiorthConfig",
    "RBiorthResult",
    "randomized_two_sided_gs",
    "sketch_biorth_error",
]


class RVariant(str, Enum):
    """Projector realization for the randomized process."""

    RCGS = "rCGS"
    RMGS = "rMGS"
    RCGS_O = "rCGS_O"

    @property
    def family(self) -> str:
        return {"rCGS": "cgs", "rMGS": "mgs", "rCGS_O": "cgs_o"}[self.value]


class PrecisionMode(str, Enum):
    UNIFORM_HIGH = "uniform_high"
    MIXED = "mixed"


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working formats: low for length-n vectors, high for sketched work."""

    mode: PrecisionMode = PrecisionMode.UNIFORM_HIGH
    low: type = np.float32
    high: type = np.float64

    def __post_init__(self):
        if self.low is not np.float32 or self.high is not np.float64:
            raise ArgumentError("supported formats are low=float32, high=float64")


@dataclass(frozen=True)
class RBiorthConfig:
    sketch: SketchOperator
    variant: RVariant = RVariant.RMGS
    passes: int = 1
    breakdown_tol: float = DEFAULT_BREAKDOWN_TOL
    precision: PrecisionPolicy = field(default_factory=PrecisionPolicy)
    record_diagnostics: bool = False

    def __post_init__(self):
        if self.passes not in (1, 2, 3):
            raise ArgumentError(f"passes must be 1, 2, or 3, got {self.passes}")
        if not 0.0 < self.breakdown_tol < 1.0:
            raise ArgumentError(
                f"breakdown_tol must lie in (0, 1), got {self.breakdown_tol}"
            )


@dataclass
class RBiorthResult:
    """Bases, cached sketches, triangular factors, and run status.

    Q, P are in the low format under the mixed policy and float64 otherwise;
    SQ, SP and all scalars are always float64.
    """

    Q: np.ndarray
    P: np.ndarray
    SQ: np.ndarray
    SP: np.ndarray
    TX: np.ndarray
    TY: np.ndarray
    d: np.ndarray
    status: Status
    diagnostics: list[IterationDiagnostics] = field(default_factory=list)


def randomized_two_sided_gs(X, Y, cfg: RBiorthConfig) -> RBiorthResult:
    """Sketch-biorthogonalize the columns of X against the columns of Y."""
    X, Y, n, m = _check_pair(X, Y)
    op = cfg.sketch
    if op.n != n:
        raise ArgumentError(f"sketch expects vectors of length {op.n}, data has {n}")
    if op.s < m:
        raise ArgumentError(f"sketch dimension {op.s} is below the column count {m}")
    engine = Engine(
        n, m, cfg.variant.family, cfg.passes, cfg.breakdown_tol,
        sketch=op,
        mixed=cfg.precision.mode is PrecisionMode.MIXED,
        record=cfg.record_diagnostics,
    )
    TX = np.zeros((m, m))
    TY = np.zeros((m, m))
    status = Status(complete=True)
    for i in range(m):
        out = engine.push(X[:, i], Y[:, i])
        if not out.ok:
            status = Status(complete=False, breakdown_step=i + 1)
            break
        TX[:i, i] = out.coeff_x
        TX[i, i] = math.sqrt(abs(out.d))
        TY[:i, i] = out.coeff_y
        TY[i, i] = math.copysign(math.sqrt(abs(out.d)), out.d)
    k = engine.i
    return RBiorthResult(
        Q=engine.Q[:, :k].copy(order="F"),
        P=engine.P[:, :k].copy(order="F"),
        SQ=engine.SQ[:, :k].copy(order="F"),
        SP=engine.SP[:, :k].copy(order="F"),
        TX=TX[:k, :k].copy(),
        TY=TY[:k, :k].copy(),
        d=np.array(engine.d),
        status=status,
        diagnostics=engine.diagnostics,
    )


def sketch_biorth_error(SQ: np.ndarray, SP: np.ndarray) -> float:
    """Frobenius norm of I - SP^T SQ, the loss of sketch-biorthogonality."""
    SQ = np.asarray(SQ, dtype=np.float64)
    SP = np.asarray(SP, dtype=np.float64)
    if SQ.shape != SP.shape:
        raise ArgumentError(f"shape mismatch: SQ is {SQ.shape}, SP is {SP.shape}")
    m = SQ.shape[1]
    return float(np.linalg.norm(np.eye(m) - SP.T @ SQ))
