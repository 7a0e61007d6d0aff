"""Deterministic two-sided Gram-Schmidt biorthogonalization.

Given X, Y with full column rank, builds bases Q, P with P^T Q = I (in exact
arithmetic), range(Q_i) = range(X_i) and range(P_i) = range(Y_i) at every
step, and triangular factors with X = Q TX, Y = P TY. Column i is obtained
by projecting x_i obliquely against the previous columns — once per pass —
then normalizing by d_i = <q_i, p_i>; |d_i| at or below the relative
breakdown threshold stops the process with a partial result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._core import DEFAULT_BREAKDOWN_TOL, Engine, Status
from .diagnostics import IterationDiagnostics
from .errors import ArgumentError

__all__ = [
    "Variant",
    "BiorthConfig",
    "BiorthResult",
    "Status",
    "two_sided_gs",
    "DEFAULT_BREAKDOWN_TOL",
]


class Variant(str, Enum):
    """Projector realization for the deterministic process."""

    CGS = "CGS"      # accumulated-basis classical form
    MGS = "MGS"      # sequential rank-one modified form
    CGS_O = "CGS_O"  # explicit gram-inverse (oblique projector) form

    @property
    def family(self) -> str:
        return {"CGS": "cgs", "MGS": "mgs", "CGS_O": "cgs_o"}[self.value]


@dataclass(frozen=True)
class BiorthConfig:
    variant: Variant = Variant.MGS
    passes: int = 1
    breakdown_tol: float = DEFAULT_BREAKDOWN_TOL
    record_diagnostics: bool = False

    def __post_init__(self):
        if self.passes not in (1, 2, 3):
            raise ArgumentError(f"passes must be 1, 2, or 3, got {self.passes}")
        if not 0.0 < self.breakdown_tol < 1.0:
            raise ArgumentError(
                f"breakdown_tol must lie in (0, 1), got {self.breakdown_tol}"
            )


@dataclass
class BiorthResult:
    """Bases, triangular factors, normalization scalars, and run status.

    On breakdown at step i only columns 1..i-1 are returned; all arrays are
    truncated consistently and status records the failing step.
    """

    Q: np.ndarray
    P: np.ndarray
    TX: np.ndarray
    TY: np.ndarray
    d: np.ndarray
    status: Status
    diagnostics: list[IterationDiagnostics] = field(default_factory=list)


def _check_pair(X, Y):
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2:
        raise ArgumentError("X and Y must be 2-dimensional")
    if X.shape != Y.shape:
        raise ArgumentError(f"shape mismatch: X is {X.shape}, Y is {Y.shape}")
    n, m = X.shape
    if m < 1:
        raise ArgumentError("need at least one column")
    if m >= n:
        raise ArgumentError(f"need m < n, got n={n}, m={m}")
    return X, Y, n, m


def two_sided_gs(X, Y, cfg: BiorthConfig | None = None) -> BiorthResult:
    """Biorthogonalize the columns of X against the columns of Y."""
    if cfg is None:
        cfg = BiorthConfig()
    X, Y, n, m = _check_pair(X, Y)
    engine = Engine(
        n, m, cfg.variant.family, cfg.passes, cfg.breakdown_tol,
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
    return BiorthResult(
        Q=engine.Q[:, :k].copy(order="F"),
        P=engine.P[:, :k].copy(order="F"),
        TX=TX[:k, :k].copy(),
        TY=TY[:k, :k].copy(),
        d=np.array(engine.d),
        status=status,
        diagnostics=engine.diagnostics,
    )
