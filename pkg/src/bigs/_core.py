"""Shared column-by-column engine for two-sided Gram-Schmidt.

One step consumes a candidate pair (x, y), projects both against the basis
built so far (repeating the projection `passes` times), normalizes by the
(possibly sketched) inner product d_i, and commits the new columns. The
deterministic and randomized drivers, and both Lanczos drivers, all push
columns through this engine; they differ only in where candidate columns
come from and how results are packaged.

Families:
  cgs    accumulated-projector form: coefficients from one matrix-vector
         product against the opposite basis.
  mgs    sequential rank-one projections, one basis column at a time.
  cgs_o  explicit gram-inverse projector backed by the bordered LU
         factorization from the projectors module.

Randomized mode keeps a sketched copy of every basis column and updates the
sketch of the working vector by the same linear combinations applied to the
full vector; a fresh sketch of the working vector is taken between passes
to arrest drift, never after the final pass, so the committed sketches stay
consistent with the recurrence that produced d_i.

Mixed precision stores and updates length-n vectors in float32 while every
sketched quantity (sketch application output, coefficient solves, gram
factors, d_i) stays in float64. Here the between-pass re-sketch is also
skipped: re-applying the operator to a float32 vector would feed its
rounding noise into the sketched recurrence, which on badly conditioned
inputs is orders of magnitude larger than the float64 drift the re-sketch
is meant to arrest. The cached sketched recurrence is self-consistent at
float64 accuracy even where the float32 columns are pure cancellation
noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import IterationDiagnostics
from .errors import NearBreakdownError
from .projectors import _GROWTH_RATIO, _breakdown_tol, _lu_border, _lu_solve, _refactor
from .sketching import SketchOperator, apply

__all__ = ["Status", "PushOutcome", "Engine", "DEFAULT_BREAKDOWN_TOL"]

# 64 times the unit roundoff of float64: default relative breakdown threshold.
DEFAULT_BREAKDOWN_TOL = 64.0 * float(np.finfo(np.float64).eps) / 2.0

_FAMILIES = ("cgs", "mgs", "cgs_o")


@dataclass(frozen=True)
class Status:
    """Completion marker: either complete or broken down at a 1-based step."""

    complete: bool
    breakdown_step: int | None = None

    def __str__(self) -> str:
        if self.complete:
            return "complete"
        return f"breakdown(step {self.breakdown_step})"


@dataclass
class PushOutcome:
    """Per-step report: accumulated projection coefficients and d_i.

    ok=False marks a breakdown; the candidate columns were not committed and
    the engine accepts no further pushes.
    """

    ok: bool
    coeff_x: np.ndarray
    coeff_y: np.ndarray
    d: float


class Engine:
    """Incremental two-sided Gram-Schmidt over preallocated column buffers."""

    def __init__(
        self,
        n: int,
        capacity: int,
        family: str,
        passes: int,
        breakdown_tol: float,
        sketch: SketchOperator | None = None,
        mixed: bool = False,
        record: bool = False,
    ):
        if family not in _FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        self.n = int(n)
        self.capacity = int(capacity)
        self.family = family
        self.passes = int(passes)
        self.breakdown_tol = float(breakdown_tol)
        self.sketch = sketch
        self.low = np.float32 if mixed else np.float64
        self.record = record

        self.Q = np.empty((n, capacity), dtype=self.low, order="F")
        self.P = np.empty((n, capacity), dtype=self.low, order="F")
        if sketch is not None:
            self.SQ = np.empty((sketch.s, capacity), dtype=np.float64, order="F")
            self.SP = np.empty((sketch.s, capacity), dtype=np.float64, order="F")
        else:
            self.SQ = self.SP = None
        if family == "cgs_o":
            self.gram = np.zeros((capacity, capacity))
            self._gL = np.zeros((capacity, capacity))
            self._gU = np.zeros((capacity, capacity))
            self._gperm = np.zeros(capacity, dtype=np.int64)
        self.refactorizations = 0
        self.i = 0
        self.d: list[float] = []
        self.diagnostics: list[IterationDiagnostics] = []
        self.broke = False
        self._ips = 0  # sketched inner products in the current push

    # -- projection passes ------------------------------------------------

    def _project_pass_plain(self, q, p):
        i = self.i
        Q, P = self.Q[:, :i], self.P[:, :i]
        if self.family == "cgs":
            h = (P.T @ q).astype(np.float64)
            q -= Q @ h.astype(self.low)
            g = (Q.T @ p).astype(np.float64)
            p -= P @ g.astype(self.low)
        elif self.family == "mgs":
            h = np.zeros(i)
            g = np.zeros(i)
            for j in range(i):
                cj = float(P[:, j] @ q)
                q -= cj * Q[:, j]
                h[j] = cj
            for j in range(i):
                cj = float(Q[:, j] @ p)
                p -= cj * P[:, j]
                g[j] = cj
        else:  # cgs_o
            h = self._gram_solve((P.T @ q).astype(np.float64))
            q -= Q @ h.astype(self.low)
            g = self._gram_solve((Q.T @ p).astype(np.float64), transpose=True)
            p -= P @ g.astype(self.low)
        return q, p, h, g

    def _project_pass_sketched(self, q, p, sq, sp):
        i = self.i
        Q, P = self.Q[:, :i], self.P[:, :i]
        SQ, SP = self.SQ[:, :i], self.SP[:, :i]
        if self.family == "cgs":
            h = SP.T @ sq
            q -= Q @ h.astype(self.low)
            sq -= SQ @ h
            g = SQ.T @ sp
            p -= P @ g.astype(self.low)
            sp -= SP @ g
            self._ips += 2 * i
        elif self.family == "mgs":
            h = np.zeros(i)
            g = np.zeros(i)
            for j in range(i):
                cj = float(SP[:, j] @ sq)
                q -= self.low(cj) * Q[:, j]
                sq -= cj * SQ[:, j]
                h[j] = cj
            for j in range(i):
                cj = float(SQ[:, j] @ sp)
                p -= self.low(cj) * P[:, j]
                sp -= cj * SP[:, j]
                g[j] = cj
            self._ips += 2 * i
        else:  # cgs_o
            h = self._gram_solve(SP.T @ sq)
            q -= Q @ h.astype(self.low)
            sq -= SQ @ h
            g = self._gram_solve(SQ.T @ sp, transpose=True)
            p -= P @ g.astype(self.low)
            sp -= SP @ g
            self._ips += 2 * i
        return q, p, sq, sp, h, g

    # -- gram bookkeeping (cgs_o) ------------------------------------------

    def _gram_solve(self, b, transpose=False):
        i = self.i
        if i == 0:
            return np.zeros(0)
        return _lu_solve(self._gL[:i, :i], self._gU[:i, :i], self._gperm[:i], b, transpose)

    def _gram_append(self, c, r, dd):
        """Extend the gram factors with the committed column/row; may raise."""
        i = self.i
        g_new = self.gram[: i + 1, : i + 1]
        g_new[:i, i] = c
        g_new[i, :i] = r
        g_new[i, i] = dd
        y, z, u = _lu_border(self._gL[:i, :i], self._gU[:i, :i], self._gperm[:i], c, r, dd)
        tol = _breakdown_tol(g_new)
        if abs(u) < _GROWTH_RATIO * float(np.abs(g_new).max()) or abs(u) <= tol:
            L, U, perm = _refactor(g_new.copy())
            self.refactorizations += 1
            smallest = float(np.abs(np.diag(U)).min())
            if smallest <= tol:
                raise NearBreakdownError(
                    f"gram pivot {smallest:.3e} at or below tolerance {tol:.3e}",
                    pivot=smallest,
                )
            self._gL[: i + 1, : i + 1] = L
            self._gU[: i + 1, : i + 1] = U
            self._gperm[: i + 1] = perm
        else:
            self._gL[i, :i] = z
            self._gL[:i, i] = 0.0
            self._gL[i, i] = 1.0
            self._gU[:i, i] = y
            self._gU[i, :i] = 0.0
            self._gU[i, i] = u
            self._gperm[i] = i

    # -- the step -----------------------------------------------------------

    def push(self, x, y) -> PushOutcome:
        """Biorthogonalize (x, y) against the basis and commit the new pair."""
        if self.broke:
            raise RuntimeError("engine already broke down; no further pushes accepted")
        if self.i >= self.capacity:
            raise RuntimeError("engine is full")
        i = self.i
        q = np.asarray(x, dtype=self.low).copy()
        p = np.asarray(y, dtype=self.low).copy()
        cx = np.zeros(i)
        cy = np.zeros(i)
        self._ips = 0

        if self.sketch is None:
            for _ in range(self.passes):
                q, p, h, g = self._project_pass_plain(q, p)
                cx += h
                cy += g
            d = float(p @ q)
            nq = float(np.linalg.norm(q))
            npp = float(np.linalg.norm(p))
        else:
            sq = apply(self.sketch, q)
            sp = apply(self.sketch, p)
            for k in range(self.passes):
                q, p, sq, sp, h, g = self._project_pass_sketched(q, p, sq, sp)
                cx += h
                cy += g
                if k + 1 < self.passes and self.low is np.float64:
                    # Fresh re-sketch between passes, uniform precision only:
                    # sketching a float32 vector would inject low-precision
                    # rounding into the float64 sketched recurrence.
                    sq = apply(self.sketch, q)
                    sp = apply(self.sketch, p)
            d = float(sp @ sq)
            self._ips += 1
            nq = float(np.linalg.norm(sq))
            npp = float(np.linalg.norm(sp))

        if abs(d) <= self.breakdown_tol * nq * npp or d == 0.0:
            self.broke = True
            return PushOutcome(False, cx, cy, d)

        scale = math.sqrt(abs(d))
        sign = math.copysign(1.0, d)
        qn = q / self.low(scale)
        pn = self.low(sign) * p / self.low(scale)
        if self.sketch is not None:
            sqn = sq / scale
            spn = sign * sp / scale

        if self.family == "cgs_o":
            if self.sketch is None:
                c = (self.P[:, :i].T @ qn).astype(np.float64)
                r = (self.Q[:, :i].T @ pn).astype(np.float64)
                dd = float(pn @ qn)
            else:
                c = self.SP[:, :i].T @ sqn
                r = self.SQ[:, :i].T @ spn
                dd = float(spn @ sqn)
                self._ips += 2 * i + 1
            try:
                self._gram_append(c, r, dd)
            except NearBreakdownError:
                self.broke = True
                return PushOutcome(False, cx, cy, d)

        self.Q[:, i] = qn
        self.P[:, i] = pn
        if self.sketch is not None:
            self.SQ[:, i] = sqn
            self.SP[:, i] = spn
        self.d.append(d)
        self.i = i + 1
        if self.record:
            self._record_step(nq, npp, d)
        return PushOutcome(True, cx, cy, d)

    def _record_step(self, nq, npp, d):
        i = self.i
        Q = self.Q[:, :i].astype(np.float64, copy=False)
        P = self.P[:, :i].astype(np.float64, copy=False)
        if self.sketch is None:
            gram = P.T @ Q
        else:
            gram = self.SP[:, :i].T @ self.SQ[:, :i]
        loss = float(np.linalg.norm(np.eye(i) - gram))
        sv_q = np.linalg.svd(Q, compute_uv=False)
        sv_p = np.linalg.svd(P, compute_uv=False)
        cond_q = float(sv_q[0] / sv_q[-1]) if sv_q[-1] > 0 else float("inf")
        cond_p = float(sv_p[0] / sv_p[-1]) if sv_p[-1] > 0 else float("inf")
        inv_cos = nq * npp / abs(d) if d != 0.0 else float("inf")
        self.diagnostics.append(
            IterationDiagnostics(
                step=i,
                cond_Q=cond_q,
                cond_P=cond_p,
                biorth_loss=loss,
                inv_cos_angle=float(inv_cos),
                d_i=float(d),
                sketched_ips=int(self._ips),
            )
        )

    # -- views ---------------------------------------------------------------

    def basis(self):
        i = self.i
        out = (self.Q[:, :i], self.P[:, :i])
        if self.sketch is not None:
            return out + (self.SQ[:, :i], self.SP[:, :i])
        return out + (None, None)
