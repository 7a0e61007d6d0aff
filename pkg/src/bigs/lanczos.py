"""Nonsymmetric Lanczos eigensolvers with full (re-)biorthogonalization.

The deterministic driver builds bases Q, P for the Krylov spaces of A and
A^T with P^T Q = I, biorthogonalizing every new Krylov vector against all
previous columns (no short-term recurrence), so

    A Q_m  = Q_m H + delta_next q_next e_m^T,
    A^T P_m = P_m T + beta_next  p_next e_m^T,

with H = T^T tridiagonal up to roundoff. The randomized driver enforces
sketch-biorthogonality instead; H and T are then upper Hessenberg and no
longer transposes of each other, and the sketched analogues of the
relations above hold.

Ritz triplets (theta, x, y) pair right vectors from H with left vectors
from T (deterministic mode: left eigenvectors of H). The characteristic
polynomial of H solves a sketched least-squares problem over monic
polynomials; charpoly_optimality_check verifies that against a dense
solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from ._core import Engine, Status
from .biortho import BiorthConfig
from .errors import ArgumentError, DegenerateInputError
from .rbiortho import PrecisionMode, RBiorthConfig
from .sketching import apply

__all__ = [
    "MatrixOracle",
    "matrix_oracle",
    "LanczosResult",
    "RitzTriplet",
    "nonsym_lanczos",
    "rand_nonsym_lanczos",
    "ritz_triplets",
    "projected_matrices",
    "charpoly_optimality_check",
]

# Left/right Ritz values farther apart than this set the warning flag.
_PAIRING_TOL = 1e-6


@dataclass(frozen=True)
class MatrixOracle:
    """Matrix access through products: x -> Ax and x -> A^T x."""

    n: int
    apply: object
    apply_transpose: object


def matrix_oracle(M) -> MatrixOracle:
    """Wrap a dense or sparse square matrix as a MatrixOracle."""
    n, n2 = M.shape
    if n != n2:
        raise ArgumentError(f"matrix must be square, got {M.shape}")
    MT = M.T
    return MatrixOracle(
        n=n,
        apply=lambda x: M @ x,
        apply_transpose=lambda x: MT @ x,
    )


@dataclass
class LanczosResult:
    """Bases, projected matrices, and the trailing recurrence terms.

    The oracle that produced the result rides along so Ritz residuals can
    be evaluated against the true matrix afterwards.
    """

    Q: np.ndarray
    P: np.ndarray
    H: np.ndarray
    T: np.ndarray
    delta_next: float
    beta_next: float
    q_next: np.ndarray
    p_next: np.ndarray
    status: Status
    oracle: MatrixOracle | None = None
    SQ: np.ndarray | None = None
    SP: np.ndarray | None = None


@dataclass
class RitzTriplet:
    """Approximate eigentriplet lifted from the projected problem.

    res_right = ||A x - theta x|| / ||x|| and res_left uses A^T with the
    same theta; x and y are unit 2-norm. warning marks a left/right value
    pairing farther apart than the pairing tolerance.
    """

    theta: complex
    x: np.ndarray
    y: np.ndarray
    res_right: float
    res_left: float
    warning: bool = False


def _check_start(n: int, q1, p1, m: int):
    q1 = np.asarray(q1, dtype=np.float64).ravel()
    p1 = np.asarray(p1, dtype=np.float64).ravel()
    if q1.shape[0] != n or p1.shape[0] != n:
        raise ArgumentError(f"start vectors must have length {n}")
    if not 1 <= m <= n:
        raise ArgumentError(f"need 1 <= m <= n, got m={m}, n={n}")
    return q1, p1


def _drive(A: MatrixOracle, q1, p1, m: int, engine: Engine) -> LanczosResult:
    first = engine.push(q1, p1)
    if not first.ok:
        raise ArgumentError(
            "initial inner product of the start pair is zero to working precision"
        )
    H = np.zeros((m, m))
    T = np.zeros((m, m))
    delta_next = beta_next = 0.0
    status = Status(complete=True)
    for t in range(m):
        out = engine.push(
            A.apply(engine.Q[:, t]), A.apply_transpose(engine.P[:, t])
        )
        H[: t + 1, t] = out.coeff_x
        T[: t + 1, t] = out.coeff_y
        if not out.ok:
            status = Status(complete=False, breakdown_step=t + 2)
            break
        root = math.sqrt(abs(out.d))
        if t + 1 < m:
            H[t + 1, t] = root
            T[t + 1, t] = math.copysign(root, out.d)
        else:
            delta_next = root
            beta_next = math.copysign(root, out.d)

    k = engine.i  # committed basis columns
    if status.complete:
        m_eff, have_next = m, True
    else:
        m_eff, have_next = k, False
    Q = engine.Q[:, :m_eff].astype(np.float64, copy=True)
    P = engine.P[:, :m_eff].astype(np.float64, copy=True)
    if have_next:
        q_next = engine.Q[:, m].astype(np.float64, copy=True)
        p_next = engine.P[:, m].astype(np.float64, copy=True)
    else:
        q_next = np.zeros(engine.n)
        p_next = np.zeros(engine.n)
    res = LanczosResult(
        Q=Q, P=P,
        H=H[:m_eff, :m_eff].copy(), T=T[:m_eff, :m_eff].copy(),
        delta_next=delta_next, beta_next=beta_next,
        q_next=q_next, p_next=p_next,
        status=status, oracle=A,
    )
    if engine.sketch is not None:
        res.SQ = engine.SQ[:, :m_eff].copy(order="F")
        res.SP = engine.SP[:, :m_eff].copy(order="F")
    return res


def nonsym_lanczos(
    A: MatrixOracle, q1, p1, m: int, biortho_cfg: BiorthConfig | None = None
) -> LanczosResult:
    """m steps of fully biorthogonalized nonsymmetric Lanczos."""
    if biortho_cfg is None:
        biortho_cfg = BiorthConfig()
    q1, p1 = _check_start(A.n, q1, p1, m)
    engine = Engine(
        A.n, m + 1, biortho_cfg.variant.family, biortho_cfg.passes,
        biortho_cfg.breakdown_tol, record=biortho_cfg.record_diagnostics,
    )
    return _drive(A, q1, p1, m, engine)


def rand_nonsym_lanczos(
    A: MatrixOracle, q1, p1, m: int, rcfg: RBiorthConfig
) -> LanczosResult:
    """m steps of randomized nonsymmetric Lanczos with sketched projections."""
    q1, p1 = _check_start(A.n, q1, p1, m)
    op = rcfg.sketch
    if op.n != A.n:
        raise ArgumentError(f"sketch expects vectors of length {op.n}, matrix has {A.n}")
    if op.s < m + 1:
        raise ArgumentError(f"sketch dimension {op.s} must be at least m+1 = {m + 1}")
    engine = Engine(
        A.n, m + 1, rcfg.variant.family, rcfg.passes, rcfg.breakdown_tol,
        sketch=op,
        mixed=rcfg.precision.mode is PrecisionMode.MIXED,
        record=rcfg.record_diagnostics,
    )
    return _drive(A, q1, p1, m, engine)


def projected_matrices(res: LanczosResult, sketch=None):
    """Reassemble H and T by projection instead of recurrence bookkeeping.

    Randomized results need the sketch operator that produced them:
    H = SP^T sketch(A Q), T = SQ^T sketch(A^T P). Deterministic results use
    P^T A Q and Q^T A^T P. Agreement with the stored H, T cross-checks the
    recurrence assembly.
    """
    A = res.oracle
    AQ = np.column_stack([A.apply(res.Q[:, j]) for j in range(res.Q.shape[1])])
    AtP = np.column_stack([A.apply_transpose(res.P[:, j]) for j in range(res.P.shape[1])])
    if res.SQ is None:
        return res.P.T @ AQ, res.Q.T @ AtP
    if sketch is None:
        raise ArgumentError("randomized results need the sketch operator")
    return res.SP.T @ apply(sketch, AQ), res.SQ.T @ apply(sketch, AtP)


def _apply_complex(fn, v: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(v):
        return fn(v.real) + 1j * fn(v.imag)
    return fn(v)


def _order(values: np.ndarray) -> np.ndarray:
    """Indices sorting by descending magnitude, ties by descending real part."""
    return np.lexsort((-values.real, -np.abs(values)))


def ritz_triplets(res: LanczosResult, k: int) -> list[RitzTriplet]:
    """Top-k Ritz triplets by |theta|, with residuals from the oracle."""
    m_eff = res.H.shape[0]
    if not 0 <= k <= m_eff:
        raise ArgumentError(f"need 0 <= k <= {m_eff}, got k={k}")
    if k == 0:
        return []
    A = res.oracle
    if res.SQ is None:
        w, vl, vr = scipy.linalg.eig(res.H, left=True, right=True)
        right = (w, vr)
        # vl satisfies vl^H H = w vl^H, so conj(vl) is the right eigenvector
        # of T = H^T for the SAME eigenvalue w
        left = (w, vl.conj())
    else:
        wh, vr = scipy.linalg.eig(res.H, left=False, right=True)
        wt, vtr = scipy.linalg.eig(res.T, left=False, right=True)
        right = (wh, vr)
        left = (wt, vtr)

    order = _order(right[0])
    used = np.zeros(left[0].shape[0], dtype=bool)
    out = []
    for idx in order[:k]:
        theta = complex(right[0][idx])
        dist = np.abs(left[0] - theta)
        dist[used] = np.inf
        jdx = int(np.argmin(dist))
        used[jdx] = True
        warning = bool(dist[jdx] > _PAIRING_TOL)

        x = res.Q @ right[1][:, idx]
        y = res.P @ left[1][:, jdx]
        nx = np.linalg.norm(x)
        ny = np.linalg.norm(y)
        if nx == 0.0 or ny == 0.0:
            raise DegenerateInputError("Ritz vector lifted to the zero vector")
        x = x / nx
        y = y / ny
        res_right = float(np.linalg.norm(_apply_complex(A.apply, x) - theta * x))
        res_left = float(np.linalg.norm(_apply_complex(A.apply_transpose, y) - theta * y))
        out.append(
            RitzTriplet(
                theta=theta, x=x, y=y,
                res_right=res_right, res_left=res_left,
                warning=warning,
            )
        )
    return out


def _monic_tail(M: np.ndarray) -> np.ndarray:
    """Non-leading coefficients of det(tI - M), highest degree first."""
    coeffs = np.poly(M)
    coeffs = np.real_if_close(coeffs, tol=1e6)
    return np.asarray(coeffs, dtype=np.float64)[1:]


def charpoly_optimality_check(
    A: MatrixOracle, b, c, m: int, rcfg: RBiorthConfig, side: str = "right"
):
    """Compare the Lanczos characteristic polynomial with a dense minimizer.

    The monic characteristic polynomial of H minimizes the sketched norm
    ||SP^T sketch(poly(A) b)|| over monic polynomials of degree m; the dense
    oracle solves that least-squares problem explicitly over the Krylov
    matrix K = [b, Ab, ..., A^(m-1) b]. side="left" runs the transposed
    statement: T against the Krylov matrix of (A^T, c) projected by SQ.

    Returns (coeffs_lanczos, coeffs_oracle, gap) with coefficients ordered
    from degree m-1 down to degree 0 and gap the largest coefficientwise
    relative difference.
    """
    if A.n > 32:
        raise ArgumentError(f"dense Krylov oracle is limited to n <= 32, got n={A.n}")
    if side not in ("right", "left"):
        raise ArgumentError(f"side must be 'right' or 'left', got {side!r}")
    res = rand_nonsym_lanczos(A, b, c, m, rcfg)
    if not res.status.complete:
        raise DegenerateInputError(f"sketched Lanczos broke down: {res.status}")

    if side == "right":
        M, start, move, proj = res.H, b, A.apply, res.SP
    else:
        M, start, move, proj = res.T, c, A.apply_transpose, res.SQ
    coeffs_lanczos = _monic_tail(M)

    K = np.empty((A.n, m))
    v = np.asarray(start, dtype=np.float64).ravel().copy()
    for j in range(m):
        K[:, j] = v
        v = move(v)
    G = proj.T @ apply(rcfg.sketch, K)
    g = proj.T @ apply(rcfg.sketch, v)  # v now holds A^m b (or the transpose side)
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[-1] <= m * np.finfo(np.float64).eps * sv[0]:
        raise DegenerateInputError("projected Krylov system is singular")
    solution = np.linalg.solve(G, g)
    coeffs_oracle = -solution[::-1]

    denom = np.maximum(1.0, np.maximum(np.abs(coeffs_lanczos), np.abs(coeffs_oracle)))
    gap = float(np.max(np.abs(coeffs_lanczos - coeffs_oracle) / denom))
    return coeffs_lanczos, coeffs_oracle, gap
