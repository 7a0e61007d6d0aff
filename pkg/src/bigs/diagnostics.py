"""Stability instrumentation: biorthogonality loss, decomposition error,
condition numbers, and angle tracking for basis pairs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateInputError

__all__ = [
    "IterationDiagnostics",
    "biorth_loss",
    "decomposition_error",
    "cond2",
    "angle_inv_cos",
]


@dataclass
class IterationDiagnostics:
    """Per-step measurements recorded while building a basis pair.

    For sketched runs, biorth_loss and inv_cos_angle refer to the sketched
    vectors; the condition numbers always refer to the full bases.
    sketched_ips counts length-s inner products spent in the step (0 for
    deterministic runs).
    """

    step: int
    cond_Q: float
    cond_P: float
    biorth_loss: float
    inv_cos_angle: float
    d_i: float
    sketched_ips: int = 0


def biorth_loss(Q: np.ndarray, P: np.ndarray) -> float:
    """Frobenius norm of I - P^T Q."""
    Q = np.asarray(Q, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    if Q.shape != P.shape:
        raise ArgumentError(f"shape mismatch: {Q.shape} vs {P.shape}")
    m = Q.shape[1]
    return float(np.linalg.norm(np.eye(m) - P.T @ Q))


def decomposition_error(X: np.ndarray, Q: np.ndarray, TX: np.ndarray) -> float:
    """Frobenius norm of X - Q @ TX."""
    X = np.asarray(X, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    TX = np.asarray(TX, dtype=np.float64)
    if Q.shape[1] != TX.shape[0] or X.shape != (Q.shape[0], TX.shape[1]):
        raise ArgumentError(
            f"nonconformal shapes: X {X.shape}, Q {Q.shape}, TX {TX.shape}"
        )
    return float(np.linalg.norm(X - Q @ TX))


def cond2(M: np.ndarray) -> float:
    """2-norm condition number from a full dense SVD."""
    M = np.asarray(M, dtype=np.float64)
    if not np.any(M):
        raise DegenerateInputError("condition number of a zero matrix is undefined")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])


def angle_inv_cos(q: np.ndarray, p: np.ndarray) -> float:
    """Reciprocal of |cos| of the angle between q and p.

    Equals ||q|| ||p|| / |<q, p>|; returns +inf for an exactly orthogonal
    pair so near-breakdown runs still produce a complete series.
    """
    q = np.asarray(q, dtype=np.float64).ravel()
    p = np.asarray(p, dtype=np.float64).ravel()
    nq, np_ = np.linalg.norm(q), np.linalg.norm(p)
    if nq == 0.0 or np_ == 0.0:
        raise DegenerateInputError("angle with a zero vector is undefined")
    ip = abs(float(q @ p))
    if ip == 0.0:
        return float("inf")
    return float(nq * np_ / ip)
