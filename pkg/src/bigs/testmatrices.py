"""Input generators for the experiment suite.

Three families: a deterministic severely ill-conditioned pair obtained by
sampling two oscillatory bivariate functions on a grid, seeded Gaussian
pairs, and seeded nonsymmetric matrices with a prescribed spectrum and a
similarity transform of prescribed condition number. Also hosts the Monte
Carlo experiment measuring sketched inner products of orthonormal vector
pairs.

All randomness flows through counter-based generators keyed by (seed,
substream index), so every output is a pure function of its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ArgumentError
from .sketching import (
    SketchKind,
    apply,
    default_zeta,
    new_gaussian,
    new_identity,
    new_sparse_sign,
)

__all__ = [
    "SpectrumSpec",
    "IpExperimentRow",
    "gen_ill_conditioned",
    "gen_gaussian_pair",
    "gen_prescribed_spectrum",
    "leading_decay_spectrum",
    "sketched_ip_samples",
    "sketched_orthogonal_ip_experiment",
]


def _substream(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for (seed, index)."""
    return np.random.Generator(np.random.Philox(key=(int(index) << 64) + int(seed)))


def gen_ill_conditioned(n: int, m: int):
    """Deterministic, severely ill-conditioned pair sampled from two
    oscillatory functions on the unit square grid."""
    if not 1 <= m <= n:
        raise ArgumentError(f"need 1 <= m <= n, got n={n}, m={m}")
    x = np.linspace(0.0, 1.0, n)[:, None]
    y = np.linspace(0.0, 1.0, m)[None, :] if m > 1 else np.zeros((1, 1))
    X = np.sin(x + y) / (np.cos(100.0 * (y - x)) + 1.1)
    Y = np.cos(x + y) / (np.sin(200.0 * (y - x)) + 1.2)
    return X, Y


def gen_gaussian_pair(n: int, m: int, seed: int):
    """Two independent standard normal n-by-m matrices."""
    if not 1 <= m <= n:
        raise ArgumentError(f"need 1 <= m <= n, got n={n}, m={m}")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    X = rng.standard_normal((n, m))
    Y = rng.standard_normal((n, m))
    return X, Y


@dataclass(frozen=True)
class SpectrumSpec:
    """Target spectrum and similarity conditioning for a nonsymmetric matrix."""

    n: int
    eigenvalues: np.ndarray
    cond_X: float

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=np.float64)
        object.__setattr__(self, "eigenvalues", ev)
        if ev.shape != (self.n,):
            raise ArgumentError(f"need exactly n={self.n} eigenvalues, got {ev.shape}")
        if not np.all(np.isfinite(ev)):
            raise ArgumentError("eigenvalues must be finite")
        if not self.cond_X >= 1.0:
            raise ArgumentError(f"cond_X must be >= 1, got {self.cond_X}")


def gen_prescribed_spectrum(spec: SpectrumSpec, seed: int) -> np.ndarray:
    """A = X^-1 diag(eigenvalues) X with kappa(X) = cond_X.

    X = U Sigma V^T with random orthogonal factors and log-spaced singular
    values from 1 to cond_X.
    """
    n = spec.n
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    sigma = np.logspace(0.0, np.log10(spec.cond_X), n) if n > 1 else np.ones(1)
    X = (U * sigma) @ V.T
    return scipy.linalg.solve(X, spec.eigenvalues[:, None] * X)


def leading_decay_spectrum(n: int) -> np.ndarray:
    """Spectrum with 15 geometrically separated leading eigenvalues
    (ratio 0.95) followed by a slowly decaying tail (ratio 0.99)."""
    if n < 1:
        raise ArgumentError(f"need n >= 1, got n={n}")
    i = np.arange(1, n + 1, dtype=np.float64)
    lam = np.where(i <= 15, 0.95 ** i, 0.95 ** 15 * 0.99 ** (i - 15))
    return lam


def _orthonormal_pair(rng: np.random.Generator, n: int):
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    y = rng.standard_normal(n)
    for _ in range(2):
        y -= (x @ y) * x
    y /= np.linalg.norm(y)
    return x, y


def _make_op(kind: SketchKind, s: int, n: int, seed: int):
    if kind is SketchKind.SPARSE_SIGN:
        return new_sparse_sign(s, n, default_zeta(s), seed)
    if kind is SketchKind.GAUSSIAN:
        return new_gaussian(s, n, seed)
    return new_identity(n)


def sketched_ip_samples(
    n: int, s: int, trials: int, kind: SketchKind, seed: int, same_vector: bool = False
) -> np.ndarray:
    """Per-trial sketched inner products of a fresh orthonormal pair.

    Each trial draws its own pair (x, y) and its own sketch operator from a
    substream keyed by the trial index, then records <sketch(x), sketch(y)>
    (or <sketch(x), sketch(x)> when same_vector is set).
    """
    if trials < 1:
        raise ArgumentError(f"need trials >= 1, got {trials}")
    if not 1 <= s <= n:
        raise ArgumentError(f"need 1 <= s <= n, got s={s}, n={n}")
    values = np.empty(trials)
    for t in range(trials):
        rng = _substream(seed, t + 1)
        x, y = _orthonormal_pair(rng, n)
        op = _make_op(kind, s, n, int(rng.integers(0, 2**63)))
        sx = apply(op, x)
        if same_vector:
            values[t] = sx @ sx
        else:
            values[t] = sx @ apply(op, y)
    return values


@dataclass(frozen=True)
class IpExperimentRow:
    kind: str
    s: int
    trial_mean: float
    trial_min: float


def sketched_orthogonal_ip_experiment(
    n: int,
    s_grid,
    trials: int,
    kinds,
    seed: int,
) -> list[IpExperimentRow]:
    """Mean and minimum of |<sketch(x), sketch(y)>| over trials per (kind, s).

    x, y are random orthonormal unit vectors redrawn every trial; sketches
    are redrawn every trial as well.
    """
    s_grid = [int(s) for s in s_grid]
    if len(s_grid) == 0 or any(s < 1 or s > n for s in s_grid):
        raise ArgumentError(f"invalid sketch-size grid for n={n}: {s_grid}")
    if trials < 1:
        raise ArgumentError(f"need trials >= 1, got {trials}")
    rows = []
    for kind in kinds:
        kind = SketchKind(kind)
        for s in s_grid:
            vals = np.abs(sketched_ip_samples(n, s, trials, kind, seed))
            rows.append(
                IpExperimentRow(
                    kind=kind.value,
                    s=s,
                    trial_mean=float(vals.mean()),
                    trial_min=float(vals.min()),
                )
            )
    return rows
