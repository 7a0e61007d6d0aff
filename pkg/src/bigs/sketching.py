"""Oblivious subspace embeddings: sparse sign and Gaussian sketching operators.

An operator maps length-n vectors to length-s vectors (s <= n) while
approximately preserving inner products within any fixed low-dimensional
subspace:

    |<x, y> - <Sx, Sy>| <= eps * ||x|| * ||y||

for all x, y in the subspace. Construction is fully determined by
(kind, s, n, zeta, seed, scaling); a counter-based generator keyed by the
seed makes the column content of a sparse sign operator a pure function of
(seed, column index).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .errors import ArgumentError, DegenerateInputError

__all__ = [
    "SketchKind",
    "Scaling",
    "SketchOperator",
    "EmbeddingReport",
    "new_sparse_sign",
    "new_gaussian",
    "new_identity",
    "apply",
    "materialize",
    "embedding_report",
    "default_zeta",
    "default_sketch_size",
]

_SEED_MAX = 2**64


class SketchKind(enum.Enum):
    SPARSE_SIGN = "sparse_sign"
    GAUSSIAN = "gaussian"
    IDENTITY = "identity"


class Scaling(enum.Enum):
    """Magnitude of the nonzeros of a sparse sign operator.

    STANDARD: +-1/sqrt(zeta), so every column has unit norm.
    ROOT_N:   +-sqrt(n/zeta), which inflates sketched norms by sqrt(n);
              kept for comparison, not recommended for embedding use.
    """

    STANDARD = "standard"
    ROOT_N = "root_n"


@dataclass
class SketchOperator:
    """An s x n random embedding, reproducible from its parameter tuple."""

    kind: SketchKind
    s: int
    n: int
    zeta: int
    seed: int
    scaling: Scaling
    _matrix: object = field(default=None, repr=False, compare=False)

    def matrix(self):
        """The realized operator: CSR for sparse sign, ndarray otherwise."""
        if self._matrix is None:
            self._matrix = _build(self)
        return self._matrix


@dataclass
class EmbeddingReport:
    """Observed embedding quality of an operator on one subspace basis.

    epsilon_observed is the largest inner-product distortion over sampled
    unit pairs from the subspace; the sigma ratios compare the extremal
    singular values of the sketched and unsketched basis.
    """

    epsilon_observed: float
    sigma_ratio_max: float
    sigma_ratio_min: float


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_MAX:
        raise ArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def default_zeta(s: int) -> int:
    """Recommended nonzeros per column for a sparse sign operator."""
    return min(int(s), 8)


def default_sketch_size(n: int, m: int) -> int:
    """Default sketch dimension for embedding an m-dimensional subspace of R^n."""
    return min(int(n), 4 * (int(m) + 1))


def new_sparse_sign(
    s: int,
    n: int,
    zeta: int,
    seed: int,
    scaling: Scaling = Scaling.STANDARD,
) -> SketchOperator:
    """Sparse sign operator: each column holds exactly zeta signed nonzeros.

    Requires 2 <= zeta <= s <= n. Row positions within a column are drawn
    without replacement; signs are independent fair coin flips.
    """
    s, n, zeta = int(s), int(n), int(zeta)
    if not 2 <= zeta:
        raise ArgumentError(f"zeta must be at least 2, got {zeta}")
    if zeta > s or s > n:
        raise ArgumentError(f"need zeta <= s <= n, got zeta={zeta}, s={s}, n={n}")
    return SketchOperator(SketchKind.SPARSE_SIGN, s, n, zeta, _check_seed(seed), scaling)


def new_gaussian(s: int, n: int, seed: int) -> SketchOperator:
    """Gaussian operator (1/sqrt(s)) * G with i.i.d. standard normal G."""
    s, n = int(s), int(n)
    if not 1 <= s <= n:
        raise ArgumentError(f"need 1 <= s <= n, got s={s}, n={n}")
    return SketchOperator(SketchKind.GAUSSIAN, s, n, 0, _check_seed(seed), Scaling.STANDARD)


def new_identity(n: int) -> SketchOperator:
    """Identity operator (s = n); collapses sketched algorithms onto exact ones."""
    n = int(n)
    if n < 1:
        raise ArgumentError(f"need n >= 1, got n={n}")
    return SketchOperator(SketchKind.IDENTITY, n, n, 0, 0, Scaling.STANDARD)


def _sparse_sign_matrix(op: SketchOperator) -> scipy.sparse.csr_matrix:
    s, n, zeta = op.s, op.n, op.zeta
    rng = np.random.Generator(np.random.Philox(key=op.seed))
    # One vectorized draw with a fixed per-column budget of 2*zeta words:
    # column j consumes exactly u[j], so its content depends only on
    # (seed, j) and not on construction order.
    u = rng.random((n, 2 * zeta))
    rows = np.empty((n, zeta), dtype=np.int64)
    # Floyd's sampling: distinct rows with exactly zeta draws per column.
    for k in range(zeta):
        t = s - zeta + k
        r = np.minimum((u[:, k] * (t + 1)).astype(np.int64), t)
        if k:
            collide = (rows[:, :k] == r[:, None]).any(axis=1)
            r = np.where(collide, t, r)
        rows[:, k] = r
    signs = np.where(u[:, zeta:] < 0.5, -1.0, 1.0)
    if op.scaling is Scaling.STANDARD:
        signs /= np.sqrt(zeta)
    else:
        signs *= np.sqrt(n / zeta)
    cols = np.repeat(np.arange(n, dtype=np.int64), zeta)
    return scipy.sparse.csr_matrix(
        (signs.ravel(), (rows.ravel(), cols)), shape=(s, n)
    )


def _build(op: SketchOperator):
    if op.kind is SketchKind.SPARSE_SIGN:
        return _sparse_sign_matrix(op)
    if op.kind is SketchKind.GAUSSIAN:
        rng = np.random.Generator(np.random.Philox(key=op.seed))
        return rng.standard_normal((op.s, op.n)) / np.sqrt(op.s)
    return None  # identity needs no storage


def apply(op: SketchOperator, M: np.ndarray) -> np.ndarray:
    """Apply the operator to a vector or to each column of a matrix.

    Always computes and returns float64, regardless of the input dtype.
    """
    A = np.asarray(M)
    if A.shape[0] != op.n:
        raise ArgumentError(
            f"operator acts on length-{op.n} vectors, input has leading dimension {A.shape[0]}"
        )
    A = A.astype(np.float64, copy=False)
    if op.kind is SketchKind.IDENTITY:
        return A.copy()
    out = op.matrix() @ A
    return np.asarray(out)


def materialize(op: SketchOperator) -> np.ndarray:
    """Dense s x n realization of the operator (testing and small problems)."""
    if op.kind is SketchKind.IDENTITY:
        return np.eye(op.n)
    if op.kind is SketchKind.SPARSE_SIGN:
        return op.matrix().toarray()
    return np.array(op.matrix())


def embedding_report(op: SketchOperator, Q: np.ndarray, pair_samples: int = 100) -> EmbeddingReport:
    """Measure how well the operator embeds range(Q).

    Samples unit pairs x, y from range(Q) and records the largest
    |<x,y> - <Sx,Sy>|; compares extremal singular values of Q and SQ.
    Q must have full column rank.
    """
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 2:
        raise ArgumentError("Q must be a matrix")
    n, m = Q.shape
    if n != op.n:
        raise ArgumentError(f"operator expects {op.n} rows, Q has {n}")
    sv_Q = np.linalg.svd(Q, compute_uv=False)
    if sv_Q[0] == 0.0 or sv_Q[-1] <= max(n, m) * np.finfo(np.float64).eps * sv_Q[0]:
        raise DegenerateInputError("Q is numerically rank deficient")
    SQ = apply(op, Q)
    sv_SQ = np.linalg.svd(SQ, compute_uv=False)

    # Sampled pairs: Sx for x = Q a is computed as SQ a (linearity).
    rng = np.random.Generator(np.random.Philox(key=_SEED_MAX + op.seed))
    eps_obs = 0.0
    for _ in range(int(pair_samples)):
        a = rng.standard_normal(m)
        b = rng.standard_normal(m)
        x, y = Q @ a, Q @ b
        nx, ny = np.linalg.norm(x), np.linalg.norm(y)
        sx, sy = SQ @ a, SQ @ b
        distortion = abs(x @ y - sx @ sy) / (nx * ny)
        eps_obs = max(eps_obs, distortion)
    return EmbeddingReport(
        epsilon_observed=float(eps_obs),
        sigma_ratio_max=float(sv_SQ[0] / sv_Q[0]),
        sigma_ratio_min=float(sv_SQ[-1] / sv_Q[-1]),
    )
