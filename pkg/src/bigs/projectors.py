"""Oblique and sketched oblique projectors onto a paired basis (Q, P).

The pair carries the gram matrix P^T Q (or (SP)^T SQ for sketched pairs,
S being a sketching operator) together with an LU factorization that is
extended by bordering in O(i^2) per new column, so m extensions cost O(m^3)
total instead of O(m^4) for repeated refactorization.

Bordering cannot reorder rows, so a growth monitor watches the new pivot:
a suspicious pivot triggers one full pivoted refactorization before a
near-breakdown error is raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, solve_triangular

from .errors import ArgumentError, NearBreakdownError

__all__ = ["ObliquePair", "new_pair", "gram_extend", "oblique_apply", "sketched_oblique_apply"]

# Fast-path pivot smaller than this fraction of the largest gram entry is
# treated as suspect and triggers a pivoted refactorization.
_GROWTH_RATIO = 1e-8


def _unit_roundoff(dtype=np.float64) -> float:
    return float(np.finfo(dtype).eps) / 2.0


def _breakdown_tol(gram: np.ndarray) -> float:
    return 64.0 * _unit_roundoff(gram.dtype) * float(np.linalg.norm(gram))


def _lu_solve(L: np.ndarray, U: np.ndarray, perm: np.ndarray, b: np.ndarray,
              transpose: bool = False) -> np.ndarray:
    """Solve gram @ x = b (or gram.T @ x = b) given gram[perm] = L @ U."""
    if L.shape[0] == 0:
        return np.zeros_like(b)
    if not transpose:
        w = solve_triangular(L, b[perm], lower=True, unit_diagonal=True)
        return solve_triangular(U, w, lower=False)
    w = solve_triangular(U, b, trans="T", lower=False)
    w = solve_triangular(L, w, trans="T", lower=True, unit_diagonal=True)
    x = np.empty_like(w)
    x[perm] = w
    return x


def _lu_border(L: np.ndarray, U: np.ndarray, perm: np.ndarray,
               c: np.ndarray, r: np.ndarray, d: float):
    """Border factors of gram with new column c, row r, corner d.

    Returns (y, z, u): the new U column, new L row, and the new pivot, so
    that the grown gram (with the new row kept last) factors as
    [[L, 0], [z^T, 1]] @ [[U, y], [0, u]] under the extended permutation.
    """
    i = L.shape[0]
    if i == 0:
        return np.zeros(0), np.zeros(0), float(d)
    y = solve_triangular(L, c[perm], lower=True, unit_diagonal=True)
    z = solve_triangular(U, r, trans="T", lower=False)
    return y, z, float(d - z @ y)


def _refactor(gram: np.ndarray):
    """Full pivoted LU; returns (L, U, perm) with gram[perm] = L @ U."""
    lu, piv = lu_factor(gram, check_finite=False)
    perm = np.arange(gram.shape[0])
    for k, pk in enumerate(piv):
        perm[k], perm[pk] = perm[pk], perm[k]
    L = np.tril(lu, -1) + np.eye(gram.shape[0])
    U = np.triu(lu)
    return L, U, perm


@dataclass
class ObliquePair:
    """A paired basis (Q, P) with its factored gram matrix.

    gram is P^T Q for a plain pair, (SP)^T SQ for a sketched pair; SQ and SP
    cache the sketched columns. Values are extended functionally through
    gram_extend; an instance is never mutated.
    """

    Q: np.ndarray
    P: np.ndarray
    gram: np.ndarray
    sketched: bool
    SQ: np.ndarray | None = None
    SP: np.ndarray | None = None
    refactorizations: int = 0
    _L: np.ndarray = field(default=None, repr=False)
    _U: np.ndarray = field(default=None, repr=False)
    _perm: np.ndarray = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.Q.shape[1]

    @property
    def gram_lu(self):
        """Factors (L, U, perm) with gram[perm] = L @ U."""
        return self._L, self._U, self._perm

    def solve_gram(self, b: np.ndarray, transpose: bool = False) -> np.ndarray:
        """Solve gram @ x = b (or gram.T @ x = b) through the stored factors."""
        self._check_nonsingular()
        return _lu_solve(self._L, self._U, self._perm, b, transpose)

    def _check_nonsingular(self) -> None:
        if self.size == 0:
            return
        pivots = np.abs(np.diag(self._U))
        tol = _breakdown_tol(self.gram)
        smallest = float(pivots.min())
        if smallest <= tol:
            raise NearBreakdownError(
                f"gram pivot {smallest:.3e} at or below tolerance {tol:.3e}",
                pivot=smallest,
            )


def new_pair(n: int, sketched: bool = False, s: int | None = None) -> ObliquePair:
    """An empty pair over R^n; extend it column by column with gram_extend."""
    n = int(n)
    if n < 1:
        raise ArgumentError(f"need n >= 1, got n={n}")
    if sketched:
        if s is None or int(s) < 1:
            raise ArgumentError("a sketched pair needs the sketch dimension s")
        s = int(s)
        SQ = np.zeros((s, 0))
        SP = np.zeros((s, 0))
    else:
        SQ = SP = None
    z = np.zeros((0, 0))
    return ObliquePair(
        Q=np.zeros((n, 0)), P=np.zeros((n, 0)), gram=z.copy(), sketched=sketched,
        SQ=SQ, SP=SP, _L=z.copy(), _U=z.copy(), _perm=np.zeros(0, dtype=np.int64),
    )


def gram_extend(
    pair: ObliquePair,
    q_new: np.ndarray,
    p_new: np.ndarray,
    sq_new: np.ndarray | None = None,
    sp_new: np.ndarray | None = None,
) -> ObliquePair:
    """Extend the pair by one column on each side, updating the factors.

    Sketched pairs require the sketches sq_new, sp_new of the new columns.
    Raises NearBreakdownError when the extended gram is singular to working
    precision even after one pivoted refactorization.
    """
    q_new = np.asarray(q_new, dtype=np.float64).ravel()
    p_new = np.asarray(p_new, dtype=np.float64).ravel()
    n = pair.Q.shape[0]
    if q_new.shape[0] != n or p_new.shape[0] != n:
        raise ArgumentError(f"new columns must have length {n}")
    if pair.sketched:
        if sq_new is None or sp_new is None:
            raise ArgumentError("a sketched pair needs sq_new and sp_new")
        sq_new = np.asarray(sq_new, dtype=np.float64).ravel()
        sp_new = np.asarray(sp_new, dtype=np.float64).ravel()
        c = pair.SP.T @ sq_new
        r = pair.SQ.T @ sp_new
        d = float(sp_new @ sq_new)
    else:
        c = pair.P.T @ q_new
        r = pair.Q.T @ p_new
        d = float(p_new @ q_new)

    i = pair.size
    gram = np.empty((i + 1, i + 1))
    gram[:i, :i] = pair.gram
    gram[:i, i] = c
    gram[i, :i] = r
    gram[i, i] = d

    y, z, u = _lu_border(pair._L, pair._U, pair._perm, c, r, d)
    tol = _breakdown_tol(gram)
    refactors = pair.refactorizations
    if abs(u) < _GROWTH_RATIO * float(np.abs(gram).max(initial=0.0)) or abs(u) <= tol:
        L, U, perm = _refactor(gram)
        refactors += 1
        smallest = float(np.abs(np.diag(U)).min())
        if smallest <= tol:
            raise NearBreakdownError(
                f"extended gram is singular: pivot {smallest:.3e} <= tolerance {tol:.3e}",
                pivot=smallest,
            )
    else:
        L = np.zeros((i + 1, i + 1))
        L[:i, :i] = pair._L
        L[i, :i] = z
        L[i, i] = 1.0
        U = np.zeros((i + 1, i + 1))
        U[:i, :i] = pair._U
        U[:i, i] = y
        U[i, i] = u
        perm = np.concatenate([pair._perm, [i]])

    return ObliquePair(
        Q=np.column_stack([pair.Q, q_new]),
        P=np.column_stack([pair.P, p_new]),
        gram=gram,
        sketched=pair.sketched,
        SQ=None if pair.SQ is None else np.column_stack([pair.SQ, sq_new]),
        SP=None if pair.SP is None else np.column_stack([pair.SP, sp_new]),
        refactorizations=refactors,
        _L=L, _U=U, _perm=perm,
    )


def oblique_apply(pair: ObliquePair, x: np.ndarray) -> np.ndarray:
    """Project x onto range(Q), orthogonally to range(P): Q (P^T Q)^-1 P^T x."""
    if pair.sketched:
        raise ArgumentError("pair is sketched; use sketched_oblique_apply")
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != pair.Q.shape[0]:
        raise ArgumentError(f"x must have length {pair.Q.shape[0]}")
    if pair.size == 0:
        return np.zeros_like(x)
    coeffs = pair.solve_gram(pair.P.T @ x)
    return pair.Q @ coeffs


def sketched_oblique_apply(pair: ObliquePair, x: np.ndarray, sx: np.ndarray) -> np.ndarray:
    """Project x onto range(Q), sketch-orthogonally to range(P).

    The caller supplies sx, the sketch of x; the result is
    Q ((SP)^T SQ)^-1 (SP)^T sx.
    """
    if not pair.sketched:
        raise ArgumentError("pair is not sketched; use oblique_apply")
    x = np.asarray(x, dtype=np.float64).ravel()
    sx = np.asarray(sx, dtype=np.float64).ravel()
    if x.shape[0] != pair.Q.shape[0]:
        raise ArgumentError(f"x must have length {pair.Q.shape[0]}")
    if sx.shape[0] != pair.SP.shape[0]:
        raise ArgumentError(f"sx must have length {pair.SP.shape[0]}")
    if pair.size == 0:
        return np.zeros_like(x)
    coeffs = pair.solve_gram(pair.SP.T @ sx)
    return pair.Q @ coeffs
