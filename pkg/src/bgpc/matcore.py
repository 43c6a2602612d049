"""Dense complex linear algebra primitives and the special matrices used
throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  Index
arguments at the public boundary of the package are 1-based; everything in
this module works on 0-based numpy indexing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError, RankError

EPS = np.finfo(np.float64).eps

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_cmatrix",
    "singular_values",
    "numerical_rank",
    "batched_rank",
    "orthonormal_complement",
    "dft",
    "dft2",
    "finite_diff",
    "finite_diff_inv",
    "haar4",
    "identity",
    "special_matrix",
    "circulant",
    "fdinv_conjugate",
    "fdinv_conjugate_closed_form",
    "nonzero_mask",
    "count_nonzero",
    "nonzero_rows",
    "max_abs",
]


@dataclass(frozen=True)
class Tolerance:
    """Cutoffs used for every rank and zero-entry decision.

    Parameters
    ----------
    rel : float or None
        Relative singular-value cutoff.  ``None`` selects the shape-dependent
        default ``max(rows, cols) * eps * 64``.
    abs : float
        Absolute cutoff: a matrix whose largest singular value is at most
        ``abs`` has rank 0, and an entry is treated as zero when its modulus
        is at most ``abs`` (scaled by the largest modulus when that exceeds 1).
    """

    rel: float | None = None
    abs: float = 1e-12

    def __post_init__(self):
        if self.rel is not None and not self.rel >= 0:
            raise ParameterError(f"tol.rel must be >= 0, got {self.rel}")
        if not self.abs >= 0:
            raise ParameterError(f"tol.abs must be >= 0, got {self.abs}")

    def rel_for(self, shape) -> float:
        if self.rel is not None:
            return self.rel
        return max(shape[-2], shape[-1]) * EPS * 64


DEFAULT_TOL = Tolerance()


def as_cmatrix(M, name: str = "matrix") -> np.ndarray:
    """Validate ``M`` as a finite 2-D array and return it as complex128."""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite entries")
    return arr


def _as_cvector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite entries")
    return arr


def singular_values(M) -> np.ndarray:
    M = np.asarray(M, dtype=np.complex128)
    if M.size == 0:
        raise DimensionError("empty matrix has no singular values")
    return np.linalg.svd(M, compute_uv=False)


def _rank_from_sv(s: np.ndarray, shape, tol: Tolerance) -> np.ndarray:
    smax = s[..., 0]
    rank = np.sum(s > tol.rel_for(shape) * smax[..., None], axis=-1)
    return np.where(smax <= tol.abs, 0, rank)


def numerical_rank(M, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol.rel * sigma_max``.

    Returns 0 when ``sigma_max <= tol.abs``.
    """
    M = as_cmatrix(M)
    return int(_rank_from_sv(singular_values(M), M.shape, tol))


def batched_rank(stack, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Numerical rank of each matrix in a ``(batch, rows, cols)`` stack."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] == 0 or stack.shape[2] == 0:
        raise DimensionError(f"expected a nonempty (batch, rows, cols) stack, got {stack.shape}")
    if stack.shape[0] == 0:
        return np.zeros(0, dtype=int)
    s = np.linalg.svd(stack, compute_uv=False)
    return _rank_from_sv(s, stack.shape, tol).astype(int)


def orthonormal_complement(A, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column space of A.

    For ``A`` of shape ``(n, m)`` with ``n > m`` and full column rank, returns
    ``A_perp`` of shape ``(n, n - m)`` with ``A_perp^* A = 0`` and
    ``A_perp^* A_perp = I``.  Built from the complete QR factorization.
    """
    A = as_cmatrix(A, "A")
    n, m = A.shape
    if n == 0 or m == 0 or n <= m:
        raise DimensionError(f"orthonormal complement needs a tall matrix, got {A.shape}")
    if numerical_rank(A, tol) < m:
        raise RankError("A is not of full column rank")
    Q, _ = np.linalg.qr(A, mode="complete")
    return Q[:, m:]


def dft(n: int) -> np.ndarray:
    """Normalized (unitary) DFT matrix, ``F[j, k] = exp(-2 pi i j k / n) / sqrt(n)``."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def dft2(n: int) -> np.ndarray:
    """2-D DFT ``F (x) F`` acting on vectors of length ``n = side**2``."""
    side = math.isqrt(n)
    if n < 1 or side * side != n:
        raise DimensionError(f"2-D DFT size must be a perfect square, got {n}")
    F = dft(side)
    return np.kron(F, F)


def finite_diff(n: int) -> np.ndarray:
    """Lower bidiagonal difference operator: +1 on the diagonal, -1 below."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return (np.eye(n) - np.eye(n, k=-1)).astype(np.complex128)


def finite_diff_inv(n: int) -> np.ndarray:
    """Inverse of :func:`finite_diff`: the lower triangular matrix of ones."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return np.tril(np.ones((n, n))).astype(np.complex128)


def haar4() -> np.ndarray:
    return np.array(
        [[1, 1, 1, 1],
         [1, 1, -1, -1],
         [1, -1, 0, 0],
         [0, 0, 1, -1]],
        dtype=np.complex128,
    )


def identity(n: int) -> np.ndarray:
    if n < 1:
        raise ParameterError("n must be >= 1")
    return np.eye(n, dtype=np.complex128)


_SPECIAL = {
    "dft": dft,
    "dft2": dft2,
    "finite_diff": finite_diff,
    "finite_diff_inv": finite_diff_inv,
    "identity": identity,
}


def special_matrix(kind: str, n: int | None = None) -> np.ndarray:
    """Build one of the named matrices.

    ``kind`` is one of ``dft``, ``dft2``, ``finite_diff``, ``finite_diff_inv``,
    ``identity`` (all need ``n``) or ``haar4``.
    """
    if kind == "haar4":
        if n not in (None, 4):
            raise DimensionError("haar4 is 4x4")
        return haar4()
    try:
        build = _SPECIAL[kind]
    except KeyError:
        raise ParameterError(f"unknown special matrix kind {kind!r}") from None
    if n is None:
        raise ParameterError(f"{kind} needs a size n")
    return build(n)


def circulant(c) -> np.ndarray:
    """Circulant matrix whose first column is ``c``; ``C[a, b] = c[(a - b) mod n]``."""
    c = _as_cvector(c, "c")
    n = c.size
    if n == 0:
        raise DimensionError("circulant needs a nonempty first column")
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c[idx]


def fdinv_conjugate(gamma) -> np.ndarray:
    """``D F^* diag(gamma) F D^{-1}`` evaluated by matrix products."""
    gamma = _as_cvector(gamma, "gamma")
    n = gamma.size
    F = dft(n)
    return finite_diff(n) @ (F.conj().T @ (gamma[:, None] * F)) @ finite_diff_inv(n)


def fdinv_conjugate_closed_form(c) -> np.ndarray:
    """Entrywise closed form of ``D C D^{-1}`` for the circulant C with first column c.

    Row 1 holds partial sums of ``c``; below it the first column is zero and
    entry ``(a, b)`` (1-based, ``a, b >= 2``) equals ``c[(a - b) mod n + 1] - c[a]``.
    """
    c = _as_cvector(c, "c")
    n = c.size
    P = np.zeros((n, n), dtype=np.complex128)
    P[0, 0] = c.sum()
    for b in range(2, n + 1):
        # sum_{j=2}^{n+2-b} c_j
        P[0, b - 1] = c[1:n + 2 - b].sum()
    for a in range(2, n + 1):
        for b in range(2, n + 1):
            P[a - 1, b - 1] = c[(a - b) % n] - c[a - 1]
    return P


def max_abs(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def nonzero_mask(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Boolean mask of entries with modulus above the zero cutoff."""
    M = np.asarray(M, dtype=np.complex128)
    if M.size == 0:
        return np.zeros(M.shape, dtype=bool)
    mag = np.abs(M)
    return mag > tol.abs * max(1.0, float(mag.max()))


def count_nonzero(M, tol: Tolerance = DEFAULT_TOL) -> int:
    return int(nonzero_mask(M, tol).sum())


def nonzero_rows(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """0-based indices of rows with at least one nonzero entry."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise DimensionError("nonzero_rows expects a 2-D matrix")
    return np.flatnonzero(nonzero_mask(M, tol).any(axis=1))
