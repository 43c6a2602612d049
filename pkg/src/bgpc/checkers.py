"""Exact per-instance identifiability deciders.

Both deciders reduce identifiability to the null space of a linear map ``G``
acting on the unknown inverse gains ``x``:  ``G x = vec(A_perp^* diag(x) Y)``.
The true inverse gain always lies in that null space, so the instance is
identifiable up to scaling exactly when the null space is one-dimensional.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, islice
from math import comb

import numpy as np

from .errors import DimensionError, EnumerationGuardError, ParameterError, PreconditionError
from .indexsets import IndexSet, shift_masks
from .matcore import (
    DEFAULT_TOL,
    Tolerance,
    as_cmatrix,
    batched_rank,
    dft,
    nonzero_rows,
    numerical_rank,
    orthonormal_complement,
)

ENUMERATION_GUARD = 10 ** 6
_CHUNK = 256


@dataclass
class CheckReport:
    """Verdict of a checker.

    ``g_ranks`` maps a label (``"A"`` for the subspace checker, a support
    string such as ``"{1,3,5}"`` for the joint-sparsity checker) to the
    numerical rank of the corresponding G.  ``failing_support`` is the first
    disqualifying support found by the joint-sparsity checker.
    """

    identifiable: bool
    g_ranks: dict[str, int] = field(default_factory=dict)
    failing_support: IndexSet | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "identifiable": self.identifiable,
            "reason": self.reason,
            "g_ranks": dict(self.g_ranks),
            "failing_support": None if self.failing_support is None else list(self.failing_support.members),
        }


def _check_measurement(Y, tol: Tolerance) -> np.ndarray:
    Y = as_cmatrix(Y, "Y")
    if Y.size == 0:
        raise DimensionError("Y is empty")
    zero = np.setdiff1d(np.arange(Y.shape[0]), nonzero_rows(Y, tol))
    if zero.size:
        raise PreconditionError(f"Y has zero rows {(zero + 1).tolist()}")
    return Y


def build_G(annihilator, Y) -> np.ndarray:
    """Stack ``annihilator @ diag(Y[:, j])`` for every column j of Y.

    ``annihilator`` is the ``(n - k) x n`` matrix ``A_perp^*`` (already
    conjugate-transposed).  The result has shape ``(N (n - k), n)`` and
    satisfies ``G @ x == vec(annihilator @ diag(x) @ Y)`` with column-major vec.
    """
    W = as_cmatrix(annihilator, "annihilator")
    Y = as_cmatrix(Y, "Y")
    if W.shape[1] != Y.shape[0]:
        raise DimensionError(f"annihilator has {W.shape[1]} columns but Y has {Y.shape[0]} rows")
    # block j is W * Y[:, j] broadcast over columns
    return (W[None, :, :] * Y.T[:, None, :]).reshape(-1, W.shape[1])


def _stacked_G(annihilators: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """``build_G`` for a batch of annihilators of shape ``(batch, n - k, n)``."""
    b, r, n = annihilators.shape
    G = annihilators[:, None, :, :] * Y.T[None, :, None, :]
    return G.reshape(b, -1, n)


def check_subspace(A, Y, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Decide identifiability up to scaling for the subspace model ``Y = diag(lam) A X``.

    Parameters
    ----------
    A : (n, m) array_like
        Known basis, full column rank, ``n > m``.
    Y : (n, N) array_like
        Measurement without zero rows.

    Returns
    -------
    CheckReport
        ``identifiable`` is ``rank(G) >= n - 1``.
    """
    A = as_cmatrix(A, "A")
    Y = _check_measurement(Y, tol)
    n = A.shape[0]
    if Y.shape[0] != n:
        raise DimensionError(f"A has {n} rows but Y has {Y.shape[0]}")
    A_perp = orthonormal_complement(A, tol)
    G = build_G(A_perp.conj().T, Y)
    r = numerical_rank(G, tol)
    ok = r >= n - 1
    reason = "rank(G) = n-1" if ok else f"rank(G) = {r} <= n-2: null space has dimension >= 2"
    return CheckReport(ok, {"A": r}, None, reason)


def check_jointsparse_dft(Y, J: IndexSet, s: int, tol: Tolerance = DEFAULT_TOL, diagnose: bool = False,
                          guard: int = ENUMERATION_GUARD) -> CheckReport:
    """Decide identifiability for the DFT basis with joint support ``J``.

    Every candidate support ``J'`` of size ``s`` is tried with annihilator
    ``F(:, J'^c)^*``.  The instance is not identifiable when some ``J'`` gives
    ``rank(G) <= n - 2``, or gives ``rank(G) = n - 1`` without being a circular
    shift of ``J``.  Supports are scanned in lexicographic order in chunks; the
    scan stops after the first chunk with a disqualifying support unless
    ``diagnose`` is set, in which case every rank is recorded.
    """
    Y = _check_measurement(Y, tol)
    n = Y.shape[0]
    if J.n != n:
        raise DimensionError(f"support lives in 1..{J.n} but Y has {n} rows")
    if len(J) != s:
        raise ParameterError(f"|J| = {len(J)} but s = {s}")
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s = {s}")
    if s == n:
        # no annihilator: every x is consistent
        return CheckReport(n == 1, {}, None if n == 1 else J,
                           "dense support leaves the gains unconstrained" if n > 1 else "n = 1")
    total = comb(n, s)
    if total > guard:
        raise EnumerationGuardError(f"C({n}, {s}) = {total} supports exceeds the guard {guard}")

    Fc = dft(n).conj().T  # row j is F(:, j)^*
    shifts = shift_masks(J)
    ranks: dict[str, int] = {}
    failing: IndexSet | None = None
    reason = ""
    supports = combinations(range(n), s)
    while True:
        chunk = list(islice(supports, _CHUNK))
        if not chunk:
            break
        comps = [np.setdiff1d(np.arange(n), c) for c in chunk]
        ann = np.stack([Fc[cc] for cc in comps])
        rk = batched_rank(_stacked_G(ann, Y), tol)
        for c, r in zip(chunk, rk):
            Jp = IndexSet.from_zero_based(c, n)
            if diagnose:
                ranks[str(Jp)] = int(r)
            if failing is not None:
                continue
            if r <= n - 2:
                failing, reason = Jp, f"rank(G) = {r} <= n-2 for support {Jp}"
            elif r == n - 1 and Jp.mask not in shifts:
                failing, reason = Jp, f"support {Jp}, not a shift of {J}, admits a solution"
            if failing is not None and not diagnose:
                ranks[str(Jp)] = int(r)
        if failing is not None and not diagnose:
            break
    if failing is None:
        return CheckReport(True, ranks, None, "only shifts of the true support admit solutions")
    return CheckReport(False, ranks, failing, reason)


# short names matching the operation contract
algorithm1 = check_subspace
algorithm2 = check_jointsparse_dft
