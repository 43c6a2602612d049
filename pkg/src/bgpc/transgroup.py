"""Ambiguity transformation groups of ``Y = diag(lam) A X``.

A gain vector ``gamma`` belongs to ``Gamma(A)`` when ``A^{-1} diag(gamma) A``
is a generalized permutation matrix; the matching transformation maps
``(lam, X)`` to ``(lam ./ gamma, A^{-1} diag(gamma) A X)`` and leaves the
measurement unchanged.  Four groups are modelled:

* ``Scaling`` -- ``(sigma lam, X / sigma)``;
* ``DftShiftScale`` -- A = F: a modulation of ``lam`` paired with a scaled
  circular shift of the rows of X;
* ``Dft2dShiftScale`` -- A = F (x) F: the same with 2-D circular shifts;
* ``GammaOf(basis)`` -- the general group for an invertible square basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import DegenerateInputError, DimensionError, ParameterError, RankError
from .matcore import (
    DEFAULT_TOL,
    Tolerance,
    as_cmatrix,
    dft,
    dft2,
    numerical_rank,
)

# Relative residual under which two pairs (or a gain and a closed form) match.
MATCH_TOL = 1e-9
# A row/column entry only counts as "the" nonzero if it dominates the runner-up by this factor.
DOMINANCE = 1e6


@dataclass(frozen=True)
class Scaling:
    name: ClassVar[str] = "scaling"


@dataclass(frozen=True)
class DftShiftScale:
    name: ClassVar[str] = "dft_shift_scale"


@dataclass(frozen=True)
class Dft2dShiftScale:
    name: ClassVar[str] = "dft2d_shift_scale"


@dataclass(frozen=True, eq=False)
class GammaOf:
    """General group ``Gamma(basis)`` for an invertible square basis."""

    basis: np.ndarray
    name: ClassVar[str] = "gamma_of"

    def __post_init__(self):
        A = as_cmatrix(self.basis, "basis")
        if A.shape[0] != A.shape[1]:
            raise DimensionError(f"GammaOf needs a square basis, got {A.shape}")
        if numerical_rank(A) < A.shape[0]:
            raise RankError("GammaOf needs an invertible basis")
        object.__setattr__(self, "basis", A)


GroupKind = Scaling | DftShiftScale | Dft2dShiftScale | GammaOf


@dataclass(frozen=True)
class Witness:
    """Parameters of one group element.

    ``shift`` is an int for the 1-D DFT group and a ``(vertical, horizontal)``
    pair for the 2-D one.  ``gamma`` is the gain ratio ``lam_old ./ lam_new``.
    """

    sigma: complex | None = None
    shift: int | tuple[int, int] | None = None
    gamma: np.ndarray | None = None


@dataclass(frozen=True)
class OrbitVerdict:
    equivalent: bool
    witness: Witness | None = None
    reason: str = ""


def _rel_close(a, b, tol: float = MATCH_TOL) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1e-300)
    return bool(np.abs(a - b).max(initial=0.0) <= tol * scale)


# --- generalized permutations and Gamma(A) ---------------------------------

def _single_dominant(mag: np.ndarray, thr: float) -> np.ndarray | None:
    """Position of the single nonzero in each row of ``mag``, or None."""
    big = mag > thr
    if not np.all(big.sum(axis=1) == 1):
        return None
    srt = np.sort(mag, axis=1)
    if mag.shape[1] > 1 and np.any(srt[:, -1] < DOMINANCE * srt[:, -2]):
        return None
    return np.argmax(mag, axis=1)


def is_generalized_permutation(P, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Exactly one nonzero per row and per column, and invertible.

    An entry is nonzero when its modulus exceeds ``tol.abs`` (scaled by the
    largest modulus when that exceeds 1); the nonzero entry of a row or column
    must also dominate the runner-up by a factor of ``DOMINANCE``.
    """
    P = as_cmatrix(P, "P")
    n, m = P.shape
    if n != m:
        raise DimensionError(f"generalized permutation must be square, got {P.shape}")
    mag = np.abs(P)
    top = float(mag.max()) if mag.size else 0.0
    if top == 0.0:
        return False
    thr = tol.abs * max(1.0, top)
    rows = _single_dominant(mag, thr)
    cols = _single_dominant(mag.T, thr)
    if rows is None or cols is None:
        return False
    if sorted(rows.tolist()) != list(range(n)):
        return False
    return numerical_rank(P, tol) == n


def gamma_conjugate(basis, gamma) -> np.ndarray:
    """``A^{-1} diag(gamma) A``."""
    A = as_cmatrix(basis, "basis")
    gamma = np.asarray(gamma, dtype=np.complex128)
    if A.shape[0] != A.shape[1]:
        raise DimensionError("basis must be square")
    if gamma.shape != (A.shape[0],):
        raise DimensionError(f"gamma has shape {gamma.shape}, basis is {A.shape}")
    if numerical_rank(A) < A.shape[0]:
        raise RankError("basis is singular")
    return np.linalg.solve(A, gamma[:, None] * A)


def gamma_member(basis, gamma, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Numeric test of ``gamma in Gamma(basis)``."""
    return is_generalized_permutation(gamma_conjugate(basis, gamma), tol)


def _nonzero(x: complex, ref: float, tol: Tolerance) -> bool:
    return abs(x) > tol.abs * max(1.0, ref)


def _fits_scaled_column(gamma: np.ndarray, cols: np.ndarray, tol: Tolerance) -> bool:
    # columns of `cols` are orthogonal with squared norm n each
    norm = float(np.linalg.norm(gamma))
    if norm == 0.0:
        return False
    n = cols.shape[0]
    for k in range(cols.shape[1]):
        v = cols[:, k]
        sigma = np.vdot(v, gamma) / n
        if _nonzero(sigma, norm, tol) and np.linalg.norm(gamma - sigma * v) <= MATCH_TOL * norm:
            return True
    return False


def gamma_closed_form_member(kind: str, gamma, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership in ``Gamma(A)`` from the known closed forms.

    ``kind`` is one of

    * ``identity`` -- every non-vanishing gamma;
    * ``dft`` -- gamma is a nonzero multiple of a column of ``sqrt(n) F``;
    * ``dft2`` -- the same with ``F (x) F``;
    * ``fdinv`` (A = F D^{-1}) -- gamma is a nonzero multiple of all-ones;
    * ``haar4`` -- ``gamma = sigma (1, 1, +-1, +-1)`` with sigma nonzero.
    """
    gamma = np.asarray(gamma, dtype=np.complex128)
    if gamma.ndim != 1 or gamma.size == 0:
        raise DimensionError("gamma must be a nonempty vector")
    n = gamma.size
    ref = float(np.abs(gamma).max())
    if ref == 0.0:
        return False
    if kind == "identity":
        return all(_nonzero(g, ref, tol) for g in gamma)
    if kind == "dft":
        return _fits_scaled_column(gamma, math.sqrt(n) * dft(n), tol)
    if kind == "dft2":
        return _fits_scaled_column(gamma, math.sqrt(n) * dft2(n), tol)
    if kind == "fdinv":
        return _fits_scaled_column(gamma, np.ones((n, 1), dtype=np.complex128), tol)
    if kind == "haar4":
        if n != 4:
            raise DimensionError("haar4 gains have length 4")
        sigma = gamma[0]
        if not _nonzero(sigma, ref, tol):
            return False
        near = lambda a, b: abs(a - b) <= MATCH_TOL * ref  # noqa: E731
        return (near(gamma[1], sigma)
                and (near(gamma[2], sigma) or near(gamma[2], -sigma))
                and (near(gamma[3], sigma) or near(gamma[3], -sigma)))
    raise ParameterError(f"no closed form for basis kind {kind!r}")


# --- shift bookkeeping -----------------------------------------------------

def dft_shift_gamma(n: int, sigma: complex, shift: int) -> np.ndarray:
    """Gain of the DFT-group element that shifts rows of X down by ``shift``."""
    return sigma * math.sqrt(n) * dft(n)[:, shift % n]


def _side(n: int) -> int:
    side = math.isqrt(n)
    if side * side != n:
        raise DimensionError(f"2-D group needs a perfect-square n, got {n}")
    return side


def dft2_shift_gamma(n: int, sigma: complex, shift: tuple[int, int]) -> np.ndarray:
    """Gain of the 2-D DFT-group element shifting by ``(vertical, horizontal)``."""
    side = _side(n)
    lv, lh = shift
    col = (lh % side) * side + (lv % side)
    return sigma * math.sqrt(n) * dft2(n)[:, col]


def roll_rows_2d(X: np.ndarray, shift: tuple[int, int]) -> np.ndarray:
    """Circularly shift rows of X viewed as a ``side x side`` grid of (vertical, horizontal) pairs."""
    n = X.shape[0]
    side = _side(n)
    lv, lh = shift
    grid = X.reshape(side, side, *X.shape[1:])  # [horizontal, vertical, ...]
    return np.roll(grid, (lh, lv), axis=(0, 1)).reshape(X.shape)


# --- group action ----------------------------------------------------------

def _as_pair(pair):
    lam, X = pair
    lam = np.asarray(lam, dtype=np.complex128)
    X = as_cmatrix(X, "X")
    if lam.ndim != 1 or lam.size == 0:
        raise DimensionError(f"lambda must be a nonempty vector, got shape {lam.shape}")
    return lam, X


def _require_square(lam: np.ndarray, X: np.ndarray):
    if lam.shape[0] != X.shape[0]:
        raise DimensionError(f"lambda {lam.shape} does not match X {X.shape} for a square basis")


def _check_gamma(gamma: np.ndarray, tol: Tolerance):
    ref = float(np.abs(gamma).max(initial=0.0))
    if ref == 0.0 or not all(_nonzero(g, ref, tol) for g in gamma):
        raise ParameterError("gamma must be non-vanishing")


def apply_transform(kind, witness: Witness, pair, tol: Tolerance = DEFAULT_TOL):
    """Apply one element of ``kind`` to ``pair = (lam, X)``."""
    lam, X = _as_pair(pair)
    n = lam.size
    if not isinstance(kind, Scaling):
        _require_square(lam, X)
    if isinstance(kind, Scaling):
        sigma = witness.sigma
        if sigma is None or sigma == 0:
            raise ParameterError("scaling needs a nonzero sigma")
        return sigma * lam, X / sigma
    if isinstance(kind, DftShiftScale):
        sigma, k = witness.sigma, witness.shift
        if sigma is None or sigma == 0 or k is None:
            raise ParameterError("DFT shift-scale needs nonzero sigma and an integer shift")
        gamma = dft_shift_gamma(n, sigma, int(k))
        return lam / gamma, sigma * np.roll(X, int(k), axis=0)
    if isinstance(kind, Dft2dShiftScale):
        sigma, k = witness.sigma, witness.shift
        if sigma is None or sigma == 0 or k is None:
            raise ParameterError("2-D DFT shift-scale needs nonzero sigma and a shift pair")
        k = (int(k[0]), int(k[1]))
        gamma = dft2_shift_gamma(n, sigma, k)
        return lam / gamma, sigma * roll_rows_2d(X, k)
    if isinstance(kind, GammaOf):
        if witness.gamma is None:
            raise ParameterError("GammaOf needs a gain vector")
        gamma = np.asarray(witness.gamma, dtype=np.complex128)
        _check_gamma(gamma, tol)
        P = gamma_conjugate(kind.basis, gamma)
        if not is_generalized_permutation(P, tol):
            raise ParameterError("gamma is not in Gamma(basis)")
        return lam / gamma, P @ X
    raise ParameterError(f"unknown group kind {kind!r}")


def compose(kind, first: Witness, second: Witness, n: int) -> Witness:
    """Witness of ``second o first``."""
    if isinstance(kind, Scaling):
        return Witness(sigma=first.sigma * second.sigma)
    if isinstance(kind, DftShiftScale):
        return Witness(sigma=first.sigma * second.sigma, shift=(first.shift + second.shift) % n)
    if isinstance(kind, Dft2dShiftScale):
        side = _side(n)
        return Witness(sigma=first.sigma * second.sigma,
                       shift=((first.shift[0] + second.shift[0]) % side,
                              (first.shift[1] + second.shift[1]) % side))
    if isinstance(kind, GammaOf):
        return Witness(gamma=np.asarray(first.gamma) * np.asarray(second.gamma))
    raise ParameterError(f"unknown group kind {kind!r}")


def inverse(kind, w: Witness, n: int) -> Witness:
    if isinstance(kind, Scaling):
        return Witness(sigma=1 / w.sigma)
    if isinstance(kind, DftShiftScale):
        return Witness(sigma=1 / w.sigma, shift=(-w.shift) % n)
    if isinstance(kind, Dft2dShiftScale):
        side = _side(n)
        return Witness(sigma=1 / w.sigma, shift=((-w.shift[0]) % side, (-w.shift[1]) % side))
    if isinstance(kind, GammaOf):
        return Witness(gamma=1 / np.asarray(w.gamma))
    raise ParameterError(f"unknown group kind {kind!r}")


def identity_witness(kind, n: int) -> Witness:
    if isinstance(kind, Scaling):
        return Witness(sigma=1.0)
    if isinstance(kind, DftShiftScale):
        return Witness(sigma=1.0, shift=0)
    if isinstance(kind, Dft2dShiftScale):
        return Witness(sigma=1.0, shift=(0, 0))
    if isinstance(kind, GammaOf):
        return Witness(gamma=np.ones(n, dtype=np.complex128))
    raise ParameterError(f"unknown group kind {kind!r}")


# --- orbit membership ------------------------------------------------------

def _fit_sigma(target: np.ndarray, base: np.ndarray) -> complex | None:
    """Least-squares sigma with ``target ~ sigma * base``; None when base is zero."""
    denom = np.vdot(base, base).real
    if denom == 0.0:
        return None
    return complex(np.vdot(base, target) / denom)


def _shift_candidates(kind, n):
    if isinstance(kind, DftShiftScale):
        for k in range(n):
            yield k, lambda X, k=k: np.roll(X, k, axis=0), lambda s, k=k: dft_shift_gamma(n, s, k)
    else:
        side = _side(n)
        for lh in range(side):
            for lv in range(side):
                k = (lv, lh)
                yield (k, lambda X, k=k: roll_rows_2d(X, k),
                       lambda s, k=k: dft2_shift_gamma(n, s, k))


def orbit_equivalent(kind, pair0, pair1, tol: Tolerance = DEFAULT_TOL) -> OrbitVerdict:
    """Decide whether ``pair1`` lies in the orbit of ``pair0`` under ``kind``.

    On success the verdict carries a witness that maps ``pair0`` to ``pair1``
    within ``MATCH_TOL`` relative error.
    """
    lam0, X0 = _as_pair(pair0)
    lam1, X1 = _as_pair(pair1)
    if lam0.shape != lam1.shape or X0.shape != X1.shape:
        raise DimensionError("pairs have different shapes")
    n = lam0.size
    if not isinstance(kind, Scaling):
        _require_square(lam0, X0)
    ref0 = float(np.abs(lam0).max(initial=0.0))
    if ref0 == 0.0 or not all(_nonzero(x, ref0, tol) for x in lam0):
        raise DegenerateInputError("lambda0 must be non-vanishing")

    if isinstance(kind, Scaling):
        sigma = _fit_sigma(lam1, lam0)
        if sigma is None or sigma == 0:
            return OrbitVerdict(False, reason="lambda1 is zero")
        if _rel_close(lam1, sigma * lam0) and _rel_close(X1, X0 / sigma):
            return OrbitVerdict(True, Witness(sigma=sigma))
        return OrbitVerdict(False, reason="no common scale maps pair0 to pair1")

    if isinstance(kind, (DftShiftScale, Dft2dShiftScale)):
        for k, roll, gain in _shift_candidates(kind, n):
            shifted = roll(X0)
            sigma = _fit_sigma(X1.ravel(), shifted.ravel())
            if sigma is None:
                # X0 = 0: only lambda can pin sigma down
                sigma = _fit_sigma(lam0 / gain(1.0), lam1)
                sigma = None if sigma is None or sigma == 0 else 1 / sigma
            if sigma is None or sigma == 0:
                continue
            gamma = gain(sigma)
            if _rel_close(X1, sigma * shifted) and _rel_close(lam1, lam0 / gamma):
                return OrbitVerdict(True, Witness(sigma=sigma, shift=k, gamma=gamma))
        return OrbitVerdict(False, reason="no scaled circular shift maps pair0 to pair1")

    if isinstance(kind, GammaOf):
        ref1 = float(np.abs(lam1).max(initial=0.0))
        if ref1 == 0.0 or not all(_nonzero(x, ref1, tol) for x in lam1):
            raise DegenerateInputError("lambda1 has zero entries; the gain ratio is undefined")
        gamma = lam0 / lam1
        P = gamma_conjugate(kind.basis, gamma)
        if not is_generalized_permutation(P, tol):
            return OrbitVerdict(False, reason="A^-1 diag(lambda0./lambda1) A is not a generalized permutation")
        if not _rel_close(X1, P @ X0):
            return OrbitVerdict(False, reason="X1 is not the image of X0 under the gain ratio")
        return OrbitVerdict(True, Witness(gamma=gamma))

    raise ParameterError(f"unknown group kind {kind!r}")
