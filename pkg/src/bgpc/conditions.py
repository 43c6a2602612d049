"""Evaluators for the sufficient identifiability conditions and the necessary
sample-complexity bound.

Each evaluator returns a :class:`ConditionReport` listing every clause with a
pass/fail flag and a short diagnostic, so callers can see *which* hypothesis
failed rather than just a boolean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice

import numpy as np

from .errors import DimensionError, EnumerationGuardError, ParameterError, PreconditionError, RankError
from .indexsets import IndexPairSet, IndexSet, is_friendly, periods, periods_2d
from .matcore import (
    DEFAULT_TOL,
    Tolerance,
    as_cmatrix,
    batched_rank,
    count_nonzero,
    nonzero_mask,
    nonzero_rows,
    numerical_rank,
)
from .rng import make_rng
from .transgroup import is_generalized_permutation

DECOMPOSABLE_MAX_N = 20
_CHUNK = 4096


@dataclass(frozen=True)
class Clause:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ConditionReport:
    clauses: list[Clause] = field(default_factory=list)
    verdict: str | None = None

    @property
    def satisfied(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        out = {
            "satisfied": self.satisfied,
            "clauses": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.clauses],
        }
        if self.verdict is not None:
            out["verdict"] = self.verdict
        return out


def _lambda_clause(lam0, tol: Tolerance) -> Clause:
    lam0 = np.asarray(lam0, dtype=np.complex128)
    if lam0.ndim != 1 or lam0.size == 0:
        raise DimensionError("lambda0 must be a nonempty vector")
    zeros = np.flatnonzero(~nonzero_mask(lam0, tol))
    detail = "min |lambda0| = %.3g" % float(np.abs(lam0).min())
    if zeros.size:
        detail += "; zero entries at %s" % (zeros + 1).tolist()
    return Clause("lambda0_nonvanishing", zeros.size == 0, detail)


def _support_rank_clause(X0, tol: Tolerance, s: int | None) -> tuple[Clause, np.ndarray]:
    rows = nonzero_rows(X0, tol)
    r = numerical_rank(X0, tol) if X0.size and rows.size else 0
    count = rows.size
    ok = r == count and count > 0 and (s is None or count == s)
    target = count if s is None else s
    return Clause("support_size_and_rank", ok,
                  f"{count} nonzero rows, rank {r}, required {target} and {target}"), rows


# --- subspace model ----------------------------------------------------------

def _row_subset_masks(n: int):
    """Masks of nonempty proper row subsets J, one per {J, J^c} pair (J contains row 0)."""
    for bits in range(0, 2 ** (n - 1) - 1):
        # row 0 always in J; `bits` selects rows 1..n-1, all-ones excluded (J would be full)
        yield 1 | (bits << 1)


def row_space_decomposable(A, tol: Tolerance = DEFAULT_TOL, max_n: int = DECOMPOSABLE_MAX_N) -> bool:
    """Whether some nonempty proper row subset J splits the row space as a direct sum.

    Decided by rank arithmetic: ``rank(A) == rank(A[J]) + rank(A[J^c])``.
    """
    A = as_cmatrix(A, "A")
    n, m = A.shape
    if A.size == 0:
        raise DimensionError("A is empty")
    if n > max_n:
        raise EnumerationGuardError(f"{n} rows exceeds the decomposability guard {max_n}")
    if n == 1:
        return False
    total = numerical_rank(A, tol)
    rows = np.arange(n)
    masks = _row_subset_masks(n)
    while True:
        chunk = list(islice(masks, _CHUNK))
        if not chunk:
            return False
        sel = np.array([[(mk >> r) & 1 for r in rows] for mk in chunk], dtype=bool)
        inside = np.where(sel[:, :, None], A[None], 0)
        outside = np.where(sel[:, :, None], 0, A[None])
        # zeroed rows do not change the rank, and the shape-based cutoff matches A's
        r_in = batched_rank(inside, tol)
        r_out = batched_rank(outside, tol)
        if np.any(r_in + r_out == total):
            return True


def sufficient_subspace(lam0, X0, A, tol: Tolerance = DEFAULT_TOL) -> ConditionReport:
    """Clauses of the subspace-model sufficient condition (identifiable up to scaling)."""
    A = as_cmatrix(A, "A")
    X0 = as_cmatrix(X0, "X0")
    n, m = A.shape
    if X0.shape[0] != m or np.asarray(lam0).shape != (n,):
        raise DimensionError(f"inconsistent shapes: A {A.shape}, X0 {X0.shape}, lambda0 {np.shape(lam0)}")
    rep = ConditionReport([_lambda_clause(lam0, tol)])
    r = numerical_rank(X0, tol)
    rep.clauses.append(Clause("X0_full_row_rank", r == m, f"rank(X0) = {r}, rows = {m}"))
    ra = numerical_rank(A, tol)
    if ra < m:
        rep.clauses.append(Clause("A_nonseparable_full_rank", False, f"rank(A) = {ra} < {m}"))
    else:
        dec = row_space_decomposable(A, tol)
        rep.clauses.append(Clause("A_nonseparable_full_rank", not dec,
                                  "row space decomposable" if dec else "row space not decomposable"))
    return rep


# --- joint sparsity models ---------------------------------------------------

def sufficient_jointsparse(lam0, X0, tol: Tolerance = DEFAULT_TOL, s: int | None = None) -> ConditionReport:
    """Clauses of the DFT-basis joint-sparsity sufficient condition."""
    X0 = as_cmatrix(X0, "X0")
    n = X0.shape[0]
    if np.asarray(lam0).shape != (n,):
        raise DimensionError("lambda0 and X0 disagree on n")
    rep = ConditionReport([_lambda_clause(lam0, tol)])
    c2, rows = _support_rank_clause(X0, tol, s)
    rep.clauses.append(c2)
    if rows.size == 0:
        rep.clauses.append(Clause("support_not_periodic", False, "empty support"))
        return rep
    J = IndexSet.from_zero_based(rows, n)
    per = periods(J)
    rep.clauses.append(Clause("support_not_periodic", not per,
                              f"support {J}" + (f" has periods {sorted(per)}" if per else " is not periodic")))
    return rep


def sufficient_jointsparse_2d(lam0, X0, tol: Tolerance = DEFAULT_TOL, s: int | None = None) -> ConditionReport:
    """Clauses of the 2-D DFT joint-sparsity sufficient condition (support in pair form)."""
    X0 = as_cmatrix(X0, "X0")
    n = X0.shape[0]
    side = math.isqrt(n)
    if side * side != n:
        raise DimensionError(f"n = {n} is not a perfect square")
    if np.asarray(lam0).shape != (n,):
        raise DimensionError("lambda0 and X0 disagree on n")
    rep = ConditionReport([_lambda_clause(lam0, tol)])
    c2, rows = _support_rank_clause(X0, tol, s)
    rep.clauses.append(c2)
    if rows.size == 0:
        rep.clauses.append(Clause("support_not_periodic_2d", False, "empty support"))
        return rep
    pairs = IndexPairSet.from_index_set(IndexSet.from_zero_based(rows, n))
    per = periods_2d(pairs)
    rep.clauses.append(Clause("support_not_periodic_2d", not per,
                              f"pair support {sorted(pairs.members)}"
                              + (f" has periods {sorted(per)}" if per else " is not periodic")))
    return rep


def sufficient_piecewise(lam0, X0, tol: Tolerance = DEFAULT_TOL, s: int | None = None) -> ConditionReport:
    """Clauses of the piecewise-constant (basis F D^{-1}) sufficient condition."""
    X0 = as_cmatrix(X0, "X0")
    n = X0.shape[0]
    if n < 4:
        raise PreconditionError("the piecewise-constant condition assumes n >= 4")
    if np.asarray(lam0).shape != (n,):
        raise DimensionError("lambda0 and X0 disagree on n")
    rep = ConditionReport([_lambda_clause(lam0, tol)])
    c2, rows = _support_rank_clause(X0, tol, s)
    rep.clauses.append(c2)
    J = IndexSet.from_zero_based(rows, n)
    rep.clauses.append(Clause("one_not_in_support", 1 not in J, f"support {J}"))
    J1 = J.union(IndexSet(n, (1,)))
    friendly = is_friendly(J1)
    rep.clauses.append(Clause("one_union_support_friendly", friendly,
                              f"{J1} is {'friendly' if friendly else 'not friendly'}"))
    return rep


# --- sample complexity -------------------------------------------------------

def necessary_bound(n: int, k: int) -> Fraction:
    """The exact lower bound ``(n - 1) / (n - k)`` on the number of columns."""
    if not 1 <= k < n:
        raise ParameterError(f"need 1 <= k < n, got n = {n}, k = {k}")
    return Fraction(n - 1, n - k)


def necessary_N(n: int, k: int) -> int:
    """Smallest column count ``N`` with ``N >= (n - 1) / (n - k)``."""
    return math.ceil(necessary_bound(n, k))


# --- sparsity model ----------------------------------------------------------

def _elementary_candidate(rng, X0: np.ndarray, tol: Tolerance) -> np.ndarray:
    n = X0.shape[0]
    i, j = rng.choice(n, size=2, replace=False)
    alpha = complex(rng.standard_normal())
    cols = np.flatnonzero(nonzero_mask(X0, tol)[j])
    if cols.size:
        c = rng.choice(cols)
        if X0[i, c] != 0:
            alpha = -X0[i, c] / X0[j, c]
    P = np.eye(n, dtype=np.complex128)
    P[i, j] += alpha
    return P


def _circulant_candidate(rng, n: int) -> np.ndarray:
    c = np.zeros(n, dtype=np.complex128)
    c[rng.choice(n, size=min(2, n), replace=False)] = rng.standard_normal(min(2, n))
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c[idx]


def _sparse_candidate(rng, n: int) -> np.ndarray:
    P = np.zeros((n, n), dtype=np.complex128)
    P[np.arange(n), rng.permutation(n)] = rng.standard_normal(n)
    P[rng.integers(n), rng.integers(n)] += rng.standard_normal()
    return P


def universal_sparsity_report(lam0, X0, A, tol: Tolerance = DEFAULT_TOL, trials: int = 1000,
                              seed: int = 0, s: int | None = None) -> ConditionReport:
    """Clauses of the universal sparsity-model sufficient condition.

    The sparsest-basis clause quantifies over every invertible P and cannot be
    verified; it is attacked with ``trials`` random invertible candidates
    (elementary row operations tuned to cancel an entry, two-tap circulants,
    perturbed generalized permutations, dense Gaussians).  The verdict is
    ``"falsified"`` when a non-generalized-permutation P with
    ``||P X0||_0 <= ||X0||_0`` turns up, ``"consistent"`` otherwise.
    """
    A = as_cmatrix(A, "A")
    X0 = as_cmatrix(X0, "X0")
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionError("A must be square")
    if numerical_rank(A, tol) < n:
        raise RankError("A is singular")
    if X0.shape[0] != n or np.asarray(lam0).shape != (n,):
        raise DimensionError("inconsistent shapes")
    rep = ConditionReport([_lambda_clause(lam0, tol)])

    base = count_nonzero(X0, tol)
    witness = None
    for t in range(trials):
        rng = make_rng(seed, t)
        kind = t % 4
        if kind == 0:
            P = _elementary_candidate(rng, X0, tol)
        elif kind == 1:
            P = _circulant_candidate(rng, n)
        elif kind == 2:
            P = _sparse_candidate(rng, n)
        else:
            P = rng.standard_normal((n, n)) + 0j
        if numerical_rank(P, tol) < n or is_generalized_permutation(P, tol):
            continue
        if count_nonzero(P @ X0, tol) <= base:
            witness = (t, P)
            break
    if witness is None:
        rep.verdict = "consistent"
        rep.clauses.append(Clause("sparsest_row_basis", True,
                                  f"not falsified in {trials} randomized attempts"))
    else:
        t, P = witness
        rep.verdict = "falsified"
        rep.clauses.append(Clause("sparsest_row_basis", False,
                                  f"trial {t}: non-generalized-permutation P gives "
                                  f"||P X0||_0 = {count_nonzero(P @ X0, tol)} <= {base}"))
    ok3 = s is None or base == s
    rep.clauses.append(Clause("sparsity_level", ok3,
                              f"||X0||_0 = {base}" + ("" if s is None else f", required {s}")))
    return rep
