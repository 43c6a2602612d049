"""Seedable problem instances, explicit non-identifiable constructions, and a
JSON instance format.

An instance is a triple ``(basis, lam0, X0)`` with measurement
``Y = diag(lam0) @ A @ X0``.  The basis is stored as a small descriptor so the
JSON stays readable for the named matrices; arbitrary bases are stored
entrywise.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DimensionError, ParameterError, PreconditionError
from .indexsets import IndexPairSet, IndexSet, periods
from .matcore import circulant, dft, dft2, finite_diff_inv, haar4, identity
from .rng import RNG_NAME, gaussian, make_rng, nonvanishing_gaussian
from .transgroup import DftShiftScale, GammaOf, Scaling

SCHEMA_VERSION = 1
MODELS = ("subspace", "jointsparse", "jointsparse2d", "piecewise", "sparse")
CONSTRUCTION_TOL = 1e-12
LAMBDA_FLOOR = 1e-3


# --- basis descriptors -------------------------------------------------------

def basis_matrix(basis: dict) -> np.ndarray:
    """Materialize a basis descriptor ``{"kind": ..., "params": {...}}``."""
    kind = basis.get("kind")
    p = basis.get("params", {})
    if kind == "identity":
        return identity(p["n"])
    if kind == "dft":
        return dft(p["n"])
    if kind == "dft2":
        return dft2(p["n"])
    if kind == "fdinv":
        n = p["n"]
        return dft(n) @ finite_diff_inv(n)
    if kind == "haar4":
        return haar4()
    if kind == "dft_columns":
        cols = [c - 1 for c in p["cols"]]
        return complex(p.get("scale", 1.0)) * dft(p["n"])[:, cols]
    if kind == "explicit":
        return _decode_matrix(p["matrix"])
    raise ParameterError(f"unknown basis kind {kind!r}")


def _named(kind: str, **params) -> dict:
    return {"kind": kind, "params": params}


# --- instance type -----------------------------------------------------------

@dataclass
class ProblemInstance:
    """One BGPC instance.

    ``k`` is ``m`` for the subspace model and the sparsity level ``s``
    otherwise.  ``support`` is the 1-based joint support for sparse models.
    """

    model: str
    n: int
    k: int
    N: int
    basis: dict
    lam0: np.ndarray
    X0: np.ndarray
    seed: int | None = None
    rng: str = RNG_NAME
    support: IndexSet | None = None
    _A: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}")
        self.lam0 = np.asarray(self.lam0, dtype=np.complex128)
        self.X0 = np.asarray(self.X0, dtype=np.complex128)
        A = self.A
        if A.shape[0] != self.n or self.lam0.shape != (self.n,):
            raise DimensionError(f"basis {A.shape} and lambda0 {self.lam0.shape} do not match n = {self.n}")
        if self.X0.shape != (A.shape[1], self.N):
            raise DimensionError(f"X0 has shape {self.X0.shape}, expected {(A.shape[1], self.N)}")
        if self.model == "subspace" and not A.shape[1] == self.k < self.n:
            raise DimensionError("subspace model needs a tall basis with k = m columns")
        if self.support is not None and len(self.support) != self.k:
            raise ParameterError(f"support {self.support} does not have k = {self.k} members")

    @property
    def A(self) -> np.ndarray:
        if self._A is None:
            self._A = basis_matrix(self.basis)
        return self._A

    @property
    def Y(self) -> np.ndarray:
        return self.lam0[:, None] * (self.A @ self.X0)

    @property
    def pair(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lam0, self.X0


# --- random generators -------------------------------------------------------

def haar_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed real orthogonal matrix (QR with the sign of R's diagonal fixed)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_subspace(n: int, m: int, N: int, seed: int, *stream: int, complex_: bool = False) -> ProblemInstance:
    """Gaussian ``lam0`` and ``X0`` with ``A`` the first ``m`` columns of a random orthogonal matrix."""
    if not 1 <= m < n:
        raise DimensionError(f"need 1 <= m < n, got n = {n}, m = {m}")
    if N < 1:
        raise ParameterError("N must be >= 1")
    rng = make_rng(seed, *stream)
    A = haar_orthogonal(rng, n)[:, :m]
    lam0 = gaussian(rng, n, complex_)
    X0 = gaussian(rng, (m, N), complex_)
    return ProblemInstance("subspace", n, m, N, {"kind": "explicit", "params": {"matrix": _encode_matrix(A)}},
                           lam0, X0, seed, _A=A.astype(np.complex128))


def _draw_support(rng, n: int, s: int, J) -> IndexSet:
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s = {s}")
    if isinstance(J, str):
        if J != "uniform":
            raise ParameterError(f"support must be an IndexSet or 'uniform', got {J!r}")
        return IndexSet.from_zero_based(rng.choice(n, size=s, replace=False), n)
    J = J if isinstance(J, IndexSet) else IndexSet.of(J, n)
    if J.n != n or len(J) != s:
        raise ParameterError(f"support {J} is not an {s}-subset of 1..{n}")
    return J


def _sparse_rows(rng, n: int, J: IndexSet, N: int, complex_: bool) -> np.ndarray:
    X0 = np.zeros((n, N), dtype=np.complex128)
    X0[J.zero_based] = gaussian(rng, (len(J), N), complex_)
    return X0


def random_jointsparse(n: int, s: int, N: int, J="uniform", seed: int = 0, *stream: int,
                       complex_: bool = False) -> ProblemInstance:
    """DFT-basis instance with Gaussian nonzero rows on the joint support ``J``."""
    if N < 1:
        raise ParameterError("N must be >= 1")
    rng = make_rng(seed, *stream)
    J = _draw_support(rng, n, s, J)
    lam0 = gaussian(rng, n, complex_)
    X0 = _sparse_rows(rng, n, J, N, complex_)
    return ProblemInstance("jointsparse", n, s, N, _named("dft", n=n), lam0, X0, seed, support=J)


def random_jointsparse_2d(side: int, s: int, N: int, J="uniform", seed: int = 0, *stream: int,
                          complex_: bool = False) -> ProblemInstance:
    """2-D DFT instance; ``J`` may be an IndexSet over ``1..side**2`` or an IndexPairSet."""
    n = side * side
    if isinstance(J, IndexPairSet):
        J = J.to_index_set()
    rng = make_rng(seed, *stream)
    J = _draw_support(rng, n, s, J)
    lam0 = gaussian(rng, n, complex_)
    X0 = _sparse_rows(rng, n, J, N, complex_)
    return ProblemInstance("jointsparse2d", n, s, N, _named("dft2", n=n), lam0, X0, seed, support=J)


def random_piecewise(n: int, s: int, N: int, J="uniform", seed: int = 0, *stream: int,
                     complex_: bool = False) -> ProblemInstance:
    """Instance in the basis ``F D^{-1}``: X0 holds the sparse jumps of piecewise-constant signals."""
    rng = make_rng(seed, *stream)
    J = _draw_support(rng, n, s, J)
    lam0 = gaussian(rng, n, complex_)
    X0 = _sparse_rows(rng, n, J, N, complex_)
    return ProblemInstance("piecewise", n, s, N, _named("fdinv", n=n), lam0, X0, seed, support=J)


def bernoulli_gaussian(n: int, N: int, theta: float, seed: int, *stream: int) -> np.ndarray:
    """Entrywise product of an iid Bernoulli(theta) mask and iid N(0, 1) values."""
    if not 0 < theta < 1:
        raise ParameterError(f"theta must lie strictly between 0 and 1, got {theta}")
    rng = make_rng(seed, *stream)
    mask = rng.random((n, N)) < theta
    return mask * rng.standard_normal((n, N))


def random_sparse(n: int, N: int, theta: float, seed: int, *stream: int) -> ProblemInstance:
    """Identity-basis instance with a Bernoulli-Gaussian X0."""
    X0 = bernoulli_gaussian(n, N, theta, seed, *stream, 0)
    lam0 = nonvanishing_gaussian(make_rng(seed, *stream, 1), n, LAMBDA_FLOOR)
    s = int(np.count_nonzero(X0))
    return ProblemInstance("sparse", n, s, N, _named("identity", n=n), lam0, X0, seed)


# --- explicit constructions --------------------------------------------------

@dataclass
class Counterexample:
    """A pair ``(lam0, X0)`` together with a second pair giving the same measurement."""

    name: str
    instance: ProblemInstance
    lam1: np.ndarray
    X1: np.ndarray
    group: Any

    @property
    def pair1(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lam1, self.X1


COUNTEREXAMPLES = ("subspace_f8", "jointsparse_degenerate7", "jointsparse_rank3_7", "periodic")


def _circulant_pair(name, n, X0, c, lam0, J, seed) -> Counterexample:
    gamma = np.sqrt(n) * (dft(n) @ np.asarray(c, dtype=np.complex128))
    if np.abs(gamma).min() < LAMBDA_FLOOR:
        raise PreconditionError("the circulant's spectrum vanishes")
    inst = ProblemInstance("jointsparse", n, len(J), X0.shape[1], _named("dft", n=n), lam0, X0, seed, support=J)
    return Counterexample(name, inst, lam0 / gamma, circulant(c) @ X0, DftShiftScale())


def counterexample(kind: str, seed: int = 0, J: IndexSet | None = None, ell: int | None = None) -> Counterexample:
    """Build one of the explicit non-identifiable constructions.

    ``kind`` is ``subspace_f8``, ``jointsparse_degenerate7``,
    ``jointsparse_rank3_7`` or ``periodic``; the last one needs a periodic
    support ``J`` and one of its periods ``ell``.  Entries left generic by the
    construction (the gains, and X0 on a periodic support) are seeded Gaussian
    draws, with gains redrawn until every modulus is at least ``LAMBDA_FLOOR``.
    """
    rng = make_rng(seed)
    if kind == "subspace_f8":
        n = 8
        basis = _named("dft_columns", n=n, cols=[1, 2, 3, 4], scale=2 * math.sqrt(2))
        gamma = 2 * math.sqrt(2) * dft(n)[:, 2]
        lam1 = nonvanishing_gaussian(rng, n, LAMBDA_FLOOR).astype(np.complex128)
        lam0 = gamma * lam1
        X0 = np.vstack([np.eye(2), np.zeros((2, 2))])
        X1 = np.vstack([np.zeros((2, 2)), np.eye(2)])
        inst = ProblemInstance("subspace", n, 4, 2, basis, lam0, X0, seed)
        return Counterexample(kind, inst, lam1, X1.astype(np.complex128), Scaling())
    if kind == "jointsparse_degenerate7":
        n = 7
        X0 = np.zeros((n, 3))
        X0[:3] = np.eye(3)
        lam0 = nonvanishing_gaussian(rng, n, LAMBDA_FLOOR)
        return _circulant_pair(kind, n, X0, [1, 2, 0, 0, 0, 0, 0], lam0, IndexSet.of([1, 2, 3, 4], n), seed)
    if kind == "jointsparse_rank3_7":
        n = 7
        X0 = np.zeros((n, 3))
        X0[:4] = [[1, 3, 2], [2, 1, 3], [3, 2, 1], [-29, -28.5, -17.5]]
        lam0 = nonvanishing_gaussian(rng, n, LAMBDA_FLOOR)
        return _circulant_pair(kind, n, X0, [2, 16, 1, 8, 0.5, 4, 32], lam0, IndexSet.of([1, 2, 3, 4], n), seed)
    if kind == "periodic":
        if J is None or ell is None:
            raise ParameterError("periodic construction needs J and ell")
        n = J.n
        if ell not in periods(J):
            raise ParameterError(f"{ell} is not a period of {J}")
        lam0 = nonvanishing_gaussian(rng, n, LAMBDA_FLOOR)
        X0 = _sparse_rows(rng, n, J, len(J), False)
        c = np.zeros(n)
        c[0], c[ell] = 1.0, 2.0
        return _circulant_pair(kind, n, X0, c, lam0, J, seed)
    raise ParameterError(f"unknown counterexample kind {kind!r}")


def gamma_group(inst: ProblemInstance) -> GammaOf:
    """The general ambiguity group for a square basis."""
    return GammaOf(inst.A)


# --- JSON persistence --------------------------------------------------------

def _encode_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=np.complex128)]


def _encode_matrix(M) -> list:
    return [_encode_vector(row) for row in np.asarray(M, dtype=np.complex128)]


def _decode_vector(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParameterError("complex vector must be a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def _decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParameterError("complex matrix must be a list of rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def instance_to_dict(inst: ProblemInstance, include_Y: bool = True) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "model": inst.model,
        "n": inst.n,
        "m_or_s": inst.k,
        "N": inst.N,
        "basis": inst.basis,
        "lambda0": _encode_vector(inst.lam0),
        "X0": _encode_matrix(inst.X0),
        "seed": inst.seed,
        "rng": inst.rng,
    }
    if inst.support is not None:
        out["support"] = list(inst.support.members)
    if include_Y:
        out["Y"] = _encode_matrix(inst.Y)
    return out


_REQUIRED = ("schema_version", "model", "n", "m_or_s", "N", "basis", "lambda0", "X0")


def instance_from_dict(data: dict) -> ProblemInstance:
    """Rebuild an instance, checking a stored ``Y`` against ``diag(lam0) A X0``."""
    if not isinstance(data, dict):
        raise ParameterError("instance must be a JSON object")
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise ParameterError(f"instance is missing fields {missing}")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ParameterError(f"unsupported schema_version {data['schema_version']!r}")
    n = int(data["n"])
    support = data.get("support")
    try:
        inst = ProblemInstance(
            data["model"], n, int(data["m_or_s"]), int(data["N"]), data["basis"],
            _decode_vector(data["lambda0"]), _decode_matrix(data["X0"]),
            data.get("seed"), data.get("rng", RNG_NAME),
            None if support is None else IndexSet.of(support, n),
        )
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed instance: {exc}") from exc
    if "Y" in data:
        Y = _decode_matrix(data["Y"])
        if Y.shape != inst.Y.shape:
            raise DimensionError(f"stored Y has shape {Y.shape}, expected {inst.Y.shape}")
        scale = max(1.0, float(np.abs(Y).max(initial=0.0)))
        if np.abs(Y - inst.Y).max(initial=0.0) > CONSTRUCTION_TOL * scale:
            raise ParameterError("stored Y does not equal diag(lambda0) A X0")
    return inst


def dumps(obj: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_instance(inst: ProblemInstance, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)), encoding="utf-8", newline="\n")


def load_instance(path) -> ProblemInstance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)
