"""Shared generators for the oracle suites."""
import math

import numpy as np

from bgpc.matcore import dft, dft2, finite_diff_inv, haar4, identity

BASES = {
    "identity": lambda n: identity(n),
    "dft": lambda n: dft(n),
    "dft2": lambda n: dft2(n),
    "fdinv": lambda n: dft(n) @ finite_diff_inv(n),
    "haar4": lambda n: haar4(),
}

# (kind, n) pairs covered by the membership oracle suite
BASIS_SIZES = (
    [("identity", n) for n in (1, 3, 6)]
    + [("dft", n) for n in range(2, 9)]
    + [("dft2", 4), ("dft2", 9)]
    + [("fdinv", n) for n in range(2, 9)]
    + [("haar4", 4)]
)


def cnormal(rng, size=None):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def nonzero_scalar(rng):
    z = cnormal(rng)
    while abs(z) < 1e-2:
        z = cnormal(rng)
    return z


def gamma_member_sample(kind, n, rng):
    sigma = nonzero_scalar(rng)
    if kind == "identity":
        g = cnormal(rng, n)
        g[np.abs(g) < 1e-2] = 1.0
        return g
    if kind == "dft":
        return sigma * math.sqrt(n) * dft(n)[:, rng.integers(n)]
    if kind == "dft2":
        return sigma * math.sqrt(n) * dft2(n)[:, rng.integers(n)]
    if kind == "fdinv":
        return sigma * np.ones(n)
    if kind == "haar4":
        return sigma * np.array([1, 1, rng.choice([-1, 1]), rng.choice([-1, 1])])
    raise ValueError(kind)


def gamma_nonmember_sample(kind, n, rng):
    """Mix of generic draws and near-misses built from members."""
    style = rng.integers(3)
    if kind == "identity":
        g = gamma_member_sample(kind, n, rng)
        g[rng.integers(n)] = 0.0
        return g
    if style == 0 or n == 1:
        g = cnormal(rng, n)
    elif style == 1 and kind in ("dft", "dft2"):
        F = dft(n) if kind == "dft" else dft2(n)
        a, b = rng.choice(n, size=2, replace=False)
        g = math.sqrt(n) * (nonzero_scalar(rng) * F[:, a] + nonzero_scalar(rng) * F[:, b])
    elif style == 1:
        bump = np.arange(n) if kind == "fdinv" else np.array([0, 0.7, 0, 0])
        g = gamma_member_sample(kind, n, rng) + bump
    else:
        g = gamma_member_sample(kind, n, rng)
        g = g + 1e-3 * abs(g).max() * cnormal(rng, n)
    return g


def support_oracle(A, Y, J, allowed_masks, tol=None):
    """Brute-force joint-sparsity decider for a square basis.

    For every support J' of size |J| the inverse gains ``x`` consistent with
    J' form the null space of G.  Only non-vanishing ``x`` are admissible, and
    a subspace holds one exactly when its basis has no zero row.  The
    instance is not identifiable when some admissible null space has
    dimension >= 2, or dimension 1 while J' is not among ``allowed_masks``
    (the supports reachable from J by the ambiguity group).
    """
    from itertools import combinations

    from bgpc.checkers import build_G
    from bgpc.matcore import DEFAULT_TOL, numerical_rank

    tol = tol or DEFAULT_TOL
    n = A.shape[0]
    Ainv = np.linalg.inv(A)
    for c in combinations(range(n), len(J)):
        comp = [j for j in range(n) if j not in c]
        G = build_G(Ainv[comp], Y)
        d = n - numerical_rank(G, tol)
        if d == 0:
            continue
        V = np.linalg.svd(G)[2][n - d:].conj().T
        if np.linalg.norm(V, axis=1).min() < 1e-8:
            continue
        mask = sum(1 << j for j in c)
        if d >= 2 or mask not in allowed_masks:
            return False
    return True
