"""Combinatorics of supports: circular periodicity (1-D and 2-D), connectivity
of families of shifted sets, friendliness, and shift-choice coverage.

Index sets are 1-based, as are all shifts written back to the user.  Internally
a set over ``{1..n}`` is a Python int bitmask with bit ``j - 1`` set for member
``j``; circular shifts are bit rotations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import EnumerationGuardError, ParameterError

DEFAULT_MAX_N = 24


@dataclass(frozen=True)
class IndexSet:
    """Sorted set of 1-based indices within ``{1..n}``."""

    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"universe size must be >= 1, got {self.n}")
        members = tuple(sorted(int(j) for j in self.members))
        if len(set(members)) != len(members):
            raise ParameterError(f"duplicate members in {members}")
        if members and (members[0] < 1 or members[-1] > self.n):
            raise ParameterError(f"members {members} not within 1..{self.n}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> "IndexSet":
        return cls(n, tuple(members))

    @classmethod
    def universe(cls, n: int) -> "IndexSet":
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "IndexSet":
        return cls(n, tuple(j + 1 for j in range(n) if mask >> j & 1))

    @classmethod
    def from_zero_based(cls, indices: Iterable[int], n: int) -> "IndexSet":
        return cls(n, tuple(int(i) + 1 for i in indices))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, j) -> bool:
        return j in self.members

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"

    @property
    def mask(self) -> int:
        m = 0
        for j in self.members:
            m |= 1 << (j - 1)
        return m

    @property
    def zero_based(self) -> list[int]:
        return [j - 1 for j in self.members]

    def shift(self, k: int) -> "IndexSet":
        """``{j + k mod n}``, written back into ``{1..n}``."""
        return IndexSet(self.n, tuple((j - 1 + k) % self.n + 1 for j in self.members))

    def flip(self) -> "IndexSet":
        """``{-j mod n}``, with residue 0 written as ``n``."""
        return IndexSet(self.n, tuple((-j) % self.n or self.n for j in self.members))

    def complement(self) -> "IndexSet":
        return IndexSet(self.n, tuple(j for j in range(1, self.n + 1) if j not in self.members))

    def union(self, other: "IndexSet") -> "IndexSet":
        _same_universe([self, other])
        return IndexSet(self.n, tuple(set(self.members) | set(other.members)))


def _same_universe(sets: Sequence[IndexSet]) -> int:
    ns = {J.n for J in sets}
    if len(ns) != 1:
        raise ParameterError(f"index sets live in different universes: {sorted(ns)}")
    return ns.pop()


def rotate(mask: int, k: int, n: int) -> int:
    """Circularly shift the bitmask of a subset of ``{1..n}`` by ``k``."""
    k %= n
    full = (1 << n) - 1
    return ((mask << k) | (mask >> (n - k))) & full if k else mask


def shift_masks(J: IndexSet) -> set[int]:
    """Bitmasks of all ``n`` circular shifts of ``J``."""
    m = J.mask
    return {rotate(m, k, J.n) for k in range(J.n)}


def is_shift_of(J1: IndexSet, J2: IndexSet) -> bool:
    _same_universe([J1, J2])
    return J1.mask in shift_masks(J2)


def canonical(J: IndexSet) -> IndexSet:
    """Shift-minimal representative: the lexicographically smallest shift."""
    return min((J.shift(k) for k in range(J.n)), key=lambda S: S.members)


def periods(J: IndexSet) -> frozenset[int]:
    """All ``0 < l < n`` with ``J + l = J`` (mod n); empty when J is not periodic."""
    if not len(J):
        raise ParameterError("periods of an empty set are undefined")
    m = J.mask
    return frozenset(l for l in range(1, J.n) if rotate(m, l, J.n) == m)


def fundamental_period(J: IndexSet) -> int | None:
    p = periods(J)
    return min(p) if p else None


def is_periodic(J: IndexSet) -> bool:
    return bool(periods(J))


def is_contiguous(J: IndexSet) -> bool:
    """True when J is a circular run such as ``{n, 1, 2}``."""
    s = len(J)
    if s == 0:
        return False
    run = (1 << s) - 1
    return J.mask in {rotate(run, k, J.n) for k in range(J.n)}


def _masks_connected(masks: Sequence[int]) -> bool:
    if not masks:
        return False
    comp = masks[0]
    rest = list(masks[1:])
    grew = True
    while rest and grew:
        grew = False
        for m in list(rest):
            if m & comp:
                comp |= m
                rest.remove(m)
                grew = True
    return not rest


def sets_connected(sets: Sequence[IndexSet]) -> bool:
    """Whether the intersection graph of ``sets`` (edge iff two sets meet) is connected."""
    if not sets:
        raise ParameterError("need at least one set")
    _same_universe(sets)
    return _masks_connected([J.mask for J in sets])


def _check_guard(n: int, max_n: int):
    if n > max_n:
        raise EnumerationGuardError(f"n = {n} exceeds the enumeration guard {max_n}")


def _shift_families(J: IndexSet) -> Iterator[list[int]]:
    """Bitmasks of every family of ``n - s`` distinct circular shifts of ``J``."""
    n = J.n
    rots = [rotate(J.mask, k, n) for k in range(n)]
    for ks in combinations(range(n), n - len(J)):
        yield [rots[k] for k in ks]


def is_friendly_exhaustive(J: IndexSet, max_n: int = DEFAULT_MAX_N) -> bool:
    """Friendliness decided by enumerating every choice of ``n - s`` shifts."""
    n, s = J.n, len(J)
    if s == 0:
        raise ParameterError("friendliness of the empty set is undefined")
    if s == n:
        return True
    _check_guard(n, max_n)
    for fam in _shift_families(J):
        union = 0
        for m in fam:
            union |= m
        if union.bit_count() < n - 1 or not _masks_connected(fam):
            return False
    return True


def friendly_fast_path(J: IndexSet) -> bool | None:
    """Shortcut verdicts from the sufficient/necessary propositions, or None."""
    n, s = J.n, len(J)
    if s == n:
        return True
    if n >= 4 and s <= 2:
        return False
    if s >= 3 and is_contiguous(J):
        return True
    if 2 * s > n and not is_periodic(J):
        return True
    return None


def is_friendly(J: IndexSet, max_n: int = DEFAULT_MAX_N) -> bool:
    """Whether J is friendly.

    Every family of ``n - s`` circular shifts of J must cover at least
    ``n - 1`` indices and be connected.  ``{1..n}`` is friendly by convention.
    Known shortcuts are tried before the exhaustive enumeration.
    """
    if len(J) == 0:
        raise ParameterError("friendliness of the empty set is undefined")
    verdict = friendly_fast_path(J)
    if verdict is not None:
        return verdict
    return is_friendly_exhaustive(J, max_n)


def min_shift_union(J: IndexSet, max_n: int = DEFAULT_MAX_N) -> int:
    """Minimum of ``|J_1 u ... u J_{n-s}|`` over all choices of ``n - s`` distinct shifts."""
    n, s = J.n, len(J)
    if not 0 < s < n:
        raise ParameterError(f"min_shift_union needs 0 < |J| < n, got |J| = {s}, n = {n}")
    _check_guard(n, max_n)
    best = n
    for fam in _shift_families(J):
        union = 0
        for m in fam:
            union |= m
        best = min(best, union.bit_count())
    return best


def all_supports(n: int, s: int) -> Iterator[IndexSet]:
    """Every ``s``-subset of ``{1..n}`` in lexicographic order."""
    for c in combinations(range(1, n + 1), s):
        yield IndexSet(n, c)


# --- 2-D supports -----------------------------------------------------------

def index_to_pair(j: int, side: int) -> tuple[int, int]:
    """Row ``j`` (1-based) of a length ``side**2`` vector as ``(vertical, horizontal)``."""
    q = (j - 1) // side
    return (j - side * q, q + 1)


def pair_to_index(v: int, h: int, side: int) -> int:
    return (h - 1) * side + v


@dataclass(frozen=True)
class IndexPairSet:
    """Set of 1-based ``(vertical, horizontal)`` pairs within ``{1..side}^2``."""

    side: int
    members: frozenset

    def __post_init__(self):
        if self.side < 1:
            raise ParameterError("side must be >= 1")
        members = frozenset((int(v), int(h)) for v, h in self.members)
        for v, h in members:
            if not (1 <= v <= self.side and 1 <= h <= self.side):
                raise ParameterError(f"pair {(v, h)} outside 1..{self.side}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]], side: int) -> "IndexPairSet":
        pairs = list(pairs)
        if len(set(pairs)) != len(pairs):
            raise ParameterError("duplicate pairs")
        return cls(side, frozenset(pairs))

    @classmethod
    def from_index_set(cls, J: IndexSet) -> "IndexPairSet":
        side = math.isqrt(J.n)
        if side * side != J.n:
            raise ParameterError(f"n = {J.n} is not a perfect square")
        return cls(side, frozenset(index_to_pair(j, side) for j in J))

    def to_index_set(self) -> IndexSet:
        return IndexSet(self.side ** 2, tuple(pair_to_index(v, h, self.side) for v, h in self.members))

    def shift(self, lv: int, lh: int) -> "IndexPairSet":
        sd = self.side
        return IndexPairSet(sd, frozenset(((v - 1 + lv) % sd + 1, (h - 1 + lh) % sd + 1)
                                          for v, h in self.members))

    def __len__(self) -> int:
        return len(self.members)


def periods_2d(J: IndexPairSet) -> frozenset[tuple[int, int]]:
    """All nonzero ``(lv, lh)`` in ``[0, side)^2`` leaving J invariant under 2-D circular shift."""
    if not len(J):
        raise ParameterError("periods of an empty set are undefined")
    sd = J.side
    return frozenset((lv, lh) for lv in range(sd) for lh in range(sd)
                     if (lv, lh) != (0, 0) and J.shift(lv, lh) == J)
