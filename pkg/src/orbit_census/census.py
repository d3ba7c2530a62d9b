"""Exact cluster censuses of X_n under p-closeness, and their statistics.

Two independent engines produce the same table:

* ``brute_census`` scans all 2^n words, hashing each word's first-half
  window counts (the second half is determined by balance) - the ground
  truth, capacity n <= 28 (necklace level n <= 24).

* ``best_census`` enumerates admissible edge-count vectors on G_p and counts
  each cluster in closed form: the number of closed walks with edge
  multiplicities 𝐧 is

      |C_𝐧| = n · T_r · Π_u (d⁺_u - 1)! / Π_a n_a!

  where T_r counts spanning arborescences of the support multigraph toward
  an arbitrary root r (matrix-tree determinant; root-independent since the
  multigraph is balanced and connected) and d⁺_u is the out-degree count at
  vertex u.  Everything is exact big-integer arithmetic; capacity p <= 3 at
  n <= 200, p = 4 at n <= 40.

Word-level sizes always count every word (sub-period words included);
the necklace level counts one representative per rotation class, with a
``prime_only`` switch restricting to classes of full period n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import CapacityError, ParameterError, StateError
from .graph import (
    complete_vector,
    enumerate_admissible_vectors,
    is_balanced,
    support_connected,
)
from .words import EdgeCountVector

__all__ = [
    "CensusRecord",
    "CensusTable",
    "brute_census",
    "best_cluster_size",
    "best_census",
    "moments",
    "prob_k",
    "max_cluster",
    "empirical_distribution",
    "mean_edge_visits",
    "thresholded_edge_visits",
]

_BRUTE_WORD_LIMIT = 28
_BRUTE_NECKLACE_LIMIT = 24
_CHUNK = 1 << 22


@dataclass(frozen=True)
class CensusRecord:
    """One cluster: its edge-count vector and exact sizes."""

    vector: EdgeCountVector
    size_words: int
    size_necklaces: int | None

    @property
    def n(self) -> int:
        return self.vector.n

    @property
    def p(self) -> int:
        return self.vector.p


@dataclass(frozen=True)
class CensusTable:
    """Complete census at fixed (n, p): one record per nonempty cluster,
    sorted by edge-count vector."""

    n: int
    p: int
    engine: str
    prime_only: bool
    records: tuple[CensusRecord, ...]

    @property
    def n_clusters(self) -> int:
        return len(self.records)

    @property
    def total_words(self) -> int:
        return sum(r.size_words for r in self.records)

    @property
    def has_necklaces(self) -> bool:
        return all(r.size_necklaces is not None for r in self.records)

    @property
    def total_necklaces(self) -> int:
        self._need_necklaces()
        return sum(r.size_necklaces for r in self.records)  # type: ignore[misc]

    def _need_necklaces(self) -> None:
        if not self.has_necklaces:
            raise StateError(
                "necklace-level sizes unavailable in this table "
                "(word-only brute census beyond the necklace capacity)"
            )


def _validate_np(n: int, p: int) -> None:
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if p > n:
        raise ParameterError(f"need 2 <= p <= n for a word census, got p={p}, n={n}")


def _unpack_key(key: int, width: int, h: int) -> tuple[int, ...]:
    mask = (1 << width) - 1
    return tuple((key >> (width * w)) & mask for w in range(h))


def brute_census(
    n: int,
    p: int,
    prime_only: bool = False,
    backend: str | None = None,
) -> CensusTable:
    """Exhaustive scan of all 2^n words.  Capacity n <= 28; necklace sizes
    are filled for n <= 24 (and required for ``prime_only``)."""
    _validate_np(n, p)
    if n > _BRUTE_WORD_LIMIT:
        raise CapacityError(
            f"brute census supports n <= {_BRUTE_WORD_LIMIT}, got n={n}; "
            "use the best engine"
        )
    with_necklaces = n <= _BRUTE_NECKLACE_LIMIT
    if prime_only and not with_necklaces:
        raise CapacityError(
            f"necklace-level brute census supports n <= {_BRUTE_NECKLACE_LIMIT}, got n={n}"
        )
    width = max(1, n.bit_length())
    h = 1 << (p - 1)
    word_acc: dict[int, int] = {}
    neck_acc: dict[int, int] = {}
    for start in range(0, 1 << n, _CHUNK):
        stop = min(start + _CHUNK, 1 << n)
        keys = kernels.word_window_keys(n, p, start, stop, width, backend=backend)
        vals, cnts = np.unique(keys, return_counts=True)
        for k, c in zip(vals.tolist(), cnts.tolist()):
            word_acc[k] = word_acc.get(k, 0) + c
        if with_necklaces:
            canon, period = kernels.canonical_period(n, start, stop, backend=backend)
            sel = canon.astype(bool)
            if prime_only:
                sel = sel & (period == n)
            if sel.any():
                nvals, ncnts = np.unique(keys[sel], return_counts=True)
                for k, c in zip(nvals.tolist(), ncnts.tolist()):
                    neck_acc[k] = neck_acc.get(k, 0) + c
    records = []
    for key in sorted(word_acc):
        free = _unpack_key(key, width, h)
        vec = complete_vector(p, free, n)
        neck = None
        if with_necklaces:
            neck = neck_acc.get(key, 0)
        records.append(
            CensusRecord(vector=vec, size_words=word_acc[key], size_necklaces=neck)
        )
    records.sort(key=lambda r: r.vector.counts)
    return CensusTable(
        n=n, p=p, engine="brute", prime_only=prime_only, records=tuple(records)
    )


def _int_det(m: list[list[int]]) -> int:
    """Exact determinant of a small integer matrix (fraction-free Bareiss)."""
    size = len(m)
    if size == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, size) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[-1][-1]


def _arborescence_count(v: EdgeCountVector) -> int:
    """Spanning arborescences of the support multigraph toward a fixed root:
    determinant of the reduced out-degree Laplacian (matrix-tree)."""
    h = 1 << (v.p - 1)
    verts = sorted(
        {a >> 1 for a, c in enumerate(v.counts) if c > 0}
        | {a & (h - 1) for a, c in enumerate(v.counts) if c > 0}
    )
    pos = {u: i for i, u in enumerate(verts)}
    m = len(verts)
    lap = [[0] * m for _ in range(m)]
    for a, c in enumerate(v.counts):
        if c == 0:
            continue
        t, hd = a >> 1, a & (h - 1)
        lap[pos[t]][pos[t]] += c
        lap[pos[t]][pos[hd]] -= c
    root = 0  # any support vertex; count is root-independent when balanced
    minor = [
        [lap[i][j] for j in range(m) if j != root] for i in range(m) if i != root
    ]
    return _int_det(minor)


def best_cluster_size(v: EdgeCountVector) -> int:
    """Exact |C_𝐧| for one vector.  Returns 0 when the support is not
    strongly connected (no closed walk realizes 𝐧)."""
    if v.n < 1:
        raise ParameterError("total count must be >= 1")
    if not is_balanced(v):
        raise ParameterError(f"vector {v} is not balanced")
    if not support_connected(v):
        return 0
    n = v.n
    # constant words: a single self-loop edge; the walk formula degenerates
    if v.counts[0] == n or v.counts[-1] == n:
        return 1
    h = 1 << (v.p - 1)
    t_r = _arborescence_count(v)
    num = n * t_r
    for u in range(h):
        d_out = v.counts[2 * u] + v.counts[2 * u + 1]
        if d_out > 0:
            num *= math.factorial(d_out - 1)
    den = 1
    for c in v.counts:
        if c > 1:
            den *= math.factorial(c)
    if num % den != 0:  # pragma: no cover - exactness guarantee
        raise AssertionError(f"non-integral cluster size at {v}")
    return num // den


def _divisors(n: int) -> list[int]:
    small, large = [], []
    f = 1
    while f * f <= n:
        if n % f == 0:
            small.append(f)
            if f != n // f:
                large.append(n // f)
        f += 1
    return small + large[::-1]


def _mobius(n: int) -> int:
    mu = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            mu = -mu
        f += 1
    if n > 1:
        mu = -mu
    return mu


def _necklace_sizes(vec: EdgeCountVector, size_words: int, prime_only: bool) -> int:
    """Exact necklace count of a cluster from cluster sizes of the sub-period
    vectors: a word of period d in C_𝐧 is a word of the length-d cluster with
    counts (d/n)·𝐧, so exact-period counts follow by Moebius inversion over
    the divisor lattice and necklaces of period d contribute 1/d each."""
    n = vec.n
    divs = _divisors(n)
    whole: dict[int, int] = {}  # d -> words of period dividing d
    for d in divs:
        scale = n // d
        if d == n:
            whole[d] = size_words
        elif all(c % scale == 0 for c in vec.counts):
            sub = EdgeCountVector(p=vec.p, counts=tuple(c // scale for c in vec.counts))
            whole[d] = best_cluster_size(sub)
        else:
            whole[d] = 0
    total = 0
    for d in divs:
        if prime_only and d != n:
            continue
        exact_d = sum(_mobius(d // e) * whole[e] for e in _divisors(d))
        if exact_d % d != 0:  # pragma: no cover - exactness guarantee
            raise AssertionError(f"period-{d} word count not divisible at {vec}")
        total += exact_d // d
    return total


def best_census(
    n: int,
    p: int,
    prime_only: bool = False,
    backend: str | None = None,
) -> CensusTable:
    """Census via admissible-vector enumeration and closed-form counting.
    Necklace sizes are exact for every n (Moebius inversion over sub-period
    clusters); ``prime_only`` counts only full-period rotation classes."""
    _validate_np(n, p)
    records = []
    for vec in enumerate_admissible_vectors(n, p, backend=backend):
        s = best_cluster_size(vec)
        if s == 0:  # pragma: no cover - enumeration already filters support
            continue
        neck = _necklace_sizes(vec, s, prime_only)
        records.append(CensusRecord(vector=vec, size_words=s, size_necklaces=neck))
    records.sort(key=lambda r: r.vector.counts)
    return CensusTable(
        n=n, p=p, engine="best", prime_only=prime_only, records=tuple(records)
    )


def moments(table: CensusTable, k: int, level: str = "word") -> int:
    """Z_k = Σ |C|^k (word level) or 𝒵_k = Σ |𝒞|^k (necklace level), exact."""
    if k < 1:
        raise ParameterError(f"moment order must be >= 1, got {k}")
    if level == "word":
        return sum(r.size_words**k for r in table.records)
    if level == "necklace":
        table._need_necklaces()
        return sum(r.size_necklaces**k for r in table.records)  # type: ignore[operator]
    raise ParameterError(f"level must be word|necklace, got {level!r}")


def prob_k(table: CensusTable, k: int) -> float:
    """Probability that k uniformly random necklaces are mutually p-close:
    𝒵_k / d^k with d the number of necklaces counted."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    zk = moments(table, k, level="necklace")
    d = table.total_necklaces
    if d == 0:
        raise StateError("empty necklace census")
    return float(Fraction(zk, d**k))


def max_cluster(table: CensusTable) -> CensusRecord:
    """The record of maximal word-level size; ties resolved toward the
    lexicographically smallest vector."""
    if not table.records:
        raise StateError("empty census table")
    best = max(table.records, key=lambda r: (r.size_words, [-c for c in r.vector.counts]))
    return best


def empirical_distribution(
    table: CensusTable, bins: int = 100
) -> list[tuple[Fraction, Fraction]]:
    """P̂(t) at t = j/bins, j = 0..bins: the exact probability that a random
    word lies in a cluster of size <= t·|C_max|.  All comparisons exact."""
    if bins < 1:
        raise ParameterError(f"bins must be >= 1, got {bins}")
    cmax = max(r.size_words for r in table.records)
    sizes = sorted(r.size_words for r in table.records)
    prefix = [0]
    for s in sizes:
        prefix.append(prefix[-1] + s)
    total = prefix[-1]
    out = []
    for j in range(bins + 1):
        t = Fraction(j, bins)
        # rightmost size with bins * size <= j * cmax
        lo, hi = 0, len(sizes)
        while lo < hi:
            mid = (lo + hi) // 2
            if sizes[mid] * bins <= j * cmax:
                lo = mid + 1
            else:
                hi = mid
        out.append((t, Fraction(prefix[lo], total)))
    return out


def mean_edge_visits(table: CensusTable, k: int = 1) -> tuple[Fraction, ...]:
    """⟨n_a⟩_k = Σ n_a |C|^k / Σ |C|^k per edge, exact (word level)."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    pp = 1 << table.p
    num = [0] * pp
    den = 0
    for r in table.records:
        w = r.size_words**k
        den += w
        for a, c in enumerate(r.vector.counts):
            num[a] += c * w
    return tuple(Fraction(x, den) for x in num)


def thresholded_edge_visits(
    table: CensusTable, t: Fraction | float
) -> tuple[Fraction, ...]:
    """n̄_a(t): size-weighted mean edge counts over clusters of size
    <= t·|C_max| (inclusive, so n̄_a(1) = n/2^p holds exactly).  An empty
    selection falls back to the minimal-size clusters."""
    tq = Fraction(t)
    if not 0 <= tq <= 1:
        raise ParameterError(f"threshold must lie in [0, 1], got {t}")
    cmax = max(r.size_words for r in table.records)
    sel = [
        r
        for r in table.records
        if r.size_words * tq.denominator <= tq.numerator * cmax
    ]
    if not sel:
        smin = min(r.size_words for r in table.records)
        sel = [r for r in table.records if r.size_words == smin]
    pp = 1 << table.p
    num = [0] * pp
    den = 0
    for r in sel:
        den += r.size_words
        for a, c in enumerate(r.vector.counts):
            num[a] += c * r.size_words
    return tuple(Fraction(x, den) for x in num)
