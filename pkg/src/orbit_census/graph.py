"""Binary de Bruijn graph G_p and the lattice of admissible edge-count vectors.

Edges of G_p are the 2^p binary words of length p (identified with their
integer values, MSB = first letter); vertices are the 2^(p-1) words of length
p-1.  Edge a runs from tail(a) = a >> 1 (its first p-1 letters) to
head(a) = a & (2^(p-1)-1) (its last p-1 letters); edge b can follow edge a
exactly when head(a) = tail(b).

A vector 𝐧 = (n_a) of window counts of some cyclic word is *balanced*: at
every vertex the outgoing counts equal the incoming counts.  The balance
system has rank 2^(p-1) - 1, so together with the total-sum equation the
counts on the second half of the edges (first letter 1) are integral linear
functions of the first-half counts ("free coordinates") and n.  The basis is
computed once per p by exact rational elimination and cached.

A vector is *admissible* (realized by at least one closed walk, hence a
nonempty cluster) iff it is balanced, nonnegative, and its support is
strongly connected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import CapacityError, ParameterError
from .words import EdgeCountVector, Necklace, Word, _as_word

__all__ = [
    "DeBruijnGraph",
    "FlowBasis",
    "build_debruijn",
    "word_to_path",
    "is_balanced",
    "support_connected",
    "flow_basis",
    "balance_rank",
    "complete_vector",
    "enumerate_admissible_vectors",
    "count_admissible",
]

# capacity limits for exhaustive admissible-vector enumeration
_ENUM_LIMITS = {2: 200, 3: 200, 4: 40}


@dataclass(frozen=True)
class DeBruijnGraph:
    """The binary de Bruijn graph G_p (2^(p-1) vertices, 2^p edges)."""

    p: int

    @property
    def n_edges(self) -> int:
        return 1 << self.p

    @property
    def n_vertices(self) -> int:
        return 1 << (self.p - 1)

    def tail(self, a: int) -> int:
        self._check_edge(a)
        return a >> 1

    def head(self, a: int) -> int:
        self._check_edge(a)
        return a & (self.n_vertices - 1)

    def successors(self, a: int) -> tuple[int, int]:
        """Edges that may follow a in a walk."""
        h = self.head(a)
        return (2 * h, 2 * h + 1)

    def predecessors(self, a: int) -> tuple[int, int]:
        """Edges that may precede a in a walk."""
        t = self.tail(a)
        return (t, t + self.n_vertices)

    def vertex_out_edges(self, u: int) -> tuple[int, int]:
        self._check_vertex(u)
        return (2 * u, 2 * u + 1)

    def vertex_in_edges(self, u: int) -> tuple[int, int]:
        self._check_vertex(u)
        return (u, u + self.n_vertices)

    def edge_label(self, a: int) -> str:
        self._check_edge(a)
        return format(a, f"0{self.p}b")

    def _check_edge(self, a: int) -> None:
        if not 0 <= a < self.n_edges:
            raise ParameterError(f"edge value {a} out of range for p={self.p}")

    def _check_vertex(self, u: int) -> None:
        if not 0 <= u < self.n_vertices:
            raise ParameterError(f"vertex value {u} out of range for p={self.p}")


def build_debruijn(p: int) -> DeBruijnGraph:
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    return DeBruijnGraph(p=p)


def word_to_path(x: Word | Necklace, p: int) -> tuple[int, ...]:
    """The closed walk of a cyclic word on G_p: the n cyclic p-windows,
    in order, as edge values.  p may exceed n (windows wrap repeatedly)."""
    w = _as_word(x)
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    n = w.n
    reps = (n + p - 1 + (n - 1)) // n  # enough copies to cut any window
    ext = 0
    for _ in range(reps):
        ext = (ext << n) | w.bits
    total = reps * n
    mask = (1 << p) - 1
    return tuple((ext >> (total - j - p)) & mask for j in range(n))


def is_balanced(v: EdgeCountVector) -> bool:
    """Vertex-wise out-count == in-count (Eulerian balance)."""
    H = 1 << (v.p - 1)
    c = v.counts
    return all(c[2 * u] + c[2 * u + 1] == c[u] + c[u + H] for u in range(H))


@lru_cache(maxsize=None)
def _support_connected_mask(p: int, mask: int) -> bool:
    """Strong connectivity of the sub-multigraph with edge set `mask`."""
    if mask == 0:
        return False
    H = 1 << (p - 1)
    edges = [a for a in range(1 << p) if (mask >> a) & 1]
    verts = {a >> 1 for a in edges} | {a & (H - 1) for a in edges}
    out_adj: dict[int, list[int]] = {u: [] for u in verts}
    in_adj: dict[int, list[int]] = {u: [] for u in verts}
    for a in edges:
        out_adj[a >> 1].append(a & (H - 1))
        in_adj[a & (H - 1)].append(a >> 1)
    start = next(iter(verts))

    def reach(adj: dict[int, list[int]]) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    return reach(out_adj) == verts and reach(in_adj) == verts


def support_connected(v: EdgeCountVector) -> bool:
    """True iff the edges with n_a > 0 form a strongly connected subgraph."""
    mask = 0
    for a, c in enumerate(v.counts):
        if c > 0:
            mask |= 1 << a
    return _support_connected_mask(v.p, mask)


@dataclass(frozen=True)
class FlowBasis:
    """Integral solution of the balance + total-sum system for fixed p.

    bound = U @ free + v * n, where free are the counts on edges 0..H-1
    (first letter 0) and bound those on edges H..2H-1 (first letter 1).
    """

    p: int
    U: tuple[tuple[int, ...], ...]
    v: tuple[int, ...]

    @property
    def n_free(self) -> int:
        return 1 << (self.p - 1)

    def bound_counts(self, free: tuple[int, ...], n: int) -> tuple[int, ...]:
        return tuple(
            sum(u * f for u, f in zip(row, free)) + vv * n
            for row, vv in zip(self.U, self.v)
        )

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array(self.U, dtype=np.int64),
            np.array(self.v, dtype=np.int64),
        )


def _balance_rows(p: int) -> list[list[int]]:
    """Balance equations over all 2^p edge variables (one row per vertex)."""
    H = 1 << (p - 1)
    P = 1 << p
    rows = []
    for u in range(H):
        row = [0] * P
        row[2 * u] += 1
        row[2 * u + 1] += 1
        row[u] -= 1
        row[u + H] -= 1
        rows.append(row)
    return rows


def balance_rank(p: int) -> int:
    """Rank of the balance system alone (expected 2^(p-1) - 1)."""
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    rows = [[Fraction(x) for x in r] for r in _balance_rows(p)]
    cols = 1 << p
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@lru_cache(maxsize=None)
def flow_basis(p: int) -> FlowBasis:
    """Solve the bound coordinates in terms of the free ones, exactly.

    The augmented system (balance rows + total sum) is eliminated over
    Fractions; the solution must be integral - guaranteed by the structure
    of G_p and asserted here.
    """
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    H = 1 << (p - 1)
    P = 1 << p
    rows = _balance_rows(p)
    rows.append([1] * P)  # total sum = n
    rhs_n = [0] * H + [1]
    # columns: bound coords H..P-1 | then RHS coefficients of (free coords, n)
    aug = []
    for r, row in enumerate(rows):
        left = [Fraction(row[H + g]) for g in range(H)]
        right = [Fraction(-row[f]) for f in range(H)] + [Fraction(rhs_n[r])]
        aug.append(left + right)
    rank = 0
    width = H
    for c in range(width):
        piv = next((r for r in range(rank, len(aug)) if aug[r][c] != 0), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = 1 / aug[rank][c]
        aug[rank] = [x * inv for x in aug[rank]]
        for r in range(len(aug)):
            if r != rank and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[rank])]
        rank += 1
    if rank != H:
        raise AssertionError(f"bound-coordinate system is rank-deficient at p={p}")
    for r in range(rank, len(aug)):
        if any(x != 0 for x in aug[r]):
            raise AssertionError(f"inconsistent flow system at p={p}")
    U, v = [], []
    for g in range(H):
        row = aug[g]
        assert all(row[c] == (1 if c == g else 0) for c in range(H))
        coeffs = row[width : width + H]
        nn = row[width + H]
        if any(x.denominator != 1 for x in coeffs) or nn.denominator != 1:
            raise AssertionError(f"non-integral flow basis at p={p}")
        U.append(tuple(int(x) for x in coeffs))
        v.append(int(nn))
    return FlowBasis(p=p, U=tuple(U), v=tuple(v))


def complete_vector(p: int, free: tuple[int, ...], n: int) -> EdgeCountVector:
    """Extend first-half counts to the full balanced vector with total n."""
    basis = flow_basis(p)
    if len(free) != basis.n_free:
        raise ParameterError(
            f"expected {basis.n_free} free coordinates, got {len(free)}"
        )
    bound = basis.bound_counts(tuple(free), n)
    if any(b < 0 for b in bound):
        raise ParameterError(
            f"free coordinates {free} admit no nonnegative completion at n={n}"
        )
    return EdgeCountVector(p=p, counts=tuple(free) + bound)


def _check_enum_capacity(n: int, p: int) -> None:
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    limit = _ENUM_LIMITS.get(p)
    if limit is None:
        raise CapacityError(
            f"admissible-vector enumeration supports p <= 4, got p={p}"
        )
    if n > limit:
        raise CapacityError(
            f"admissible-vector enumeration at p={p} supports n <= {limit}, got n={n}"
        )


def _admissible_slabs(n: int, p: int, backend: str | None) -> Iterator[np.ndarray]:
    """Yield admissible vectors (connected support included) as int64 row
    blocks, lexicographically ordered by the free coordinates."""
    from . import kernels  # deferred: numba compilation only on demand

    basis = flow_basis(p)
    U, v = basis.as_arrays()
    P = 1 << p
    pow2 = (np.int64(1) << np.arange(P, dtype=np.int64))
    for f0 in range(n + 1):
        rows = kernels.admissible_slab(n, p, f0, U, v, backend=backend)
        if rows.shape[0] == 0:
            continue
        masks = (rows > 0).astype(np.int64) @ pow2
        uniq = np.unique(masks)
        ok = {int(m): _support_connected_mask(p, int(m)) for m in uniq}
        keep = np.fromiter((ok[int(m)] for m in masks), dtype=bool, count=len(masks))
        if keep.any():
            yield rows[keep]


def enumerate_admissible_vectors(
    n: int, p: int, backend: str | None = None
) -> Iterator[EdgeCountVector]:
    """All admissible vectors at (n, p): balanced, nonnegative, connected
    support.  Deterministic stream, lexicographic in the free coordinates."""
    _check_enum_capacity(n, p)
    for block in _admissible_slabs(n, p, backend):
        for row in block:
            yield EdgeCountVector(p=p, counts=tuple(int(x) for x in row))


def count_admissible(n: int, p: int, backend: str | None = None) -> int:
    """𝒩_p(n): the number of admissible vectors = number of clusters."""
    _check_enum_capacity(n, p)
    return sum(int(b.shape[0]) for b in _admissible_slabs(n, p, backend))
