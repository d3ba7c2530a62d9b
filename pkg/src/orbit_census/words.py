"""Binary words, necklaces, cyclic p-word statistics and the cluster hierarchy.

A word of length n is stored as a packed bit pattern: symbol x_1 is the most
significant of n bits, x_n the least significant. Cyclic windows are read with
glued ends, so every word has exactly n windows of each length p <= n. Two
words are p-close when their multisets of cyclic p-windows coincide; the
distance n - max{p : p-close} is an ultrametric on rotation classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ParameterError

__all__ = [
    "Word",
    "Necklace",
    "EdgeCountVector",
    "ClusterTreeLevel",
    "cyclic_pword_counts",
    "p_close",
    "ultrametric_distance",
    "canonical_rotation",
    "enumerate_words",
    "enumerate_necklaces",
    "is_prime_orbit",
    "cluster_tree",
]


@dataclass(frozen=True, order=True)
class Word:
    """A cyclic binary word x_1 ... x_n packed into an integer (x_1 = MSB)."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"word length must be >= 1, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ParameterError(
                f"bit pattern {self.bits} out of range for length {self.n}"
            )

    @classmethod
    def from_string(cls, s: str) -> "Word":
        if not s or set(s) - {"0", "1"}:
            raise ParameterError(f"not a binary string: {s!r}")
        return cls(len(s), int(s, 2))

    @classmethod
    def from_symbols(cls, symbols: Sequence[int]) -> "Word":
        bits = 0
        for b in symbols:
            if b not in (0, 1):
                raise ParameterError(f"not a binary symbol: {b!r}")
            bits = (bits << 1) | b
        return cls(len(symbols), bits)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.n}b")

    def symbol(self, i: int) -> int:
        """x_i with 1-based cyclic index."""
        j = (i - 1) % self.n
        return (self.bits >> (self.n - 1 - j)) & 1

    def symbols(self) -> tuple[int, ...]:
        return tuple((self.bits >> (self.n - 1 - j)) & 1 for j in range(self.n))

    def rotate(self, i: int) -> "Word":
        """Left rotation: x_{i+1} ... x_n x_1 ... x_i."""
        n, i = self.n, i % self.n
        if i == 0:
            return self
        mask = (1 << n) - 1
        return Word(n, ((self.bits << i) & mask) | (self.bits >> (n - i)))

    def rotations(self) -> Iterator["Word"]:
        for i in range(self.n):
            yield self.rotate(i)

    def window(self, j: int, p: int) -> int:
        """Value of the cyclic window x_{j+1} ... x_{j+p}, 0 <= j < n."""
        dd = (self.bits << self.n) | self.bits
        return (dd >> (2 * self.n - j - p)) & ((1 << p) - 1)


@dataclass(frozen=True, order=True)
class Necklace:
    """Rotation class of a word, held by its lexicographically minimal rotation."""

    word: Word

    def __post_init__(self) -> None:
        w = self.word
        if any(r.bits < w.bits for r in w.rotations()):
            raise ParameterError(f"{w} is not the minimal rotation of its class")

    @property
    def n(self) -> int:
        return self.word.n

    def __str__(self) -> str:
        return str(self.word)


@dataclass(frozen=True, order=True)
class EdgeCountVector:
    """Occurrence counts of all 2^p length-p patterns, indexed by pattern value.

    counts[a] is the number of cyclic occurrences of the p-bit pattern whose
    integer value is a (a_1 = MSB); equivalently the visit count of edge a on
    the order-p de Bruijn graph.
    """

    p: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ParameterError(f"pattern length must be >= 1, got {self.p}")
        if len(self.counts) != 1 << self.p:
            raise ParameterError(
                f"expected {1 << self.p} counts for p={self.p}, got {len(self.counts)}"
            )
        if any(c < 0 for c in self.counts):
            raise ParameterError("counts must be nonnegative")

    @property
    def n(self) -> int:
        return sum(self.counts)

    def __str__(self) -> str:
        return ":".join(str(c) for c in self.counts)

    @classmethod
    def from_string(cls, p: int, s: str) -> "EdgeCountVector":
        return cls(p, tuple(int(c) for c in s.split(":")))


def _window_counts(x: Word, p: int) -> tuple[int, ...]:
    """Counts of all cyclic p-windows, p >= 1 (no range validation)."""
    n = x.n
    counts = [0] * (1 << p)
    dd = (x.bits << n) | x.bits
    mask = (1 << p) - 1
    for j in range(n):
        counts[(dd >> (2 * n - j - p)) & mask] += 1
    return tuple(counts)


def _check_pair(x: Word, y: Word) -> None:
    if x.n != y.n:
        raise ParameterError(f"length mismatch: {x.n} vs {y.n}")


def cyclic_pword_counts(x: Word, p: int) -> EdgeCountVector:
    """The vector of cyclic p-window counts of x; rotation invariant, sums to n."""
    if not 2 <= p <= x.n:
        raise ParameterError(f"need 2 <= p <= {x.n}, got p={p}")
    return EdgeCountVector(p, _window_counts(x, p))


def p_close(x: Word, y: Word, p: int) -> bool:
    """True iff x and y contain every length-p pattern equally often (cyclically)."""
    _check_pair(x, y)
    if not 2 <= p <= x.n:
        raise ParameterError(f"need 2 <= p <= {x.n}, got p={p}")
    return _window_counts(x, p) == _window_counts(y, p)


def _as_word(x: "Word | Necklace") -> Word:
    return x.word if isinstance(x, Necklace) else x


def ultrametric_distance(x: "Word | Necklace", y: "Word | Necklace") -> int:
    """n minus the deepest level at which x and y are p-close.

    The scan runs upward from p=1 and stops at the first failure (closeness at
    p+1 implies closeness at p). If x and y differ already in their number of
    ones, the maximum over the empty level set is taken as 0 and d = n.
    """
    xw, yw = _as_word(x), _as_word(y)
    _check_pair(xw, yw)
    n = xw.n
    deepest = 0
    for p in range(1, n + 1):
        if _window_counts(xw, p) != _window_counts(yw, p):
            break
        deepest = p
    return n - deepest


def canonical_rotation(x: Word) -> Necklace:
    """The lexicographically minimal rotation of x."""
    best = min(r.bits for r in x.rotations())
    return Necklace(Word(x.n, best))


def enumerate_words(n: int) -> Iterator[Word]:
    """All 2^n words of length n, ascending by bit pattern."""
    if n < 1:
        raise ParameterError(f"word length must be >= 1, got {n}")
    for bits in range(1 << n):
        yield Word(n, bits)


def _is_canonical(n: int, bits: int) -> bool:
    dd = (bits << n) | bits
    mask = (1 << n) - 1
    for i in range(1, n):
        if (dd >> (n - i)) & mask < bits:
            return False
    return True


def enumerate_necklaces(n: int) -> Iterator[Necklace]:
    """All rotation classes of length n, ascending by minimal representative."""
    if n < 1:
        raise ParameterError(f"word length must be >= 1, got {n}")
    for bits in range(1 << n):
        if _is_canonical(n, bits):
            yield Necklace(Word(n, bits))


def is_prime_orbit(x: "Word | Necklace") -> bool:
    """True iff the minimal cyclic period of x equals its length."""
    w = _as_word(x)
    n = w.n
    for r in range(1, n):
        if n % r == 0 and w.rotate(r) == w:
            return False
    return True


@dataclass(frozen=True)
class ClusterTreeLevel:
    """One level of the cluster hierarchy: the partition into p-close classes."""

    level: int
    classes: tuple[tuple[Necklace, ...], ...]


def cluster_tree(
    n: int,
    p_max: int,
    necklaces: Iterable[Necklace] | None = None,
    prime_only: bool = False,
) -> list[ClusterTreeLevel]:
    """Partitions of the necklaces of length n by p-closeness, p = 1 .. p_max.

    Each level refines the one before it. An explicit `necklaces` subset
    restricts the tree to those classes; `prime_only` drops necklaces whose
    words have a proper cyclic period.
    """
    if not 2 <= p_max <= n:
        raise ParameterError(f"need 2 <= p_max <= {n}, got p_max={p_max}")
    if necklaces is None:
        pool = list(enumerate_necklaces(n))
    else:
        pool = sorted(set(necklaces))
        for nk in pool:
            if nk.n != n:
                raise ParameterError(f"necklace {nk} has length {nk.n}, expected {n}")
    if prime_only:
        pool = [nk for nk in pool if is_prime_orbit(nk)]
    levels = []
    for p in range(1, p_max + 1):
        groups: dict[tuple[int, ...], list[Necklace]] = {}
        for nk in pool:
            groups.setdefault(_window_counts(nk.word, p), []).append(nk)
        classes = tuple(
            tuple(members) for _, members in sorted(groups.items(), key=lambda kv: kv[1][0])
        )
        levels.append(ClusterTreeLevel(p, classes))
    return levels
