"""Baker's map layer: exact rational orbit coordinates and the metric
p-neighborhood test.

A periodic binary word x = x_1...x_n encodes a period-n orbit of the baker's
map on the unit square.  The phase-i orbit point has

    q_i = 0.(x_{i+1} x_{i+2} ...)   (binary, cyclic continuation)
    p_i = 0.(x_i x_{i-1} ...)       (binary, cyclic continuation backwards)

Both coordinates are exact rationals with denominator 2^n - 1, so the whole
layer works in `fractions.Fraction` arithmetic - no floating point anywhere.

The all-ones word is special: its point is exactly (1, 1), the corner of the
closed square, rather than an interior point of [0,1)^2.  It is kept (the
dynamics 2q-1, (1+p)/2 fixes it) and flagged via ``OrbitPoints.is_corner``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError
from .words import Necklace, Word, _as_word

__all__ = [
    "OrbitPoints",
    "MatchReport",
    "baker_step",
    "orbit_points",
    "sup_distance",
    "p_neighborhood_check",
]

Point = tuple[Fraction, Fraction]


def baker_step(point: Point) -> Point:
    """One iteration of the baker's map on the closed unit square.

    (q, p) -> (2q, p/2) on the left half q < 1/2, and (2q - 1, (1+p)/2) on
    the right half q >= 1/2.  Exact in Fraction arithmetic.
    """
    q, p = Fraction(point[0]), Fraction(point[1])
    if not (0 <= q <= 1 and 0 <= p <= 1):
        raise ParameterError(f"point {point} outside the unit square")
    if q < Fraction(1, 2):
        return (2 * q, p / 2)
    return (2 * q - 1, (1 + p) / 2)


@dataclass(frozen=True)
class OrbitPoints:
    """The n phase-space points of the periodic orbit of a word.

    ``points[i]`` is the point whose future starts at letter i+2 (1-based
    phase i+1); consecutive points are related by one baker_step.  For a
    word with sub-period the points repeat - the tuple always has length n.
    """

    word: Word
    points: tuple[Point, ...]
    is_corner: bool

    def __len__(self) -> int:
        return len(self.points)


def orbit_points(x: Word | Necklace) -> OrbitPoints:
    """Exact orbit coordinates of a periodic word.

    q_i has the rotation starting at letter i+1 as its repeating block;
    p_i has the reversed word ending at letter i.  Denominator 2^n - 1.
    """
    w = _as_word(x)
    n = w.n
    den = (1 << n) - 1
    if den == 0:  # pragma: no cover - n >= 1 is enforced by Word
        raise ParameterError("empty word has no orbit")
    pts = []
    for i in range(n):
        fwd = w.rotate(i)  # x_{i+1} x_{i+2} ... x_{i+n}
        qv = fwd.bits
        # momentum block x_i x_{i-1} ... x_{i-n+1} (indices mod n, 1-based)
        pv = 0
        for j in range(n):
            pv = (pv << 1) | w.symbol(((i - 1 - j) % n) + 1)
        pts.append((Fraction(qv, den), Fraction(pv, den)))
    corner = w.bits == den  # all-ones word sits exactly at (1, 1)
    out = OrbitPoints(word=w, points=tuple(pts), is_corner=corner)
    # cheap exactness guarantee: consecutive points are one baker step apart
    for i in range(n):
        if baker_step(pts[i]) != pts[(i + 1) % n]:  # pragma: no cover
            raise AssertionError("orbit coordinates violate the baker step")
    return out


def sup_distance(a: Point, b: Point) -> Fraction:
    """Sup-norm distance max(|dq|, |dp|), exact."""
    return max(abs(Fraction(a[0]) - Fraction(b[0])), abs(Fraction(a[1]) - Fraction(b[1])))


@dataclass(frozen=True)
class MatchReport:
    """Result of the bijective 2^-p-neighborhood matching between two orbits."""

    matched: bool
    threshold: Fraction
    # pairing[i] = index j into the second orbit matched with point i, or None
    pairing: tuple[int, ...] | None


def _kuhn_matching(adj: list[list[int]], n_right: int) -> list[int] | None:
    """Perfect bipartite matching via augmenting paths; None if impossible."""
    match_right = [-1] * n_right

    def try_augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_right[v] == -1 or try_augment(match_right[v], seen):
                    match_right[v] = u
                    return True
        return False

    for u in range(len(adj)):
        if not try_augment(u, [False] * n_right):
            return None
    pairing = [-1] * len(adj)
    for v, u in enumerate(match_right):
        if u >= 0:
            pairing[u] = v
    return pairing


def p_neighborhood_check(
    x: Word | Necklace, y: Word | Necklace, p: int
) -> MatchReport:
    """Test the metric side of p-closeness: every point of orbit(x) can be
    paired bijectively with a point of orbit(y) at sup-distance <= 2^-p.

    Exact rational arithmetic throughout; the matching is found with the
    augmenting-path algorithm on the threshold graph.
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    wx, wy = _as_word(x), _as_word(y)
    if wx.n != wy.n:
        raise ParameterError("orbits must have equal period length")
    thr = Fraction(1, 1 << p)
    pa, pb = orbit_points(wx).points, orbit_points(wy).points
    adj = [
        [j for j, b in enumerate(pb) if sup_distance(a, b) <= thr] for a in pa
    ]
    pairing = _kuhn_matching(adj, len(pb))
    if pairing is None:
        return MatchReport(matched=False, threshold=thr, pairing=None)
    return MatchReport(matched=True, threshold=thr, pairing=tuple(pairing))
