"""Baker layer: exact orbit coordinates and the metric neighborhood test."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbit_census import (
    ParameterError,
    Word,
    baker_step,
    enumerate_necklaces,
    orbit_points,
    p_close,
    p_neighborhood_check,
    sup_distance,
)

words_strategy = st.integers(1, 10).flatmap(
    lambda n: st.builds(Word, st.just(n), st.integers(0, (1 << n) - 1))
)


def bottleneck_oracle(x: Word, y: Word) -> Fraction:
    """Smallest achievable max pair distance over ALL bijections, brute force.

    Independent of the package's augmenting-path matcher; n <= 8 keeps the
    8! * 8 distance evaluations cheap.
    """
    pa = orbit_points(x).points
    pb = orbit_points(y).points
    best = None
    for perm in permutations(range(len(pb))):
        worst = max(sup_distance(pa[i], pb[perm[i]]) for i in range(len(pa)))
        if best is None or worst < best:
            best = worst
    return best


class TestBakerStep:
    def test_left_branch(self):
        assert baker_step((Fraction(1, 3), Fraction(2, 3))) == (
            Fraction(2, 3),
            Fraction(1, 3),
        )

    def test_right_branch_and_boundary(self):
        assert baker_step((Fraction(3, 4), Fraction(0))) == (
            Fraction(1, 2),
            Fraction(1, 2),
        )
        # q = 1/2 belongs to the right branch
        assert baker_step((Fraction(1, 2), Fraction(0))) == (0, Fraction(1, 2))

    def test_corner_is_fixed(self):
        assert baker_step((Fraction(1), Fraction(1))) == (1, 1)

    def test_rejects_outside_square(self):
        with pytest.raises(ParameterError):
            baker_step((Fraction(3, 2), Fraction(0)))
        with pytest.raises(ParameterError):
            baker_step((Fraction(0), Fraction(-1, 4)))


class TestOrbitPoints:
    def test_pinned_two_cycle(self):
        pts = orbit_points(Word.from_string("01"))
        assert pts.points == ((Fraction(1, 3), Fraction(2, 3)),
                              (Fraction(2, 3), Fraction(1, 3)))
        assert not pts.is_corner

    def test_fixed_points(self):
        zero = orbit_points(Word.from_string("000"))
        assert zero.points == ((0, 0), (0, 0), (0, 0))
        assert not zero.is_corner
        ones = orbit_points(Word.from_string("111"))
        assert ones.is_corner
        assert ones.points == ((1, 1), (1, 1), (1, 1))

    @given(words_strategy)
    @settings(max_examples=60)
    def test_orbit_follows_the_map(self, w):
        pts = orbit_points(w).points
        n = w.n
        den = (1 << n) - 1
        for i in range(n):
            assert baker_step(pts[i]) == pts[(i + 1) % n]
            assert (pts[i][0] * den).denominator == 1
            assert (pts[i][1] * den).denominator == 1

    @given(words_strategy)
    @settings(max_examples=40)
    def test_rotation_shifts_phase(self, w):
        pts = orbit_points(w).points
        rot = orbit_points(w.rotate(1)).points
        assert rot == pts[1:] + pts[:1]


class TestSupDistance:
    def test_exact_and_symmetric(self):
        a = (Fraction(1, 3), Fraction(1, 7))
        b = (Fraction(1, 2), Fraction(6, 7))
        assert sup_distance(a, b) == Fraction(5, 7)
        assert sup_distance(b, a) == Fraction(5, 7)
        assert sup_distance(a, a) == 0


class TestNeighborhoodCheck:
    def test_pinned_trio_matches_at_p2(self):
        x = Word.from_string("1101000")
        y = Word.from_string("1100010")
        z = Word.from_string("1100100")
        for a, b in ((x, y), (x, z), (z, y)):
            rep = p_neighborhood_check(a, b, 2)
            assert rep.matched and rep.threshold == Fraction(1, 4)
            # the pairing is a bijection whose pairs honor the threshold
            assert sorted(rep.pairing) == list(range(7))
            pa, pb = orbit_points(a).points, orbit_points(b).points
            assert all(
                sup_distance(pa[i], pb[j]) <= Fraction(1, 4)
                for i, j in enumerate(rep.pairing)
            )

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            p_neighborhood_check(Word.from_string("01"), Word.from_string("011"), 2)

    def test_identical_orbits_always_match(self):
        w = Word.from_string("001011")
        rep = p_neighborhood_check(w, w.rotate(2), 3)
        assert rep.matched

    def test_reversed_pair_fails_at_p2(self):
        # time-reversal pair: equal 2-window counts, bottleneck 4/15 > 1/4
        x = Word.from_string("00010111")
        y = Word.from_string("00011101")
        assert p_close(x, y, 2)
        assert not p_neighborhood_check(x, y, 2).matched
        assert bottleneck_oracle(x, y) == Fraction(4, 15)

    def test_reversed_pair_fails_at_p3(self):
        x = Word.from_string("001011")
        y = Word.from_string("001101")
        assert p_close(x, y, 3)
        assert not p_neighborhood_check(x, y, 3).matched
        assert bottleneck_oracle(x, y) == Fraction(4, 21)


# The complete list of p-close necklace pairs (n <= 8, p in {2, 3}) whose
# orbits CANNOT be paired within sup-distance 2^-p, with the exact smallest
# achievable max pair distance (brute-forced over all bijections).  The
# symbolic relation does not imply the metric one; these pin the boundary.
KNOWN_UNMATCHABLE = [
    (2, 8, "00010111", "00011101", Fraction(4, 15)),
    (3, 6, "001011", "001101", Fraction(4, 21)),
    (3, 7, "0001011", "0001101", Fraction(28, 127)),
    (3, 7, "0010111", "0011101", Fraction(28, 127)),
    (3, 8, "00001001", "00010001", Fraction(32, 255)),
    (3, 8, "00001011", "00001101", Fraction(4, 17)),
    (3, 8, "00010111", "00011101", Fraction(4, 15)),
    (3, 8, "00101011", "00101101", Fraction(44, 255)),
    (3, 8, "00101011", "00110101", Fraction(12, 85)),
    (3, 8, "00101101", "00110101", Fraction(44, 255)),
    (3, 8, "00101111", "00111101", Fraction(4, 17)),
    (3, 8, "01101111", "01110111", Fraction(32, 255)),
]


class TestSymbolicVsMetricBoundary:
    def test_exhaustive_inventory_is_exactly_the_known_list(self):
        found = []
        for p in (2, 3):
            for n in range(p, 9):
                necks = list(enumerate_necklaces(n))
                for a, b in combinations(necks, 2):
                    if p_close(a.word, b.word, p) and not p_neighborhood_check(a, b, p).matched:
                        found.append((p, n, str(a), str(b)))
        assert found == [(p, n, a, b) for p, n, a, b, _ in KNOWN_UNMATCHABLE]

    @pytest.mark.parametrize("p,n,a,b,bottleneck", KNOWN_UNMATCHABLE)
    def test_bottlenecks_are_exact(self, p, n, a, b, bottleneck):
        x, y = Word.from_string(a), Word.from_string(b)
        assert bottleneck_oracle(x, y) == bottleneck
        assert bottleneck > Fraction(1, 1 << p)
