"""Census engines: exhaustive scan vs closed-form counting, moments, shapes."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest

from orbit_census import (
    CapacityError,
    CensusRecord,
    CensusTable,
    ParameterError,
    StateError,
    best_census,
    best_cluster_size,
    brute_census,
    canonical_rotation,
    cyclic_pword_counts,
    empirical_distribution,
    enumerate_necklaces,
    enumerate_words,
    is_prime_orbit,
    max_cluster,
    mean_edge_visits,
    moments,
    prob_k,
    thresholded_edge_visits,
)


def census_oracle(n: int, p: int):
    """Independent word-level census: plain dict grouping over the words
    layer, no kernels, no counting formulas."""
    sizes = Counter()
    neck = Counter()
    prime = Counter()
    for w in enumerate_words(n):
        v = cyclic_pword_counts(w, p)
        sizes[v] += 1
        if canonical_rotation(w).word == w:
            neck[v] += 1
            if is_prime_orbit(w):
                prime[v] += 1
    return sizes, neck, prime


class TestEngineAgreement:
    @pytest.mark.parametrize("n,p", [(6, 2), (9, 2), (12, 2), (6, 3), (9, 3), (12, 3), (8, 4), (12, 4)])
    def test_both_engines_match_the_oracle(self, n, p):
        sizes, neck, prime = census_oracle(n, p)
        for table in (brute_census(n, p), best_census(n, p)):
            assert len(table.records) == len(sizes)
            for r in table.records:
                assert r.size_words == sizes[r.vector]
                assert r.size_necklaces == neck[r.vector]

    @pytest.mark.parametrize("n,p", [(12, 2), (12, 3), (10, 2)])
    def test_prime_only_matches_the_oracle(self, n, p):
        _, _, prime = census_oracle(n, p)
        for table in (brute_census(n, p, prime_only=True), best_census(n, p, prime_only=True)):
            for r in table.records:
                assert r.size_necklaces == prime[r.vector]

    def test_best_cluster_size_on_single_vectors(self):
        sizes, _, _ = census_oracle(6, 2)
        for v, count in sizes.items():
            assert best_cluster_size(v) == count


class TestPinnedCensus:
    def test_small_census_n3_p2(self):
        t = best_census(3, 2)
        assert len(t.records) == 4
        assert max_cluster(t).size_words == 3
        assert moments(t, 2) == 20
        assert [(str(r.vector), r.size_words, r.size_necklaces) for r in t.records] == [
            ("0:0:0:3", 1, 1),
            ("0:1:1:1", 3, 1),
            ("1:1:1:0", 3, 1),
            ("3:0:0:0", 1, 1),
        ]

    def test_n12_p3_summary(self):
        t = best_census(12, 3)
        assert len(t.records) == 98
        assert max_cluster(t).size_words == 144
        assert moments(t, 2) == 289764

    def test_totals(self):
        t = best_census(10, 2)
        assert t.total_words == 2**10
        assert t.total_necklaces == sum(1 for _ in enumerate_necklaces(10))
        assert moments(t, 1) == 2**10


class TestMoebiusNecklaces:
    """best_census fills exact necklace counts for composite n via Moebius
    inversion over sub-period vectors; the brute engine counts canonical
    rotations directly — equality is the real test."""

    @pytest.mark.parametrize("n", [4, 6, 8, 9, 10, 12, 14, 15, 16])
    def test_composite_lengths(self, n):
        for p in (2, 3):
            if p > n:
                continue
            b = brute_census(n, p)
            e = best_census(n, p)
            assert [(r.vector, r.size_necklaces) for r in b.records] == [
                (r.vector, r.size_necklaces) for r in e.records
            ]

    def test_necklace_total_equals_class_count(self):
        for n in (6, 12):
            t = best_census(n, 2)
            assert t.total_necklaces == sum(1 for _ in enumerate_necklaces(n))


class TestMaxCluster:
    def test_pinned_nonhomogeneous_maximizer_at_n8_p3(self):
        t = best_census(8, 3)
        m = max_cluster(t)
        assert m.vector.counts == (0, 1, 2, 1, 1, 2, 1, 0)
        assert m.size_words == 24
        hom = next(r for r in t.records if r.vector.counts == (1,) * 8)
        assert hom.size_words == 16

    def test_tie_break_is_deterministic(self):
        t = best_census(6, 2)
        assert max_cluster(t) == max_cluster(best_census(6, 2))

    def test_empty_table(self):
        empty = CensusTable(n=4, p=2, engine="best", prime_only=False, records=())
        with pytest.raises(StateError):
            max_cluster(empty)


class TestMoments:
    def test_word_level_first_moment_is_partition(self):
        for n, p in ((8, 2), (10, 3)):
            assert moments(best_census(n, p), 1) == 2**n

    def test_necklace_absence_raises(self):
        rec = CensusRecord(
            vector=best_census(4, 2).records[0].vector,
            size_words=1,
            size_necklaces=None,
        )
        table = CensusTable(n=4, p=2, engine="brute", prime_only=False, records=(rec,))
        with pytest.raises(StateError):
            moments(table, 2, level="necklace")

    def test_parameter_errors(self):
        t = best_census(6, 2)
        with pytest.raises(ParameterError):
            moments(t, 0)
        with pytest.raises(ParameterError):
            moments(t, 2, level="orbit")

    def test_prob_k_is_exact_fraction_ratio(self):
        t = best_census(7, 2)
        d = t.total_necklaces
        z2 = moments(t, 2, level="necklace")
        assert prob_k(t, 2) == float(Fraction(z2, d**2))


class TestDistributionAndAnisotropy:
    def test_empirical_distribution_shape(self):
        t = best_census(12, 3)
        pairs = empirical_distribution(t, bins=20)
        assert len(pairs) == 21
        ts = [x for x, _ in pairs]
        vals = [y for _, y in pairs]
        assert ts[0] == 0 and ts[-1] == 1
        assert vals[0] == 0 and vals[-1] == 1
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert all(isinstance(v, Fraction) for v in vals)

    def test_mean_edge_visits_first_moment_is_uniform(self):
        for n in (8, 11, 16):
            mv = mean_edge_visits(best_census(n, 3), 1)
            assert all(v == Fraction(n, 8) for v in mv)

    def test_thresholded_sums_to_n(self):
        t = best_census(12, 3)
        for j in range(11):
            vals = thresholded_edge_visits(t, Fraction(j, 10))
            assert sum(vals) == 12

    def test_threshold_one_is_global_mean(self):
        t = best_census(12, 3)
        assert thresholded_edge_visits(t, 1) == mean_edge_visits(t, 1)


class TestValidation:
    def test_p_range(self):
        with pytest.raises(ParameterError):
            brute_census(4, 5)
        with pytest.raises(ParameterError):
            best_census(1, 2)
        with pytest.raises(ParameterError):
            best_census(6, 1)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            brute_census(29, 2)
        with pytest.raises(CapacityError):
            brute_census(25, 2, prime_only=True)

    def test_engine_lanes_agree(self):
        a = brute_census(10, 3, backend="numba")
        b = brute_census(10, 3, backend="numpy")
        assert a.records == b.records
