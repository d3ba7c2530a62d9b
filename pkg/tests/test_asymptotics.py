"""Asymptotic formulas: log2 bookkeeping, densities, moment identities."""

from __future__ import annotations

import math

import pytest

from orbit_census import (
    P_theory,
    ParameterError,
    asymptotic_Pk,
    asymptotic_Zk,
    asymptotic_max_cluster,
    best_census,
    exact_log2,
    max_cluster,
    moments,
    ratio_series,
    rho,
    rho_moment,
)


class TestExactLog2:
    def test_small_matches_math(self):
        for x in (1, 2, 3, 10, 255, 1 << 52):
            assert exact_log2(x) == math.log2(x)

    def test_powers_of_two_are_exact(self):
        assert exact_log2(2**200) == 200.0
        assert exact_log2(2**1000) == 1000.0

    def test_big_integer_accuracy(self):
        # 3^500 has ~792 bits; compare against 500*log2(3)
        assert abs(exact_log2(3**500) - 500 * math.log2(3)) < 1e-9

    def test_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            exact_log2(0)
        with pytest.raises(ParameterError):
            exact_log2(-5)


class TestClosedForms:
    def test_k1_is_exactly_all_words(self):
        for n, p in ((10, 2), (50, 3), (70, 4)):
            assert asymptotic_Zk(n, p, 1).log2_value == float(n)

    def test_formula_spot_values(self):
        # independent re-derivation: 2^(nk) k^(-2^(p-2)) (2^p/(pi n))^((k-1)2^(p-2))
        for n, p, k in ((30, 3, 2), (70, 3, 5), (40, 2, 3)):
            q = 2 ** (p - 2)
            expect = n * k - q * math.log2(k) + (k - 1) * q * (
                p - math.log2(math.pi * n)
            )
            assert abs(asymptotic_Zk(n, p, k).log2_value - expect) < 1e-12

    def test_probability_is_moment_minus_nk(self):
        assert asymptotic_Pk(50, 3, 3) == pytest.approx(
            asymptotic_Zk(50, 3, 3).log2_value - 150.0, abs=1e-12
        )

    def test_max_cluster_levels(self):
        w = asymptotic_max_cluster(64, 3, "word")
        nk = asymptotic_max_cluster(64, 3, "necklace")
        assert w.log2_value == pytest.approx(64 + 2 * (3 - math.log2(64 * math.pi)), abs=1e-12)
        assert nk.log2_value == pytest.approx(w.log2_value - 6.0, abs=1e-12)
        with pytest.raises(ParameterError):
            asymptotic_max_cluster(64, 3, "orbit")


class TestDensity:
    def test_rho_p2_is_uniform(self):
        for t in (0.1, 0.5, 1.0):
            assert rho(t, 2) == 1.0

    def test_p_theory_pinned_forms(self):
        for t in (0.05, 0.3, 0.9, 1.0):
            assert P_theory(t, 2) == pytest.approx(t, abs=1e-15)
            assert P_theory(t, 3) == pytest.approx(t * (1 - math.log(t)), abs=1e-12)
        assert P_theory(0.0, 4) == 0.0
        assert P_theory(1.0, 4) == 1.0

    def test_p_theory_is_monotone_cdf(self):
        for p in (2, 3, 4):
            grid = [j / 200 for j in range(201)]
            vals = [P_theory(t, p) for t in grid]
            assert vals[0] == 0.0 and vals[-1] == 1.0
            assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_rho_integrates_p_theory(self):
        # P'(t) = rho(t): check by a central difference at interior points
        for p in (3, 4):
            for t in (0.2, 0.5, 0.8):
                h = 1e-6
                deriv = (P_theory(t + h, p) - P_theory(t - h, p)) / (2 * h)
                assert deriv == pytest.approx(rho(t, p), rel=1e-5)

    def test_domain_validation(self):
        with pytest.raises(ParameterError):
            rho(0.0, 3)
        with pytest.raises(ParameterError):
            P_theory(1.5, 3)

    @pytest.mark.parametrize("p", [2, 3, 4])
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_moment_identity(self, p, k):
        assert abs(rho_moment(k, p) - k ** -(2 ** (p - 2))) < 1e-8


class TestRatioSeries:
    def test_structure_and_values(self):
        pts = ratio_series(8, 16, 4, 3, [2, 3])
        # moment rows for every grid n, max-cluster rows only at multiples of 8
        assert [(q.kind, q.n, q.k) for q in pts] == [
            ("moment", 8, 2), ("moment", 8, 3), ("max-cluster", 8, None),
            ("moment", 12, 2), ("moment", 12, 3),
            ("moment", 16, 2), ("moment", 16, 3), ("max-cluster", 16, None),
        ]
        t12 = best_census(12, 3)
        row = next(q for q in pts if q.n == 12 and q.k == 2)
        assert row.exact_log2 == pytest.approx(exact_log2(moments(t12, 2)), abs=1e-12)
        assert row.asymptotic_log2 == pytest.approx(
            asymptotic_Zk(12, 3, 2).log2_value, abs=1e-12
        )
        mc = next(q for q in pts if q.kind == "max-cluster" and q.n == 16)
        assert mc.exact_log2 == pytest.approx(
            exact_log2(max_cluster(best_census(16, 3)).size_words), abs=1e-12
        )
        assert mc.ratio == pytest.approx(2.0 ** (mc.exact_log2 - mc.asymptotic_log2))

    def test_range_validation(self):
        with pytest.raises(ParameterError):
            ratio_series(10, 5, 1, 3, [2])
        with pytest.raises(ParameterError):
            ratio_series(5, 10, 0, 3, [2])
