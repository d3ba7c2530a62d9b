"""Dual-lane kernels: numba and numpy must produce the same answers."""

from __future__ import annotations

import numpy as np
import pytest

from orbit_census import (
    HAS_NUMBA,
    ParameterError,
    Word,
    backend,
    cyclic_pword_counts,
    set_workers,
)
from orbit_census.graph import flow_basis
from orbit_census.kernels import (
    admissible_slab,
    canonical_period,
    trace_grid,
    word_window_keys,
)
from orbit_census.spectral import build_Q0_Q1

LANES = ["numpy"] + (["numba"] if HAS_NUMBA else [])


def minimal_period_oracle(w: Word) -> int:
    for r in range(1, w.n + 1):
        if w.n % r == 0 and w.rotate(r) == w:
            return r
    raise AssertionError("unreachable")


class TestBackendSelection:
    def test_env_flag(self, monkeypatch):
        monkeypatch.setenv("ORBIT_CENSUS_BACKEND", "numpy")
        assert backend() == "numpy"
        monkeypatch.setenv("ORBIT_CENSUS_BACKEND", "auto")
        assert backend() in ("numba", "numpy")
        monkeypatch.setenv("ORBIT_CENSUS_BACKEND", "fortran")
        with pytest.raises(ParameterError):
            backend()

    def test_explicit_override_validation(self):
        with pytest.raises(ParameterError):
            word_window_keys(4, 2, 0, 16, 3, backend="fortran")

    def test_set_workers_validation(self):
        with pytest.raises(ParameterError):
            set_workers(0)
        set_workers(1)  # must be accepted


class TestWordWindowKeys:
    @pytest.mark.parametrize("lane", LANES)
    @pytest.mark.parametrize("n,p", [(4, 2), (8, 2), (8, 3), (10, 3), (9, 4)])
    def test_keys_encode_first_half_counts(self, lane, n, p):
        width = max(1, n.bit_length())
        keys = word_window_keys(n, p, 0, 1 << n, width, backend=lane)
        h = 1 << (p - 1)
        mask = (1 << width) - 1
        for bits in range(1 << n):
            got = tuple((int(keys[bits]) >> (width * a)) & mask for a in range(h))
            assert got == cyclic_pword_counts(Word(n, bits), p).counts[:h]

    def test_lane_equality(self):
        for n, p in ((12, 2), (12, 3), (12, 4)):
            width = max(1, n.bit_length())
            a = word_window_keys(n, p, 0, 1 << n, width, backend="numba")
            b = word_window_keys(n, p, 0, 1 << n, width, backend="numpy")
            assert np.array_equal(a, b)

    def test_validation(self):
        with pytest.raises(ParameterError):
            word_window_keys(4, 5, 0, 16, 3)  # p > n
        with pytest.raises(ParameterError):
            word_window_keys(4, 2, 8, 4, 3)  # reversed range
        with pytest.raises(ParameterError):
            word_window_keys(30, 6, 0, 4, 5)  # 5 bits x 32 windows > one int64


class TestCanonicalPeriod:
    @pytest.mark.parametrize("lane", LANES)
    @pytest.mark.parametrize("n", [1, 2, 6, 10])
    def test_matches_rotation_oracle(self, lane, n):
        canon, period = canonical_period(n, 0, 1 << n, backend=lane)
        for bits in range(1 << n):
            w = Word(n, bits)
            is_min = all(r.bits >= bits for r in w.rotations())
            assert bool(canon[bits]) == is_min
            if is_min:  # period is only specified for canonical words
                assert int(period[bits]) == minimal_period_oracle(w)

    def test_lane_equality(self):
        a = canonical_period(14, 0, 1 << 14, backend="numba")
        b = canonical_period(14, 0, 1 << 14, backend="numpy")
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


class TestAdmissibleSlab:
    @pytest.mark.parametrize("lane", LANES)
    @pytest.mark.parametrize("n,p", [(6, 2), (9, 2), (6, 3), (9, 3), (8, 4)])
    def test_matches_direct_completion(self, lane, n, p):
        """Oracle: iterate every free tuple, keep nonnegative completions."""
        from itertools import product

        basis = flow_basis(p)
        U, v = basis.as_arrays()
        h = basis.n_free
        for f0 in range(n + 1):
            rows = admissible_slab(n, p, f0, U, v, backend=lane)
            expect = []
            for rest in product(range(n - f0 + 1), repeat=h - 1):
                free = (f0,) + rest
                if sum(free) > n:
                    continue
                bound = tuple(
                    sum(u * f for u, f in zip(row, free)) + vv * n
                    for row, vv in zip(basis.U, basis.v)
                )
                if all(b >= 0 for b in bound):
                    expect.append(free + bound)
            got = [tuple(int(x) for x in r) for r in rows]
            assert got == sorted(expect)

    def test_lane_equality(self):
        basis = flow_basis(4)
        U, v = basis.as_arrays()
        for f0 in (0, 2, 5):
            a = admissible_slab(12, 4, f0, U, v, backend="numba")
            b = admissible_slab(12, 4, f0, U, v, backend="numpy")
            assert np.array_equal(a, b)

    def test_f0_validation(self):
        basis = flow_basis(2)
        U, v = basis.as_arrays()
        with pytest.raises(ParameterError):
            admissible_slab(6, 2, 7, U, v)


class TestTraceGrid:
    @pytest.mark.parametrize("lane", LANES)
    def test_single_point_matches_matrix_power(self, lane):
        q0, q1 = build_Q0_Q1(3)
        d = q0.shape[0]
        L, n = 3, 7
        vals = trace_grid(q0, q1, n, L, phase_rows=False, backend=lane)
        # check a handful of grid points against a direct dense evaluation
        for flat in (0, 1, 17, 80, L**d - 1):
            idx, ph = flat, np.empty(d)
            for ax in range(d - 1, -1, -1):
                ph[ax] = 2 * np.pi * (idx % L) / L
                idx //= L
            A = q0 * np.exp(1j * ph)[None, :] + q1
            want = np.trace(np.linalg.matrix_power(A, n))
            assert abs(vals[flat] - want) < 1e-9 * 2.0**n

    def test_phase_rows_convention(self):
        """One phase axis per matrix dimension; rows carry the phases."""
        rng = np.random.default_rng(7)
        w0 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        w1 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        vals = trace_grid(w0, w1, 5, 2, phase_rows=True)
        ph = np.array([0.0, np.pi])  # flat index 1 -> (m_0, m_1) = (0, 1)
        A = w0 * np.exp(1j * ph)[:, None] + w1
        want = np.trace(np.linalg.matrix_power(A, 5))
        assert abs(vals[1] - want) < 1e-9

    @pytest.mark.parametrize("n", [1, 2, 3, 12, 29, 50])
    def test_lane_equality_across_exponents(self, n):
        """Regression for the parallel-lane rewrite: results were silently
        all-zero for n >= 3 before the in-place buffer fix."""
        q0, q1 = build_Q0_Q1(2)
        a = trace_grid(q0, q1, n, 5, phase_rows=False, backend="numba")
        b = trace_grid(q0, q1, n, 5, phase_rows=False, backend="numpy")
        assert np.max(np.abs(a)) > 0.5  # never degenerate
        assert np.allclose(a, b, rtol=1e-12, atol=1e-9 * 2.0**n)

    def test_slices_concatenate(self):
        q0, q1 = build_Q0_Q1(2)
        whole = trace_grid(q0, q1, 6, 3, phase_rows=False)
        parts = np.concatenate([
            trace_grid(q0, q1, 6, 3, phase_rows=False, start=0, stop=40),
            trace_grid(q0, q1, 6, 3, phase_rows=False, start=40, stop=81),
        ])
        assert np.array_equal(whole, parts)

    def test_validation(self):
        q0, q1 = build_Q0_Q1(2)
        with pytest.raises(ParameterError):
            trace_grid(q0, q1[:2], 4, 3, phase_rows=False)
        with pytest.raises(ParameterError):
            trace_grid(q0, q1, 0, 3, phase_rows=False)
        with pytest.raises(ParameterError):
            trace_grid(q0, q1, 4, 3, phase_rows=False, start=5, stop=2)
