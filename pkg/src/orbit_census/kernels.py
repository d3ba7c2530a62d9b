"""Hot kernels, each with a numba @njit lane and a pure-numpy fallback lane.

Lane selection: the environment variable ORBIT_CENSUS_BACKEND may be set to
"numba", "numpy", or "auto" (default).  "auto" uses numba when it imports,
numpy otherwise.  Every public kernel also takes an explicit ``backend=``
override so the two lanes can be compared directly (see the CLI ``bench``
subcommand).  Both lanes produce identical outputs: integer kernels exactly,
floating kernels to rounding error.

Kernels:
  word_window_keys   - packed first-half p-window counts for a word range
  canonical_period   - minimal-rotation flag and cyclic period for a word range
  admissible_slab    - balanced nonnegative edge-count vectors with fixed
                       first free coordinate, lexicographic order
  trace_grid         - Tr A(phi)^n over a uniform phase grid, where
                       A(phi) = W0 * e^{i phi_k} + W1 with the phase attached
                       per row or per column
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import ParameterError

__all__ = [
    "HAS_NUMBA",
    "backend",
    "set_workers",
    "word_window_keys",
    "canonical_period",
    "admissible_slab",
    "trace_grid",
]

try:
    import numba
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(f):
            return f

        return wrap

    prange = range


_ENV_FLAG = "ORBIT_CENSUS_BACKEND"


def backend() -> str:
    """The active lane: 'numba' or 'numpy'."""
    choice = os.environ.get(_ENV_FLAG, "auto").lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ParameterError(
            f"{_ENV_FLAG} must be auto|numba|numpy, got {choice!r}"
        )
    if choice == "numba" and not HAS_NUMBA:
        raise ParameterError("numba backend requested but numba is not importable")
    if choice == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    return choice


def _resolve(override: str | None) -> str:
    if override is None:
        return backend()
    if override not in ("numba", "numpy"):
        raise ParameterError(f"backend must be numba|numpy, got {override!r}")
    if override == "numba" and not HAS_NUMBA:
        raise ParameterError("numba backend requested but numba is not importable")
    return override


def set_workers(workers: int) -> None:
    """Pin the parallel worker count (numba threading layer)."""
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    if HAS_NUMBA:
        numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))


# ----------------------------------------------------------------- word keys


@njit(cache=True, parallel=True)
def _word_keys_numba(n, p, start, stop, width):  # pragma: no cover - jit
    m = stop - start
    out = np.empty(m, np.int64)
    H = 1 << (p - 1)
    pmask = (1 << p) - 1
    for idx in prange(m):
        w = start + idx
        dd = (w << n) | w
        key = 0
        for j in range(n):
            win = (dd >> (2 * n - j - p)) & pmask
            if win < H:
                key += 1 << (width * win)
        out[idx] = key
    return out


def _word_keys_numpy(n, p, start, stop, width):
    w = np.arange(start, stop, dtype=np.int64)
    dd = (w << np.int64(n)) | w
    key = np.zeros(len(w), np.int64)
    H = 1 << (p - 1)
    pmask = np.int64((1 << p) - 1)
    for j in range(n):
        win = (dd >> np.int64(2 * n - j - p)) & pmask
        sel = win < H
        key[sel] += np.int64(1) << (np.int64(width) * win[sel])
    return key


def word_window_keys(
    n: int, p: int, start: int, stop: int, width: int, backend: str | None = None
) -> np.ndarray:
    """Packed counts of the first-half p-windows (values 0..2^(p-1)-1) for
    every word in [start, stop); count of window w sits at bits [w*width)."""
    if n < 1 or p < 1 or p > n:
        raise ParameterError(f"need 1 <= p <= n for window keys, got n={n} p={p}")
    if width * (1 << (p - 1)) > 63:
        raise ParameterError(f"key pack overflow: width={width} p={p}")
    if not 0 <= start <= stop <= 1 << n:
        raise ParameterError(f"bad word range [{start}, {stop}) for n={n}")
    if _resolve(backend) == "numba":
        return _word_keys_numba(n, p, start, stop, width)
    return _word_keys_numpy(n, p, start, stop, width)


# ------------------------------------------------------- canonical / period


@njit(cache=True, parallel=True)
def _canon_period_numba(n, start, stop):  # pragma: no cover - jit
    m = stop - start
    canon = np.zeros(m, np.uint8)
    period = np.zeros(m, np.int32)
    mask = (1 << n) - 1
    for idx in prange(m):
        w = start + idx
        dd = (w << n) | w
        is_min = True
        per = n
        for i in range(1, n):
            r = (dd >> (n - i)) & mask
            if r < w:
                is_min = False
                break
            if r == w and per == n:
                per = i
        if is_min:
            canon[idx] = 1
            period[idx] = per
    return canon, period


def _canon_period_numpy(n, start, stop):
    w = np.arange(start, stop, dtype=np.int64)
    dd = (w << np.int64(n)) | w
    mask = np.int64((1 << n) - 1)
    canon = np.ones(len(w), bool)
    period = np.full(len(w), n, np.int32)
    for i in range(1, n):
        r = (dd >> np.int64(n - i)) & mask
        canon &= r >= w
        first = (r == w) & (period == n)
        period[first] = i
    period = np.where(canon, period, 0).astype(np.int32)
    return canon.astype(np.uint8), period


def canonical_period(
    n: int, start: int, stop: int, backend: str | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """For each word in [start, stop): flag = 1 iff the word is the minimal
    rotation of its class; for flagged words, the cyclic period (a divisor
    of n).  Period entries of non-flagged words are unspecified."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0 <= start <= stop <= 1 << n:
        raise ParameterError(f"bad word range [{start}, {stop}) for n={n}")
    if _resolve(backend) == "numba":
        return _canon_period_numba(n, start, stop)
    return _canon_period_numpy(n, start, stop)


# ------------------------------------------------------------ admissible slab


@njit(cache=True)
def _slab_h2(n, f0, U, v, out):  # pragma: no cover - jit
    cnt = 0
    G = U.shape[0]
    for f1 in range(n - f0 + 1):
        row = out[cnt]
        row[0] = f0
        row[1] = f1
        ok = True
        for g in range(G):
            s = v[g] * n + U[g, 0] * f0 + U[g, 1] * f1
            if s < 0:
                ok = False
                break
            row[2 + g] = s
        if ok:
            cnt += 1
    return cnt


@njit(cache=True)
def _slab_h4(n, f0, U, v, out):  # pragma: no cover - jit
    cnt = 0
    G = U.shape[0]
    r0 = n - f0
    for f1 in range(r0 + 1):
        r1 = r0 - f1
        for f2 in range(r1 + 1):
            r2 = r1 - f2
            for f3 in range(r2 + 1):
                row = out[cnt]
                row[0] = f0
                row[1] = f1
                row[2] = f2
                row[3] = f3
                ok = True
                for g in range(G):
                    s = v[g] * n + U[g, 0] * f0 + U[g, 1] * f1 + U[g, 2] * f2 + U[g, 3] * f3
                    if s < 0:
                        ok = False
                        break
                    row[4 + g] = s
                if ok:
                    cnt += 1
    return cnt


@njit(cache=True)
def _slab_h8(n, f0, U, v, out):  # pragma: no cover - jit
    cnt = 0
    G = U.shape[0]
    r0 = n - f0
    for f1 in range(r0 + 1):
        r1 = r0 - f1
        for f2 in range(r1 + 1):
            r2 = r1 - f2
            for f3 in range(r2 + 1):
                r3 = r2 - f3
                for f4 in range(r3 + 1):
                    r4 = r3 - f4
                    for f5 in range(r4 + 1):
                        r5 = r4 - f5
                        for f6 in range(r5 + 1):
                            r6 = r5 - f6
                            for f7 in range(r6 + 1):
                                row = out[cnt]
                                row[0] = f0
                                row[1] = f1
                                row[2] = f2
                                row[3] = f3
                                row[4] = f4
                                row[5] = f5
                                row[6] = f6
                                row[7] = f7
                                ok = True
                                for g in range(G):
                                    s = v[g] * n
                                    for j in range(8):
                                        s += U[g, j] * row[j]
                                    if s < 0:
                                        ok = False
                                        break
                                    row[8 + g] = s
                                if ok:
                                    cnt += 1
    return cnt


def _slab_numba(n, f0, U, v):
    H = U.shape[1]
    P = 2 * H
    cap = math.comb(n - f0 + H - 1, H - 1)
    out = np.empty((cap, P), np.int64)
    if H == 2:
        cnt = _slab_h2(n, f0, U, v, out)
    elif H == 4:
        cnt = _slab_h4(n, f0, U, v, out)
    elif H == 8:
        cnt = _slab_h8(n, f0, U, v, out)
    else:  # pragma: no cover - capacity guard upstream
        raise ParameterError(f"unsupported free-coordinate count {H}")
    return out[:cnt].copy()


def _slab_prefixes(depth: int, budget: int):
    """All tuples of `depth` nonnegative ints with sum <= budget, lex order."""
    if depth == 0:
        yield (), budget
        return
    for f in range(budget + 1):
        for rest, rem in _slab_prefixes(depth - 1, budget - f):
            yield (f,) + rest, rem


def _slab_numpy(n, f0, U, v):
    H = U.shape[1]
    P = 2 * H
    rem = n - f0
    blocks = []
    if H == 2:
        f1 = np.arange(rem + 1, dtype=np.int64)
        free = np.column_stack([np.full(rem + 1, f0, np.int64), f1])
        blocks.append(free)
    else:
        # iterate all but the last two free coordinates, vectorize those two
        for prefix, r in _slab_prefixes(H - 3, rem):
            ia, ib = np.indices((r + 1, r + 1))
            sel = (ia + ib).ravel() <= r
            fa = ia.ravel()[sel].astype(np.int64)
            fb = ib.ravel()[sel].astype(np.int64)
            m = len(fa)
            cols = [np.full(m, f0, np.int64)]
            cols += [np.full(m, f, np.int64) for f in prefix]
            cols += [fa, fb]
            blocks.append(np.column_stack(cols))
    rows_out = []
    for free in blocks:
        bound = free @ U.T.astype(np.int64) + np.int64(n) * v[None, :]
        good = (bound >= 0).all(axis=1)
        if good.any():
            rows_out.append(np.concatenate([free[good], bound[good]], axis=1))
    if not rows_out:
        return np.empty((0, P), np.int64)
    return np.concatenate(rows_out, axis=0)


def admissible_slab(
    n: int,
    p: int,
    f0: int,
    U: np.ndarray,
    v: np.ndarray,
    backend: str | None = None,
) -> np.ndarray:
    """Balanced nonnegative vectors with first free coordinate f0, as int64
    rows [free | bound], lexicographic in the remaining free coordinates.
    Support connectivity is NOT filtered here."""
    if not 0 <= f0 <= n:
        raise ParameterError(f"f0 must lie in [0, n], got {f0}")
    if _resolve(backend) == "numba":
        return _slab_numba(n, f0, U, v)
    return _slab_numpy(n, f0, U, v)


# ---------------------------------------------------------------- trace grid


@njit(cache=True, parallel=True)
def _trace_grid_numba(W0, W1, n, L, phase_rows, start, stop):  # pragma: no cover - jit
    d = W0.shape[0]
    out = np.empty(stop - start, np.complex128)
    # All per-iteration matrices are preallocated and written in place: the
    # parallel analyzer miscompiles rebinding of freshly allocated arrays
    # inside nested while/if blocks of a prange body.
    for t in prange(stop - start):
        ph = np.empty(d, np.float64)
        idx = start + t
        for ax in range(d - 1, -1, -1):
            ph[ax] = (2.0 * np.pi * (idx % L)) / L
            idx //= L
        base = np.empty((d, d), np.complex128)
        for i in range(d):
            for j in range(d):
                k = i if phase_rows else j
                base[i, j] = W0[i, j] * complex(np.cos(ph[k]), np.sin(ph[k])) + W1[i, j]
        # B = base^n by binary exponentiation, explicit small matmuls
        B = np.zeros((d, d), np.complex128)
        for i in range(d):
            B[i, i] = 1.0
        tmp = np.empty((d, d), np.complex128)
        e = n
        while e > 0:
            if e & 1:
                for i in range(d):
                    for j in range(d):
                        acc = complex(0.0, 0.0)
                        for k2 in range(d):
                            acc += B[i, k2] * base[k2, j]
                        tmp[i, j] = acc
                for i in range(d):
                    for j in range(d):
                        B[i, j] = tmp[i, j]
            e >>= 1
            if e > 0:
                for i in range(d):
                    for j in range(d):
                        acc = complex(0.0, 0.0)
                        for k2 in range(d):
                            acc += base[i, k2] * base[k2, j]
                        tmp[i, j] = acc
                for i in range(d):
                    for j in range(d):
                        base[i, j] = tmp[i, j]
        # compensated (Kahan) trace on real and imaginary parts
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for i in range(d):
            yr = B[i, i].real - cr
            tr = sr + yr
            cr = (tr - sr) - yr
            sr = tr
            yi = B[i, i].imag - ci
            ti = si + yi
            ci = (ti - si) - yi
            si = ti
        out[t] = complex(sr, si)
    return out


def _batch_power(A: np.ndarray, n: int) -> np.ndarray:
    result = None
    base = A
    e = n
    while e > 0:
        if e & 1:
            result = base.copy() if result is None else result @ base
        e >>= 1
        if e > 0:
            base = base @ base
    return result


def _trace_grid_numpy(W0, W1, n, L, phase_rows, start, stop, chunk=1 << 15):
    d = W0.shape[0]
    phases = np.exp(2j * np.pi * np.arange(L) / L)
    out = np.empty(stop - start, np.complex128)
    for s in range(start, stop, chunk):
        e = min(s + chunk, stop)
        idx = np.arange(s, e, dtype=np.int64)
        ph = np.empty((e - s, d), np.complex128)
        for ax in range(d - 1, -1, -1):
            ph[:, ax] = phases[idx % L]
            idx = idx // L
        if phase_rows:
            A = W0[None, :, :] * ph[:, :, None] + W1[None, :, :]
        else:
            A = W0[None, :, :] * ph[:, None, :] + W1[None, :, :]
        B = _batch_power(A, n)
        out[s - start : e - start] = np.trace(B, axis1=1, axis2=2)
    return out


def trace_grid(
    W0: np.ndarray,
    W1: np.ndarray,
    n: int,
    L: int,
    phase_rows: bool,
    start: int | None = None,
    stop: int | None = None,
    backend: str | None = None,
) -> np.ndarray:
    """Tr A(m)^n for m on the uniform grid {0..L-1}^d (flat C order, axis 0
    most significant), A(m)_{ij} = W0_{ij} e^{2 pi i m_g / L} + W1_{ij} with
    g = i (phase_rows) or g = j (columns).  Returns the flat slice
    [start, stop) of the L^d values."""
    d = W0.shape[0]
    if W0.shape != (d, d) or W1.shape != (d, d):
        raise ParameterError("W0 and W1 must be square matrices of equal size")
    if n < 1 or L < 1:
        raise ParameterError(f"need n >= 1 and L >= 1, got n={n} L={L}")
    total = L**d
    start = 0 if start is None else start
    stop = total if stop is None else stop
    if not 0 <= start <= stop <= total:
        raise ParameterError(f"bad grid slice [{start}, {stop}) of {total}")
    W0c = np.ascontiguousarray(W0, dtype=np.complex128)
    W1c = np.ascontiguousarray(W1, dtype=np.complex128)
    if _resolve(backend) == "numba":
        return _trace_grid_numba(W0c, W1c, n, L, phase_rows, start, stop)
    return _trace_grid_numpy(W0c, W1c, n, L, phase_rows, start, stop)
