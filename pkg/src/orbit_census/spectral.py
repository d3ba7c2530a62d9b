"""Matrix machinery on the de Bruijn graph: generating traces, exact discrete
Fourier inversion, saddle-point finite-difference validation, and a suite of
determinant / spectrum identities run as executable checks.

Conventions (0-based indices; dimension d = 2^m):

  Q[i, i>>1] = Q[i, d/2 + (i>>1)] = 1       (edge j can precede edge i)
  Q = Q0 + Q1 splits by the second index half;  Q = R S with R the d x d/2
  "tail" incidence and S the d/2 x d "head" incidence.

Attaching a phase to every edge, Λ(φ) = diag(e^{iφ_a}), the trace
Tr (QΛ(φ))^n is the generating function of cluster sizes:

    Tr (QΛ(φ))^n = Σ_𝐧 |C_𝐧| e^{i(𝐧,φ)},

a trigonometric polynomial of degree ≤ n in each phase, so every coefficient
is recovered exactly by a discrete Fourier sum on any grid with L ≥ n+1
points per axis.  Since balance determines the second-half counts, the same
information lives in the reduced matrix 𝒬(ψ) = Λ(ψ)Q0 + Q1 of dimension
2^(p-1) carrying one phase per first-half edge.

Trace powers are evaluated by iterated matrix multiplication (never by
eigendecomposition - the phase-dressed matrices are non-normal), with one
compensated summation for the trace.  Grid sweeps go through the dual-lane
kernels; grid reductions use numpy's pairwise-tree summation, deterministic
for a fixed shape.
"""

from __future__ import annotations

import math
from collections import Counter, OrderedDict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    CapacityError,
    NumericalError,
    ParameterError,
    ValidationFailure,
)
from .words import EdgeCountVector

__all__ = [
    "CheckResult",
    "SpectrumReport",
    "SaddleReport",
    "build_Q",
    "build_Q0_Q1",
    "build_R_S",
    "build_Qp",
    "build_F_G",
    "build_B",
    "build_M",
    "build_M_tilde",
    "generating_trace",
    "reduced_generating_trace",
    "fourier_cluster_size",
    "fourier_moment",
    "proposition1_check",
    "fg_det_check",
    "det_b_check",
    "spectrum_check",
    "block_matrix_check",
    "matrix_relations_check",
    "trace_reduction_check",
    "gauge_check",
    "jacobian_check",
    "saddle_check",
    "validation_suite",
]

_IDENTITY_TOL = 1e-10
_GRID_CAP = 1 << 24
_EXACT_FLOAT = float(1 << 53)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one numerical identity check."""

    check: str
    params: dict
    residual: float
    tolerance: float
    passed: bool

    def require(self) -> "CheckResult":
        if not self.passed:
            raise ValidationFailure(
                f"check {self.check} failed: residual {self.residual:.3e} "
                f"> tolerance {self.tolerance:.1e} at {self.params}"
            )
        return self


def _result(check: str, params: dict, residual: float, tol: float) -> CheckResult:
    return CheckResult(
        check=check,
        params=params,
        residual=float(residual),
        tolerance=float(tol),
        passed=bool(residual <= tol),
    )


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of a symmetric matrix against their predicted multiplicities."""

    dimension: int
    expected: tuple[tuple[float, int], ...]  # (eigenvalue, multiplicity)
    residual: float

    def multiplicity_total(self) -> int:
        return sum(m for _, m in self.expected)


# ------------------------------------------------------------- construction


def _q(m: int) -> np.ndarray:
    d = 1 << m
    h = d >> 1
    q = np.zeros((d, d))
    for i in range(d):
        q[i, i >> 1] = 1.0
        q[i, h + (i >> 1)] = 1.0
    return q


def _q0_q1(m: int) -> tuple[np.ndarray, np.ndarray]:
    d = 1 << m
    h = d >> 1
    q0 = np.zeros((d, d))
    q1 = np.zeros((d, d))
    for i in range(d):
        q0[i, i >> 1] = 1.0
        q1[i, h + (i >> 1)] = 1.0
    return q0, q1


def _check_p(p: int) -> None:
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")


def build_Q(p: int) -> np.ndarray:
    """The 0/1 edge-adjacency matrix of G_p (dimension 2^p); Tr Q^k = 2^k."""
    _check_p(p)
    return _q(p)


def build_Q0_Q1(p: int) -> tuple[np.ndarray, np.ndarray]:
    """The split Q = Q0 + Q1 by second-index half (dimension 2^p each)."""
    _check_p(p)
    return _q0_q1(p)


def build_R_S(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Q = R S with R (2^p x 2^(p-1)) and S (2^(p-1) x 2^p) 0/1 incidences."""
    _check_p(p)
    d = 1 << p
    h = d >> 1
    r = np.zeros((d, h))
    s = np.zeros((h, d))
    for i in range(d):
        r[i, i >> 1] = 1.0
    for k in range(h):
        s[k, k] = 1.0
        s[k, h + k] = 1.0
    return r, s


def build_Qp(p: int) -> np.ndarray:
    """(Q/2)^p: the rank-one uniform matrix with every entry 2^(-p)."""
    _check_p(p)
    return np.linalg.matrix_power(_q(p) / 2.0, p)


def build_F_G(p: int) -> tuple[np.ndarray, np.ndarray]:
    """F = 1 - Q1 + (Q/2)^p and G = 1 - Q0 + (Q/2)^p; det F = det G = 1."""
    _check_p(p)
    d = 1 << p
    q0, q1 = _q0_q1(p)
    qp = build_Qp(p)
    return np.eye(d) - q1 + qp, np.eye(d) - q0 + qp


def _bracket(m: int, p: int) -> np.ndarray:
    """Q̄ + Q̄ᵀ + 2·1 - (1+2p)(Q/2)^p at dimension 2^m, Q̄ = Q0 Σ_{k<p}(Q/2)^k."""
    d = 1 << m
    q = _q(m)
    q0, _ = _q0_q1(m)
    half = q / 2.0
    acc = np.zeros((d, d))
    pw = np.eye(d)
    for _ in range(p):
        acc += pw
        pw = pw @ half
    qbar = q0 @ acc
    qp = np.linalg.matrix_power(half, p)
    return qbar + qbar.T + 2.0 * np.eye(d) - (1.0 + 2.0 * p) * qp


def build_B(p: int) -> np.ndarray:
    """The symmetric saddle matrix on dimension 2^p,

        B = 1/2 (Q̄ + Q̄ᵀ + 2·1 - (1+2p)(Q/2)^p),  Q̄ = Q0 Σ_{k=0}^{p-1} (Q/2)^k,

    normalized so that det B = 2^(-2^p) exactly (the 1/2 prefactor is the
    one consistent with that determinant; see det_b_check)."""
    _check_p(p)
    return 0.5 * _bracket(p, p)


def _build_M_any(s: int) -> np.ndarray:
    d = 1 << s
    q = _q(s)
    half = q / 2.0
    m = np.eye(d) - (2.0 * s - 1.0) * np.linalg.matrix_power(half, s)
    pw = np.eye(d)
    for _ in range(1, s):
        pw = pw @ half
        m += pw + pw.T
    return m


def build_M(s: int) -> np.ndarray:
    """M_s = 1 + Σ_{r=1}^{s-1} [(Q/2)^r + (Qᵀ/2)^r] - (2s-1)(Q/2)^s on 2^s.

    Spectrum: 2^(s-1) zeros; eigenvalue k+1 with multiplicity 2^(s-k-2) for
    0 <= k <= s-2; eigenvalue s simple."""
    if s < 3:
        raise ParameterError(f"s must be >= 3, got {s}")
    return _build_M_any(s)


def build_M_tilde(p: int) -> np.ndarray:
    """M̃_p = 1 + M_p + 3(Q/2)^p on 2^p.  Spectrum: eigenvalue k+2 with
    multiplicity 2^(p-k-2) for 0 <= k <= p-2; p+1 and 4 each once more;
    2^(p-1)-1 ones."""
    _check_p(p)
    d = 1 << p
    return np.eye(d) + _build_M_any(p) + 3.0 * np.linalg.matrix_power(_q(p) / 2.0, p)


# ------------------------------------------------------------------- traces


def _iter_trace(a: np.ndarray, n: int) -> complex:
    """Tr a^n by n-1 multiplications, compensated trace summation."""
    b = a
    for _ in range(n - 1):
        b = b @ a
    diag = np.diagonal(b)
    return complex(math.fsum(diag.real), math.fsum(diag.imag))


def _phase_array(phases: Sequence[float]) -> np.ndarray:
    ph = np.asarray(phases, dtype=float).ravel()
    if len(ph) == 0 or len(ph) & (len(ph) - 1):
        raise ParameterError(f"phase vector length {len(ph)} is not a power of two")
    return ph


def generating_trace(phases: Sequence[float], n: int) -> complex:
    """Tr (QΛ(φ))^n with the full phase vector (length 2^p): the generating
    function Σ_𝐧 |C_𝐧| e^{i(𝐧,φ)}.  At φ = 0 equals 2^n."""
    ph = _phase_array(phases)
    p = len(ph).bit_length() - 1
    _check_p(p)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    a = _q(p) * np.exp(1j * ph)[None, :]
    return _iter_trace(a, n)


def reduced_generating_trace(phases: Sequence[float], n: int) -> complex:
    """Tr 𝒬(ψ)^n with 𝒬(ψ) = Λ(ψ)Q0 + Q1 on dimension 2^(p-1), one phase
    per first-half edge: Σ_𝐧 |C_𝐧| e^{i Σ_{a<2^(p-1)} n_a ψ_a}."""
    psi = _phase_array(phases)
    m = len(psi).bit_length() - 1  # = p - 1
    if m < 1:
        raise ParameterError("reduced phase vector needs length >= 2")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    q0, q1 = _q0_q1(m)
    a = q0 * np.exp(1j * psi)[:, None] + q1
    return _iter_trace(a, n)


# ------------------------------------------------------------ fourier grids

_GRID_CACHE: OrderedDict[tuple, np.ndarray] = OrderedDict()
_GRID_CACHE_MAX = 4


def _cached_grid(key: tuple, maker) -> np.ndarray:
    if key in _GRID_CACHE:
        _GRID_CACHE.move_to_end(key)
        return _GRID_CACHE[key]
    grid = maker()
    _GRID_CACHE[key] = grid
    if len(_GRID_CACHE) > _GRID_CACHE_MAX:
        _GRID_CACHE.popitem(last=False)
    return grid


def _full_grid(n: int, L: int, backend: str | None) -> np.ndarray:
    """Tr (QΛ(2π𝐦/L))^n on the full 4-axis grid, p=2, shape (L,L,L,L)."""
    lane = kernels._resolve(backend)
    q = np.ascontiguousarray(_q(2), dtype=np.complex128)
    zero = np.zeros((4, 4), dtype=np.complex128)

    def make() -> np.ndarray:
        flat = kernels.trace_grid(q, zero, n, L, phase_rows=False, backend=lane)
        return flat.reshape((L, L, L, L))

    return _cached_grid(("full", n, L, lane), make)


def _reduced_grid(n: int, p: int, L: int, backend: str | None) -> np.ndarray:
    """Tr 𝒬(2π𝐦/L)^n on the reduced 2^(p-1)-axis grid."""
    lane = kernels._resolve(backend)
    m = p - 1
    q0, q1 = _q0_q1(m)

    def make() -> np.ndarray:
        flat = kernels.trace_grid(
            np.ascontiguousarray(q0, dtype=np.complex128),
            np.ascontiguousarray(q1, dtype=np.complex128),
            n,
            L,
            phase_rows=True,
            backend=lane,
        )
        return flat.reshape((L,) * (1 << m))

    return _cached_grid(("reduced", n, p, L, lane), make)


def _round_integer(value: float, imag: float, what: str, tol: float = 1e-6) -> int:
    if abs(value) >= _EXACT_FLOAT:
        raise NumericalError(
            f"{what} = {value:.6e} exceeds the exactly-representable float "
            "range; use the exact census engines"
        )
    nearest = round(value)
    residual = max(abs(value - nearest), abs(imag))
    if residual > tol:
        raise NumericalError(
            f"{what} rounding residual {residual:.3e} exceeds {tol:.1e} "
            f"(value {value!r})"
        )
    return int(nearest)


def _moment_tol(value: float) -> float:
    """Integer-rounding guard for moment sums: absolute 1e-6 when small,
    relative 1e-12 when the magnitude makes that unreachable in float64,
    never so loose that "near an integer" loses meaning."""
    return min(0.01, max(1e-6, 1e-12 * abs(value)))


def _check_grid_size(L: int, axes: int) -> None:
    if L**axes > _GRID_CAP:
        raise CapacityError(
            f"phase grid {L}^{axes} exceeds the {_GRID_CAP} point capacity; "
            "reduce n or use the exact census engines"
        )


def fourier_cluster_size(
    v: EdgeCountVector, L: int | None = None, backend: str | None = None
) -> int:
    """|C_𝐧| by exact discrete inversion of the generating trace (p = 2):

        |C_𝐧| = L^(-4) Σ_{𝐦 in {0..L-1}^4} Tr(QΛ(2π𝐦/L))^n e^(-2πi(𝐧,𝐦)/L),

    exact for any L >= n+1 by the degree bound; the value is rounded from a
    float within 1e-6 of an integer.  Unbalanced vectors give 0."""
    if v.p != 2:
        raise CapacityError(
            f"full-grid inversion is tabulated for p=2 (grid is L^(2^p)), got p={v.p}"
        )
    n = v.n
    if n < 1:
        raise ParameterError("vector must have positive total count")
    if L is None:
        L = n + 1
    if L < n + 1:
        raise ParameterError(f"exact inversion needs L >= n+1 = {n + 1}, got L={L}")
    _check_grid_size(L, 4)
    grid = _full_grid(n, L, backend)
    waves = [np.exp(-2j * np.pi * c * np.arange(L) / L) for c in v.counts]
    val = np.einsum("abcd,a,b,c,d->", grid, *waves) / float(L) ** 4
    return _round_integer(val.real, val.imag, f"cluster size at {v}")


def fourier_moment(
    n: int, p: int, k: int, L: int | None = None, backend: str | None = None
) -> int:
    """Z_k = Σ_𝐧 |C_𝐧|^k by discrete convolution of the reduced-trace grid:
    k-1 free phase vectors with the k-th fixed to the negated sum (the
    discrete periodic delta).  Exact for L >= n+1; p <= 3.

    Evaluated through the coefficient array c = FFT(grid)/L^D (whose entries
    are the cluster sizes): Z_1 is the zero-phase trace, Z_2 follows from the
    power sum Σ|T|²/L^D, and k >= 3 sums c^k.  The result must round to an
    integer within 1e-6."""
    if p not in (2, 3):
        raise CapacityError(f"fourier moments are supported for p in {{2,3}}, got p={p}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if k < 1:
        raise ParameterError(f"moment order must be >= 1, got {k}")
    if L is None:
        L = n + 1
    if L < n + 1:
        raise ParameterError(f"exact convolution needs L >= n+1 = {n + 1}, got L={L}")
    axes = 1 << (p - 1)
    _check_grid_size(L, axes)
    grid = _reduced_grid(n, p, L, backend)
    total = float(L) ** axes
    if k == 1:
        val = grid.flat[0]
        return _round_integer(
            val.real, val.imag, f"Z_1(n={n},p={p})", _moment_tol(val.real)
        )
    if k == 2:
        val = float(np.sum(grid.real**2 + grid.imag**2)) / total
        return _round_integer(val, 0.0, f"Z_2(n={n},p={p})", _moment_tol(val))
    coeff = np.fft.fftn(grid) / total
    scale = float(np.max(np.abs(coeff.real)))
    imag = float(np.max(np.abs(coeff.imag)))
    if imag > max(1e-6, 1e-12 * scale):
        raise NumericalError(
            f"Z_{k}(n={n},p={p}) coefficient imaginary part {imag:.3e} "
            "exceeds tolerance; use the exact census engines"
        )
    val = float(np.sum(coeff.real**k))
    return _round_integer(val, 0.0, f"Z_{k}(n={n},p={p})", _moment_tol(val))


# ----------------------------------------------------------- identity checks


def proposition1_check(
    p: int, alphas: Sequence[float] = (-2.0, -0.5, 0.3, 1.0, 3.0)
) -> list[CheckResult]:
    """det(1 - α(Q0 - Q_p)) = det(1 - α(Q1 - Q_p)) = 1 and
    det(1 - α(Q - Q_p)) = 1 - α, for sampled real α."""
    _check_p(p)
    d = 1 << p
    q = _q(p)
    q0, q1 = _q0_q1(p)
    qp = build_Qp(p)
    eye = np.eye(d)
    out = []
    for a in alphas:
        r0 = abs(np.linalg.det(eye - a * (q0 - qp)) - 1.0)
        r1 = abs(np.linalg.det(eye - a * (q1 - qp)) - 1.0)
        rq = abs(np.linalg.det(eye - a * (q - qp)) - (1.0 - a))
        out.append(
            _result(
                "unit-determinant-family",
                {"p": p, "alpha": a},
                max(r0, r1, rq),
                _IDENTITY_TOL,
            )
        )
    return out


def fg_det_check(p: int) -> CheckResult:
    """det F = det G = 1."""
    f, g = build_F_G(p)
    residual = max(abs(np.linalg.det(f) - 1.0), abs(np.linalg.det(g) - 1.0))
    return _result("fg-unit-determinant", {"p": p}, residual, _IDENTITY_TOL)


def det_b_check(p: int) -> CheckResult:
    """det B = 2^(-2^p), relative residual."""
    sign, logdet = np.linalg.slogdet(build_B(p))
    if sign != 1.0:
        return _result("det-b", {"p": p}, float("inf"), _IDENTITY_TOL)
    residual = abs(math.expm1(logdet + (1 << p) * math.log(2.0)))
    return _result("det-b", {"p": p}, residual, _IDENTITY_TOL)


def _expected_m_spectrum(s: int) -> Counter:
    exp: Counter = Counter({0.0: 1 << (s - 1), float(s): 1})
    for k in range(s - 1):
        exp[float(k + 1)] += 1 << (s - k - 2)
    return exp


def _expected_m_tilde_spectrum(p: int) -> Counter:
    exp: Counter = Counter()
    exp[float(p + 1)] += 1
    exp[4.0] += 1  # collides with p+1 at p=3; the counter accumulates
    exp[1.0] += (1 << (p - 1)) - 1
    for k in range(p - 1):
        exp[float(k + 2)] += 1 << (p - k - 2)
    return exp


def _spectrum_residual(matrix: np.ndarray, expected: Counter) -> float:
    got = np.sort(np.linalg.eigvalsh(matrix))
    want = np.sort(
        np.array([v for v, mult in expected.items() for _ in range(mult)])
    )
    if len(got) != len(want):  # pragma: no cover - dimension bookkeeping
        raise AssertionError("multiplicities do not sum to the dimension")
    return float(np.max(np.abs(got - want)))


def spectrum_check(p: int) -> tuple[list[CheckResult], SpectrumReport, SpectrumReport]:
    """Spectra of M_{p+1} and M̃_p with exact multiplicities, plus the
    product identity  Π_{λ≠0} λ(M_{p+1}) = ¼ det M̃_p."""
    _check_p(p)
    m_big = build_M(p + 1)
    m_tilde = build_M_tilde(p)
    exp_big = _expected_m_spectrum(p + 1)
    exp_tilde = _expected_m_tilde_spectrum(p)
    res_big = _spectrum_residual(m_big, exp_big)
    res_tilde = _spectrum_residual(m_tilde, exp_tilde)
    ev = np.linalg.eigvalsh(m_big)
    nonzero = ev[np.abs(ev) > 1e-6]
    prod = float(np.prod(nonzero))
    quarter_det = float(np.linalg.det(m_tilde)) / 4.0
    res_prod = abs(prod / quarter_det - 1.0)
    checks = [
        _result("spectrum-M", {"p": p, "dimension": 1 << (p + 1)}, res_big, _IDENTITY_TOL),
        _result("spectrum-M-tilde", {"p": p, "dimension": 1 << p}, res_tilde, _IDENTITY_TOL),
        _result("nonzero-eigenvalue-product", {"p": p}, res_prod, _IDENTITY_TOL),
    ]
    rep_big = SpectrumReport(
        dimension=1 << (p + 1),
        expected=tuple(sorted(exp_big.items())),
        residual=res_big,
    )
    rep_tilde = SpectrumReport(
        dimension=1 << p,
        expected=tuple(sorted(exp_tilde.items())),
        residual=res_tilde,
    )
    return checks, rep_big, rep_tilde


def block_matrix_check(p: int) -> CheckResult:
    """M_{p+1} equals the 2x2 block assembly [[B, -BC], [-CᵀB, CᵀBC]] with
    C = G F^(-1) (entrywise)."""
    _check_p(p)
    b = build_B(p)
    f, g = build_F_G(p)
    c = g @ np.linalg.inv(f)
    assembled = np.block([[b, -b @ c], [-c.T @ b, c.T @ b @ c]])
    residual = float(np.max(np.abs(build_M(p + 1) - assembled)))
    return _result("block-assembly-M", {"p": p}, residual, _IDENTITY_TOL)


def matrix_relations_check(p: int) -> list[CheckResult]:
    """Entrywise relations: Q^k Q_p = 2^k Q_p, Q0^k Q_p = Q_p, Q_p^k = Q_p,
    Q0ᵀQ0 + Q1ᵀQ1 = 2·1, and (Q - Q_p)^k = Q^k - (2^k - 1) Q_p for k <= 2p."""
    _check_p(p)
    d = 1 << p
    q = _q(p)
    q0, q1 = _q0_q1(p)
    qp = build_Qp(p)
    out = []
    res = float(np.max(np.abs(q0.T @ q0 + q1.T @ q1 - 2.0 * np.eye(d))))
    out.append(_result("split-orthogonality", {"p": p}, res, _IDENTITY_TOL))
    r, s = build_R_S(p)
    out.append(
        _result("rs-factorization", {"p": p}, float(np.max(np.abs(q - r @ s))), 0.0)
    )
    qk = np.eye(d)
    q0k = np.eye(d)
    qpk = qp
    shifted = np.eye(d)
    worst_pow = 0.0
    worst_idem = 0.0
    for k in range(1, 2 * p + 1):
        qk = qk @ q
        q0k = q0k @ q0
        shifted = shifted @ (q - qp)
        worst_pow = max(
            worst_pow,
            float(np.max(np.abs(qk @ qp - (2.0**k) * qp))),
            float(np.max(np.abs(q0k @ qp - qp))),
            float(np.max(np.abs(shifted - (qk - (2.0**k - 1.0) * qp)))),
        )
        worst_idem = max(worst_idem, float(np.max(np.abs(qpk - qp))))
        qpk = qpk @ qp
    out.append(
        _result("uniform-power-relations", {"p": p, "k_max": 2 * p}, worst_pow, _IDENTITY_TOL)
    )
    out.append(_result("uniform-idempotence", {"p": p}, worst_idem, _IDENTITY_TOL))
    res_tr = max(abs(_iter_trace(q, k).real - 2.0**k) for k in range(1, 2 * p + 1))
    out.append(_result("trace-powers", {"p": p, "k_max": 2 * p}, res_tr, _IDENTITY_TOL))
    return out


def trace_reduction_check(
    n: int, p: int, trials: int = 200, seed: int = 0
) -> CheckResult:
    """|Tr(QΛ(φ))^n - Tr((SΛ(φ)R))^n| < 1e-9 · 2^n at random full phase
    points, plus agreement of the reduced-phase form 𝒬(ψ) with the full
    trace at φ = (ψ, 0)."""
    _check_p(p)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    r, s = build_R_S(p)
    h = 1 << (p - 1)
    worst = 0.0
    for _ in range(trials):
        phi = rng.uniform(0.0, 2.0 * np.pi, size=1 << p)
        full = generating_trace(phi, n)
        reduced = _iter_trace(s @ np.diag(np.exp(1j * phi)) @ r, n)
        worst = max(worst, abs(full - reduced))
        psi = phi[:h].copy()
        phi_half = np.concatenate([psi, np.zeros(h)])
        worst = max(
            worst,
            abs(generating_trace(phi_half, n) - reduced_generating_trace(psi, n)),
        )
    return _result(
        "trace-reduction",
        {"n": n, "p": p, "trials": trials},
        worst,
        1e-9 * 2.0**n,
    )


def gauge_check(n: int, p: int, trials: int = 50, seed: int = 1) -> CheckResult:
    """Vertex-potential gauge invariance of the generating trace: shifting
    φ_a -> φ_a + ξ_head(a) - ξ_tail(a) - ξ̄ with ξ̄ = 2^(-p) Σ_u ξ_u multiplies
    the trace by e^(-inξ̄) and leaves its modulus unchanged."""
    _check_p(p)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    h = 1 << (p - 1)
    edges = np.arange(1 << p)
    head = edges & (h - 1)
    tail = edges >> 1
    worst = 0.0
    for _ in range(trials):
        phi = rng.uniform(0.0, 2.0 * np.pi, size=1 << p)
        xi = rng.uniform(0.0, 2.0 * np.pi, size=h)
        xbar = float(xi.sum()) / float(1 << p)
        shifted = phi + xi[head] - xi[tail] - xbar
        t0 = generating_trace(phi, n)
        t1 = generating_trace(shifted, n)
        worst = max(worst, abs(t1 - np.exp(-1j * n * xbar) * t0))
    return _result(
        "gauge-invariance", {"n": n, "p": p, "trials": trials}, worst, 1e-9 * 2.0**n
    )


def jacobian_check(p: int) -> CheckResult:
    """The phase change of variables is volume preserving: the block
    transform [[1, G F^(-1)], [0, 1]] has determinant 1 (and F itself is
    invertible with unit determinant, so the change is well defined)."""
    _check_p(p)
    d = 1 << p
    f, g = build_F_G(p)
    j = np.block(
        [[np.eye(d), g @ np.linalg.inv(f)], [np.zeros((d, d)), np.eye(d)]]
    )
    residual = abs(np.linalg.det(j) - 1.0)
    return _result("jacobian-unit", {"p": p, "dimension": 2 * d}, residual, _IDENTITY_TOL)


# ------------------------------------------------------------------- saddle


@dataclass(frozen=True)
class SaddleReport:
    """Finite-difference validation of the stationary point of
    F_n(ψ) = log|Tr 𝒬(ψ)^n|² at ψ = 0."""

    n: int
    p: int
    grad_residual: float
    value_residual: float  # |F_n(0) - 2n log 2|
    hessian_scaled: tuple[tuple[float, ...], ...]  # -H_n / n
    det_value: float
    det_target: float  # 2^(-p 2^(p-1))
    limit_max_diff: float  # vs the closed-form limit matrix
    grad_tolerance: float = 1e-8

    def checks(self) -> list[CheckResult]:
        params = {"n": self.n, "p": self.p}
        det_res = abs(self.det_value / self.det_target - 1.0)
        return [
            _result("saddle-gradient", params, self.grad_residual, self.grad_tolerance),
            _result("saddle-value", params, self.value_residual, 1e-9),
            _result("saddle-hessian-determinant", params, det_res, 1e-4),
        ]


def hessian_limit(p: int) -> np.ndarray:
    """The n -> ∞ limit of -H_n/n for F_n(ψ) = log|Tr 𝒬(ψ)^n|²: the
    reduced-dimension (2^(p-1)) matrix 2^(-p)(Q̄ + Q̄ᵀ + 2·1 - (1+2p)(Q/2)^p)
    with all blocks built at dimension 2^(p-1).  Its determinant
    2^(-p·2^(p-1)) is exactly the value that makes the Gaussian integral
    around ψ = 0 reproduce Z_2 = 2^(2n)(2^(p-1)/πn)^(2^(p-2))."""
    _check_p(p)
    return 2.0**-p * _bracket(p - 1, p)


def saddle_check(
    n: int,
    p: int,
    grad_step: float = 1e-5,
    hess_step: float = 1e-3,
) -> SaddleReport:
    """Central finite differences of F_n(ψ) = log|Tr 𝒬(ψ)^n|² at ψ = 0:
    the gradient must vanish and -H_n/n approaches hessian_limit(p)."""
    _check_p(p)
    if p > 4:
        raise CapacityError(f"saddle validation supports p <= 4, got p={p}")
    if not 1 <= n <= 200:
        raise ParameterError(f"saddle validation supports 1 <= n <= 200, got n={n}")
    h = 1 << (p - 1)

    def f(psi: np.ndarray) -> float:
        return math.log(abs(reduced_generating_trace(psi, n)) ** 2)

    f0 = f(np.zeros(h))
    value_residual = abs(f0 - 2.0 * n * math.log(2.0))
    grad = 0.0
    for i in range(h):
        e = np.zeros(h)
        e[i] = grad_step
        grad = max(grad, abs(f(e) - f(-e)) / (2.0 * grad_step))
    hess = np.zeros((h, h))
    s = hess_step
    for i in range(h):
        for j in range(i, h):
            ei = np.zeros(h)
            ej = np.zeros(h)
            ei[i] = s
            ej[j] = s
            if i == j:
                v = (f(2.0 * ei) - 2.0 * f0 + f(-2.0 * ei)) / (4.0 * s * s)
            else:
                v = (
                    f(ei + ej) - f(ei - ej) - f(-ei + ej) + f(-ei - ej)
                ) / (4.0 * s * s)
            hess[i, j] = hess[j, i] = v
    scaled = -hess / n
    det_value = float(np.linalg.det(scaled))
    det_target = 2.0 ** (-p * (1 << (p - 1)))
    limit_max_diff = float(np.max(np.abs(scaled - hessian_limit(p))))
    return SaddleReport(
        n=n,
        p=p,
        grad_residual=float(grad),
        value_residual=float(value_residual),
        hessian_scaled=tuple(tuple(float(x) for x in row) for row in scaled),
        det_value=det_value,
        det_target=det_target,
        limit_max_diff=limit_max_diff,
    )


# ---------------------------------------------------------------- aggregate


def validation_suite(
    p: int, n_trace: int = 12, include_saddle: bool = True
) -> list[CheckResult]:
    """Every matrix-identity check at one p, as a flat list: determinant
    families, spectra, block assembly, relations, trace reduction, gauge
    invariance, Jacobian, and (p <= 4) the saddle finite-difference checks."""
    _check_p(p)
    out: list[CheckResult] = []
    out.extend(proposition1_check(p))
    out.append(fg_det_check(p))
    out.append(det_b_check(p))
    checks, _, _ = spectrum_check(p)
    out.extend(checks)
    out.append(block_matrix_check(p))
    out.extend(matrix_relations_check(p))
    out.append(trace_reduction_check(n_trace, p))
    out.append(gauge_check(n_trace, p))
    out.append(jacobian_check(p))
    if include_saddle and p <= 4:
        out.extend(saddle_check(20, p).checks())
    return out
