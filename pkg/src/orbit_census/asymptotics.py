"""Closed-form large-n asymptotics of cluster statistics, carried in log2
scale, plus comparison series against the exact censuses.

The saddle-point moment formula implemented here is

    Z_k = 2^(nk) * k^(-2^(p-2)) * (2^p / (pi n))^((k-1) 2^(p-2)),

whose k = 2 case reduces to Z_2 = 2^(2n) (2^(p-1)/(pi n))^(2^(p-2)).  The
largest cluster obeys |C_max| = Z_2(n/2)(1 + O(1/n)), i.e.
2^n (2^p/(pi n))^(2^(p-2)) at word level and 1/n of that per necklace.

The limiting density of sizes relative to the maximum is

    rho(t) = (-log t)^(2^(p-2)-1) / (2^(p-2)-1)!      on (0, 1],

with cumulative P(t) = t * sum_{j<2^(p-2)} (-log t)^j / j!.  The sign of the
logarithm is fixed by the moment identity int_0^1 rho(t) t^(k-1) dt =
k^(-2^(p-2)) (a density must be nonnegative); P(t) = t at p=2 and
P(t) = t(1 - log t) at p=3.

Everything enters and leaves as log2 values; exact big integers are compared
through their bit length plus a 53-bit mantissa correction, so nothing
overflows at n = 200.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.integrate import quad

from . import census as census_mod
from .errors import ParameterError

__all__ = [
    "AsymptoticEstimate",
    "RatioPoint",
    "exact_log2",
    "asymptotic_Zk",
    "asymptotic_Pk",
    "asymptotic_max_cluster",
    "rho",
    "P_theory",
    "rho_moment",
    "ratio_series",
]


def exact_log2(x: int) -> float:
    """log2 of a positive big integer, exact to double precision: shift the
    value into the 53-bit mantissa range, take log2, add the shift back."""
    if x <= 0:
        raise ParameterError(f"log2 needs a positive integer, got {x}")
    shift = x.bit_length() - 53
    if shift <= 0:
        return math.log2(x)
    return math.log2(x >> shift) + shift


@dataclass(frozen=True)
class AsymptoticEstimate:
    """A closed-form estimate carried as log2, with its term breakdown."""

    log2_value: float
    n: int
    p: int
    k: int | None
    terms: dict

    def value(self) -> float:
        try:
            return 2.0**self.log2_value
        except OverflowError:
            return math.inf


def _validate_npk(n: int, p: int, k: int) -> None:
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")


def asymptotic_Zk(n: int, p: int, k: int) -> AsymptoticEstimate:
    """log2 of Z_k = 2^(nk) k^(-2^(p-2)) (2^p/(pi n))^((k-1) 2^(p-2)).
    At k=1 this is exactly 2^n (both correction factors collapse to 1)."""
    _validate_npk(n, p, k)
    quarter = 1 << (p - 2)
    pow2 = float(n * k)
    power_law = -quarter * math.log2(k) + (k - 1) * quarter * (p - math.log2(math.pi * n))
    return AsymptoticEstimate(
        log2_value=pow2 + power_law,
        n=n,
        p=p,
        k=k,
        terms={"power_of_two": pow2, "power_law": power_law},
    )


def asymptotic_Pk(n: int, p: int, k: int) -> float:
    """log2 of the probability that k random necklaces are mutually p-close:
    P_k = k^(-2^(p-2)) (2^p/(pi n))^((k-1) 2^(p-2)), i.e. exactly
    asymptotic_Zk minus nk in log2 (the d = 2^n/n necklace-count algebra)."""
    return asymptotic_Zk(n, p, k).log2_value - float(n * k)


def asymptotic_max_cluster(n: int, p: int, level: str = "word") -> AsymptoticEstimate:
    """log2 of the largest-cluster asymptotics:
    word level 2^n (2^p/(pi n))^(2^(p-2)) - identically Z_2 evaluated at n/2 -
    and necklace level 1/n of that.  Sharpest when 2^p divides n (the
    maximizer is then the homogeneous vector n_a = n/2^p)."""
    if level not in ("word", "necklace"):
        raise ParameterError(f"level must be word|necklace, got {level!r}")
    _validate_npk(n, p, 1)
    quarter = 1 << (p - 2)
    power_law = quarter * (p - math.log2(math.pi * n))
    pow2 = float(n)
    log2v = pow2 + power_law
    terms = {"power_of_two": pow2, "power_law": power_law}
    if level == "necklace":
        log2v -= math.log2(n)
        terms["necklace_correction"] = -math.log2(n)
    return AsymptoticEstimate(log2_value=log2v, n=n, p=p, k=None, terms=terms)


def _quarter_index(p: int) -> int:
    if p < 2:
        raise ParameterError(f"p must be >= 2, got {p}")
    return 1 << (p - 2)


def rho(t: float, p: int) -> float:
    """Limiting density of relative cluster sizes t = |C|/|C_max| in (0, 1]:
    rho(t) = (-log t)^(2^(p-2)-1) / (2^(p-2)-1)!."""
    q = _quarter_index(p)
    if not 0.0 < t <= 1.0:
        raise ParameterError(f"t must lie in (0, 1], got {t}")
    j = q - 1
    return (-math.log(t)) ** j / math.factorial(j)


def P_theory(t: float, p: int) -> float:
    """Cumulative P(t) = int_0^t rho = t * sum_{j<2^(p-2)} (-log t)^j / j!;
    P(0) = 0 and P(1) = 1 for every p."""
    q = _quarter_index(p)
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return 0.0
    lg = -math.log(t)
    acc = 0.0
    term = 1.0
    for j in range(q):
        if j > 0:
            term *= lg / j
        acc += term
    return t * acc


def rho_moment(k: int, p: int) -> float:
    """int_0^1 rho(t) t^(k-1) dt by adaptive quadrature; must equal
    k^(-2^(p-2)) (the identity that fixes rho's sign)."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    _quarter_index(p)
    val, _ = quad(
        lambda t: rho(t, p) * t ** (k - 1), 0.0, 1.0,
        epsabs=1e-12, epsrel=1e-12, limit=200,
    )
    return val


@dataclass(frozen=True)
class RatioPoint:
    """One exact-vs-asymptotic comparison row."""

    kind: str  # "moment" or "max-cluster"
    n: int
    p: int
    k: int | None
    exact_log2: float
    asymptotic_log2: float

    @property
    def ratio(self) -> float:
        return 2.0 ** (self.exact_log2 - self.asymptotic_log2)


def ratio_series(
    n_from: int,
    n_to: int,
    step: int,
    p: int,
    k_list: Sequence[int],
    backend: str | None = None,
) -> list[RatioPoint]:
    """Exact/asymptotic ratio table over an n grid: word-level moments Z_k
    for each k, plus the largest-cluster row wherever 2^p divides n."""
    if step < 1:
        raise ParameterError(f"step must be >= 1, got {step}")
    if n_from < 1 or n_to < n_from:
        raise ParameterError(f"bad n range [{n_from}, {n_to}]")
    out: list[RatioPoint] = []
    for n in range(n_from, n_to + 1, step):
        table = census_mod.best_census(n, p, backend=backend)
        for k in k_list:
            exact = census_mod.moments(table, k, level="word")
            out.append(
                RatioPoint(
                    kind="moment",
                    n=n,
                    p=p,
                    k=k,
                    exact_log2=exact_log2(exact),
                    asymptotic_log2=asymptotic_Zk(n, p, k).log2_value,
                )
            )
        if n % (1 << p) == 0:
            cmax = census_mod.max_cluster(table).size_words
            out.append(
                RatioPoint(
                    kind="max-cluster",
                    n=n,
                    p=p,
                    k=None,
                    exact_log2=exact_log2(cmax),
                    asymptotic_log2=asymptotic_max_cluster(n, p, "word").log2_value,
                )
            )
    return out
