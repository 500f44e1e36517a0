"""Closed-form tail bounds, the deviation asymptotic, and exact binomial tails.

Bound values that certify a measure are floats rounded toward +inf: after
evaluating a formula the result is inflated by a small relative slack, so
accumulated IEEE rounding can never make a reported bound dip below the
real number it certifies.  Exact quantities (binomial tails) are returned
as ``fractions.Fraction`` and never rounded.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "TailBound",
    "CoverSchedule",
    "hoeffding_fair",
    "hoeffding_general",
    "slln_tail_bound",
    "cover_schedule",
    "reduced_sum",
    "deviation_asymptotic",
    "exact_binomial_tail",
    "maximal_tail_bound",
]

# Relative inflation applied when upper-rounding certified values.  The
# geometric-series bound gets a larger slack: it majorizes arbitrary float
# partial sums of the per-n Hoeffding terms, whose true gap to the series
# total can sit far below one float ulp.
_SLACK = 2.0**-40
_SERIES_SLACK = 2.0**-30


def _round_up(value: float, slack: float = _SLACK) -> float:
    return math.nextafter(value * (1.0 + slack), math.inf)


def _as_number(x) -> float:
    if isinstance(x, float):
        return x
    return float(Fraction(x))


@dataclass(frozen=True)
class TailBound:
    """An upper-rounded certified value together with its provenance."""

    value: float
    formula_id: str
    parameters: dict = field(default_factory=dict)

    def describe(self) -> str:
        params = " ".join(f"{k}={v!r}" for k, v in self.parameters.items())
        return f"{self.formula_id} value={self.value!r} {params}".rstrip()


@dataclass(frozen=True)
class CoverSchedule:
    """Indices N_k making the truncation budgets fall below 2**-k."""

    m: int
    entries: tuple[tuple[int, int], ...]

    def level(self, k: int) -> int:
        for kk, n in self.entries:
            if kk == k:
                return n
        raise KeyError(f"schedule has no entry for k={k}")


def hoeffding_fair(n: int, eps) -> TailBound:
    """Fair-coin Hoeffding bound 2*exp(-2*n*eps**2) on the deviation tail.

    Dominates mu(|S_n/n - 1/2| > eps) for every n >= 1 and eps > 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    e = _as_number(eps)
    if e <= 0:
        raise ValueError("eps must be positive")
    value = _round_up(2.0 * math.exp(-2.0 * n * e * e))
    return TailBound(value, "hoeffding-fair", {"n": n, "eps": e})


def hoeffding_general(n: int, eps, width) -> TailBound:
    """Hoeffding bound 2*exp(-2*n*eps**2/width**2) for [a,b]-valued summands.

    ``width`` is b - a; width 1 reproduces hoeffding_fair exactly (same
    float path).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    e = _as_number(eps)
    w = _as_number(width)
    if e <= 0:
        raise ValueError("eps must be positive")
    if w <= 0:
        raise ValueError("width must be positive")
    value = _round_up(2.0 * math.exp(-2.0 * n * e * e / (w * w)))
    return TailBound(value, "hoeffding-general", {"n": n, "eps": e, "width": w})


def slln_tail_bound(m: int, N: int) -> TailBound:
    """Geometric-series majorant 2*exp(-2N/m^2)/(1 - exp(-2/m^2)).

    Bounds the measure of ``some deviation beyond 1/m occurs at an index
    past N``.  The reported value is clamped to 1 (it certifies a measure);
    the unclamped upper-rounded value is kept in ``parameters["raw"]`` and
    drives schedule construction.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if N < 0:
        raise ValueError("N must be >= 0")
    q = math.exp(-2.0 / (m * m))
    raw = _round_up(2.0 * math.exp(-2.0 * N / (m * m)) / (1.0 - q), _SERIES_SLACK)
    return TailBound(min(raw, 1.0), "slln-tail", {"m": m, "N": N, "raw": raw})


def cover_schedule(m: int, k_max: int) -> CoverSchedule:
    """Minimal N_k with slln_tail_bound(m, N_k) <= 2**-k, for k = 0..k_max.

    The k = 0 entry compares the unclamped value, so N_0 is the first index
    where the series bound genuinely falls to 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    entries = []
    n = 0
    for k in range(k_max + 1):
        threshold = 2.0**-k
        while slln_tail_bound(m, n).parameters["raw"] > threshold:
            n += 1
        entries.append((k, n))
    return CoverSchedule(m, tuple(entries))


def reduced_sum(n: int, s: int) -> float:
    """Standardized head count (s - n/2)/sqrt(n/4)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= s <= n:
        raise ValueError("s must lie in [0, n]")
    return (s - n / 2.0) / math.sqrt(n / 4.0)


def deviation_asymptotic(x: float) -> float:
    """First-order large-deviation asymptotic exp(-x^2/2)/(sqrt(2 pi) x).

    Valid as an approximation of mu(S_n* > x) when x grows slowly relative
    to n; this is a pure function of x, callers own the regime check.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    return math.exp(-0.5 * x * x) / (math.sqrt(2.0 * math.pi) * x)


def _exact_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def exact_binomial_tail(n: int, x) -> Fraction:
    """Exact mu(S_n* > x) as a rational number.

    Sums C(n, s)/2**n over the s whose standardized value exceeds x.  The
    threshold comparison is exact: s qualifies iff 2s - n > x*sqrt(n),
    decided by comparing squares in rational arithmetic.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xf = _exact_fraction(x)
    x2n = xf * xf * n

    def qualifies(s: int) -> bool:
        d = 2 * s - n
        if xf >= 0:
            return d > 0 and d * d > x2n
        return d >= 0 or d * d < x2n

    # smallest qualifying s; every larger s also qualifies
    s_min = n + 1
    for s in range(n + 1):
        if qualifies(s):
            s_min = s
            break
    if s_min > n:
        return Fraction(0)
    total = 0
    term = math.comb(n, s_min)
    for s in range(s_min, n + 1):
        total += term
        term = term * (n - s) // (s + 1)
    return Fraction(total, 1 << n)


def maximal_tail_bound(n: int, x) -> TailBound:
    """Reflection bound on the running maximum of the centered walk.

    Certifies mu(exists k <= n with S_k - k/2 > x) <= 2*mu(S_n - n/2 >= x)
    for x >= 0; the right side is computed exactly and reported clamped
    to 1.  Negative x clamps to the trivial bound 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xf = _exact_fraction(x)
    # s qualifies iff s >= n/2 + x, i.e. 2s >= n + 2x
    bound2x = n + 2 * xf
    s_min = max(0, math.ceil(bound2x / 2))
    count = sum(math.comb(n, s) for s in range(s_min, n + 1))
    tail = Fraction(count, 1 << n)
    value = min(1.0, _round_up(2.0 * float(tail))) if xf >= 0 else 1.0
    return TailBound(
        value,
        "maximal-reflection",
        {"n": n, "x": _as_number(x), "end_tail": tail},
    )
