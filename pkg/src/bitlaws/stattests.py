"""Scanners that test a finite bit prefix against three statistical laws.

* slln_scan: exact-integer detection of running-average deviations.
* normality_scan: per-pattern, per-offset block frequencies.
* lil_upper_scan / lil_lower_scan: iterated-logarithm envelopes over
  geometric block decompositions.

Deviation comparisons are exact (integer or rational); only the iterated-
logarithm envelopes themselves are floats.  Scanners are pure functions of
the prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .generators import BitSequence

__all__ = [
    "PrefixSums",
    "SllnReport",
    "NormalityReport",
    "BlockStats",
    "LilParams",
    "prefix_sums",
    "slln_scan",
    "normality_scan",
    "lil_upper_scan",
    "lil_lower_scan",
    "lil_lower_params",
    "lil_envelope",
    "first_envelope_crossing",
]

PrefixSums = np.ndarray


def prefix_sums(seq: BitSequence) -> PrefixSums:
    """Cumulative ones counts; sums[n] is the number of 1s among the
    first n bits, with sums[0] = 0."""
    sums = np.zeros(len(seq) + 1, dtype=np.int64)
    np.cumsum(seq.bits, out=sums[1:])
    return sums


@dataclass(frozen=True)
class SllnReport:
    m: int
    start: int
    n_bits: int
    violations: tuple[int, ...]
    verdict: str  # "pass" or "fail"


def slln_scan(seq: BitSequence, m: int, start: int = 0) -> SllnReport:
    """List every n in (start, len] where |S_n/n - 1/2| > 1/m.

    The comparison is the exact integer test m*|2*S_n - n| > 2*n.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if start < 0:
        raise ValueError("start must be >= 0")
    if m * (2 * len(seq) + 2) >= 2**63:
        raise ValueError("m too large for int64 scanning at this length")
    sums = prefix_sums(seq)
    viol = _kernels.slln_violations(sums, np.int64(m), np.int64(start))
    violations = tuple(int(v) for v in viol)
    return SllnReport(
        m, start, len(seq), violations, "fail" if violations else "pass"
    )


@dataclass(frozen=True)
class NormalityReport:
    k: int
    eps: Fraction
    n_bits: int
    # (pattern, offset) -> (occurrences, trials, frequency)
    table: dict = field(default_factory=dict)
    violations: tuple = ()
    budget: float = 0.0
    verdict: str = "pass"


def normality_scan(seq: BitSequence, k: int, eps) -> NormalityReport:
    """Count each length-k pattern at every offset class.

    For offset t the trials are the disjoint blocks starting at t, t+k,
    t+2k, ...; an entry is flagged when |occurrences/trials - 2**-k| > eps,
    decided in exact rational arithmetic.  The verdict compares the number
    of flagged entries against the summed concentration budget
    2*exp(-2*trials*eps^2) per pattern (advisory, mirroring an almost-sure
    finite-flags argument at finite truncation).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(seq) < k:
        raise ValueError("prefix shorter than block length")
    eps_f = Fraction(eps)
    if eps_f <= 0:
        raise ValueError("eps must be positive")
    n = len(seq)
    table: dict = {}
    violations: list = []
    budget = 0.0
    two_k = 1 << k
    for t in range(k):
        trials = (n - t) // k
        counts = _kernels.pattern_counts(seq.bits, k, t)
        if trials <= 0:
            for code in range(two_k):
                table[(format(code, f"0{k}b"), t)] = (0, 0, None)
            continue
        budget += two_k * 2.0 * math.exp(-2.0 * trials * float(eps_f) ** 2)
        for code in range(two_k):
            occ = int(counts[code])
            sigma = format(code, f"0{k}b")
            table[(sigma, t)] = (occ, trials, occ / trials)
            # |occ/trials - 1/2**k| > eps, cross-multiplied
            lhs = abs(occ * two_k - trials) * eps_f.denominator
            rhs = eps_f.numerator * trials * two_k
            if lhs > rhs:
                violations.append((sigma, t))
    verdict = "fail" if len(violations) > budget else "pass"
    return NormalityReport(
        k, eps_f, n, table, tuple(violations), budget, verdict
    )


@dataclass(frozen=True)
class BlockStats:
    """Per-block record of a geometric block decomposition."""

    r: int
    n_prev: int
    n_r: int
    s_at_nr: int
    d_r: int
    n_next: int | None = None
    upper_envelope: float | None = None
    lower_threshold: float | None = None
    upper_cross: bool | None = None
    lower_event: bool | None = None
    final_cross: bool | None = None


def _lnln_term(n: int) -> float:
    return math.sqrt((n / 2.0) * math.log(math.log(n)))


def _as_float(x) -> float:
    return x if isinstance(x, float) else float(Fraction(x))


def lil_envelope(n: int, lam) -> float:
    """Iterated-logarithm envelope n/2 + lam*sqrt((n/2)*ln ln n)."""
    if n < 3:
        raise ValueError("n must be >= 3 (ln ln n must be positive)")
    return n / 2.0 + _as_float(lam) * _lnln_term(n)


def _geometric_chain(gamma: Fraction, n_max: int) -> list[int]:
    """Integers nearest to gamma**r (ties round up), deduplicated."""
    chain: list[int] = []
    power = Fraction(1)
    while True:
        n_r = math.floor(power + Fraction(1, 2))
        if n_r > n_max:
            break
        if not chain or n_r > chain[-1]:
            chain.append(n_r)
        power *= gamma
    return chain


def lil_upper_scan(seq: BitSequence, lam, gamma) -> list[BlockStats]:
    """Flag blocks whose walk exceeds the lam-envelope anchored at n_r.

    Blocks are (n_r, n_{r+1}] with n_r the integer nearest gamma**r; a
    block is emitted when it lies fully inside the prefix and n_r >= 3.
    upper_cross is set when some n in the block has
    S_n - n/2 > lam*sqrt((n_r/2)*ln ln n_r).
    """
    lam_f = Fraction(lam)
    gamma_f = Fraction(gamma)
    if lam_f <= 1:
        raise ValueError("lambda must exceed 1")
    if not 1 < gamma_f <= lam_f:
        raise ValueError("gamma must lie in (1, lambda]")
    n_max = len(seq)
    chain = _geometric_chain(gamma_f, n_max)
    if len(chain) < 2:
        raise ValueError("prefix shorter than the first block boundary")
    sums = prefix_sums(seq)
    blocks = [
        (r, chain[r], chain[r + 1])
        for r in range(len(chain) - 1)
        if chain[r] >= 3
    ]
    out: list[BlockStats] = []
    if not blocks:
        return out
    bounds = np.array([blocks[0][1]] + [b[2] for b in blocks], dtype=np.int64)
    seg_max = _kernels.segment_max_walk(sums, bounds)
    for (r, n_r, n_next), m_walk in zip(blocks, seg_max):
        threshold = float(lam_f) * _lnln_term(n_r)
        n_prev = chain[r - 1] if r > 0 else 0
        out.append(
            BlockStats(
                r=r,
                n_prev=n_prev,
                n_r=n_r,
                s_at_nr=int(sums[n_r]),
                d_r=int(sums[n_r] - sums[n_prev]),
                n_next=n_next,
                upper_envelope=threshold,
                upper_cross=bool(float(m_walk) > 2.0 * threshold),
            )
        )
    return out


@dataclass(frozen=True)
class LilParams:
    """Parameters of the block-independence route to the lower envelope."""

    lam: Fraction
    eta: Fraction
    gamma: int

    def validate_lower(self) -> None:
        if not 0 < self.lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        if not self.eta > self.lam:
            raise ValueError("eta must exceed lambda")
        if not 1 - self.eta < ((self.eta - self.lam) / 2) ** 2:
            raise ValueError("eta too small: 1 - eta must be < ((eta-lambda)/2)^2")
        if self.gamma < 2:
            raise ValueError("gamma must be an integer >= 2")
        if not Fraction(self.gamma - 1, self.gamma) > self.eta:
            raise ValueError("(gamma-1)/gamma must exceed eta")


def lil_lower_params(lam) -> LilParams:
    """Choose eta on the dyadic grid {1 - 2**-j} and the minimal gamma.

    Returns the smallest j with eta > lambda and 1 - eta < ((eta-lambda)/2)^2,
    then the minimal integer gamma with (gamma-1)/gamma > eta.
    """
    lam_f = Fraction(lam)
    if not 0 < lam_f < 1:
        raise ValueError("lambda must lie in (0, 1)")
    j = 1
    while True:
        eta = 1 - Fraction(1, 1 << j)
        if eta > lam_f and 1 - eta < ((eta - lam_f) / 2) ** 2:
            break
        j += 1
    gamma = math.floor(1 / (1 - eta)) + 1
    params = LilParams(lam_f, eta, gamma)
    params.validate_lower()
    return params


def lil_lower_scan(seq: BitSequence, params: LilParams) -> list[BlockStats]:
    """Per-block events for the lower-envelope argument, gamma**r blocks.

    For each block r (n_r = gamma**r, n_r >= 3, inside the prefix):
    lower_event is D_r - (n_r - n_{r-1})/2 > eta*sqrt((n_r/2)*ln ln n_r)
    with D_r = S_{n_r} - S_{n_{r-1}}, and final_cross is the combined
    inequality S_{n_r} - n_r/2 > lambda*sqrt((n_r/2)*ln ln n_r).
    """
    params.validate_lower()
    gamma = params.gamma
    if len(seq) < gamma * gamma:
        raise ValueError("prefix must contain at least gamma**2 bits")
    sums = prefix_sums(seq)
    n_max = len(seq)
    out: list[BlockStats] = []
    r = 1
    n_prev = 1
    n_r = gamma
    while n_r <= n_max:
        if n_r >= 3:
            d_r = int(sums[n_r] - sums[n_prev])
            eta_threshold = float(params.eta) * _lnln_term(n_r)
            lam_threshold = float(params.lam) * _lnln_term(n_r)
            lower_event = float(2 * d_r - (n_r - n_prev)) > 2.0 * eta_threshold
            final_cross = float(2 * sums[n_r] - n_r) > 2.0 * lam_threshold
            out.append(
                BlockStats(
                    r=r,
                    n_prev=n_prev,
                    n_r=n_r,
                    s_at_nr=int(sums[n_r]),
                    d_r=d_r,
                    upper_envelope=lam_threshold,
                    lower_threshold=eta_threshold,
                    lower_event=lower_event,
                    final_cross=final_cross,
                )
            )
        r += 1
        n_prev = n_r
        n_r *= gamma
    return out


def _crossing_thresholds(n_max: int, lam: float) -> np.ndarray:
    """thresholds[n-1] = 2*lam*sqrt((n/2)*ln ln n), +inf below n = 3."""
    n = np.arange(1, n_max + 1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = 2.0 * lam * np.sqrt((n / 2.0) * np.log(np.log(n)))
    t[: min(2, n_max)] = np.inf
    return t


def first_envelope_crossing(seq: BitSequence, lam, n_min: int = 3) -> int:
    """First n >= n_min with S_n - n/2 > lam*sqrt((n/2)*ln ln n), or -1."""
    n_max = len(seq)
    start = max(3, n_min)
    if n_max < start:
        return -1
    sums = prefix_sums(seq)
    thresholds = _crossing_thresholds(n_max, _as_float(lam))
    return int(_kernels.first_crossing(sums, thresholds, np.int64(start)))
