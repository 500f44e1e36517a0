"""Hot inner loops: numba-jitted kernels with a pure-numpy fallback.

Backend selection: the environment variable ``BITLAWS_KERNELS`` may be
``numba``, ``numpy`` or ``auto`` (default).  ``auto`` uses numba when it
imports, numpy otherwise.  Both paths are exact over integers and compare
against caller-precomputed float threshold tables, so results are
bit-identical regardless of backend.

Each kernel exists as ``_<name>_numpy`` (vectorized) and ``_<name>_loop``
(njit-compiled when selected); the public name points at the active one.
The benchmark script times both directly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    HAVE_NUMBA = False

_FLAG = os.environ.get("BITLAWS_KERNELS", "auto").lower()
if _FLAG not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"BITLAWS_KERNELS must be auto, numba or numpy (got {_FLAG!r})"
    )
if _FLAG == "numba" and not HAVE_NUMBA:
    raise RuntimeError("BITLAWS_KERNELS=numba but numba is not importable")

USE_NUMBA = _FLAG == "numba" or (_FLAG == "auto" and HAVE_NUMBA)
BACKEND = "numba" if USE_NUMBA else "numpy"

# splitmix64 constants
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


def _mix_words_numpy(seed, count):
    z = np.arange(1, count + 1, dtype=np.uint64) * _GOLD + np.uint64(seed)
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def _mix_words_loop(seed, count):
    out = np.empty(count, dtype=np.uint64)
    s = np.uint64(seed)
    for i in range(count):
        z = s + np.uint64(i + 1) * _GOLD
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        out[i] = z ^ (z >> _S31)
    return out


def _pattern_counts_numpy(bits, k, offset):
    n = bits.shape[0]
    trials = (n - offset) // k
    counts = np.zeros(1 << k, dtype=np.int64)
    if trials <= 0:
        return counts
    blocks = bits[offset : offset + trials * k].reshape(trials, k)
    weights = (1 << np.arange(k - 1, -1, -1)).astype(np.int64)
    codes = blocks.astype(np.int64) @ weights
    binc = np.bincount(codes, minlength=1 << k)
    counts[: binc.shape[0]] = binc
    return counts


def _pattern_counts_loop(bits, k, offset):
    n = bits.shape[0]
    trials = (n - offset) // k
    counts = np.zeros(1 << k, dtype=np.int64)
    for i in range(trials):
        code = 0
        base = offset + i * k
        for j in range(k):
            code = (code << 1) | bits[base + j]
        counts[code] += 1
    return counts


def _slln_violations_numpy(sums, m, start):
    n_max = sums.shape[0] - 1
    if n_max <= start:
        return np.empty(0, dtype=np.int64)
    n = np.arange(start + 1, n_max + 1, dtype=np.int64)
    walk = 2 * sums[start + 1 :] - n
    return n[m * np.abs(walk) > 2 * n]


def _slln_violations_loop(sums, m, start):
    n_max = sums.shape[0] - 1
    count = 0
    for n in range(start + 1, n_max + 1):
        w = 2 * sums[n] - n
        if w < 0:
            w = -w
        if m * w > 2 * n:
            count += 1
    out = np.empty(count, dtype=np.int64)
    idx = 0
    for n in range(start + 1, n_max + 1):
        w = 2 * sums[n] - n
        if w < 0:
            w = -w
        if m * w > 2 * n:
            out[idx] = n
            idx += 1
    return out


def _segment_max_walk_numpy(sums, bounds):
    n_max = sums.shape[0] - 1
    walk = 2 * sums[1:] - np.arange(1, n_max + 1, dtype=np.int64)
    out = np.empty(bounds.shape[0] - 1, dtype=np.int64)
    for i in range(bounds.shape[0] - 1):
        # positions n in (bounds[i], bounds[i+1]] are walk[bounds[i]:bounds[i+1]]
        out[i] = walk[bounds[i] : bounds[i + 1]].max()
    return out


def _segment_max_walk_loop(sums, bounds):
    out = np.empty(bounds.shape[0] - 1, dtype=np.int64)
    for i in range(bounds.shape[0] - 1):
        best = np.int64(-(1 << 62))
        for n in range(bounds[i] + 1, bounds[i + 1] + 1):
            w = 2 * sums[n] - n
            if w > best:
                best = w
        out[i] = best
    return out


def _first_crossing_numpy(sums, thresholds, start):
    n_max = sums.shape[0] - 1
    n = np.arange(start, n_max + 1, dtype=np.int64)
    walk = 2 * sums[start:] - n
    hits = np.nonzero(walk.astype(np.float64) > thresholds[start - 1 :])[0]
    if hits.shape[0] == 0:
        return np.int64(-1)
    return np.int64(start + hits[0])


def _first_crossing_loop(sums, thresholds, start):
    n_max = sums.shape[0] - 1
    for n in range(start, n_max + 1):
        if float(2 * sums[n] - n) > thresholds[n - 1]:
            return np.int64(n)
    return np.int64(-1)


if USE_NUMBA:
    _jit = njit(cache=True)
    mix_words = _jit(_mix_words_loop)
    pattern_counts = _jit(_pattern_counts_loop)
    slln_violations = _jit(_slln_violations_loop)
    segment_max_walk = _jit(_segment_max_walk_loop)
    first_crossing = _jit(_first_crossing_loop)
else:
    mix_words = _mix_words_numpy
    pattern_counts = _pattern_counts_numpy
    slln_violations = _slln_violations_numpy
    segment_max_walk = _segment_max_walk_numpy
    first_crossing = _first_crossing_numpy
