"""Deterministic bit-sequence sources and the bitstream file format.

Every generator is a pure function of its arguments; provenance strings
record how a sequence was produced.  The pseudo-random stream comes from
the splitmix64 mixer: word i is splitmix64(seed + (i+1)*0x9E3779B97F4A7C15)
and words are consumed 64 bits each, least-significant bit first.

The staged source imitates a finite-approximation construction: even
stages search for a short extension accepted by the next predicate of a
configurable step-bounded suite, odd stages pad with 1s until at least 3/4
of the bits are 1s.  The resulting prefix violates the law of large
numbers at every odd-stage boundary while never refusing a satisfiable
predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _kernels

__all__ = [
    "BitSequence",
    "StagedConfig",
    "StageRecord",
    "StageTrace",
    "BitstreamFormatError",
    "gen_prng",
    "gen_biased",
    "gen_champernowne",
    "gen_adversarial",
    "load_bits",
    "write_bits",
    "bits_from01",
]

PREDICATE_SUITES = ("never-accepts", "pattern", "counter")


class BitstreamFormatError(ValueError):
    """A byte in a bitstream file is neither a bit nor allowed whitespace."""


@dataclass(frozen=True, eq=False)
class BitSequence:
    """A realized finite prefix of a conceptual infinite bit sequence."""

    bits: np.ndarray
    provenance: str

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.flags.writeable = False
        object.__setattr__(self, "bits", arr)

    def __len__(self) -> int:
        return int(self.bits.shape[0])

    def to01(self) -> str:
        return "".join("01"[b] for b in self.bits)

    def complement(self) -> "BitSequence":
        return BitSequence(1 - self.bits, f"complement({self.provenance})")


def bits_from01(text: str, provenance: str = "literal") -> BitSequence:
    if text.strip("01"):
        raise ValueError("literal bits must be '0'/'1' characters")
    arr = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    return BitSequence(arr, provenance)


def _words(seed: int, count: int) -> np.ndarray:
    return _kernels.mix_words(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), count)


def gen_prng(seed: int, length: int) -> BitSequence:
    """Deterministic pseudo-random bits from the splitmix64 recurrence."""
    if length < 0:
        raise ValueError("length must be >= 0")
    nwords = (length + 63) // 64
    words = _words(seed, nwords)
    bytes_ = words.astype("<u8").view(np.uint8)
    bits = np.unpackbits(bytes_, bitorder="little")[:length]
    return BitSequence(bits, f"prng(seed={seed})")


def gen_biased(p, seed: int, length: int) -> BitSequence:
    """Bit i is 1 iff the i-th 64-bit uniform word falls below p."""
    pf = Fraction(p)
    if not 0 <= pf <= 1:
        raise ValueError("p must lie in [0, 1]")
    if length < 0:
        raise ValueError("length must be >= 0")
    threshold = pf * (1 << 64)
    # ceil: word/2**64 < p  <=>  word < ceil(p * 2**64)
    thr_int = -(-threshold.numerator // threshold.denominator)
    words = _words(seed, length)
    if thr_int >= 1 << 64:
        bits = np.ones(length, dtype=np.uint8)
    elif thr_int <= 0:
        bits = np.zeros(length, dtype=np.uint8)
    else:
        bits = (words < np.uint64(thr_int)).astype(np.uint8)
    return BitSequence(bits, f"biased(p={pf},seed={seed})")


def gen_champernowne(length: int) -> BitSequence:
    """First ``length`` bits of the binary numerals of 1, 2, 3, ... in order."""
    if length < 0:
        raise ValueError("length must be >= 0")
    parts: list[str] = []
    total = 0
    i = 1
    while total < length:
        b = format(i, "b")
        parts.append(b)
        total += len(b)
        i += 1
    return bits_from01("".join(parts)[:length] if parts else "", "champernowne")


@dataclass(frozen=True)
class StagedConfig:
    """Parameters of the staged construction.

    ``extension_limit`` caps the extra bits tried in a search stage and
    ``step_budget`` caps the work each predicate may spend on a candidate;
    both truncate an otherwise unbounded search.
    """

    stages: int
    suite: str = "never-accepts"
    extension_limit: int = 8
    step_budget: int = 256

    def __post_init__(self) -> None:
        if self.stages < 1:
            raise ValueError("stages must be >= 1")
        if self.suite not in PREDICATE_SUITES:
            raise ValueError(f"unknown predicate suite {self.suite!r}")
        if self.extension_limit < 1 or self.step_budget < 1:
            raise ValueError("extension_limit and step_budget must be >= 1")


@dataclass(frozen=True)
class StageRecord:
    stage: int
    kind: str  # "search" or "repair"
    case: str  # search: "adopted"/"none"; repair: "filled"/"one"
    length_before: int
    length_after: int
    ones_after: int

    @property
    def density_after(self) -> Fraction:
        if self.length_after == 0:
            return Fraction(0)
        return Fraction(self.ones_after, self.length_after)


@dataclass(frozen=True)
class StageTrace:
    records: tuple[StageRecord, ...]

    def repair_stages(self) -> tuple[StageRecord, ...]:
        return tuple(r for r in self.records if r.kind == "repair")

    def to_lines(self) -> list[str]:
        lines = [f"stages: {len(self.records)}"]
        for r in self.records:
            lines.append(
                f"stage: {r.stage} kind={r.kind} case={r.case} "
                f"before={r.length_before} after={r.length_after} "
                f"ones={r.ones_after}"
            )
        return lines


def _predicate_accepts(suite: str, index: int, candidate: str, budget: int) -> bool:
    """Step-bounded decision for predicate ``index`` of a built-in suite."""
    if suite == "never-accepts":
        return False
    if suite == "pattern":
        # accepts iff the binary numeral of the index occurs, scanning at
        # most ``budget`` start positions
        pat = format(index, "b")
        limit = min(len(candidate) - len(pat) + 1, budget)
        for pos in range(max(0, limit)):
            if candidate[pos : pos + len(pat)] == pat:
                return True
        return False
    if suite == "counter":
        # accepts once the running ones-minus-zeros balance reaches the
        # index, reading at most ``budget`` bits
        balance = 0
        for step, c in enumerate(candidate):
            if step >= budget:
                return False
            balance += 1 if c == "1" else -1
            if balance == index:
                return True
        return False
    raise ValueError(f"unknown predicate suite {suite!r}")


def _extensions(limit: int):
    """All nonempty extensions up to ``limit`` bits, shortest first."""
    for size in range(1, limit + 1):
        for value in range(1 << size):
            yield format(value, f"0{size}b")


def gen_adversarial(config: StagedConfig) -> tuple[BitSequence, StageTrace]:
    """Run the staged construction and return the prefix with its trace.

    Stage s for even s runs predicate s//2: the current string is extended
    by the first extension (length-lexicographic order) the predicate
    accepts within the step budget, or left unchanged if none is.  Odd
    stages restore a ones-density of at least 3/4, appending the minimal
    run of 1s needed (a single 1 when the density is already there; the
    empty string counts as below 3/4).
    """
    current = ""
    ones = 0
    records: list[StageRecord] = []
    for stage in range(1, config.stages + 1):
        before = len(current)
        if stage % 2 == 0:
            index = stage // 2
            case = "none"
            for ext in _extensions(config.extension_limit):
                candidate = current + ext
                if _predicate_accepts(
                    config.suite, index, candidate, config.step_budget
                ):
                    current = candidate
                    ones += ext.count("1")
                    case = "adopted"
                    break
            records.append(
                StageRecord(stage, "search", case, before, len(current), ones)
            )
        else:
            if 4 * ones < 3 * len(current) or len(current) == 0:
                fill = max(1, 3 * len(current) - 4 * ones)
                current += "1" * fill
                ones += fill
                case = "filled"
            else:
                current += "1"
                ones += 1
                case = "one"
            records.append(
                StageRecord(stage, "repair", case, before, len(current), ones)
            )
    provenance = (
        f"staged(suite={config.suite},stages={config.stages},"
        f"L={config.extension_limit},T={config.step_budget})"
    )
    return bits_from01(current, provenance), StageTrace(tuple(records))


_WHITESPACE = frozenset(b" \t\n")


def load_bits(path) -> BitSequence:
    """Parse a bitstream file: '0'/'1' bits, space/tab/newline ignored."""
    data = Path(path).read_bytes()
    arr = np.frombuffer(data, dtype=np.uint8)
    is_bit = (arr == ord("0")) | (arr == ord("1"))
    is_ws = (arr == ord(" ")) | (arr == ord("\t")) | (arr == ord("\n"))
    bad = ~(is_bit | is_ws)
    if bad.any():
        offset = int(np.argmax(bad))
        raise BitstreamFormatError(
            f"invalid byte 0x{arr[offset]:02x} at offset {offset} in {path}"
        )
    bits = (arr[is_bit] == ord("1")).astype(np.uint8)
    return BitSequence(bits, str(path))


def write_bits(path, seq: BitSequence) -> None:
    """Write a bitstream file, 64 bits per line."""
    chars = seq.to01()
    lines = [chars[i : i + 64] for i in range(0, len(chars), 64)]
    text = "".join(line + "\n" for line in lines)
    Path(path).write_text(text, encoding="ascii")
