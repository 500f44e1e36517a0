"""Truncated Solovay-style test families over finite-depth cylinder covers.

A family is an indexed list of open sets with per-index measure budgets.
Infinite effectively-open sets are represented by their finite-depth
truncations; every verdict is therefore "at truncation".  Measures are
exact dyadics, budgets are upper-rounded floats, and mixed comparisons
always take the exact value against the inflated float, which is the sound
direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import TailBound, cover_schedule, slln_tail_bound
from .generators import BitSequence
from .measure import Containment, Dyadic, OpenSet, brute_force_measure

__all__ = [
    "TestFamily",
    "MembershipProfile",
    "BudgetCheckReport",
    "BorelCantelliReport",
    "slln_first_violation_cylinders",
    "slln_truncated_measure",
    "build_slln_family",
    "family_budget_check",
    "membership_profile",
    "borel_cantelli_verdict",
    "coordinate_family",
    "independence_windows",
    "save_family",
    "load_family",
]

_MAX_ENUM_DEPTH = 24


@dataclass(frozen=True)
class TestFamily:
    """Indexed open sets with measure budgets, truncated at ``depth``."""

    __test__ = False  # the name is domain vocabulary, not a pytest suite

    name: str
    depth: int
    sets: tuple[OpenSet, ...]
    budgets: tuple[TailBound, ...]
    declaration: str  # "convergent" or "divergent"
    certified_total: float | None = None
    independent: bool = False

    def __post_init__(self) -> None:
        if len(self.sets) != len(self.budgets):
            raise ValueError("sets and budgets must align")
        if self.declaration not in ("convergent", "divergent"):
            raise ValueError("declaration must be convergent or divergent")
        if self.declaration == "convergent" and self.certified_total is None:
            raise ValueError("a convergent family needs a certified total")

    def partial_sums(self) -> list[float]:
        sums, acc = [], 0.0
        for b in self.budgets:
            acc += b.value
            sums.append(acc)
        return sums


def _first_violation_mask(sums: np.ndarray, m: int, n: int) -> np.ndarray:
    return m * np.abs(2 * sums - n) > 2 * n


def slln_first_violation_cylinders(m: int, start: int, depth: int) -> OpenSet:
    """Cylinders whose first average-deviation beyond 1/m in (start, depth]
    happens exactly at their own length.

    The enumeration is prefix-free by construction: a violating string is
    emitted and never extended.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if start < 0 or depth < start:
        raise ValueError("need 0 <= start <= depth")
    if depth > _MAX_ENUM_DEPTH:
        raise ValueError(
            f"explicit enumeration capped at depth {_MAX_ENUM_DEPTH}; "
            "use slln_truncated_measure for deeper truncations"
        )
    if m * (2 * depth + 2) >= 2**63:
        raise ValueError("m too large for int64 enumeration")
    codes = np.zeros(1, dtype=np.int64)
    sums = np.zeros(1, dtype=np.int64)
    emitted: list[str] = []
    for n in range(1, depth + 1):
        codes = np.concatenate((codes << 1, (codes << 1) | 1))
        sums = np.concatenate((sums, sums + 1))
        if n > start:
            viol = _first_violation_mask(sums, m, n)
            if viol.any():
                emitted.extend(
                    format(int(c), f"0{n}b") for c in np.sort(codes[viol])
                )
                codes = codes[~viol]
                sums = sums[~viol]
    return OpenSet.from_cylinders(emitted, minimized=True)


def slln_truncated_measure(m: int, start: int, depth: int) -> Dyadic:
    """Exact measure of the depth-``depth`` truncation of the deviation set,
    by path counting over (length, ones) states.

    Matches slln_first_violation_cylinders(...).measure() wherever the
    explicit enumeration is feasible, but scales to arbitrary depth.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if start < 0 or depth < start:
        raise ValueError("need 0 <= start <= depth")
    alive = [1]  # alive[s] = number of non-violated length-n prefixes with s ones
    violated = 0  # total violating paths, weighted by 2**(depth - n)
    for n in range(1, depth + 1):
        new = [0] * (n + 1)
        for s, c in enumerate(alive):
            if c:
                new[s] += c
                new[s + 1] += c
        if n > start:
            for s in range(n + 1):
                if new[s] and m * abs(2 * s - n) > 2 * n:
                    violated += new[s] << (depth - n)
                    new[s] = 0
        alive = new
    return Dyadic(violated, depth)


def build_slln_family(m: int, k_max: int, depth: int) -> TestFamily:
    """Truncated effective-null cover for the deviation-1/m event.

    Index k holds the depth-truncation of the deviations-past-N_k set,
    where N_k comes from cover_schedule, with budget slln_tail_bound(m,
    N_k) <= 2**-k.  For m <= 2 a deviation beyond 1/m is impossible and
    every set is empty.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    schedule = cover_schedule(m, k_max)
    n_last = schedule.entries[-1][1]
    if depth < n_last:
        raise ValueError(
            f"depth {depth} is below the deepest schedule index N_{k_max} = {n_last}"
        )
    sets = []
    budgets = []
    for k, n_k in schedule.entries:
        sets.append(slln_first_violation_cylinders(m, n_k, depth))
        budgets.append(slln_tail_bound(m, n_k))
    # emitted budgets are <= 2**-k; the un-emitted tail adds at most 2**-k_max
    total = math.nextafter(
        math.fsum(b.value for b in budgets) + 2.0**-k_max, math.inf
    )
    return TestFamily(
        name=f"slln-m{m}",
        depth=depth,
        sets=tuple(sets),
        budgets=tuple(budgets),
        declaration="convergent",
        certified_total=total,
    )


@dataclass(frozen=True)
class BudgetCheckReport:
    family: str
    depth: int
    entries: tuple  # (index, measure: Dyadic, budget: float, ok: bool)
    partial_sums: tuple
    certified_total: float | None
    failures: tuple
    passed: bool


def family_budget_check(family: TestFamily, depth: int | None = None) -> BudgetCheckReport:
    """Verify every truncated set's exact measure against its budget.

    Each set is re-measured by full enumeration at ``depth`` (default: the
    family's truncation depth); a violated budget is a hard failure naming
    the index.
    """
    d = family.depth if depth is None else depth
    if d < family.depth:
        raise ValueError("check depth must reach the family truncation depth")
    entries = []
    failures = []
    for idx, (s, b) in enumerate(zip(family.sets, family.budgets)):
        measure = brute_force_measure(s, d)
        ok = measure.leq_float(b.value)
        entries.append((idx, measure, b.value, ok))
        if not ok:
            failures.append(idx)
    return BudgetCheckReport(
        family=family.name,
        depth=d,
        entries=tuple(entries),
        partial_sums=tuple(family.partial_sums()),
        certified_total=family.certified_total,
        failures=tuple(failures),
        passed=not failures,
    )


@dataclass(frozen=True)
class MembershipProfile:
    indices: tuple[int, ...]
    undetermined: tuple[int, ...]


def membership_profile(seq: BitSequence, family: TestFamily) -> MembershipProfile:
    """Classify the prefix against every set of the family."""
    prefix = seq.to01()
    certified = []
    undetermined = []
    for idx, s in enumerate(family.sets):
        c = s.contains(prefix)
        if c is Containment.CERTIFIED_IN:
            certified.append(idx)
        elif c is Containment.UNDETERMINED:
            undetermined.append(idx)
    return MembershipProfile(tuple(certified), tuple(undetermined))


@dataclass(frozen=True)
class BorelCantelliReport:
    kind: str
    verdict: str
    hits: int
    expected_bound: float | None = None
    windows: tuple | None = None  # (start_index, first_hit_or_None)


def borel_cantelli_verdict(
    profile: MembershipProfile,
    family: TestFamily,
    hit_threshold: float | None = None,
) -> BorelCantelliReport:
    """Finite-truncation verdict in the spirit of the Borel-Cantelli split.

    Convergent budgets: the certified total bounds the expected number of
    hits, so a hit count at or below the threshold (default: that total)
    reads "consistent-with-random", above it "suspicious".  Divergent
    budgets over independent sets: report the first hit at or past every
    window start; at truncation an empty window carries no claim.
    """
    hits = len(profile.indices)
    if family.declaration == "convergent":
        threshold = (
            family.certified_total if hit_threshold is None else hit_threshold
        )
        verdict = "consistent-with-random" if hits <= threshold else "suspicious"
        return BorelCantelliReport(
            "convergent", verdict, hits, expected_bound=family.certified_total
        )
    if not family.independent:
        return BorelCantelliReport("divergent", "no-claim-at-truncation", hits)
    windows = []
    for start in range(len(family.sets)):
        hit = next((i for i in profile.indices if i >= start), None)
        windows.append((start, hit))
    verdict = (
        "hit-in-every-window"
        if all(h is not None for _, h in windows)
        else "no-claim-at-truncation"
    )
    return BorelCantelliReport("divergent", verdict, hits, windows=tuple(windows))


def coordinate_family(positions: list[int], name: str = "coordinate") -> TestFamily:
    """Divergent independent family: set i is "the bit at positions[i] is 1".

    Each set has measure exactly 1/2, the budget sum diverges, and the sets
    depend on disjoint coordinates when the positions are distinct.
    """
    if len(set(positions)) != len(positions):
        raise ValueError("positions must be distinct")
    sets = []
    budgets = []
    for pos in positions:
        if pos < 0:
            raise ValueError("positions must be >= 0")
        cyls = [format(v, f"0{pos}b") + "1" for v in range(1 << pos)] if pos else ["1"]
        sets.append(OpenSet.from_cylinders(cyls, minimized=True))
        budgets.append(TailBound(0.5, "coordinate-bit", {"position": pos}))
    return TestFamily(
        name=name,
        depth=max(positions) + 1,
        sets=tuple(sets),
        budgets=tuple(budgets),
        declaration="divergent",
        independent=True,
    )


def independence_windows(
    family: TestFamily, depth: int | None = None
) -> tuple[list[frozenset], bool]:
    """Brute-force the coordinates each set depends on; True when pairwise
    disjoint (which justifies the product rule for these sets).

    Only feasible for small depths; intended for families whose sets are
    confined to coordinate windows.
    """
    d = family.depth if depth is None else depth
    if d > 16:
        raise ValueError("independence check capped at depth 16")
    size = 1 << d
    codes = np.arange(size, dtype=np.int64)
    coords: list[frozenset] = []
    for s in family.sets:
        ind = np.zeros(size, dtype=bool)
        for c in s.cylinders:
            lo = (int(c, 2) << (d - len(c))) if c else 0
            ind[lo : lo + (1 << (d - len(c)))] = True
        deps = set()
        for i in range(d):
            mask = 1 << (d - 1 - i)
            if (ind != ind[codes ^ mask]).any():
                deps.add(i)
        coords.append(frozenset(deps))
    disjoint = all(
        not (coords[i] & coords[j])
        for i in range(len(coords))
        for j in range(i + 1, len(coords))
    )
    return coords, disjoint


# --- family file format -----------------------------------------------------
#
# Line-oriented "key: value" text.  Cylinders are whitespace-separated
# bitstrings with "<>" for the empty string; floats are written in hex so
# round trips are bit-exact.

_EMPTY_TOKEN = "<>"


def _encode_param(value) -> str:
    if isinstance(value, bool):
        raise TypeError("boolean budget parameters are not supported")
    if isinstance(value, int):
        return f"i:{value}"
    if isinstance(value, float):
        return f"f:{value.hex()}"
    if isinstance(value, Fraction):
        return f"q:{value.numerator}/{value.denominator}"
    if isinstance(value, str):
        return f"s:{value}"
    raise TypeError(f"cannot serialize budget parameter {value!r}")


def _decode_param(text: str):
    tag, _, body = text.partition(":")
    if tag == "i":
        return int(body)
    if tag == "f":
        return float.fromhex(body)
    if tag == "q":
        num, _, den = body.partition("/")
        return Fraction(int(num), int(den))
    if tag == "s":
        return body
    raise ValueError(f"unknown parameter tag {tag!r}")


def family_to_text(family: TestFamily) -> str:
    lines = [
        f"family: {family.name}",
        f"depth: {family.depth}",
        f"declaration: {family.declaration}",
        "certified_total: "
        + ("none" if family.certified_total is None else family.certified_total.hex()),
        f"independent: {'true' if family.independent else 'false'}",
        f"indices: {len(family.sets)}",
    ]
    for idx, (s, b) in enumerate(zip(family.sets, family.budgets)):
        lines.append(f"index: {idx}")
        lines.append(f"budget_formula: {b.formula_id}")
        lines.append(f"budget_value: {b.value.hex()}")
        for key, value in b.parameters.items():
            lines.append(f"budget_param: {key} {_encode_param(value)}")
        lines.append(f"minimized: {'true' if s.minimized else 'false'}")
        cyls = " ".join(c if c else _EMPTY_TOKEN for c in s.cylinders)
        lines.append(f"cylinders: {cyls}".rstrip())
    return "\n".join(lines) + "\n"


def save_family(family: TestFamily, path) -> None:
    Path(path).write_text(family_to_text(family), encoding="ascii")


class _LineReader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def expect(self, key: str) -> str:
        if self.pos >= len(self.lines):
            raise ValueError(f"family file ended while expecting {key!r}")
        line = self.lines[self.pos]
        prefix = f"{key}:"
        if not line.startswith(prefix):
            raise ValueError(f"expected {key!r} at line {self.pos + 1}, got {line!r}")
        self.pos += 1
        return line[len(prefix) :].strip()

    def peek_key(self) -> str | None:
        if self.pos >= len(self.lines):
            return None
        return self.lines[self.pos].partition(":")[0]


def family_from_text(text: str) -> TestFamily:
    r = _LineReader(text)
    name = r.expect("family")
    depth = int(r.expect("depth"))
    declaration = r.expect("declaration")
    total_text = r.expect("certified_total")
    total = None if total_text == "none" else float.fromhex(total_text)
    independent = r.expect("independent") == "true"
    count = int(r.expect("indices"))
    sets = []
    budgets = []
    for idx in range(count):
        got = int(r.expect("index"))
        if got != idx:
            raise ValueError(f"family file indices out of order at {got}")
        formula = r.expect("budget_formula")
        value = float.fromhex(r.expect("budget_value"))
        params: dict = {}
        while r.peek_key() == "budget_param":
            body = r.expect("budget_param")
            key, _, encoded = body.partition(" ")
            params[key] = _decode_param(encoded)
        minimized = r.expect("minimized") == "true"
        cyl_text = r.expect("cylinders")
        cyls = [
            "" if tok == _EMPTY_TOKEN else tok for tok in cyl_text.split()
        ]
        sets.append(OpenSet.from_cylinders(cyls, minimized=minimized))
        budgets.append(TailBound(value, formula, params))
    return TestFamily(
        name=name,
        depth=depth,
        sets=tuple(sets),
        budgets=tuple(budgets),
        declaration=declaration,
        certified_total=total,
        independent=independent,
    )


def load_family(path) -> TestFamily:
    return family_from_text(Path(path).read_text(encoding="ascii"))
