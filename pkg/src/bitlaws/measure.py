"""Exact measure algebra on Cantor-space cylinders.

A cylinder is identified by the finite bitstring that generates it (all
infinite sequences extending that string); its fair-coin measure is
``1 / 2**len(sigma)``.  Open sets are finite unions of cylinders, and all
measure arithmetic in this module is exact: values are dyadic rationals
with big-integer numerators, never floats.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

__all__ = [
    "Dyadic",
    "Containment",
    "OpenSet",
    "cylinder_measure",
    "brute_force_measure",
    "validate_bitstring",
]

# brute_force_measure materializes one cell per depth-d string
_MAX_BRUTE_DEPTH = 26


def validate_bitstring(sigma: str) -> str:
    """Check that ``sigma`` contains only '0'/'1' characters and return it."""
    if not isinstance(sigma, str):
        raise TypeError(f"bitstring must be str, got {type(sigma).__name__}")
    if sigma.strip("01"):
        bad = next(c for c in sigma if c not in "01")
        raise ValueError(f"invalid bitstring symbol {bad!r}")
    return sigma


@dataclass(frozen=True, order=False)
class Dyadic:
    """A nonnegative rational ``numerator / 2**exponent`` in canonical form.

    Canonical means the numerator is odd, or the exponent is 0 (zero is
    stored as 0/2**0).  Instances are immutable and hashable; addition and
    comparisons are exact.
    """

    numerator: int
    exponent: int

    def __post_init__(self) -> None:
        num, exp = self.numerator, self.exponent
        if num < 0 or exp < 0:
            raise ValueError("dyadic components must be nonnegative")
        if num == 0:
            exp = 0
        else:
            while num % 2 == 0 and exp > 0:
                num //= 2
                exp -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", exp)

    @classmethod
    def zero(cls) -> "Dyadic":
        return cls(0, 0)

    @classmethod
    def one(cls) -> "Dyadic":
        return cls(1, 0)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exponent, other.exponent)
        num = (self.numerator << (e - self.exponent)) + (
            other.numerator << (e - other.exponent)
        )
        return Dyadic(num, e)

    def _cmp_key(self, other: "Dyadic") -> tuple[int, int]:
        e = max(self.exponent, other.exponent)
        return (
            self.numerator << (e - self.exponent),
            other.numerator << (e - other.exponent),
        )

    def __lt__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(other)
        return a <= b

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def as_float(self) -> float:
        return float(self.as_fraction())

    def leq_float(self, bound: float) -> bool:
        """Exact comparison ``self <= bound`` (the float is taken at its
        exact binary value, so an upper-rounded bound stays sound)."""
        return self.as_fraction() <= Fraction(bound)

    def __str__(self) -> str:
        if self.exponent <= 30:
            return f"{self.numerator}/{1 << self.exponent}"
        return f"{self.numerator}/2^{self.exponent}"


class Containment(enum.Enum):
    """Trichotomy for membership of a finite prefix in an open set."""

    CERTIFIED_IN = "certified-in"
    IMPOSSIBLE = "impossible"
    UNDETERMINED = "undetermined"


def cylinder_measure(sigma: str) -> Dyadic:
    """Measure of the cylinder generated by ``sigma``: exactly 1/2**len."""
    validate_bitstring(sigma)
    return Dyadic(1, len(sigma))


def _sort_key(sigma: str) -> tuple[int, str]:
    return (len(sigma), sigma)


@dataclass(frozen=True)
class OpenSet:
    """A finite union of cylinders.

    ``minimized`` asserts the collection is prefix-free; in that state the
    measure is the plain sum of the cylinder measures.  Cylinders are kept
    sorted by (length, content) so iteration order is deterministic.
    """

    cylinders: tuple[str, ...]
    minimized: bool = False

    @classmethod
    def from_cylinders(
        cls, cylinders: Iterable[str], *, minimized: bool = False
    ) -> "OpenSet":
        cyls = sorted({validate_bitstring(c) for c in cylinders}, key=_sort_key)
        return cls(tuple(cyls), minimized)

    @property
    def max_length(self) -> int:
        return max((len(c) for c in self.cylinders), default=0)

    def minimize(self) -> "OpenSet":
        """Canonical prefix-free form.

        Drops cylinders absorbed by a proper prefix, then merges sibling
        pairs (sigma0, sigma1) into sigma, repeating both steps to a
        fixpoint.  The covered subset of Cantor space (hence the measure)
        is unchanged.
        """
        cyls = set(self.cylinders)
        changed = True
        while changed:
            changed = False
            kept = {
                s for s in cyls if not any(s[:j] in cyls for j in range(len(s)))
            }
            if kept != cyls:
                cyls = kept
                changed = True
            for s in sorted(cyls, key=_sort_key, reverse=True):
                if s.endswith("0") and s[:-1] + "1" in cyls:
                    cyls.discard(s)
                    cyls.discard(s[:-1] + "1")
                    cyls.add(s[:-1])
                    changed = True
        return OpenSet(tuple(sorted(cyls, key=_sort_key)), minimized=True)

    def measure(self) -> Dyadic:
        """Exact measure of the union."""
        base = self if self.minimized else self.minimize()
        total = Dyadic.zero()
        for c in base.cylinders:
            total = total + Dyadic(1, len(c))
        return total

    def contains(self, prefix: str) -> Containment:
        """Classify the cylinder of ``prefix`` against this set.

        certified-in: some cylinder of the set is a prefix of ``prefix``,
        so every extension lies in the union.  impossible: no cylinder is
        compatible with any extension.  undetermined: compatible cylinders
        exist but none certifies yet.
        """
        validate_bitstring(prefix)
        compatible = False
        for c in self.cylinders:
            if prefix.startswith(c):
                return Containment.CERTIFIED_IN
            if c.startswith(prefix):
                compatible = True
        return Containment.UNDETERMINED if compatible else Containment.IMPOSSIBLE


def brute_force_measure(openset: OpenSet, depth: int) -> Dyadic:
    """Independent measure oracle: enumerate all depth-length strings.

    Marks every depth-``depth`` string covered by some cylinder (one cell
    per string) and returns covered/2**depth.  Deliberately bypasses
    minimize()/measure() so the two routes stay independent.
    """
    if depth < openset.max_length:
        raise ValueError(
            f"depth {depth} is smaller than the longest cylinder "
            f"({openset.max_length})"
        )
    if depth > _MAX_BRUTE_DEPTH:
        raise ValueError(f"enumeration depth {depth} exceeds {_MAX_BRUTE_DEPTH}")
    covered = np.zeros(1 << depth, dtype=bool)
    for c in openset.cylinders:
        lo = int(c, 2) << (depth - len(c)) if c else 0
        hi = lo + (1 << (depth - len(c)))
        covered[lo:hi] = True
    return Dyadic(int(covered.sum()), depth)
