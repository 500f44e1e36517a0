import numpy as np
import pytest

from bitlaws.measure import (
    Containment,
    Dyadic,
    OpenSet,
    brute_force_measure,
    cylinder_measure,
)


def test_dyadic_canonical_form():
    assert Dyadic(4, 3) == Dyadic(1, 1)
    assert Dyadic(0, 7) == Dyadic(0, 0)
    assert Dyadic(3, 5).numerator == 3
    with pytest.raises(ValueError):
        Dyadic(-1, 0)


def test_dyadic_arithmetic_and_order():
    assert Dyadic(1, 2) + Dyadic(1, 2) == Dyadic(1, 1)
    assert Dyadic(1, 3) + Dyadic(3, 3) == Dyadic(1, 1)
    assert Dyadic(1, 3) < Dyadic(1, 2)
    assert Dyadic(5, 3) <= Dyadic(5, 3)
    assert str(Dyadic(3, 3)) == "3/8"
    assert Dyadic(1, 4).as_fraction().denominator == 16


def test_dyadic_float_comparison_is_exact():
    # 0.1 as a float is slightly above 1/10 but well below 13/128
    assert Dyadic(1, 4).leq_float(0.1)
    assert not Dyadic(13, 7).leq_float(0.1)


def test_cylinder_measure():
    assert cylinder_measure("") == Dyadic(1, 0)
    assert cylinder_measure("010") == Dyadic(1, 3)
    assert cylinder_measure("0110100101") == Dyadic(1, 10)
    with pytest.raises(ValueError):
        cylinder_measure("012")


def test_minimize_absorbs_prefixes():
    s = OpenSet.from_cylinders(["0", "01"]).minimize()
    assert s.cylinders == ("0",)
    assert OpenSet.from_cylinders([]).minimize().cylinders == ()


def test_minimize_merges_siblings():
    s = OpenSet.from_cylinders(["00", "01"]).minimize()
    assert s.cylinders == ("0",)
    assert s.measure() == Dyadic(1, 1)
    # 0 and 1 merge all the way to the whole space
    assert OpenSet.from_cylinders(["0", "1"]).minimize().cylinders == ("",)


def test_minimize_idempotent_and_measure_preserving():
    rng = np.random.default_rng(7)
    for _ in range(200):
        cyls = [
            "".join("01"[b] for b in rng.integers(0, 2, rng.integers(0, 7)))
            for _ in range(rng.integers(0, 6))
        ]
        s = OpenSet.from_cylinders(cyls)
        m1 = s.minimize()
        m2 = m1.minimize()
        assert m1 == m2
        assert m1.measure() == s.measure()


def test_openset_measure_examples():
    assert OpenSet.from_cylinders([]).measure() == Dyadic(0, 0)
    assert OpenSet.from_cylinders(["0", "01"]).measure() == Dyadic(1, 1)
    assert OpenSet.from_cylinders(["00", "01", "10"]).measure() == Dyadic(3, 2)


def test_contains_trichotomy():
    s = OpenSet.from_cylinders(["01"])
    assert s.contains("0101") is Containment.CERTIFIED_IN
    assert s.contains("00") is Containment.IMPOSSIBLE
    assert OpenSet.from_cylinders(["0101"]).contains("01") is Containment.UNDETERMINED
    assert OpenSet.from_cylinders([]).contains("0") is Containment.IMPOSSIBLE


def test_certified_in_means_every_extension_covered():
    s = OpenSet.from_cylinders(["10", "001"])
    depth = 5
    for code in range(1 << depth):
        word = format(code, f"0{depth}b")
        for cut in range(depth + 1):
            prefix = word[:cut]
            if s.contains(prefix) is Containment.CERTIFIED_IN:
                assert any(word.startswith(c) for c in s.cylinders)


def test_brute_force_measure_examples():
    assert brute_force_measure(OpenSet.from_cylinders(["1"]), 3) == Dyadic(1, 1)
    assert brute_force_measure(OpenSet.from_cylinders(["00", "010"]), 3) == Dyadic(3, 3)
    assert brute_force_measure(OpenSet.from_cylinders([]), 5) == Dyadic(0, 0)


def test_brute_force_rejects_shallow_depth():
    with pytest.raises(ValueError):
        brute_force_measure(OpenSet.from_cylinders(["0101"]), 3)


def test_measure_equals_brute_force_on_random_sets():
    rng = np.random.default_rng(123)
    for _ in range(300):
        cyls = {
            "".join("01"[b] for b in rng.integers(0, 2, rng.integers(0, 9)))
            for _ in range(rng.integers(0, 9))
        }
        s = OpenSet.from_cylinders(cyls)
        for depth in (s.max_length, s.max_length + 2):
            assert s.measure() == brute_force_measure(s, depth)


def test_prefix_free_measure_is_plain_sum():
    # first-violation style prefix-free family: no reduction may occur
    s = OpenSet.from_cylinders(["00", "010", "0110"], minimized=True)
    assert s.measure() == Dyadic(1, 2) + Dyadic(1, 3) + Dyadic(1, 4)
