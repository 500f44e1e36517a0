"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criteria with runtime clauses assert their own wall-clock budget.  All
expected values come from independent oracles (full enumeration, big-int
summation, reference recurrences) or are exact by construction.
"""

import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

import bitlaws as bl
from bitlaws.generators import bits_from01
from bitlaws.solovay import family_to_text, load_family

_POP = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def _ones_histogram(n):
    codes = np.arange(1 << n, dtype=np.uint32).view(np.uint8).reshape(-1, 4)
    return np.bincount(_POP[codes].sum(axis=1).astype(np.int64), minlength=n + 1)


def _line(num, ok, detail):
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_hoeffding_dominance():
    t0 = time.perf_counter()
    violations = 0
    worst = 1.0
    for n in range(1, 21):
        hist = _ones_histogram(n)
        for i in range(1, 21):
            eps = Fraction(i, 40)
            count = sum(
                int(hist[s])
                for s in range(n + 1)
                if abs(2 * s - n) * 40 > 2 * n * i
            )
            tail = Fraction(count, 1 << n)
            bound = bl.hoeffding_fair(n, eps).value
            if tail > Fraction(bound):
                violations += 1
            worst = min(worst, bound - float(tail))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 60
    _line(1, ok, f"violations={violations} worst_margin={worst:.3g} time={elapsed:.1f}s")
    assert violations == 0
    assert elapsed < 60


def test_criterion_2_measure_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8675309)
    mismatches = 0
    for _ in range(1000):
        cyls = {
            "".join("01"[b] for b in rng.integers(0, 2, rng.integers(0, 11)))
            for _ in range(rng.integers(0, 9))
        }
        s = bl.OpenSet.from_cylinders(cyls)
        if s.measure() != bl.brute_force_measure(s, 10):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    _line(2, ok, f"sets=1000 mismatches={mismatches} time={elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 60


def test_criterion_3_effective_null_cover():
    schedule_bad = 0
    for m in (3, 4, 8):
        sched = bl.cover_schedule(m, 10)
        for k, n_k in sched.entries:
            if bl.slln_tail_bound(m, n_k).value > 2.0**-k:
                schedule_bad += 1
    measure_bad = 0
    for k, n_k in bl.cover_schedule(4, 3).entries:
        measure = bl.slln_truncated_measure(4, n_k, n_k + 12)
        if not measure.leq_float(bl.slln_tail_bound(4, n_k).value):
            measure_bad += 1
    ok = schedule_bad == 0 and measure_bad == 0
    _line(3, ok, f"schedule_violations={schedule_bad} measure_violations={measure_bad}")
    assert schedule_bad == 0
    assert measure_bad == 0


def test_criterion_4_maximal_inequality_constant():
    violations = 0
    for n in range(1, 17):
        codes = np.arange(1 << n, dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)
        walk = 2 * np.cumsum(bits, axis=1, dtype=np.int32) - np.arange(
            1, n + 1, dtype=np.int32
        )
        running_max = walk.max(axis=1)
        end = walk[:, -1]
        for twice_x in range(0, n + 1):
            if int((running_max > twice_x).sum()) > 2 * int((end >= twice_x).sum()):
                violations += 1
    _line(4, violations == 0, f"n<=16 all half-integer x: violations={violations}")
    assert violations == 0


def test_criterion_5_deviation_asymptotic():
    t0 = time.perf_counter()
    rels = {}
    for x in (2, 3):
        exact = float(bl.exact_binomial_tail(10**4, x))
        asym = bl.deviation_asymptotic(x)
        rels[x] = abs(exact - asym) / asym
    elapsed = time.perf_counter() - t0
    ok = all(r <= 0.25 for r in rels.values()) and elapsed < 60
    _line(5, ok, f"rel_diff(x=2)={rels[2]:.3f} rel_diff(x=3)={rels[3]:.3f} "
                 f"time={elapsed:.1f}s")
    assert rels[2] <= 0.25
    assert rels[3] <= 0.25
    assert elapsed < 60


def test_criterion_6_slln_separation():
    n4 = bl.cover_schedule(8, 4).level(4)
    passes = sum(
        bl.slln_scan(bl.gen_prng(seed, 2**16), 8, n4).verdict == "pass"
        for seed in range(100)
    )
    adversarial_ok = True
    for suite in ("never-accepts", "pattern", "counter"):
        seq, trace = bl.gen_adversarial(bl.StagedConfig(stages=17, suite=suite))
        report = bl.slln_scan(seq, 8, 4)
        violations = set(report.violations)
        repairs = trace.repair_stages()
        density_ok = all(4 * r.ones_after >= 3 * r.length_after for r in repairs)
        ends = [r.length_after for r in repairs if r.length_after > 4]
        new_violation_per_stage = (
            len(ends) == len(set(ends)) and all(e in violations for e in ends)
        )
        if not (report.verdict == "fail" and density_ok and new_violation_per_stage):
            adversarial_ok = False
    ok = passes >= 95 and adversarial_ok
    _line(6, ok, f"prng_passes={passes}/100 adversarial_ok={adversarial_ok}")
    assert passes >= 95
    assert adversarial_ok


def test_criterion_7_normality():
    zeros = bits_from01("0" * 4096)
    zeros_ok = all(
        bl.normality_scan(zeros, 1, eps).violations
        for eps in (Fraction(1, 4), Fraction(1, 3), Fraction(2, 5), Fraction(499, 1000))
    )
    seq = bl.gen_champernowne(2**17)
    devs = {}
    for k in (1, 2, 3):
        worst = Fraction(0)
        rep = bl.normality_scan(seq, k, Fraction(1, 100))
        for (sigma, t), (occ, trials, _) in rep.table.items():
            dev = abs(Fraction(occ, trials) - Fraction(1, 1 << k))
            worst = max(worst, dev)
        devs[k] = float(worst)
    k23_ok = devs[2] <= 0.05 and devs[3] <= 0.05
    k1_ok = devs[1] <= 0.02
    ok = zeros_ok and k23_ok and k1_ok
    _line(7, ok, f"zeros_flagged={zeros_ok} dev_k1={devs[1]:.5f} (<=0.02: {k1_ok}) "
                 f"dev_k2={devs[2]:.5f} dev_k3={devs[3]:.5f} (<=0.05: {k23_ok})")
    assert zeros_ok
    assert k23_ok
    # Known-red clause: the binary numeral concatenation carries a
    # leading-one bias that decays only logarithmically; at 2**17 bits the
    # single-bit frequency sits 0.021 from 1/2, just outside this tolerance.
    assert k1_ok, f"champernowne k=1 deviation {devs[1]:.5f} exceeds 0.02"


def test_criterion_8_lil_monte_carlo():
    t0 = time.perf_counter()
    upper_hits = 0
    lower_hits = 0
    for seed in range(200):
        seq = bl.gen_prng(seed, 2**20)
        blocks = bl.lil_upper_scan(seq, 2, 2)
        if any(b.upper_cross for b in blocks if b.n_r >= 2**10):
            upper_hits += 1
        if bl.first_envelope_crossing(seq, Fraction(1, 2), 2**10) != -1:
            lower_hits += 1
    elapsed = time.perf_counter() - t0
    upper_frac = upper_hits / 200
    lower_frac = lower_hits / 200
    ok = upper_frac <= 0.10 and lower_frac >= 0.70 and elapsed < 300
    _line(8, ok, f"upper_frac={upper_frac:.3f} (<=0.10) "
                 f"lower_frac={lower_frac:.3f} (>=0.70) time={elapsed:.1f}s")
    assert upper_frac <= 0.10
    assert lower_frac >= 0.70
    assert elapsed < 300


def _run(args):
    proc = subprocess.run(
        [sys.executable, "-m", "bitlaws", *args], capture_output=True, text=True
    )
    return proc.returncode, proc.stdout


def test_criterion_9_round_trip_determinism(tmp_path):
    problems = []

    # generated bitstreams regenerate byte-identically
    gen_specs = [
        ["generate", "--kind", "prng", "--seed", "3", "--length", "2048"],
        ["generate", "--kind", "champernowne", "--length", "512"],
        ["generate", "--kind", "adversarial", "--stages", "13", "--suite", "pattern"],
    ]
    for i, spec in enumerate(gen_specs):
        f1 = tmp_path / f"g{i}a.bits"
        f2 = tmp_path / f"g{i}b.bits"
        _run(spec + ["--out", str(f1)])
        _run(spec + ["--out", str(f2)])
        if f1.read_bytes() != f2.read_bytes():
            problems.append(f"bitstream {spec}")
        # regenerate in place from the echoed command line
        _, out = _run(spec + ["--out", str(f1)])
        saved = f1.read_bytes()
        echoed = out.splitlines()[0]
        _run(echoed.removeprefix("command: ").split())
        if f1.read_bytes() != saved:
            problems.append(f"bitstream echo {spec}")

    # reports regenerate byte-identically from their echoed command
    bits = tmp_path / "g0a.bits"
    fam = tmp_path / "fam.txt"
    _run(["family", "build", "--m", "3", "--kmax", "2", "--depth", "18",
          "--out", str(fam)])
    report_specs = [
        ["analyze", "--in", str(bits), "--tests", "slln,normality,lil",
         "--m", "6", "--slln-start", "16", "--k", "2", "--eps", "0.05"],
        ["bound", "hoeffding", "--n", "100", "--eps", "0.1"],
        ["bound", "schedule", "--m", "3", "--kmax", "4"],
        ["bound", "maximal", "--n", "64", "--x", "3/2"],
        ["family", "check", str(fam)],
        ["family", "membership", str(fam), "--in", str(bits)],
    ]
    for spec in report_specs:
        code1, out1 = _run(spec)
        code2, out2 = _run(spec)
        if (code1, out1) != (code2, out2):
            problems.append(f"rerun {spec[0]}")
            continue
        echoed = out1.splitlines()[0]
        if not echoed.startswith("command: "):
            problems.append(f"no echo {spec[0]}")
            continue
        code3, out3 = _run(echoed.removeprefix("command: ").split())
        if (code1, out1) != (code3, out3):
            problems.append(f"echo-regenerate {spec[0]}")

    # family files round-trip bit-exactly
    family = load_family(fam)
    text1 = fam.read_text()
    if family_to_text(family) != text1:
        problems.append("family round-trip")

    _line(9, not problems, f"problems={problems if problems else 'none'}")
    assert not problems
