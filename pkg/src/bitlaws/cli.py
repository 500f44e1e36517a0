"""Command-line front end.

Exit codes: 0 = pass, 2 = usage/input error, 3 = statistical fail or
budget violation.  Reports are deterministic byte-for-byte for a given
command line and input files; every report opens with a ``command:`` echo
line that regenerates it.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds as bnd
from . import generators as gen
from . import solovay as sol
from . import stattests as st

_KNOWN_TESTS = ("slln", "normality", "lil")


def _fraction_arg(flag: str):
    def parse(text: str) -> Fraction:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(
                f"{flag} expects a rational like 3/4 or 0.75 (got {text!r})"
            )

    return parse


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitlaws",
        description="generate bit sequences, scan statistical laws, "
        "compute tail-bound certificates, and check test families",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_gen = sub.add_parser("generate", help="write a bitstream file")
    p_gen.add_argument(
        "--kind",
        required=True,
        choices=("prng", "biased", "champernowne", "adversarial"),
    )
    p_gen.add_argument("--length", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--p", type=_fraction_arg("--p"), default=None)
    p_gen.add_argument("--stages", type=int, default=16)
    p_gen.add_argument("--suite", choices=gen.PREDICATE_SUITES, default="never-accepts")
    p_gen.add_argument("--ext-limit", type=int, default=8)
    p_gen.add_argument("--step-budget", type=int, default=256)
    p_gen.add_argument("--out", default=None)
    p_gen.add_argument("--trace-out", default=None)

    p_an = sub.add_parser("analyze", help="run scanners over a bitstream")
    p_an.add_argument("--in", dest="in_path", required=True)
    p_an.add_argument("--tests", default="slln")
    p_an.add_argument("--m", type=int, default=8)
    p_an.add_argument("--slln-start", type=int, default=0)
    p_an.add_argument("--k", type=int, default=1)
    p_an.add_argument("--eps", type=_fraction_arg("--eps"), default=Fraction(1, 20))
    p_an.add_argument(
        "--lam-upper", type=_fraction_arg("--lam-upper"), default=Fraction(3, 2)
    )
    p_an.add_argument("--gamma", type=_fraction_arg("--gamma"), default=None)
    p_an.add_argument(
        "--lam-lower", type=_fraction_arg("--lam-lower"), default=Fraction(9, 10)
    )
    p_an.add_argument("--json", dest="json_path", default=None)

    p_bound = sub.add_parser("bound", help="print a tail-bound certificate")
    p_bound.add_argument(
        "name", choices=("hoeffding", "slln-tail", "schedule", "deviation", "maximal")
    )
    p_bound.add_argument("--n", type=int, default=None)
    p_bound.add_argument("--eps", type=_fraction_arg("--eps"), default=None)
    p_bound.add_argument("--width", type=_fraction_arg("--width"), default=None)
    p_bound.add_argument("--m", type=int, default=None)
    p_bound.add_argument("--N", type=int, default=None)
    p_bound.add_argument("--kmax", type=int, default=None)
    p_bound.add_argument("--x", type=_fraction_arg("--x"), default=None)
    p_bound.add_argument("--json", dest="json_path", default=None)

    p_fam = sub.add_parser("family", help="build/check test families")
    fam_sub = p_fam.add_subparsers(dest="action", required=True)
    f_build = fam_sub.add_parser("build")
    f_build.add_argument("--m", type=int, required=True)
    f_build.add_argument("--kmax", type=int, required=True)
    f_build.add_argument("--depth", type=int, required=True)
    f_build.add_argument("--out", required=True)
    f_check = fam_sub.add_parser("check")
    f_check.add_argument("family_path")
    f_check.add_argument("--depth", type=int, default=None)
    f_check.add_argument("--json", dest="json_path", default=None)
    f_member = fam_sub.add_parser("membership")
    f_member.add_argument("family_path")
    f_member.add_argument("--in", dest="in_path", required=True)
    f_member.add_argument("--json", dest="json_path", default=None)

    return parser


def _json_default(obj):
    return str(obj)


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, default=_json_default) + "\n",
        encoding="ascii",
    )


def _cmd_generate(args) -> int:
    if args.length is None and args.kind != "adversarial":
        print("error: --length is required for this --kind", file=sys.stderr)
        return 2
    if args.kind == "prng":
        seq = gen.gen_prng(args.seed, args.length)
        echo = f"generate --kind prng --seed {args.seed} --length {args.length}"
        trace = None
    elif args.kind == "biased":
        if args.p is None:
            print("error: --p is required for --kind biased", file=sys.stderr)
            return 2
        seq = gen.gen_biased(args.p, args.seed, args.length)
        echo = (
            f"generate --kind biased --p {args.p} --seed {args.seed} "
            f"--length {args.length}"
        )
        trace = None
    elif args.kind == "champernowne":
        seq = gen.gen_champernowne(args.length)
        echo = f"generate --kind champernowne --length {args.length}"
        trace = None
    else:
        cfg = gen.StagedConfig(
            stages=args.stages,
            suite=args.suite,
            extension_limit=args.ext_limit,
            step_budget=args.step_budget,
        )
        seq, trace = gen.gen_adversarial(cfg)
        echo = (
            f"generate --kind adversarial --stages {args.stages} "
            f"--suite {args.suite} --ext-limit {args.ext_limit} "
            f"--step-budget {args.step_budget}"
        )
    if args.out:
        gen.write_bits(args.out, seq)
        print(f"command: {echo} --out {args.out}")
        print(f"wrote: {args.out} bits={len(seq)} provenance={seq.provenance}")
    else:
        print(f"command: {echo}", file=sys.stderr)
        print(f"provenance: {seq.provenance} bits={len(seq)}", file=sys.stderr)
        chars = seq.to01()
        for i in range(0, len(chars), 64):
            print(chars[i : i + 64])
    if trace is not None and args.trace_out:
        Path(args.trace_out).write_text(
            "\n".join(trace.to_lines()) + "\n", encoding="ascii"
        )
    return 0


def _summary_ints(values, limit=8) -> str:
    shown = ",".join(str(v) for v in values[:limit])
    if len(values) > limit:
        shown += ",..."
    return shown or "-"


def _cmd_analyze(args) -> int:
    tests = tuple(t.strip() for t in args.tests.split(",") if t.strip())
    for t in tests:
        if t not in _KNOWN_TESTS:
            print(f"error: unknown test {t!r} for --tests", file=sys.stderr)
            return 2
    if not tests:
        print("error: --tests is empty", file=sys.stderr)
        return 2
    try:
        seq = gen.load_bits(args.in_path)
    except FileNotFoundError:
        print(f"error: no such input file {args.in_path}", file=sys.stderr)
        return 2
    except gen.BitstreamFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    gamma = args.gamma if args.gamma is not None else min(Fraction(2), args.lam_upper)
    echo = (
        f"analyze --in {args.in_path} --tests {','.join(tests)} --m {args.m} "
        f"--slln-start {args.slln_start} --k {args.k} --eps {args.eps} "
        f"--lam-upper {args.lam_upper} --gamma {gamma} --lam-lower {args.lam_lower}"
    )
    lines = [f"command: {echo}", f"input: {args.in_path} bits={len(seq)}"]
    payload: dict = {"command": echo, "input": {"path": args.in_path, "bits": len(seq)}}
    failed = False
    try:
        if "slln" in tests:
            rep = st.slln_scan(seq, args.m, args.slln_start)
            failed |= rep.verdict == "fail"
            lines.append(
                f"slln: m={rep.m} start={rep.start} "
                f"violations={len(rep.violations)} "
                f"at={_summary_ints(rep.violations)} verdict={rep.verdict}"
            )
            payload["slln"] = {
                "m": rep.m,
                "start": rep.start,
                "violations": list(rep.violations),
                "verdict": rep.verdict,
            }
        if "normality" in tests:
            rep = st.normality_scan(seq, args.k, args.eps)
            failed |= rep.verdict == "fail"
            lines.append(
                f"normality: k={rep.k} eps={rep.eps} flagged={len(rep.violations)} "
                f"budget={rep.budget!r} verdict={rep.verdict}"
            )
            payload["normality"] = {
                "k": rep.k,
                "eps": str(rep.eps),
                "flagged": [[s, t] for s, t in rep.violations],
                "budget": rep.budget,
                "verdict": rep.verdict,
            }
        if "lil" in tests:
            blocks = st.lil_upper_scan(seq, args.lam_upper, gamma)
            crossings = [b.r for b in blocks if b.upper_cross]
            lines.append(
                f"lil-upper: lambda={args.lam_upper} gamma={gamma} "
                f"blocks={len(blocks)} crossings={len(crossings)} "
                f"at={_summary_ints(crossings)} (advisory)"
            )
            payload["lil_upper"] = {
                "lambda": str(args.lam_upper),
                "gamma": str(gamma),
                "blocks": len(blocks),
                "crossings": crossings,
            }
            params = st.lil_lower_params(args.lam_lower)
            if len(seq) >= params.gamma**2:
                blocks = st.lil_lower_scan(seq, params)
                events = [b.r for b in blocks if b.lower_event]
                finals = [b.r for b in blocks if b.final_cross]
                lines.append(
                    f"lil-lower: lambda={params.lam} eta={params.eta} "
                    f"gamma={params.gamma} blocks={len(blocks)} "
                    f"events={len(events)} final={len(finals)} (advisory)"
                )
                payload["lil_lower"] = {
                    "lambda": str(params.lam),
                    "eta": str(params.eta),
                    "gamma": str(params.gamma),
                    "events": events,
                    "final_crossings": finals,
                }
            else:
                lines.append(
                    f"lil-lower: skipped (needs gamma^2 = {params.gamma ** 2} bits, "
                    f"input has {len(seq)})"
                )
                payload["lil_lower"] = {"skipped": params.gamma**2}
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    code = 3 if failed else 0
    lines.append(f"exit: {code}")
    payload["exit"] = code
    print("\n".join(lines))
    if args.json_path:
        _write_json(args.json_path, payload)
    return code


def _cmd_bound(args) -> int:
    def need(flag_value, flag_name):
        if flag_value is None:
            print(
                f"error: {flag_name} is required for bound {args.name}",
                file=sys.stderr,
            )
            raise SystemExit(2)
        return flag_value

    try:
        if args.name == "hoeffding":
            n = need(args.n, "--n")
            eps = need(args.eps, "--eps")
            if args.width is None:
                tb = bnd.hoeffding_fair(n, eps)
                echo = f"bound hoeffding --n {n} --eps {eps}"
            else:
                tb = bnd.hoeffding_general(n, eps, args.width)
                echo = f"bound hoeffding --n {n} --eps {eps} --width {args.width}"
            lines = [f"command: {echo}", f"certificate: {tb.describe()}"]
            payload = {"command": echo, "certificate": _bound_payload(tb)}
        elif args.name == "slln-tail":
            m = need(args.m, "--m")
            nn = need(args.N, "--N")
            tb = bnd.slln_tail_bound(m, nn)
            echo = f"bound slln-tail --m {m} --N {nn}"
            lines = [f"command: {echo}", f"certificate: {tb.describe()}"]
            payload = {"command": echo, "certificate": _bound_payload(tb)}
        elif args.name == "schedule":
            m = need(args.m, "--m")
            kmax = need(args.kmax, "--kmax")
            sched = bnd.cover_schedule(m, kmax)
            echo = f"bound schedule --m {m} --kmax {kmax}"
            lines = [f"command: {echo}"]
            lines += [f"schedule: m={m} k={k} N={n}" for k, n in sched.entries]
            payload = {
                "command": echo,
                "schedule": {"m": m, "entries": [[k, n] for k, n in sched.entries]},
            }
        elif args.name == "deviation":
            x = need(args.x, "--x")
            value = bnd.deviation_asymptotic(float(x))
            echo = f"bound deviation --x {x}"
            lines = [
                f"command: {echo}",
                f"certificate: deviation-asymptotic value={value!r} x={float(x)!r}",
            ]
            payload = {
                "command": echo,
                "certificate": {
                    "formula": "deviation-asymptotic",
                    "value": value,
                    "x": float(x),
                },
            }
        else:  # maximal
            n = need(args.n, "--n")
            x = need(args.x, "--x")
            tb = bnd.maximal_tail_bound(n, x)
            echo = f"bound maximal --n {n} --x {x}"
            lines = [f"command: {echo}", f"certificate: {tb.describe()}"]
            payload = {"command": echo, "certificate": _bound_payload(tb)}
    except SystemExit as exc:
        return int(exc.code)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("\n".join(lines))
    if args.json_path:
        _write_json(args.json_path, payload)
    return 0


def _bound_payload(tb: bnd.TailBound) -> dict:
    return {
        "formula": tb.formula_id,
        "value": tb.value,
        "parameters": {k: v if isinstance(v, (int, float)) else str(v)
                       for k, v in tb.parameters.items()},
    }


def _cmd_family(args) -> int:
    if args.action == "build":
        try:
            family = sol.build_slln_family(args.m, args.kmax, args.depth)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        sol.save_family(family, args.out)
        echo = (
            f"family build --m {args.m} --kmax {args.kmax} "
            f"--depth {args.depth} --out {args.out}"
        )
        print(f"command: {echo}")
        print(
            f"wrote: {args.out} name={family.name} indices={len(family.sets)} "
            f"depth={family.depth} certified_total={family.certified_total!r}"
        )
        return 0
    if args.action == "check":
        try:
            family = sol.load_family(args.family_path)
            report = sol.family_budget_check(family, args.depth)
        except FileNotFoundError:
            print(f"error: no such family file {args.family_path}", file=sys.stderr)
            return 2
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        echo = f"family check {args.family_path}" + (
            f" --depth {args.depth}" if args.depth is not None else ""
        )
        lines = [f"command: {echo}", f"family: {report.family} depth={report.depth}"]
        for idx, measure, budget, ok in report.entries:
            lines.append(
                f"index: {idx} measure={measure} budget={budget!r} "
                f"{'ok' if ok else 'VIOLATED'}"
            )
        lines.append(
            f"verdict: {'pass' if report.passed else 'fail'} "
            f"failures={_summary_ints(report.failures)}"
        )
        print("\n".join(lines))
        if args.json_path:
            _write_json(
                args.json_path,
                {
                    "command": echo,
                    "family": report.family,
                    "depth": report.depth,
                    "entries": [
                        {"index": i, "measure": str(m), "budget": b, "ok": ok}
                        for i, m, b, ok in report.entries
                    ],
                    "passed": report.passed,
                },
            )
        return 0 if report.passed else 3
    # membership
    try:
        family = sol.load_family(args.family_path)
        seq = gen.load_bits(args.in_path)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, gen.BitstreamFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    profile = sol.membership_profile(seq, family)
    verdict = sol.borel_cantelli_verdict(profile, family)
    echo = f"family membership {args.family_path} --in {args.in_path}"
    lines = [
        f"command: {echo}",
        f"family: {family.name} declaration={family.declaration}",
        f"certified-in: {_summary_ints(profile.indices)} "
        f"undetermined: {_summary_ints(profile.undetermined)}",
        f"verdict: {verdict.verdict} hits={verdict.hits} "
        f"expected_bound={verdict.expected_bound!r}",
    ]
    print("\n".join(lines))
    if args.json_path:
        _write_json(
            args.json_path,
            {
                "command": echo,
                "family": family.name,
                "certified_in": list(profile.indices),
                "undetermined": list(profile.undetermined),
                "verdict": verdict.verdict,
                "hits": verdict.hits,
                "expected_bound": verdict.expected_bound,
            },
        )
    return 3 if verdict.verdict == "suspicious" else 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.cmd == "generate":
        try:
            return _cmd_generate(args)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    if args.cmd == "analyze":
        return _cmd_analyze(args)
    if args.cmd == "bound":
        return _cmd_bound(args)
    return _cmd_family(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
