"""Command-line front end.

Exit codes: 0 pass, 1 fail (or unknown), 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .core import ContractError, parse_element
from .report import PASS, emit_report, encode_report
from .spectral import continuous_fc, borel_fc, parse_function

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_REPORT_MODELS = ("matrix:4", "spin:2:3", "spin:3:2")


def _read_elements(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    els = [parse_element(ln) for ln in lines if ln and not ln.startswith("#")]
    if not els:
        raise ContractError(f"no elements in {path}")
    return els


def _finish(report, args):
    text = encode_report(report, include_timing=getattr(args, "timing", False))
    if getattr(args, "out", None):
        emit_report(report, args.out, include_timing=getattr(args, "timing", False))
    else:
        sys.stdout.write(text)
    if report.wall_time is not None:
        print(f"# {report.suite} on {report.model}: {report.verdict} in {report.wall_time:.2f}s",
              file=sys.stderr)
    return EXIT_PASS if report.verdict == PASS else EXIT_FAIL


def cmd_verify(args):
    cfg = harness.SuiteConfig(model=args.model, seed=args.seed, trials=args.trials,
                              suites=tuple(args.suite or ("all",)))
    return _finish(harness.run_suite(cfg), args)


def cmd_counterexample(args):
    cfg = harness.SuiteConfig(model=args.model, seed=args.seed, trials=args.trials)
    return _finish(harness.find_counterexample(cfg, args.target, args.threshold), args)


def cmd_spectrum(args):
    code = EXIT_PASS
    for a in _read_elements(args.infile):
        rep = harness.spectrum_report(a)
        sys.stdout.write(encode_report(rep))
        if rep.verdict != PASS:
            code = EXIT_FAIL
    return code


def cmd_calculus(args):
    g = parse_function(args.fn)
    apply = continuous_fc if g.continuous else borel_fc
    for a in _read_elements(args.infile):
        print(apply(a, g))
    return EXIT_PASS


def cmd_report(args):
    from .report import VerificationReport

    models = args.model or list(DEFAULT_REPORT_MODELS)
    combined = VerificationReport(suite="report", model=",".join(models), seed=args.seed,
                                  trials=args.trials,
                                  config={"models": models, "seed": args.seed, "trials": args.trials})
    total = 0.0
    for m in models:
        cfg = harness.SuiteConfig(model=m, seed=args.seed, trials=args.trials)
        sub = harness.run_suite(cfg)
        total += sub.wall_time or 0.0
        combined.merge(sub, m)
    combined.wall_time = total
    return _finish(combined, args)


def cmd_generate(args):
    cfg = harness.SuiteConfig(model=args.model, seed=args.seed, trials=args.trials)
    for t, a, e, p in harness.gen_random(cfg):
        print(f"# trial {t}")
        print(a)
        print(e)
        print(p.element)
    return EXIT_PASS


def build_parser():
    ap = argparse.ArgumentParser(prog="spectral-ous", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, trials):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="include wall time in the report")

    v = sub.add_parser("verify", help="run invariant suites on one model")
    v.add_argument("--model", required=True, help="matrix:N or spin:P:N")
    v.add_argument("--suite", action="append", choices=sorted(harness.SUITES) + ["all"])
    common(v, 100)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counterexample", help="search for JB-condition violations in a spin factor")
    c.add_argument("--model", required=True, help="spin:P:N")
    c.add_argument("--target", required=True, choices=harness.TARGETS)
    c.add_argument("--threshold", type=float, default=harness.COUNTEREXAMPLE_THRESHOLD)
    common(c, 100)
    c.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("spectrum", help="spectral resolution of the elements in a file")
    s.add_argument("--in", dest="infile", required=True)
    s.set_defaults(func=cmd_spectrum)

    k = sub.add_parser("calculus", help="apply a function to the elements in a file")
    k.add_argument("--in", dest="infile", required=True)
    k.add_argument("--fn", required=True, help="poly c0 .. ck | pos | abs | chi u v | root n")
    k.set_defaults(func=cmd_calculus)

    r = sub.add_parser("report", help="run all suites on several models and write one report")
    r.add_argument("--model", action="append", help=f"repeatable; default {', '.join(DEFAULT_REPORT_MODELS)}")
    common(r, 50)
    r.set_defaults(func=cmd_report)

    g = sub.add_parser("generate", help="print the seeded instance stream")
    g.add_argument("--model", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trials", type=int, default=3)
    g.set_defaults(func=cmd_generate)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (harness.UsageError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
