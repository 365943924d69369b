"""ypl command line: verify, simulate, report."""

import argparse
import os
import sys
import time

import numpy as np

from . import dynamics, report
from .algebra import ResidualReport, domain_points
from .brackets import bracket_field
from .config import parse_config
from .errors import ConfigError, YPLError
from .realizations import generalized_generators, profile_preset, yang_special
from .suites import RUNNERS, SUITES

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def run_suite(name, cfg, csv_prefix=None, log=None):
    """Run one named suite (or ``all``); returns (exit code, reports)."""
    names = SUITES if name == "all" else (name,)
    reports = []
    for s in names:
        if s not in RUNNERS:
            raise ConfigError("suite", f"unknown suite {s!r}")
        t0 = time.perf_counter()
        got = RUNNERS[s](cfg, csv_prefix) if s == "pde" else RUNNERS[s](cfg)
        if log:
            bad = sum(not r.passed for r in got)
            log(f"[{s}] {len(got)} reports, {bad} failed, {time.perf_counter() - t0:.1f}s")
        reports += got
    code = EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL
    return code, reports


def generator_sets(cfg):
    base = yang_special(cfg.params, profile_preset(cfg.profile, cfg.params.sigma))
    return {"yang": base, "gen": generalized_generators(cfg.params, cfg.gen_params, base)}


def bracket_report(cfg, a, b):
    """Sampled magnitude of {a, b} for two generator ids such as yang.xhat.0 or gen.htilde."""
    sets = generator_sets(cfg)
    try:
        fa, fb = (sets[i.split(".")[0]][i] for i in (a, b))
    except KeyError as err:
        raise ConfigError("bracket", f"unknown generator set in {err}") from None
    gs = sets[a.split(".")[0]]
    br = bracket_field(fa, fb)
    pts, rej = domain_points(gs, [br], cfg.sample)
    v = np.abs(br.values(pts))
    return ResidualReport(model="bracket", case=cfg.case, relation=f"{{{a}, {b}}}",
                          samples=len(pts), max_abs=float(v.max()), mean_abs=float(v.mean()),
                          tol=float("inf"), passed=True, rejects=rej)


def _overrides(args):
    model = {"case": args.case, "alpha": args.alpha, "beta": args.beta}
    sample = {"count": getattr(args, "samples", None), "seed": getattr(args, "seed", None)}
    out = {"model": model, "sample": sample}
    if getattr(args, "tol", None) is not None:
        t = args.tol
        out["tol"] = {k: t for k in ("algebra", "generalized", "jacobi", "pde", "flows")}
    out["flows"] = {"angle": getattr(args, "angle", None)}
    out["dynamics"] = {"omega": getattr(args, "omega", None),
                       "amplitudes": getattr(args, "amplitudes", None)}
    gen = {}
    if getattr(args, "printed", False):
        gen["printed_variants"] = True
    if getattr(args, "spatial_born", False):
        gen["born_spatial_only"] = True
    out["gen"] = gen
    out["output"] = {"out": args.out, "format": args.fmt}
    return out


def _common(p):
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--case", choices=("pp", "mm", "pm", "mp"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--out", metavar="PATH")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")


def build_parser():
    ap = argparse.ArgumentParser(prog="ypl", description="Yang-Poisson numeric workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run residual suites")
    _common(v)
    v.add_argument("--suite", default="all", choices=(*SUITES, "all"))
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", type=float, help="override every suite tolerance")
    v.add_argument("--angle", type=float)
    v.add_argument("--omega", type=float)
    v.add_argument("--amplitudes")
    v.add_argument("--printed", action="store_true",
                   help="also test the as-printed variants of the corrected formulas")
    v.add_argument("--spatial-born", action="store_true",
                   help="Born duality on spatial components only")
    v.add_argument("--bracket", nargs=2, metavar="ID",
                   help="sample one bracket between two generator ids instead of a suite")
    v.add_argument("--quiet", action="store_true")

    s = sub.add_parser("simulate", help="period-energy scan of the deformed oscillator")
    _common(s)
    s.add_argument("--omega", type=float)
    s.add_argument("--amplitudes")
    s.add_argument("--all-cases", action="store_true", help="scan all four sign cases")

    r = sub.add_parser("report", help="summarize a saved JSON report")
    r.add_argument("path")
    r.add_argument("--out", metavar="PATH", help="write a CSV table")
    r.add_argument("--collapse", action="store_true", help="group per-component rows")
    return ap


def _verify(args, cfg):
    say = (lambda m: None) if args.quiet else (lambda m: print(m, flush=True))
    if args.bracket:
        reports = [bracket_report(cfg, *args.bracket)]
        code = EXIT_PASS
    else:
        prefix = None
        if cfg.fmt == "csv" and cfg.out:
            prefix = os.path.splitext(cfg.out)[0] + "-grid"
        code, reports = run_suite(args.suite, cfg, prefix, log=say)
    doc = report.build(f"verify --suite {args.suite}", cfg.to_dict(), reports)
    if cfg.out:
        if cfg.fmt == "csv":
            report.write_csv(cfg.out, doc["reports"])
        else:
            report.write(cfg.out, doc)
    lines = report.summary_lines(doc["reports"])
    failed = [ln for ln in lines if ln.startswith("FAIL")]
    for ln in (failed if not args.quiet else failed[:20]):
        print(ln)
    if not args.quiet and not failed:
        for ln in lines[:10]:
            print(ln)
        if len(lines) > 10:
            print(f"... {len(lines) - 10} more")
    s = doc["summary"]
    print(f"{'PASS' if s['pass'] else 'FAIL'}: {s['total'] - s['failed']}/{s['total']} reports")
    return code


def _simulate(args, cfg):
    cases = ("pp", "mm", "pm", "mp") if args.all_cases else (cfg.case,)
    rows = dynamics.period_energy_scan(cfg.amplitudes, cfg.omega, cfg.alpha, cfg.beta, cases, cfg.n)
    for r in rows:
        note = f"  ({r['error']})" if r["error"] else ""
        print(f"{r['case']}  A={r['amplitude']:<6g} E={r['energy']:.10g}  "
              f"T={r['period']:.12g} +- {r['period_err']:.1e}{note}")
    for case in cases:
        d = dynamics.trend([r for r in rows if r["case"] == case])
        print(f"{case}: period {'increases' if d > 0 else 'decreases' if d < 0 else 'is not monotone'}"
              " with energy")
    if cfg.out:
        if cfg.fmt == "json":
            doc = {"schema": report.SCHEMA, "command": "simulate", "config": cfg.to_dict(),
                   "rows": rows}
            with open(cfg.out, "w") as fh:
                fh.write(report.dumps(doc))
        else:
            dynamics.write_scan_csv(cfg.out, rows)
    return EXIT_FAIL if any(r["error"] for r in rows) else EXIT_PASS


def _report(args):
    doc = report.load(args.path)
    rows = doc.get("reports", [])
    if args.collapse:
        for (model, case, label), g in sorted(report.collapse(rows).items()):
            mark = "FAIL" if g["failed"] else "PASS"
            print(f"{mark}  {model:<14} {case:<3} {label:<40} n={g['count']} max={g['max_abs']:.3e}")
    else:
        for ln in report.summary_lines(rows):
            print(ln)
    if args.out:
        report.write_csv(args.out, rows)
    s = doc.get("summary", {})
    print(f"{doc.get('command', '?')}: {s.get('total', len(rows)) - s.get('failed', 0)}"
          f"/{s.get('total', len(rows))} passed")
    return EXIT_PASS if s.get("pass", True) else EXIT_FAIL


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return _report(args)
        if args.command == "simulate" and args.fmt is None:
            args.fmt = "csv"
        cfg = parse_config(args.config, _overrides(args))
        if args.command == "verify":
            return _verify(args, cfg)
        return _simulate(args, cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (YPLError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
