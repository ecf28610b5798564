"""Command line entry point: ``petzlab run | replay | suites``.

Exit codes: 0 when every check passed, 1 on any violation, 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import harness

log = logging.getLogger("petzlab")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _parse_tols(items, suites) -> dict:
    """``--tol X`` applies to every selected suite, ``--tol SUITE=X`` to one."""
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if sep:
            out[name] = float(val)
        else:
            out.update({s: float(item) for s in suites})
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="petzlab", description="Randomized checks of recoverability inequalities.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a campaign and write CSV, summary, failures and figures")
    r.add_argument("--config", help="JSON or YAML campaign file; command line flags override it")
    r.add_argument("--suite", "--suites", dest="suites", help="comma separated suite names (default: all)")
    r.add_argument("--dim", "--dims", dest="dims", help="comma separated dimensions, cycled over trials")
    r.add_argument("--trials", type=int, help="trials per suite (default: per-suite counts)")
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out", help="CSV path")
    r.add_argument("--failures", help="failure sidecar path (default: next to the CSV)")
    r.add_argument("--tol", action="append", metavar="[SUITE=]X",
                   help="tolerance override for all selected suites, or for one with SUITE=X")
    r.add_argument("--no-plots", action="store_true")

    rp = sub.add_parser("replay", help="re-run the records of a failure sidecar")
    rp.add_argument("failures")
    rp.add_argument("--index", type=int, help="replay only this record")

    sub.add_parser("suites", help="list suites with their default tolerances and trial counts")
    return p


def _config_from_args(args) -> harness.CampaignConfig:
    data = {}
    if args.config:
        data = harness.config_dict(harness.load_config(args.config))
    if args.suites:
        data["suites"] = args.suites
    if args.dims:
        data["dims"] = [int(d) for d in args.dims.split(",") if d]
    for key in ("trials", "seed", "workers", "out", "failures"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.tol:
        suites = data.get("suites") or list(harness.SUITES)
        if isinstance(suites, str):
            suites = [s for s in suites.split(",") if s]
        data["tolerances"] = {**data.get("tolerances", {}), **_parse_tols(args.tol, suites)}
    if args.no_plots:
        data["plots"] = False
    return harness.CampaignConfig.from_mapping(data)


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    t0 = time.perf_counter()
    outcome = harness.run_campaign(cfg)
    dt = time.perf_counter() - t0
    for suite, s in outcome.summary.items():
        print(f"{suite:26s} {s['passed']:5d}/{s['trials']:<5d} worst gap {s['worst_gap']:+.3e}"
              f"  vacuous {s['vacuous']}")
    print(f"wrote {outcome.csv_path} ({len(outcome.results)} rows, {dt:.1f} s)")
    if outcome.failures_path:
        print(f"failures: {outcome.failures_path}")
    for fig in outcome.figures:
        log.info("figure %s", fig)
    return outcome.exit_code


def _cmd_replay(args) -> int:
    with open(args.failures) as fh:
        records = json.load(fh)
    if args.index is not None:
        if not 0 <= args.index < len(records):
            raise ValueError(f"index {args.index} out of range (0..{len(records) - 1})")
        records = [records[args.index]]
    code = EXIT_OK
    for rec in records:
        res = harness.replay(rec)
        rep = res.report
        status = "pass" if rep.passed else "FAIL"
        print(f"{res.instance_ref}  gap {rep.gap!r}  recorded {rec.get('gap')!r}  {status}")
        if not rep.passed:
            code = EXIT_VIOLATION
    return code


def _cmd_suites(args) -> int:
    for name, s in harness.SUITES.items():
        print(f"{name:26s} tol {s.tol:<8g} trials {s.trials:<5d} max dim {s.max_dim:<3d} {s.description}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handlers = {"run": _cmd_run, "replay": _cmd_replay, "suites": _cmd_suites}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"petzlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
