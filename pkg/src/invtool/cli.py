"""The invtool command line.

    invtool run <scenario.json> [--jobs N] [--truncation D]
                [--out DIR] [--format text|json|csv]
    invtool list-scenarios

run accepts a path or the bare name of a bundled scenario. Reports go
to stdout (or into --out DIR as <name>.<ext>); timings go to stderr so
report bytes never depend on the clock. Exit status: 0 when every task
came out as its scenario declared, 2 when the only departures were
hypothesis failures, 1 for errors and failed verifications.
"""

import argparse
import os
import sys

from . import csp as cs
from . import groth as gt
from . import groups as gr
from . import homology as ho
from . import report as rp
from . import scenario as sn
from . import series as se
from .numbers import NumbersError

_EXTENSIONS = {"text": "txt", "json": "json", "csv": "csv"}

# anything raised by the engines on bad input or internal disagreement;
# unexpected exception types are bugs and are left to crash loudly
_ENGINE_ERRORS = (sn.ScenarioError, gt.GrothError, cs.CspError,
                  ho.HomologyError, se.SeriesError, gr.GroupError,
                  NumbersError, rp.ReportError)


def _resolve(path):
    if os.path.exists(path):
        return path
    name = path[:-5] if path.endswith(".json") else path
    for bname, bpath, _desc in sn.bundled_scenarios():
        if bname == name:
            return bpath
    return path  # let load_scenario produce the file-not-found message


def _cmd_run(args):
    try:
        sc = sn.load_scenario(_resolve(args.scenario))
        bundle = sn.run_scenario(sc, truncation=args.truncation,
                                 jobs=args.jobs)
        data = rp.emit_report(bundle, args.format)
    except _ENGINE_ERRORS as e:
        print(f"invtool: error: {e}", file=sys.stderr)
        return 1
    for outcome, dt in zip(bundle["outcomes"], bundle["timings_s"]):
        print(f"# task {outcome['index']} ({outcome['task']}): {dt:.2f}s",
              file=sys.stderr)
    print(f"# total: {sum(bundle['timings_s']):.2f}s", file=sys.stderr)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        fname = f"{bundle['scenario']}.{_EXTENSIONS[args.format]}"
        target = os.path.join(args.out, fname)
        with open(target, "wb") as fh:
            fh.write(data)
        print(f"# report written to {target}", file=sys.stderr)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    return bundle["exit_code"]


def _cmd_list(_args):
    rows = sn.bundled_scenarios()
    if not rows:
        print("no bundled scenarios")
        return 0
    width = max(len(name) for name, _, _ in rows)
    for name, _path, desc in rows:
        print(f"{name.ljust(width)}  {desc}")
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="invtool",
        description="scenario-driven checks for invariant rings, graded "
                    "resolutions, sieving, and character values")
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one scenario file")
    runp.add_argument("scenario",
                      help="path to a scenario .json, or a bundled name")
    runp.add_argument("--jobs", type=int, default=1,
                      help="parallelism hint for task internals")
    runp.add_argument("--truncation", type=int, default=None,
                      help="override the scenario's working degree")
    runp.add_argument("--out", default=None, metavar="DIR",
                      help="write the report into DIR instead of stdout")
    runp.add_argument("--format", choices=sorted(_EXTENSIONS),
                      default="text")
    runp.set_defaults(fn=_cmd_run)

    lsp = sub.add_parser("list-scenarios", help="list bundled scenarios")
    lsp.set_defaults(fn=_cmd_list)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
