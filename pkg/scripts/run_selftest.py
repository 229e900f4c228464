#!/usr/bin/env python3
"""Small deterministic run of every experiment (~10 seconds).

The report excludes wall-clock data, so repeated runs write byte-identical
report.json files; timing goes to the timing.txt sidecar.
"""

import argparse

from zakharov1d import run_selftest, verdicts_text, write_report

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--out", default="results/selftest")
parser.add_argument("--jobs", type=int, default=1)
args = parser.parse_args()

report = run_selftest(jobs=args.jobs)
paths = write_report(report, args.out)
print(verdicts_text(report.all_verdicts()), end="")
print(f"report: {paths['report']}")
raise SystemExit(0 if report.all_passed() else 2)
