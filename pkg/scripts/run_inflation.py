#!/usr/bin/env python3
"""Wave norm inflation sweep: density growth exponent across the box
frequency N, with the first-iterate oracle and linear-proximity checks.

The default run (N up to 64, full nonlinear solves) takes ~9 minutes;
--quick drops to the reduced sweep used by selftest (~4 seconds).
"""

import argparse

from zakharov1d import InflationSchedule, run_inflation, verdicts_text, write_report

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--k", type=float, default=0.25)
parser.add_argument("--s", type=float, default=0.25)
parser.add_argument("--quick", action="store_true",
                    help="reduced N list and coarse dt (selftest size)")
parser.add_argument("--out", default="results/inflation")
parser.add_argument("--jobs", type=int, default=1)
args = parser.parse_args()

if args.quick:
    schedule = InflationSchedule(k=args.k, s=args.s, n_list=(12, 16, 24))
    report = run_inflation(schedule, dt=3.125e-3, fiber_nodes=65, jobs=args.jobs)
else:
    schedule = InflationSchedule(k=args.k, s=args.s)
    report = run_inflation(schedule, jobs=args.jobs)

paths = write_report(report, args.out)
print(verdicts_text(report.all_verdicts()), end="")
print(f"expected alpha {schedule.expected_alpha:.4f}; report: {paths['report']}")
raise SystemExit(0 if report.all_passed() else 2)
