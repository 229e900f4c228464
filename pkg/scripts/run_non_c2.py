#!/usr/bin/env python3
"""Second-derivative growth: the size of the second Gateaux derivative of
the data-to-solution map grows like a power of the frequency parameter N,
so the map is not twice differentiable at the origin.

Runs both regularity pairs used in the acceptance suite (~2.5 minutes) or
a single pair via --k/--s.
"""

import argparse

from zakharov1d import run_non_c2, verdicts_text, write_report

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--k", type=float, default=None)
parser.add_argument("--s", type=float, default=None)
parser.add_argument("--variant", default="below_strip",
                    choices=("below_strip", "above_strip"))
parser.add_argument("--out", default="results/non-c2")
parser.add_argument("--jobs", type=int, default=1)
args = parser.parse_args()

pairs = [(args.k, args.s)] if args.s is not None else [(0.0, -1.0), (0.0, -2.0)]
worst = 0
for k, s in pairs:
    report = run_non_c2(k=k or 0.0, s=s, variant=args.variant,
                        n_list=(16, 32, 64), t=0.4, refine=2, num_nodes=257,
                        jobs=args.jobs)
    out_dir = args.out if len(pairs) == 1 else f"{args.out}-s{s:g}"
    paths = write_report(report, out_dir)
    print(verdicts_text(report.all_verdicts()), end="")
    print(f"(k={k or 0.0:g}, s={s:g}) report: {paths['report']}")
    worst = max(worst, 0 if report.all_passed() else 2)
raise SystemExit(worst)
