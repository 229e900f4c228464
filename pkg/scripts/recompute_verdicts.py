#!/usr/bin/env python3
"""Recompute every fit and verdict in a report.json from its raw samples
and compare with what the file claims.  Exit 0 on an exact match.

Verdict logic is pure (inputs + samples -> fits + verdicts), so a report
can be re-verified offline, long after the run, without re-solving.
"""

import argparse
import sys

from zakharov1d import load_report, recompute_verdicts

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("report", help="path to a report.json")
args = parser.parse_args()

result = recompute_verdicts(load_report(args.report))
if result["matches"]:
    print("report verifies: all fits and verdicts recomputed identically")
    sys.exit(0)
for item in result["mismatches"]:
    print(f"mismatch: {item}")
sys.exit(1)
