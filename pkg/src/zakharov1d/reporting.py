"""Experiment reports and their on-disk forms.

A report bundles the echoed inputs, the raw norm samples, fitted exponents,
run flags, and named verdicts.  Everything that determines a verdict lives
in the samples, so verdicts can be recomputed offline from report.json
alone.  Wall-clock runtime goes to a sidecar file and never into the json
document, which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field


def sample_row(experiment, norm_name, value, N=None, t=None):
    """One long-format measurement row."""
    return {
        "experiment": str(experiment),
        "N": None if N is None else float(N),
        "t": None if t is None else float(t),
        "norm_name": str(norm_name),
        "value": float(value),
    }


@dataclass
class ExperimentReport:
    experiment: str
    inputs: dict
    samples: list
    fits: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    sub_reports: list = field(default_factory=list)
    runtime_seconds: float = 0.0

    def to_document(self):
        """Deterministic dict form; runtime is deliberately excluded."""
        return {
            "experiment": self.experiment,
            "inputs": self.inputs,
            "samples": self.samples,
            "fits": self.fits,
            "flags": self.flags,
            "verdicts": self.verdicts,
            "sub_reports": [sub.to_document() for sub in self.sub_reports],
        }

    def all_passed(self):
        ok = all(v["passed"] for v in self.verdicts.values())
        return ok and all(sub.all_passed() for sub in self.sub_reports)

    def all_samples(self):
        rows = list(self.samples)
        for sub in self.sub_reports:
            rows.extend(sub.all_samples())
        return rows

    def all_verdicts(self):
        """Verdicts of this report and sub-reports, prefixed by experiment."""
        out = {}
        for name, verdict in self.verdicts.items():
            out[f"{self.experiment}.{name}"] = verdict
        for sub in self.sub_reports:
            out.update(sub.all_verdicts())
        return out


def report_json_text(document):
    return json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n"


def samples_csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["experiment", "N", "t", "norm_name", "value"])
    for row in rows:
        writer.writerow(
            [
                row["experiment"],
                "" if row["N"] is None else repr(float(row["N"])),
                "" if row["t"] is None else repr(float(row["t"])),
                row["norm_name"],
                repr(float(row["value"])),
            ]
        )
    return buf.getvalue()


def verdicts_text(verdicts):
    lines = []
    for name in sorted(verdicts):
        verdict = verdicts[name]
        word = "PASS" if verdict["passed"] else "FAIL"
        lines.append(f"{name}: {word} - {verdict['detail']}")
    return "\n".join(lines) + "\n"


def write_report(report, out_dir):
    """Write report.json, samples.csv, verdicts.txt, and the timing sidecar."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "report": os.path.join(out_dir, "report.json"),
        "samples": os.path.join(out_dir, "samples.csv"),
        "verdicts": os.path.join(out_dir, "verdicts.txt"),
        "timing": os.path.join(out_dir, "timing.txt"),
    }
    with open(paths["report"], "w", encoding="utf-8") as fh:
        fh.write(report_json_text(report.to_document()))
    with open(paths["samples"], "w", encoding="utf-8") as fh:
        fh.write(samples_csv_text(report.all_samples()))
    with open(paths["verdicts"], "w", encoding="utf-8") as fh:
        fh.write(verdicts_text(report.all_verdicts()))
    with open(paths["timing"], "w", encoding="utf-8") as fh:
        fh.write(f"runtime_seconds: {report.runtime_seconds:.3f}\n")
    return paths


def load_report(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
