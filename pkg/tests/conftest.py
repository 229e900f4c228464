import sys
from pathlib import Path

# Make oracle_helpers importable from every test module.
sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" in nodeid and "::" in nodeid:
                rows[nodeid.split("::")[-1]] = outcome
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(rows):
        word = "PASS" if rows[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{name}: {word}")
