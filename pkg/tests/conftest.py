import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_RESULTS = []


def record_acceptance(num, name, passed, detail=""):
    """Collect one acceptance verdict for the end-of-run summary."""
    ACCEPTANCE_RESULTS.append((num, name, bool(passed), detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, passed, detail in sorted(ACCEPTANCE_RESULTS):
        line = f"ACCEPTANCE {num} [{name}]: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f"  -- {detail}"
        terminalreporter.write_line(line)
