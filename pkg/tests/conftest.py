import sys
import threading
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import colloc_hlta.hlta as hlta  # noqa: E402

EM_SLACK = 1e-9


class EmMonitor:
    """Checks every EM trace produced anywhere in the test session."""

    def __init__(self):
        self.lock = threading.Lock()
        self.runs = 0
        self.worst_step = 0.0
        self.violations = 0

    def wrap(self, fn):
        def run(*args, **kwargs):
            res = fn(*args, **kwargs)
            steps = np.diff(np.asarray(res[3], dtype=float))
            worst = float(steps.min()) if steps.size else 0.0
            with self.lock:
                self.runs += 1
                self.worst_step = min(self.worst_step, worst)
                if worst < -EM_SLACK:
                    self.violations += 1
            if worst < -EM_SLACK:
                raise AssertionError(f"EM objective decreased by {-worst:.3e}")
            return res

        return run


EM_MONITOR = EmMonitor()
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def _watch_em():
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(hlta, "_em_run", EM_MONITOR.wrap(hlta._em_run))
        yield


@pytest.fixture
def em_monitor():
    return EM_MONITOR


@pytest.fixture
def acceptance():
    def record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    m = EM_MONITOR
    terminalreporter.write_line(
        f"EM traces checked: {m.runs}, worst step {m.worst_step:.3e}, "
        f"decreases beyond {EM_SLACK:g}: {m.violations}"
    )
