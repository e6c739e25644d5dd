import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nvthermo.config import DEMO_C13_TENSOR  # noqa: E402
from nvthermo.spin import SpinSystem  # noqa: E402


@pytest.fixture
def c13_tensor():
    return np.array(DEMO_C13_TENSOR)


@pytest.fixture
def full_system_510(c13_tensor):
    """Electron + 14N + one 13C at 510 G along the NV axis (18 levels)."""
    return SpinSystem(B=(0.0, 0.0, 510.0), carbons=(c13_tensor,))


@pytest.fixture
def c13_system_20(c13_tensor):
    return SpinSystem(B=(0.0, 0.0, 20.0), carbons=(c13_tensor,))


@pytest.fixture
def data_dir():
    from nvthermo.demos import data_dir

    return data_dir()


ACCEPTANCE_LINES = []


def record_acceptance(number, ok, detail):
    """Store and print one PASS/FAIL line for an acceptance criterion."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
