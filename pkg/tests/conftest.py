import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sixr import classify as cl  # noqa: E402
from sixr.io import fixture  # noqa: E402
from sixr.kinematics import ManipulatorModel  # noqa: E402
from sixr.torus_field import GridSpec  # noqa: E402

GENERIC_6R = ("arm_a", "arm_b", "arm_c", "arm_d")
GENERIC_3R = ("pos_h2_00", "pos_h2_00_10", "pos_h2_01", "pos_h2_10", "pos_h2_11", "pos_h2_21")


def random_table(rng, rows=6):
    return np.c_[
        rng.uniform(-np.pi, np.pi, rows),
        rng.uniform(-1, 1, rows),
        rng.uniform(-1, 1, rows),
        rng.uniform(-np.pi, np.pi, rows),
    ]


def random_model(rng):
    return ManipulatorModel.from_table(random_table(rng))


@lru_cache(maxsize=None)
def report(name, n, threads=1):
    """Cached classification of a shipped 6R fixture at resolution n."""
    return cl.classify(fixture(name), GridSpec.uniform(n), cl.Options(threads=threads))


@lru_cache(maxsize=None)
def report_3r(name, n=128):
    return cl.classify_3r(fixture(name), GridSpec.uniform(n, dims=2))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


ACCEPTANCE_LINES = {}


def record(number, ok, detail):
    """Store the one-line verdict for an acceptance criterion and assert it."""
    ACCEPTANCE_LINES[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}"
    assert ok, detail


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
