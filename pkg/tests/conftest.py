from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("repo")


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_simplex(rng, m, floor=0.0):
    p = rng.dirichlet(np.ones(m))
    if floor:
        p = p + floor
        p /= p.sum()
    return p


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, ok, detail):
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
