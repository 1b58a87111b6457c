import random
import sys
from fractions import Fraction

import pytest

from nilsol.catalog_cli import load_catalog
from nilsol.geometry import DiagonalMetric


def random_metric(rng: random.Random, n: int) -> DiagonalMetric:
    vals = []
    for _ in range(n):
        q = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        vals.append(q if rng.random() < 0.7 else -q)
    return DiagonalMetric(tuple(vals))


def concrete_algebras(entries, max_dim=9, min_dim=1):
    """One algebra per entry (families at their first sample point)."""
    out = []
    for e in entries:
        if min_dim <= e.dim <= max_dim:
            out.append(e.algebra(e.sample_points()[0]))
    return out


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = [mod.RESULTS[k] for k in sorted(mod.RESULTS)] if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
