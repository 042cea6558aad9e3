import random
from fractions import Fraction

import pytest

from spinekit.checks import distinct_rationals


@pytest.fixture
def rng():
    return random.Random(1234)


def rationals(rng, n, **kw):
    return distinct_rationals(rng, n, **kw)


def frac(s):
    return Fraction(s)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
