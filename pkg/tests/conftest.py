from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from kgtwist import catalog
from kgtwist.twist import CategoricalCocycle, TwoCocycleZk

DATA = Path(__file__).resolve().parents[1] / "demos" / "data"
GOLDEN = (5 ** 0.5 - 1) / 2

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def bicharacter(k: int, angle=0) -> TwoCocycleZk:
    if k == 1:
        return TwoCocycleZk(((Fraction(0),),))
    return TwoCocycleZk.from_upper(k, {(0, 1): angle})


def cocycle(g, angle=0) -> CategoricalCocycle:
    return CategoricalCocycle(g, bicharacter(g.rank, angle))


@pytest.fixture
def g1():
    return catalog.single_vertex_torus()


@pytest.fixture
def g2():
    return catalog.two_loops()


@pytest.fixture
def g3():
    return catalog.cycle_graph()


@pytest.fixture
def g4():
    return catalog.disjoint_loops()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status:8s} {detail}")
