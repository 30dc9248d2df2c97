import sys

import numpy as np
import pytest

from thickknot import build_knot, make_circle, make_torus_knot, normalize


@pytest.fixture(scope="session")
def square():
    return build_knot([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], name="square")


@pytest.fixture(scope="session")
def circle512():
    return make_circle(1.0, 512)


@pytest.fixture(scope="session")
def trefoil():
    return make_torus_knot(2, 3, 2.0, 1.0, 512)


@pytest.fixture(scope="session")
def trefoil_unit(trefoil):
    return normalize(trefoil)


def stadium(length_straight, radius=1.0, n_arc=64, n_straight=32):
    """Planar racetrack: two half circles joined by straight segments."""
    pts = []
    for cx, start in ((length_straight / 2, -np.pi / 2), (-length_straight / 2, np.pi / 2)):
        t = start + np.pi * np.arange(n_arc) / n_arc
        pts.append(np.column_stack([cx + radius * np.cos(t), radius * np.sin(t), np.zeros(n_arc)]))
        x0 = cx
        x1 = -cx
        y = radius if start < 0 else -radius
        s = np.linspace(x0, x1, n_straight, endpoint=False)
        pts.append(np.column_stack([s, np.full(n_straight, y), np.zeros(n_straight)]))
    return build_knot(np.vstack(pts), name="stadium")


@pytest.fixture(scope="session")
def stadium_knot():
    return stadium


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
