import math

import numpy as np
import pytest

from wobbly.geometry import TurnAngle, new_table
from wobbly.terrain import HarmonicField, Terrain


def turn(text):
    return TurnAngle.parse(text)


@pytest.fixture
def square():
    return new_table(1.0, turn("1/4"), turn("1/2"), turn("3/4"))


@pytest.fixture
def hexagon_cut():
    return new_table(1.0, turn("1/6"), turn("1/3"), turn("1/2"))


@pytest.fixture
def unequal():
    return new_table(1.0, turn("1/8"), turn("1/2"), turn("3/4"))


@pytest.fixture
def cos2():
    """Terrain x^2 - y^2, which reads cos(2 phi) on the unit circle."""
    return HarmonicField(1.0, 2, 0.0, 1.0)


@pytest.fixture
def cos1():
    """Terrain z = x, which reads cos(phi) on the unit circle."""
    return HarmonicField(1.0, 1, 0.0, 1.0)


def random_geometry(rng, radius=None):
    """A random cyclic-order table with denominators up to 360."""
    while True:
        q = int(rng.integers(8, 361))
        nums = np.sort(rng.choice(np.arange(1, q), size=3, replace=False))
        try:
            return new_table(
                float(rng.uniform(0.2, 5.0)) if radius is None else radius,
                *(TurnAngle(int(p), q) for p in nums),
            )
        except ValueError:
            continue


class Rotated(Terrain):
    """A terrain turned by ``alpha`` about the origin (test helper)."""

    kind = "rotated"

    def __init__(self, base, alpha):
        self.base, self.alpha = base, alpha

    def height_at(self, x, y):
        c, s = math.cos(self.alpha), math.sin(self.alpha)
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return self.base.height_at(c * x - s * y, s * x + c * y)

    def lipschitz_bound(self):
        return self.base.lipschitz_bound()

    def to_dict(self):
        raise NotImplementedError


def dense_delta_oracle(geom, terrain, n=100_000):
    """h_delta on an n-point grid from raw leg heights, bypassing the plane fit."""
    thetas = 2 * np.pi * np.arange(n) / n
    angles = thetas[:, None] + geom.leg_angles[None, :]
    g = terrain.height_at(geom.radius * np.cos(angles), geom.radius * np.sin(angles))
    delta = geom.mu * g[:, 1] + (1 - geom.mu) * g[:, 3] - geom.tau * g[:, 0] - (1 - geom.tau) * g[:, 2]
    return thetas, delta


def oracle_sign_changes(thetas, delta):
    """Midpoints of grid cells across which the sign of delta flips (wrap included)."""
    s = np.sign(delta)
    idx = np.flatnonzero(s * np.roll(s, -1) < 0)
    step = 2 * np.pi / len(thetas)
    return thetas[idx] + step / 2


def circular_distance(a, b):
    return np.abs((np.asarray(a) - b + np.pi) % (2 * np.pi) - np.pi)


_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        measured = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        _ACCEPTANCE.append((marker.args[0], report.outcome, measured))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, measured in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[0][2:])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}" + (f"  [{measured}]" if measured else ""))
