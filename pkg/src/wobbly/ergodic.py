"""Averages of periodic functions on the circle.

Three ways of sampling the circle are used: the orbit of an irrational
rotation (Birkhoff averages), a uniform grid (the periodic trapezoid rule)
and the finite orbit of a rational rotation. Sums go through ``math.fsum``
so each reported mean is the correctly rounded mean of its samples.

Functions passed in must accept a numpy array of angles and return an
array of the same shape.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from wobbly.geometry import TurnAngle

TWO_PI = 2.0 * math.pi
# Rotation by the golden ratio conjugate of a turn.
GOLDEN_THETA0 = math.pi * (math.sqrt(5.0) - 1.0)

PeriodicFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class IrrationalRotation:
    """Orbit ``i * theta0 (mod 2pi)`` for ``i = 1, 2, ...``.

    A float ``theta0`` is strictly a rational multiple of 2pi, but its
    denominator is far beyond any orbit length this code will reach, so for
    N up to ~1e7 the orbit behaves as an irrational one.
    """

    theta0: float = GOLDEN_THETA0
    kind: str = field(default="irrational_rotation", init=False)

    def points(self, n: int) -> np.ndarray:
        return np.mod(np.arange(1, n + 1) * self.theta0, TWO_PI)


@dataclass(frozen=True)
class UniformGrid:
    n: int
    kind: str = field(default="uniform_grid", init=False)

    def points(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n


@dataclass(frozen=True)
class FiniteOrbit:
    """The ``q`` points ``start + 2pi*k*p/q`` of a rotation by ``p/q`` turn."""

    step: TurnAngle
    start: float = 0.0
    kind: str = field(default="finite_orbit", init=False)

    def points(self) -> np.ndarray:
        p, q = self.step.numerator, self.step.denominator
        k = np.arange(q)
        return self.start + TWO_PI * ((k * p) % q) / q


SamplingScheme = Union[IrrationalRotation, UniformGrid, FiniteOrbit]


def _mean(values) -> float:
    values = np.asarray(values, dtype=float)
    return math.fsum(values.tolist()) / values.size


def birkhoff_average(f: PeriodicFn, theta0: float, n: int) -> float:
    """``(1/n) * sum_{i=1..n} f(i * theta0 mod 2pi)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _mean(f(IrrationalRotation(theta0).points(n)))


def quadrature_average(f: PeriodicFn, n: int = 4096) -> float:
    """Uniform-grid mean of ``f``; the trapezoid rule for a periodic function."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return _mean(f(UniformGrid(n).points()))


def orbit_average(f: PeriodicFn, step: TurnAngle, start: float = 0.0) -> float:
    """Mean of ``f`` over the finite orbit of the rational rotation ``step``."""
    return _mean(f(FiniteOrbit(step, start).points()))


def verify_average_identity(profile, n: int = 4096) -> float:
    """Residual of the leg-average identity for an abstract height profile.

    Each leg height is a translate of the same circle profile, so all four
    have the same mean H and ``mu*H + (1-mu)*H - tau*H - (1-tau)*H`` is 0.
    Returns the absolute value of the combination formed from the four
    separately computed means.
    """
    tau, mu = profile.geometry.tau, profile.geometry.mu
    h_a = quadrature_average(profile.h_a, n)
    h_b = quadrature_average(profile.h_b, n)
    h_c = quadrature_average(profile.h_c, n)
    h_d = quadrature_average(profile.h_d, n)
    return abs(mu * h_b + (1.0 - mu) * h_d - tau * h_a - (1.0 - tau) * h_c)


@dataclass
class AverageReport:
    scheme: SamplingScheme
    n_values: list[int]
    partial_averages: list[float]
    limit_estimate: float
    quadrature_reference: float

    @property
    def finite_orbit(self) -> bool:
        return isinstance(self.scheme, FiniteOrbit)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "partial_average", "reference"])
        for n, avg in zip(self.n_values, self.partial_averages):
            writer.writerow([n, repr(float(avg)), repr(float(self.quadrature_reference))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        scheme = {"kind": self.scheme.kind}
        if isinstance(self.scheme, IrrationalRotation):
            scheme["theta0"] = self.scheme.theta0
        elif isinstance(self.scheme, FiniteOrbit):
            scheme["step"] = str(self.scheme.step)
            scheme["start"] = self.scheme.start
        else:
            scheme["n"] = self.scheme.n
        return {
            "scheme": scheme,
            "finite_orbit": self.finite_orbit,
            "N_values": list(self.n_values),
            "partial_averages": [float(v) for v in self.partial_averages],
            "limit_estimate": float(self.limit_estimate),
            "quadrature_reference": float(self.quadrature_reference),
        }


def convergence_report(
    f: PeriodicFn,
    theta0: float | TurnAngle,
    n_list,
    quadrature_n: int = 4096,
) -> AverageReport:
    """Partial Birkhoff averages of ``f`` at each N in ``n_list``.

    A :class:`TurnAngle` ``theta0`` switches to finite-orbit mode: partials
    are still taken along ``i * theta0``, but the limit estimate is the exact
    orbit average, which in general differs from the circle average.
    """
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])) or n_list[0] < 1:
        raise ValueError("n_list must be a non-empty increasing list of positive integers")
    step = theta0.radians if isinstance(theta0, TurnAngle) else float(theta0)
    samples = np.asarray(f(IrrationalRotation(step).points(n_list[-1])), dtype=float).tolist()
    partials = [math.fsum(samples[:n]) / n for n in n_list]
    reference = quadrature_average(f, quadrature_n)
    if isinstance(theta0, TurnAngle):
        scheme = FiniteOrbit(theta0, theta0.radians)
        limit = orbit_average(f, theta0, theta0.radians)
    else:
        scheme = IrrationalRotation(step)
        limit = partials[-1]
    return AverageReport(scheme, n_list, partials, limit, reference)
