"""Search for rotation angles at which the table stops wobbling."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from wobbly.ergodic import GOLDEN_THETA0, TWO_PI, birkhoff_average
from wobbly.geometry import TableGeometry
from wobbly.terrain import Terrain
from wobbly.touchdown import (
    TouchdownArrays,
    TouchdownResult,
    default_tol,
    equal_hover_rigid,
    touchdown,
)

DEFAULT_SWEEP_N = 1024
BISECT_XTOL = 1e-12
MERGE_DISTANCE = 1e-9

ANGLES_FOUND = "angles_found"
EVERYWHERE_STABLE = "everywhere_stable"
NONE_FOUND = "none_found"

SWEEP_COLUMNS = ("theta", "h_ac", "h_bd", "h_delta", "hover", "model")


def lipschitz_gate(geom: TableGeometry) -> float:
    """Default largest terrain Lipschitz bound accepted without a warning."""
    return 0.5 * geom.min_leg_spacing() / geom.radius


@dataclass
class SweepTable:
    geometry: TableGeometry
    terrain: Terrain
    values: TouchdownArrays

    @property
    def thetas(self) -> np.ndarray:
        return self.values.theta

    @property
    def h_delta(self) -> np.ndarray:
        return self.values.h_delta

    @property
    def rows(self) -> list[TouchdownResult]:
        return [self.values.row(k) for k in range(len(self.values))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        v = self.values
        for k in range(len(v)):
            writer.writerow(
                [repr(float(v.theta[k])), repr(float(v.h_ac[k])), repr(float(v.h_bd[k])),
                 repr(float(v.h_delta[k])), repr(float(v.hover[k])), v.model]
            )
        return buf.getvalue()


def sweep(geom: TableGeometry, terrain: Terrain, n: int = DEFAULT_SWEEP_N, model: str = "rigid") -> SweepTable:
    """Touchdown at the ``n`` uniform angles ``2*pi*k/n``."""
    if n < 8:
        raise ValueError("sweep needs at least 8 angles")
    thetas = TWO_PI * np.arange(n) / n
    return SweepTable(geom, terrain, touchdown(geom, terrain, thetas, model))


@dataclass(frozen=True)
class Root:
    theta: float
    residual: float


@dataclass
class StabilizationResult:
    verdict: str
    roots: list[Root]
    epsilon_floor: float
    ergodic_average: float
    lipschitz_bound: float
    lipschitz_warning: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "roots": [{"theta": r.theta, "residual": r.residual} for r in self.roots],
            "epsilon_floor": self.epsilon_floor,
            "ergodic_average": self.ergodic_average,
            "lipschitz_bound": self.lipschitz_bound,
            "lipschitz_warning": self.lipschitz_warning,
            "diagnostics": dict(self.diagnostics),
        }

    def roots_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["theta", "residual"])
        for r in self.roots:
            writer.writerow([repr(r.theta), repr(r.residual)])
        return buf.getvalue()


def _delta_fn(geom, terrain, model):
    def f(theta: float) -> float:
        return float(touchdown(geom, terrain, [theta], model).h_delta[0])
    return f


def _merge_roots(roots: list[Root]) -> list[Root]:
    roots = sorted(roots, key=lambda r: r.theta)
    merged: list[Root] = []
    for r in roots:
        if merged and r.theta - merged[-1].theta < MERGE_DISTANCE:
            if r.residual < merged[-1].residual:
                merged[-1] = r
        else:
            merged.append(r)
    if len(merged) > 1 and merged[0].theta + TWO_PI - merged[-1].theta < MERGE_DISTANCE:
        first, last = merged[0], merged.pop()
        if last.residual < first.residual:
            merged[0] = last
        merged.sort(key=lambda r: r.theta)
    return merged


def find_stabilizing_angles(
    geom: TableGeometry,
    terrain: Terrain,
    n: int = DEFAULT_SWEEP_N,
    tol: float | None = None,
    model: str = "rigid",
    ergodic_n: int = 10_000,
    max_lipschitz: float | None = None,
) -> StabilizationResult:
    """Bracket and refine the zeros of ``h_delta`` over a full turn.

    Sign changes between neighbouring sweep angles (the pair straddling
    2pi included) are refined by bisection. Sweep angles where
    ``|h_delta| <= tol`` without an adjacent sign change are treated as
    possible tangential zeros and refined by golden-section minimization
    of ``|h_delta|``.
    """
    if tol is None:
        tol = default_tol(geom)
    if tol <= 0:
        raise ValueError("tol must be positive")
    table = sweep(geom, terrain, n, model)
    values = table.h_delta
    thetas = table.thetas
    abs_vals = np.abs(values)
    f = _delta_fn(geom, terrain, model)

    lip = terrain.lipschitz_bound()
    gate = lipschitz_gate(geom) if max_lipschitz is None else max_lipschitz
    epsilon_floor = float(abs_vals.min())
    ergodic_avg = birkhoff_average(lambda t: touchdown(geom, terrain, t, model).h_delta, GOLDEN_THETA0, ergodic_n)
    common = dict(
        epsilon_floor=epsilon_floor,
        ergodic_average=ergodic_avg,
        lipschitz_bound=lip,
        lipschitz_warning=lip > gate,
    )
    diagnostics = {"sweep_n": n, "tol": tol, "model": model, "lipschitz_gate": gate, "max_abs_delta": float(abs_vals.max())}

    if abs_vals.max() <= tol:
        return StabilizationResult(EVERYWHERE_STABLE, [], diagnostics=diagnostics, **common)

    roots: list[Root] = []
    rejected = 0
    for k in range(n):
        k1 = (k + 1) % n
        a, fa = thetas[k], values[k]
        b, fb = (thetas[k1] if k1 else TWO_PI), values[k1]
        if abs(fa) <= tol or abs(fb) <= tol or fa * fb > 0:
            continue
        theta = optimize.bisect(f, a, b, xtol=BISECT_XTOL)
        theta = float(np.mod(theta, TWO_PI))
        residual = abs(f(theta))
        if residual <= tol:
            roots.append(Root(theta, residual))
        else:
            rejected += 1

    for k in np.flatnonzero(abs_vals <= tol):
        k = int(k)
        step = TWO_PI / n
        center = thetas[k]
        g = lambda t: abs(f(t))
        try:
            theta = optimize.golden(g, brack=(center - step, center, center + step), tol=1e-12)
        except (ValueError, RuntimeError):
            theta = center
        theta = float(np.mod(theta, TWO_PI))
        residual = abs(f(theta))
        if residual > abs_vals[k]:
            theta, residual = float(center), float(abs_vals[k])
        roots.append(Root(theta, residual))

    roots = _merge_roots(roots)
    if rejected:
        diagnostics["rejected_brackets"] = rejected
    if roots:
        return StabilizationResult(ANGLES_FOUND, roots, diagnostics=diagnostics, **common)

    # h_delta is (2*L*radius)-Lipschitz in the angle, so between two sweep
    # angles it cannot reach 0 unless epsilon_floor <= L*radius*step.
    step = TWO_PI / n
    angular_lip = 2.0 * lip * geom.radius
    diagnostics["zero_excluded_by_lipschitz"] = bool(epsilon_floor > 0.5 * angular_lip * step)
    if 0 < angular_lip < math.inf:
        diagnostics["suggested_n"] = int(math.ceil(0.5 * angular_lip * TWO_PI / epsilon_floor)) + 1
    diagnostics["hint"] = "no sign change found; increase the sweep resolution or check the terrain's Lipschitz gate"
    return StabilizationResult(NONE_FOUND, [], diagnostics=diagnostics, **common)


def certify(geom: TableGeometry, terrain: Terrain, theta_star: float, tol: float | None = None) -> bool:
    """Whether all four legs share a resting plane at ``theta_star``."""
    if tol is None:
        tol = default_tol(geom)
    return abs(equal_hover_rigid(geom, terrain, theta_star).hover) <= tol


@dataclass(frozen=True)
class ErgodicCertificate:
    """Birkhoff average of ``h_delta`` set against its extent on a sweep.

    If ``h_delta`` kept one sign with ``|h_delta| > eps`` everywhere, every
    Birkhoff average would exceed ``eps`` in absolute value. An average
    within ``eps`` of zero therefore forces a zero of ``h_delta``.
    """

    average: float
    min_abs_delta: float
    max_abs_delta: float
    sign_changes: int
    eps: float
    theta0: float
    n: int

    @property
    def zero_forced(self) -> bool:
        return abs(self.average) <= self.eps

    @property
    def consistent(self) -> bool:
        # A constant-sign h_delta bounded away from zero by eps must average beyond eps.
        bounded_away = self.sign_changes == 0 and self.min_abs_delta > self.eps
        return not (bounded_away and self.zero_forced)

    def to_dict(self) -> dict:
        return {
            "average": self.average,
            "min_abs_delta": self.min_abs_delta,
            "max_abs_delta": self.max_abs_delta,
            "sign_changes": self.sign_changes,
            "eps": self.eps,
            "theta0": self.theta0,
            "n": self.n,
            "zero_forced": self.zero_forced,
            "consistent": self.consistent,
        }


def ergodic_certificate(
    geom: TableGeometry,
    terrain: Terrain,
    theta0: float = GOLDEN_THETA0,
    n: int = 100_000,
    eps: float = 1e-3,
    sweep_n: int = 4096,
    model: str = "rigid",
) -> ErgodicCertificate:
    if n < 1:
        raise ValueError("n must be at least 1")
    average = birkhoff_average(lambda t: touchdown(geom, terrain, t, model).h_delta, theta0, n)
    values = sweep(geom, terrain, sweep_n, model).h_delta
    signs = np.sign(values)
    changes = int(np.count_nonzero(signs * np.roll(signs, -1) < 0))
    return ErgodicCertificate(
        average=average,
        min_abs_delta=float(np.abs(values).min()),
        max_abs_delta=float(np.abs(values).max()),
        sign_changes=changes,
        eps=eps,
        theta0=theta0,
        n=n,
    )
