"""Diagonal touchdown heights as functions of the table's rotation angle.

Two models are provided:

* ``abstract``: each leg height is the circle profile shifted by the leg's
  angle, ``h_E(theta) = g(theta + theta_E)``, and the diagonal heights are
  the convex combinations through the intersection point X.
* ``rigid``: legs stay at their rotated xy positions and the table top is
  an affine plane through the terrain under A and C, tilted so that B and
  D hover equally (small-tilt vertical-displacement model).

In both, ``h_delta = h_bd - h_ac`` vanishes exactly when the table rests on
all four legs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from wobbly.geometry import LEGS, TableGeometry
from wobbly.terrain import CircleProfile, Terrain, circle_profile

MODELS = ("abstract", "rigid")


@dataclass(frozen=True)
class HeightProfile:
    """Per-leg touchdown heights for one table on one terrain (abstract model)."""

    geometry: TableGeometry
    profile: CircleProfile

    def leg_height(self, leg: str, theta):
        offset = self.geometry.leg_angles[LEGS.index(leg)]
        return self.profile(np.asarray(theta, dtype=float) + offset)

    def h_a(self, theta):
        return self.leg_height("A", theta)

    def h_b(self, theta):
        return self.leg_height("B", theta)

    def h_c(self, theta):
        return self.leg_height("C", theta)

    def h_d(self, theta):
        return self.leg_height("D", theta)


def height_profile(geom: TableGeometry, terrain: Terrain) -> HeightProfile:
    return HeightProfile(geom, circle_profile(terrain, (0.0, 0.0), geom.radius))


def h_ac_abstract(profile: HeightProfile, theta):
    tau = profile.geometry.tau
    return tau * profile.h_a(theta) + (1.0 - tau) * profile.h_c(theta)


def h_bd_abstract(profile: HeightProfile, theta):
    mu = profile.geometry.mu
    return mu * profile.h_b(theta) + (1.0 - mu) * profile.h_d(theta)


def h_delta(profile: HeightProfile, theta):
    return h_bd_abstract(profile, theta) - h_ac_abstract(profile, theta)


@dataclass(frozen=True)
class TouchdownResult:
    theta: float
    h_ac: float
    h_bd: float
    h_delta: float
    hover: float
    model: str

    def to_row(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TouchdownArrays:
    """Touchdown quantities evaluated on an array of angles."""

    theta: np.ndarray
    h_ac: np.ndarray
    h_bd: np.ndarray
    h_delta: np.ndarray
    hover: np.ndarray
    model: str

    def __len__(self):
        return len(self.theta)

    def row(self, k: int) -> TouchdownResult:
        return TouchdownResult(
            float(self.theta[k]),
            float(self.h_ac[k]),
            float(self.h_bd[k]),
            float(self.h_delta[k]),
            float(self.hover[k]),
            self.model,
        )


def abstract_touchdown(geom: TableGeometry, terrain: Terrain, thetas) -> TouchdownArrays:
    profile = height_profile(geom, terrain)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    h_ac = h_ac_abstract(profile, thetas)
    h_bd = h_bd_abstract(profile, thetas)
    delta = h_bd - h_ac
    return TouchdownArrays(thetas, h_ac, h_bd, delta, -delta, "abstract")


def rigid_touchdown(geom: TableGeometry, terrain: Terrain, thetas) -> TouchdownArrays:
    """Equal-hovering rigid touchdown at each angle in ``thetas``.

    The table plane ``z = c + p*x + q*y`` satisfies z(A) = g_A, z(C) = g_C and
    z(B) - g_B = z(D) - g_D, where g_E is the terrain height under leg E.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    angles = thetas[:, None] + geom.leg_angles[None, :]
    xs = geom.radius * np.cos(angles)
    ys = geom.radius * np.sin(angles)
    g = terrain.height_at(xs, ys)

    n = len(thetas)
    system = np.zeros((n, 3, 3))
    system[:, 0] = np.column_stack([np.ones(n), xs[:, 0], ys[:, 0]])
    system[:, 1] = np.column_stack([np.ones(n), xs[:, 2], ys[:, 2]])
    system[:, 2] = np.column_stack([np.zeros(n), xs[:, 1] - xs[:, 3], ys[:, 1] - ys[:, 3]])
    rhs = np.column_stack([g[:, 0], g[:, 2], g[:, 1] - g[:, 3]])
    coef = np.linalg.solve(system, rhs[..., None])[..., 0]
    c, p, q = coef[:, 0], coef[:, 1], coef[:, 2]

    hover = c + p * xs[:, 1] + q * ys[:, 1] - g[:, 1]
    x0, y0 = geom.x_table
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    xx = cos_t * x0 - sin_t * y0
    xy = sin_t * x0 + cos_t * y0
    h_ac = c + p * xx + q * xy
    h_bd = geom.mu * g[:, 1] + (1.0 - geom.mu) * g[:, 3]
    return TouchdownArrays(thetas, h_ac, h_bd, h_bd - h_ac, hover, "rigid")


def touchdown(geom: TableGeometry, terrain: Terrain, thetas, model: str = "rigid") -> TouchdownArrays:
    if model == "rigid":
        return rigid_touchdown(geom, terrain, thetas)
    if model == "abstract":
        return abstract_touchdown(geom, terrain, thetas)
    raise ValueError(f"unknown touchdown model {model!r}; expected one of {MODELS}")


def equal_hover_rigid(geom: TableGeometry, terrain: Terrain, theta: float) -> TouchdownResult:
    return rigid_touchdown(geom, terrain, [theta]).row(0)


def wobbles(result: TouchdownResult, tol: float) -> bool:
    """True when the two diagonal touchdowns put X at different heights."""
    return abs(result.h_delta) > tol


def default_tol(geom: TableGeometry) -> float:
    return 1e-9 * geom.radius


def delta_lipschitz_in_angle(geom: TableGeometry, terrain: Terrain) -> float:
    """Upper bound on the angular Lipschitz constant of ``h_delta``."""
    return 2.0 * terrain.lipschitz_bound() * geom.radius
