"""Leg configuration of a four-legged table whose feet lie on a common circle.

Angles are stored as exact fractions of a full turn so that composing
rotations never drifts. Leg A sits at angle 0 in the base position; legs
B, C, D follow counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

LEGS = ("A", "B", "C", "D")


class GeometryError(ValueError):
    """Raised for degenerate or malformed leg configurations."""


@dataclass(frozen=True)
class TurnAngle:
    """An angle given exactly as ``numerator/denominator`` of a full turn.

    Values are reduced to lowest terms and wrapped into ``[0, 1)``.
    """

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise GeometryError(f"denominator must be positive, got {self.denominator}")
        frac = Fraction(self.numerator, self.denominator) % 1
        object.__setattr__(self, "numerator", frac.numerator)
        object.__setattr__(self, "denominator", frac.denominator)

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> TurnAngle:
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: str) -> TurnAngle:
        """Parse a ``"p/q"`` (or integer) string. Decimals are rejected."""
        text = str(text).strip()
        num, sep, den = text.partition("/")
        try:
            p = int(num)
            q = int(den) if sep else 1
        except ValueError:
            raise GeometryError(f"expected a 'p/q' turn fraction, got {text!r}") from None
        if q <= 0:
            raise GeometryError(f"denominator must be positive in {text!r}")
        return cls(p, q)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def radians(self) -> float:
        return 2.0 * math.pi * self.numerator / self.denominator

    def __add__(self, other: TurnAngle) -> TurnAngle:
        return TurnAngle.from_fraction(self.fraction + other.fraction)

    def __sub__(self, other: TurnAngle) -> TurnAngle:
        return TurnAngle.from_fraction(self.fraction - other.fraction)

    def __neg__(self) -> TurnAngle:
        return TurnAngle.from_fraction(-self.fraction)

    def __lt__(self, other: TurnAngle) -> bool:
        return self.fraction < other.fraction

    def __le__(self, other: TurnAngle) -> bool:
        return self.fraction <= other.fraction

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def chord_length(radius: float, subtended: TurnAngle) -> float:
    """Length of the chord cutting off ``subtended`` of a circle of ``radius``."""
    return 2.0 * radius * math.sin(math.pi * subtended.numerator / subtended.denominator)


@dataclass(frozen=True)
class TableGeometry:
    """Leg-ends on a circle of ``radius`` centred at the origin of the table frame.

    Build instances with :func:`new_table`; the derived fields (diagonal
    lengths, intersection point ``x_table`` and its ratios ``tau``/``mu``)
    are filled in on construction.
    """

    radius: float
    theta_b: TurnAngle
    theta_c: TurnAngle
    theta_d: TurnAngle
    diag_ac: float = field(init=False)
    diag_bd: float = field(init=False)
    tau: float = field(init=False)
    mu: float = field(init=False)
    x_table: tuple[float, float] = field(init=False)

    def __post_init__(self):
        if not (isinstance(self.radius, (int, float)) and math.isfinite(self.radius)) or self.radius <= 0:
            raise GeometryError(f"radius must be a positive finite number, got {self.radius!r}")
        zero = TurnAngle(0)
        if not (zero < self.theta_b < self.theta_c < self.theta_d):
            raise GeometryError(
                "leg angles must satisfy 0 < theta_B < theta_C < theta_D < 1 turn, got "
                f"{self.theta_b}, {self.theta_c}, {self.theta_d}"
            )
        object.__setattr__(self, "diag_ac", chord_length(self.radius, self.theta_c))
        object.__setattr__(self, "diag_bd", chord_length(self.radius, self.theta_d - self.theta_b))
        point, tau, mu = _intersect_diagonals(self.leg_positions(0.0))
        object.__setattr__(self, "x_table", point)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "mu", mu)

    @property
    def turn_angles(self) -> tuple[TurnAngle, TurnAngle, TurnAngle, TurnAngle]:
        return (TurnAngle(0), self.theta_b, self.theta_c, self.theta_d)

    @property
    def leg_angles(self) -> np.ndarray:
        """Leg angles in radians at rotation 0, ordered A, B, C, D."""
        return np.array([a.radians for a in self.turn_angles])

    def leg_positions(self, theta: float) -> np.ndarray:
        """Leg-end xy positions after rotating the table by ``theta`` radians, shape (4, 2)."""
        angles = theta + self.leg_angles
        return self.radius * np.column_stack([np.cos(angles), np.sin(angles)])

    def intersection_at(self, theta: float) -> np.ndarray:
        """The diagonal intersection X after rotating by ``theta``."""
        c, s = math.cos(theta), math.sin(theta)
        x, y = self.x_table
        return np.array([c * x - s * y, s * x + c * y])

    def min_leg_spacing(self) -> float:
        """Shortest chord between cyclically adjacent legs."""
        angles = self.turn_angles
        gaps = [angles[(i + 1) % 4] - angles[i] for i in range(4)]
        return min(chord_length(self.radius, g) for g in gaps)

    def to_dict(self) -> dict:
        return {
            "radius": float(self.radius),
            "theta_b": str(self.theta_b),
            "theta_c": str(self.theta_c),
            "theta_d": str(self.theta_d),
        }

    @classmethod
    def from_dict(cls, data: dict) -> TableGeometry:
        return new_table(
            data["radius"],
            TurnAngle.parse(data["theta_b"]),
            TurnAngle.parse(data["theta_c"]),
            TurnAngle.parse(data["theta_d"]),
        )


def new_table(radius: float, theta_b: TurnAngle, theta_c: TurnAngle, theta_d: TurnAngle) -> TableGeometry:
    return TableGeometry(radius, theta_b, theta_c, theta_d)


def _intersect_diagonals(legs: np.ndarray) -> tuple[tuple[float, float], float, float]:
    a, b, c, d = legs
    # Solve A + s (C - A) = B + t (D - B) by Cramer's rule.
    u = c - a
    v = d - b
    w = b - a
    det = u[0] * (-v[1]) - u[1] * (-v[0])
    assert det != 0.0, "diagonals are parallel; leg order is degenerate"
    s = (w[0] * (-v[1]) - w[1] * (-v[0])) / det
    t = (u[0] * w[1] - u[1] * w[0]) / det
    tau = 1.0 - s
    mu = 1.0 - t
    assert 0.0 < tau < 1.0 and 0.0 < mu < 1.0, "diagonals do not cross inside the quadrilateral"
    point = tau * a + (1.0 - tau) * c
    return (float(point[0]), float(point[1])), float(tau), float(mu)


def diagonal_intersection(geom: TableGeometry) -> tuple[tuple[float, float], float, float]:
    """Return ``(X, tau, mu)`` with X = tau*A + (1-tau)*C = mu*B + (1-mu)*D."""
    return geom.x_table, geom.tau, geom.mu


def leg_positions(geom: TableGeometry, theta: float) -> np.ndarray:
    return geom.leg_positions(theta)


@dataclass(frozen=True)
class ValidationReport:
    cyclic_ok: bool
    equal_diagonals_ok: bool
    diagonal_rotation: TurnAngle | None
    supporting_angle: TurnAngle
    messages: list[str]

    @property
    def all_ok(self) -> bool:
        return self.cyclic_ok and self.equal_diagonals_ok

    def to_dict(self) -> dict:
        return {
            "cyclic_ok": self.cyclic_ok,
            "equal_diagonals_ok": self.equal_diagonals_ok,
            "diagonal_rotation": None if self.diagonal_rotation is None else str(self.diagonal_rotation),
            "supporting_angle": str(self.supporting_angle),
            "messages": list(self.messages),
        }


def validate_assumptions(geom: TableGeometry, rel_tol: float = 1e-9) -> ValidationReport:
    """Check the leg configuration against the hypotheses needed for stabilization.

    Rationality of the supporting and diagonal-to-diagonal rotations holds
    by representation; the report records them. Equal diagonal length is
    checked with a tolerance relative to the radius. Nothing is raised;
    failures land in the report.
    """
    messages = []
    angles = geom.turn_angles
    cyclic_ok = all(angles[i] < angles[i + 1] for i in range(3))
    messages.append(
        "legs A, B, C, D lie counterclockwise on the circumcircle"
        if cyclic_ok
        else "legs are not in strict counterclockwise order"
    )

    support_ac = geom.theta_c
    support_bd = geom.theta_d - geom.theta_b
    gap = abs(geom.diag_ac - geom.diag_bd)
    equal_ok = gap <= rel_tol * geom.radius
    messages.append(f"diagonal AC = {geom.diag_ac!r} (subtends {support_ac} turn)")
    messages.append(f"diagonal BD = {geom.diag_bd!r} (subtends {support_bd} turn)")

    rotation = None
    if equal_ok:
        # Rotating by theta_B sends A->B, C->C+theta_B; rotating by theta_D sends
        # A->D, C->C+theta_D. Pick whichever lands on the other diagonal.
        via_b = abs(float((support_bd - support_ac).fraction))
        via_d = abs(float((support_bd - (-support_ac)).fraction))
        via_b = min(via_b, 1 - via_b)
        via_d = min(via_d, 1 - via_d)
        rotation = geom.theta_b if via_b <= via_d else geom.theta_d
        messages.append(f"diagonals have equal length; rotation by {rotation} turn maps AC onto BD")
    else:
        messages.append(f"diagonals differ in length by {gap!r} (tolerance {rel_tol * geom.radius!r})")

    return ValidationReport(
        cyclic_ok=cyclic_ok,
        equal_diagonals_ok=equal_ok,
        diagonal_rotation=rotation,
        supporting_angle=support_ac,
        messages=messages,
    )
