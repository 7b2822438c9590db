"""Height fields with explicit Lipschitz bounds.

Every terrain evaluates ``height_at(x, y)`` on scalars or numpy arrays
(broadcast elementwise) and reports an upper bound on its Lipschitz
constant. The leg circle only ever sees a terrain through its
:class:`CircleProfile`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

_HALF_E = math.exp(-0.5)


class TerrainDomainError(ValueError):
    """A query fell outside the region where the terrain is defined."""


class TerrainFormatError(ValueError):
    """A heightmap file could not be parsed."""


class Terrain(ABC):
    kind: str = ""

    @abstractmethod
    def height_at(self, x, y):
        """Terrain height at ``(x, y)``; accepts floats or broadcastable arrays."""

    @abstractmethod
    def lipschitz_bound(self) -> float:
        """An upper bound on ``|h(p) - h(q)| / |p - q|``."""

    @abstractmethod
    def to_dict(self) -> dict:
        ...


def height_at(terrain: Terrain, x, y):
    return terrain.height_at(x, y)


def lipschitz_bound(terrain: Terrain) -> float:
    return terrain.lipschitz_bound()


def _out(x, y, value):
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class Flat(Terrain):
    height: float = 0.0
    kind = "flat"

    def height_at(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return _out(x, y, np.full(np.broadcast(x, y).shape, float(self.height)))

    def lipschitz_bound(self) -> float:
        return 0.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "height": float(self.height)}


@dataclass(frozen=True)
class Affine(Terrain):
    """The plane ``z = a*x + b*y + c``."""

    a: float
    b: float
    c: float = 0.0
    kind = "affine"

    def height_at(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return _out(x, y, self.a * x + self.b * y + self.c)

    def lipschitz_bound(self) -> float:
        return math.hypot(self.a, self.b)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": float(self.a), "b": float(self.b), "c": float(self.c)}


class Bump(NamedTuple):
    center: tuple[float, float]
    amplitude: float
    width: float


@dataclass(frozen=True)
class BumpField(Terrain):
    """Sum of Gaussian bumps ``amplitude * exp(-|p - center|^2 / (2 width^2))``."""

    bumps: tuple[Bump, ...]
    kind = "bumps"

    def __post_init__(self):
        bumps = tuple(Bump((float(b[0][0]), float(b[0][1])), float(b[1]), float(b[2])) for b in self.bumps)
        for b in bumps:
            if b.width <= 0:
                raise ValueError(f"bump width must be positive, got {b.width}")
        object.__setattr__(self, "bumps", bumps)

    def height_at(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = np.zeros(np.broadcast(x, y).shape)
        for (cx, cy), amp, width in self.bumps:
            r2 = (x - cx) ** 2 + (y - cy) ** 2
            z = z + amp * np.exp(-r2 / (2.0 * width * width))
        return _out(x, y, z)

    def lipschitz_bound(self) -> float:
        # |d/dr A exp(-r^2/2w^2)| peaks at r = w with value |A| exp(-1/2) / w.
        return sum(abs(b.amplitude) * _HALF_E / b.width for b in self.bumps)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "bumps": [
                {"center": [b.center[0], b.center[1]], "amplitude": b.amplitude, "width": b.width}
                for b in self.bumps
            ],
        }


@dataclass(frozen=True)
class HarmonicField(Terrain):
    """``amplitude * r^order * cos(order * (phi - phase))`` on the disk ``r <= extent``.

    On the circle of radius ``rho`` this restricts to a pure harmonic of the
    given order, which gives closed-form height functions.
    """

    amplitude: float
    order: int
    phase: float = 0.0
    extent: float = 1.0
    kind = "harmonic"

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 0:
            raise ValueError(f"order must be a non-negative integer, got {self.order}")
        if self.extent <= 0:
            raise ValueError("extent must be positive")
        object.__setattr__(self, "order", int(self.order))

    def height_at(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = x * x + y * y
        if np.any(r2 > (self.extent * (1.0 + 1e-12)) ** 2):
            raise TerrainDomainError(f"query outside the harmonic field's disk of radius {self.extent}")
        w = (x + 1j * y) ** self.order * np.exp(-1j * self.order * self.phase)
        return _out(x, y, self.amplitude * w.real)

    def lipschitz_bound(self) -> float:
        if self.order == 0:
            return 0.0
        return abs(self.amplitude) * self.order * self.extent ** (self.order - 1)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "amplitude": float(self.amplitude),
            "order": self.order,
            "phase": float(self.phase),
            "extent": float(self.extent),
        }


@dataclass(frozen=True, eq=False)
class Heightmap(Terrain):
    """Grid heights with bilinear interpolation.

    ``values[j, i]`` is the height at ``(x0 + i*dx, y0 + j*dy)``. Queries
    outside the grid's bounding box raise :class:`TerrainDomainError`.
    """

    values: np.ndarray
    x0: float
    y0: float
    dx: float
    dy: float
    source: str | None = field(default=None, compare=False)
    kind = "heightmap"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 2:
            raise ValueError(f"heightmap needs at least a 2x2 grid, got shape {values.shape}")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("grid spacing must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.x0, self.x0 + (self.nx - 1) * self.dx, self.y0, self.y0 + (self.ny - 1) * self.dy)

    def height_at(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xmin, xmax, ymin, ymax = self.bounds
        if np.any((x < xmin) | (x > xmax) | (y < ymin) | (y > ymax)):
            raise TerrainDomainError(
                f"query outside heightmap box [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )
        u = (x - self.x0) / self.dx
        v = (y - self.y0) / self.dy
        i = np.clip(np.floor(u).astype(int), 0, self.nx - 2)
        j = np.clip(np.floor(v).astype(int), 0, self.ny - 2)
        fu = u - i
        fv = v - j
        z = self.values
        z00 = z[j, i]
        z10 = z[j, i + 1]
        z01 = z[j + 1, i]
        z11 = z[j + 1, i + 1]
        bottom = z00 + fu * (z10 - z00)
        top = z01 + fu * (z11 - z01)
        return _out(x, y, bottom + fv * (top - bottom))

    def lipschitz_bound(self) -> float:
        # Inside a cell, dz/dx is linear in y and dz/dy linear in x, so the
        # gradient norm peaks at a corner of the cell.
        z = self.values
        gx = np.abs(np.diff(z, axis=1)) / self.dx  # (ny, nx-1): along each row
        gy = np.abs(np.diff(z, axis=0)) / self.dy  # (ny-1, nx): along each column
        gx_cell = np.maximum(gx[:-1, :], gx[1:, :])
        gy_cell = np.maximum(gy[:, :-1], gy[:, 1:])
        return float(np.max(np.hypot(gx_cell, gy_cell)))

    def to_dict(self) -> dict:
        if self.source is None:
            raise ValueError("an in-memory heightmap has no path to serialize")
        return {"kind": self.kind, "path": self.source}

    def __eq__(self, other):
        if not isinstance(other, Heightmap):
            return NotImplemented
        return (
            (self.x0, self.y0, self.dx, self.dy) == (other.x0, other.y0, other.dx, other.dy)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _fmt(v: float) -> str:
    return repr(float(v))


def save_heightmap(terrain: Heightmap, path) -> None:
    """Write ``nx ny x0 y0 dx dy`` then ``ny`` rows of ``nx`` heights, y increasing."""
    lines = [" ".join([str(terrain.nx), str(terrain.ny)] + [_fmt(v) for v in (terrain.x0, terrain.y0, terrain.dx, terrain.dy)])]
    for row in terrain.values:
        lines.append(" ".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_heightmap(path) -> Heightmap:
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise TerrainFormatError(f"{path}: empty heightmap file")
    header = lines[0].split()
    if len(header) != 6:
        raise TerrainFormatError(f"{path}:1: header must be 'nx ny x0 y0 dx dy', got {lines[0]!r}")
    try:
        nx, ny = int(header[0]), int(header[1])
        x0, y0, dx, dy = (float(v) for v in header[2:])
    except ValueError as exc:
        raise TerrainFormatError(f"{path}:1: malformed header ({exc})") from None
    if len(lines) - 1 != ny:
        raise TerrainFormatError(f"{path}: expected {ny} rows, found {len(lines) - 1}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split()
        if len(cells) != nx:
            raise TerrainFormatError(f"{path}:{lineno}: expected {nx} values, found {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise TerrainFormatError(f"{path}:{lineno}: non-numeric cell ({exc})") from None
    try:
        return Heightmap(np.array(rows), x0, y0, dx, dy, source=str(path))
    except ValueError as exc:
        raise TerrainFormatError(f"{path}: {exc}") from None


def random_terrain(
    seed: int,
    n_bumps: int = 8,
    max_amplitude: float = 0.04,
    min_width: float = 0.65,
    extent: float = 2.0,
) -> Terrain:
    """Seeded Gaussian bump field; ``n_bumps == 0`` gives ``Flat(0)``.

    The defaults keep the Lipschitz bound at most
    ``8 * 0.04 * exp(-1/2) / 0.65 < 0.3`` for every seed.
    """
    if n_bumps < 0:
        raise ValueError("n_bumps must be non-negative")
    if min_width <= 0:
        raise ValueError("min_width must be positive")
    if n_bumps == 0:
        return Flat(0.0)
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-extent, extent, size=(n_bumps, 2))
    amplitudes = rng.uniform(-max_amplitude, max_amplitude, size=n_bumps)
    widths = rng.uniform(min_width, 2.0 * min_width, size=n_bumps)
    return BumpField(
        tuple(Bump((float(c[0]), float(c[1])), float(a), float(w)) for c, a, w in zip(centers, amplitudes, widths))
    )


@dataclass(frozen=True)
class CircleProfile:
    """The terrain read along a circle: ``g(phi) = h(center + radius*(cos phi, sin phi))``."""

    center: tuple[float, float]
    radius: float
    source: Terrain

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.source.height_at(self.center[0] + self.radius * np.cos(phi), self.center[1] + self.radius * np.sin(phi))

    def lipschitz_bound(self) -> float:
        """Lipschitz bound of ``g`` in the angle variable."""
        return self.source.lipschitz_bound() * self.radius


def circle_profile(terrain: Terrain, center=(0.0, 0.0), radius: float = 1.0) -> CircleProfile:
    """Restrict ``terrain`` to a circle, checking heightmap coverage up front."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if isinstance(terrain, Heightmap):
        xmin, xmax, ymin, ymax = terrain.bounds
        cx, cy = center
        if cx - radius < xmin or cx + radius > xmax or cy - radius < ymin or cy + radius > ymax:
            raise TerrainDomainError("leg circle does not fit inside the heightmap box")
    return CircleProfile((float(center[0]), float(center[1])), float(radius), terrain)


def terrain_from_dict(data: dict, base_dir: Path | None = None) -> Terrain:
    """Build a terrain from its config section (``kind`` discriminates)."""
    kind = data["kind"]
    if kind == "flat":
        return Flat(float(data.get("height", 0.0)))
    if kind == "affine":
        return Affine(float(data["a"]), float(data["b"]), float(data.get("c", 0.0)))
    if kind == "bumps":
        return BumpField(tuple(Bump(tuple(b["center"]), b["amplitude"], b["width"]) for b in data["bumps"]))
    if kind == "harmonic":
        return HarmonicField(
            float(data["amplitude"]), int(data["order"]), float(data.get("phase", 0.0)), float(data.get("extent", 1.0))
        )
    if kind == "heightmap":
        path = Path(data["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_heightmap(path)
    if kind == "random":
        return random_terrain(
            int(data["seed"]),
            int(data.get("n_bumps", 8)),
            float(data.get("max_amplitude", 0.04)),
            float(data.get("min_width", 0.65)),
            float(data.get("extent", 2.0)),
        )
    raise ValueError(f"unknown terrain kind {kind!r}")
