"""Experiment configuration: a JSON document with four sections.

Parsing fills in defaults and rejects unknown keys, so ``to_dict`` of a
parsed config is its normalized form and re-parsing it is a no-op.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from wobbly.ergodic import GOLDEN_THETA0
from wobbly.geometry import GeometryError, TableGeometry, TurnAngle, new_table
from wobbly.terrain import Terrain, terrain_from_dict
from wobbly.touchdown import MODELS


class ConfigError(ValueError):
    pass


_TERRAIN_KEYS = {
    "flat": {"height": 0.0},
    "affine": {"a": None, "b": None, "c": 0.0},
    "bumps": {"bumps": None},
    "harmonic": {"amplitude": None, "order": None, "phase": 0.0, "extent": 1.0},
    "heightmap": {"path": None},
    "random": {"seed": None, "n_bumps": 8, "max_amplitude": 0.04, "min_width": 0.65, "extent": 2.0},
}

_INT_KEYS = {"order", "seed", "n_bumps"}


@dataclass
class SolverConfig:
    n: int = 1024
    tol: float | None = None
    theta0: str | float = "golden"
    ergodic_n: int = 100_000
    eps: float = 1e-3
    max_lipschitz: float | None = None
    model: str = "rigid"
    rel_tol: float = 1e-9

    def theta0_value(self) -> float | TurnAngle:
        """Golden rotation, explicit radians, or a ``p/q`` turn (finite-orbit mode)."""
        if self.theta0 == "golden":
            return GOLDEN_THETA0
        if isinstance(self.theta0, str):
            return TurnAngle.parse(self.theta0)
        return float(self.theta0)


@dataclass
class OutputConfig:
    directory: str | None = None
    formats: list[str] = field(default_factory=lambda: ["csv", "json", "svg"])


@dataclass
class ExperimentConfig:
    geometry: TableGeometry
    terrain: dict
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    base_dir: Path | None = None

    def build_terrain(self) -> Terrain:
        return terrain_from_dict(self.terrain, self.base_dir)

    def with_seed(self, seed: int) -> ExperimentConfig:
        if self.terrain.get("kind") != "random":
            raise ConfigError("terrain: batch runs need a terrain of kind 'random'")
        terrain = dict(self.terrain, seed=int(seed))
        return ExperimentConfig(self.geometry, terrain, self.solver, self.output, self.base_dir)

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "terrain": dict(self.terrain),
            "solver": asdict(self.solver),
            "output": asdict(self.output),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _check_keys(section: str, data, allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(unknown)}")


def _number(section: str, key: str, value, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}: must be finite")
    return float(value)


def _leg_angle(key: str, value) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"geometry.{key}: leg angles are 'p/q' turn strings, got {value!r}")
    try:
        angle = TurnAngle.parse(value)
    except GeometryError as exc:
        raise ConfigError(f"geometry.{key}: {exc}") from None
    num, _, den = value.strip().partition("/")
    raw = Fraction(int(num), int(den) if den else 1)
    if not 0 <= raw < 1:
        raise ConfigError(f"geometry.{key}: {value} is outside [0, 1) turn")
    return str(angle)


def _parse_geometry(data) -> TableGeometry:
    keys = ("radius", "theta_b", "theta_c", "theta_d")
    _check_keys("geometry", data, keys)
    for key in keys:
        if key not in data:
            raise ConfigError(f"geometry.{key}: missing")
    radius = _number("geometry", "radius", data["radius"])
    angles = {k: _leg_angle(k, data[k]) for k in keys[1:]}
    try:
        return new_table(radius, *(TurnAngle.parse(angles[k]) for k in keys[1:]))
    except GeometryError as exc:
        raise ConfigError(f"geometry: {exc}") from None


def _parse_terrain(data) -> dict:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("terrain.kind: missing")
    kind = data["kind"]
    if kind not in _TERRAIN_KEYS:
        raise ConfigError(f"terrain.kind: unknown kind {kind!r} (expected one of {', '.join(_TERRAIN_KEYS)})")
    defaults = _TERRAIN_KEYS[kind]
    _check_keys("terrain", data, {"kind", *defaults})
    out = {"kind": kind}
    for key, default in defaults.items():
        if key not in data:
            if default is None:
                raise ConfigError(f"terrain.{key}: missing (required for kind {kind!r})")
            out[key] = default
            continue
        value = data[key]
        if key == "path":
            if not isinstance(value, str):
                raise ConfigError("terrain.path: expected a string")
            out[key] = value
        elif key == "bumps":
            out[key] = _parse_bumps(value)
        else:
            out[key] = _number("terrain", key, value, integer=key in _INT_KEYS)
    return out


def _parse_bumps(value) -> list[dict]:
    if not isinstance(value, list):
        raise ConfigError("terrain.bumps: expected a list")
    bumps = []
    for i, bump in enumerate(value):
        section = f"terrain.bumps[{i}]"
        _check_keys(section, bump, ("center", "amplitude", "width"))
        for key in ("center", "amplitude", "width"):
            if key not in bump:
                raise ConfigError(f"{section}.{key}: missing")
        center = bump["center"]
        if not isinstance(center, list) or len(center) != 2:
            raise ConfigError(f"{section}.center: expected [x, y]")
        bumps.append({
            "center": [_number(section, "center", c) for c in center],
            "amplitude": _number(section, "amplitude", bump["amplitude"]),
            "width": _number(section, "width", bump["width"]),
        })
    return bumps


def _parse_solver(data) -> SolverConfig:
    defaults = SolverConfig()
    _check_keys("solver", data, asdict(defaults))
    cfg = SolverConfig()
    for key in ("n", "ergodic_n"):
        if key in data:
            setattr(cfg, key, _number("solver", key, data[key], integer=True))
    for key in ("eps", "rel_tol"):
        if key in data:
            setattr(cfg, key, _number("solver", key, data[key]))
    for key in ("tol", "max_lipschitz"):
        if data.get(key) is not None:
            setattr(cfg, key, _number("solver", key, data[key]))
    if "model" in data:
        if data["model"] not in MODELS:
            raise ConfigError(f"solver.model: expected one of {', '.join(MODELS)}, got {data['model']!r}")
        cfg.model = data["model"]
    if "theta0" in data:
        theta0 = data["theta0"]
        if isinstance(theta0, str):
            if theta0 != "golden":
                try:
                    theta0 = str(TurnAngle.parse(theta0))
                except GeometryError as exc:
                    raise ConfigError(f"solver.theta0: {exc}") from None
        else:
            theta0 = _number("solver", "theta0", theta0)
        cfg.theta0 = theta0
    if cfg.n < 8:
        raise ConfigError("solver.n: must be at least 8")
    if cfg.ergodic_n < 1:
        raise ConfigError("solver.ergodic_n: must be at least 1")
    return cfg


def _parse_output(data) -> OutputConfig:
    _check_keys("output", data, ("directory", "formats"))
    cfg = OutputConfig()
    if data.get("directory") is not None:
        if not isinstance(data["directory"], str):
            raise ConfigError("output.directory: expected a string")
        cfg.directory = data["directory"]
    if "formats" in data:
        formats = data["formats"]
        if not isinstance(formats, list) or any(f not in ("csv", "json", "svg") for f in formats):
            raise ConfigError("output.formats: expected a list drawn from csv, json, svg")
        cfg.formats = list(formats)
    return cfg


def parse_config(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    _check_keys("config", data, ("geometry", "terrain", "solver", "output"))
    if "geometry" not in data:
        raise ConfigError("geometry: missing section")
    if "terrain" not in data:
        raise ConfigError("terrain: missing section")
    return ExperimentConfig(
        geometry=_parse_geometry(data["geometry"]),
        terrain=_parse_terrain(data["terrain"]),
        solver=_parse_solver(data.get("solver", {})),
        output=_parse_output(data.get("output", {})),
        base_dir=base_dir,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse_config(data, path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
