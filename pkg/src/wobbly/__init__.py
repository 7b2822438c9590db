"""Stabilizing four-legged tables with cyclic leg configurations by rotation."""

from wobbly.geometry import (
    TableGeometry,
    TurnAngle,
    ValidationReport,
    chord_length,
    diagonal_intersection,
    leg_positions,
    new_table,
    validate_assumptions,
)
from wobbly.terrain import (
    Affine,
    Bump,
    BumpField,
    CircleProfile,
    Flat,
    HarmonicField,
    Heightmap,
    Terrain,
    TerrainDomainError,
    circle_profile,
    load_heightmap,
    random_terrain,
    save_heightmap,
)
from wobbly.touchdown import (
    HeightProfile,
    TouchdownResult,
    equal_hover_rigid,
    h_ac_abstract,
    h_bd_abstract,
    h_delta,
    height_profile,
    wobbles,
)
from wobbly.ergodic import (
    GOLDEN_THETA0,
    AverageReport,
    birkhoff_average,
    convergence_report,
    orbit_average,
    quadrature_average,
    verify_average_identity,
)
from wobbly.solver import (
    StabilizationResult,
    SweepTable,
    certify,
    ergodic_certificate,
    find_stabilizing_angles,
    sweep,
)

__version__ = "0.1.0"
