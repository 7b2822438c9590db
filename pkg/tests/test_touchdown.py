import math

import numpy as np
import pytest

from conftest import random_geometry
from wobbly.terrain import Affine, Flat, random_terrain
from wobbly.touchdown import (
    abstract_touchdown,
    equal_hover_rigid,
    h_ac_abstract,
    h_bd_abstract,
    h_delta,
    height_profile,
    rigid_touchdown,
    touchdown,
    wobbles,
)

THETAS = 2 * np.pi * np.arange(512) / 512


def test_leg_heights_are_translates(hexagon_cut):
    prof = height_profile(hexagon_cut, random_terrain(1))
    theta = np.random.default_rng(0).uniform(0, 2 * np.pi, 1024)
    for leg, offset in zip("ABCD", hexagon_cut.leg_angles):
        assert np.array_equal(prof.leg_height(leg, theta), prof.h_a(theta + offset))


def test_leg_heights_periodic(hexagon_cut):
    prof = height_profile(hexagon_cut, random_terrain(2))
    theta = np.random.default_rng(1).uniform(0, 2 * np.pi, 256)
    for leg in "ABCD":
        assert np.max(np.abs(prof.leg_height(leg, theta) - prof.leg_height(leg, theta + 2 * np.pi))) <= 1e-12


class TestAbstract:
    def test_flat(self, hexagon_cut):
        prof = height_profile(hexagon_cut, Flat(3.0))
        assert np.allclose(h_ac_abstract(prof, THETAS), 3.0, atol=1e-15)
        assert np.allclose(h_bd_abstract(prof, THETAS), 3.0, atol=1e-15)

    def test_square_on_cos2(self, square, cos2):
        prof = height_profile(square, cos2)
        assert np.allclose(h_ac_abstract(prof, THETAS), np.cos(2 * THETAS), atol=1e-12)
        assert np.allclose(h_bd_abstract(prof, THETAS), -np.cos(2 * THETAS), atol=1e-12)
        assert np.allclose(h_delta(prof, THETAS), -2 * np.cos(2 * THETAS), atol=1e-12)

    def test_square_zeros(self, square, cos2):
        prof = height_profile(square, cos2)
        zeros = np.pi / 4 * np.array([1, 3, 5, 7])
        assert np.all(np.abs(h_delta(prof, zeros)) <= 1e-12)

    def test_hexagon_on_cos1(self, hexagon_cut, cos1):
        prof = height_profile(hexagon_cut, cos1)
        t = THETAS
        assert np.allclose(h_ac_abstract(prof, t), np.cos(t) / 3 + 2 * np.cos(t + 2 * np.pi / 3) / 3, atol=1e-12)
        assert np.allclose(h_bd_abstract(prof, t), 2 * np.cos(t + np.pi / 3) / 3 - np.cos(t) / 3, atol=1e-12)
        assert np.max(np.abs(h_delta(prof, t))) <= 1e-12
        # the identity the vanishing rests on
        assert np.allclose(np.cos(t + np.pi / 3) - np.cos(t + 2 * np.pi / 3), np.cos(t), atol=1e-15)

    def test_scalar_input(self, square, cos2):
        prof = height_profile(square, cos2)
        assert isinstance(h_delta(prof, 0.0), float)
        assert h_delta(prof, 0.0) == pytest.approx(-2.0, abs=1e-12)


class TestRigid:
    def test_flat(self, hexagon_cut):
        r = equal_hover_rigid(hexagon_cut, Flat(0.7), 0.3)
        assert r.hover == pytest.approx(0.0, abs=1e-15)
        assert r.h_ac == pytest.approx(0.7, abs=1e-15)
        assert r.h_bd == pytest.approx(0.7, abs=1e-15)
        assert r.model == "rigid"

    def test_affine_rests_flush(self, hexagon_cut):
        v = rigid_touchdown(hexagon_cut, Affine(0.2, -0.1, 0.5), THETAS)
        assert np.max(np.abs(v.hover)) <= 1e-12

    def test_plane_passes_through_feet(self, hexagon_cut):
        # Rebuild the plane through A, C and the hovering B; D must hover equally
        # and X must sit at h_ac.
        t = random_terrain(9)
        theta = 1.234
        r = equal_hover_rigid(hexagon_cut, t, theta)
        legs = hexagon_cut.leg_positions(theta)
        g = t.height_at(legs[:, 0], legs[:, 1])
        m = np.array([[1, *legs[0]], [1, *legs[2]], [1, *legs[1]]])
        c, p, q = np.linalg.solve(m, [g[0], g[2], g[1] + r.hover])
        x = hexagon_cut.intersection_at(theta)
        assert c + p * legs[3, 0] + q * legs[3, 1] - g[3] == pytest.approx(r.hover, abs=1e-12)
        assert c + p * x[0] + q * x[1] == pytest.approx(r.h_ac, abs=1e-12)

    def test_hover_is_minus_delta(self, hexagon_cut):
        v = rigid_touchdown(hexagon_cut, random_terrain(42), THETAS)
        assert np.max(np.abs(v.hover + v.h_delta)) <= 1e-10

    def test_field_consistency(self, hexagon_cut):
        v = rigid_touchdown(hexagon_cut, random_terrain(3), THETAS)
        assert np.array_equal(v.h_delta, v.h_bd - v.h_ac)

    def test_domain_violation_propagates(self, hexagon_cut, cos2):
        from wobbly.geometry import new_table
        from wobbly.terrain import TerrainDomainError

        big = new_table(2.0, hexagon_cut.theta_b, hexagon_cut.theta_c, hexagon_cut.theta_d)
        with pytest.raises(TerrainDomainError):
            rigid_touchdown(big, cos2, [0.0])


class TestWobbles:
    def test_flat_never(self, hexagon_cut):
        assert not any(wobbles(equal_hover_rigid(hexagon_cut, Flat(1.0), t), 1e-9) for t in THETAS[::16])

    def test_square_cos2(self, square, cos2):
        at_zero = equal_hover_rigid(square, cos2, 0.0)
        assert at_zero.h_delta == pytest.approx(-2.0, abs=1e-12)
        assert wobbles(at_zero, 1e-9)
        assert not wobbles(equal_hover_rigid(square, cos2, math.pi / 4), 1e-9)

    def test_equivalence_on_samples(self, hexagon_cut):
        v = rigid_touchdown(hexagon_cut, random_terrain(4), THETAS)
        tol = 1e-9
        for k in range(len(v)):
            r = v.row(k)
            assert wobbles(r, tol) == (abs(r.h_bd - r.h_ac) > tol)


class TestModelsAgree:
    @pytest.mark.parametrize("seed", range(10))
    def test_cross_model(self, hexagon_cut, seed):
        t = random_terrain(seed)
        a = abstract_touchdown(hexagon_cut, t, THETAS)
        r = rigid_touchdown(hexagon_cut, t, THETAS)
        assert np.max(np.abs(a.h_ac - r.h_ac)) <= 1e-10
        assert np.max(np.abs(a.h_bd - r.h_bd)) <= 1e-10
        assert np.max(np.abs(a.h_delta - r.h_delta)) <= 1e-10

    def test_cross_model_on_harmonic(self, square, cos2):
        a = abstract_touchdown(square, cos2, THETAS)
        r = rigid_touchdown(square, cos2, THETAS)
        assert np.max(np.abs(a.h_delta - r.h_delta)) <= 1e-10

    def test_affine_annihilation_random_geometries(self):
        rng = np.random.default_rng(21)
        thetas = 2 * np.pi * np.arange(4096) / 4096
        for _ in range(10):
            g = random_geometry(rng)
            plane = Affine(*rng.normal(size=3))
            for model in ("abstract", "rigid"):
                assert np.max(np.abs(touchdown(g, plane, thetas, model).h_delta)) <= 1e-10

    def test_unknown_model(self, square):
        with pytest.raises(ValueError):
            touchdown(square, Flat(0.0), [0.0], "floppy")


@pytest.mark.parametrize("seed", range(5))
def test_delta_lipschitz_in_angle(hexagon_cut, seed):
    t = random_terrain(seed)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * np.pi, 2000)
    delta = rng.uniform(0, 1e-3, 2000)
    bound = 2 * t.lipschitz_bound() * hexagon_cut.radius
    for model in ("abstract", "rigid"):
        h0 = touchdown(hexagon_cut, t, theta, model).h_delta
        h1 = touchdown(hexagon_cut, t, theta + delta, model).h_delta
        assert np.all(np.abs(h1 - h0) <= bound * delta + 1e-13)
