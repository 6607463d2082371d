import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horocorr.errors import DimensionMismatch, HyperquadricError
from horocorr.minkowski import (
    from_poincare_ball,
    geodesic_point,
    mink_inner,
    on_de_sitter,
    on_hyperboloid,
    on_null_cone,
    to_poincare_ball,
)
from conftest import random_hyperboloid_point, random_unit_normal


class TestMinkInner:
    def test_base_point(self):
        assert mink_inner([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]) == -1.0

    def test_spacelike_unit(self):
        assert mink_inner([0.0, 1.0, 0.0], [0.0, 1.0, 0.0]) == 1.0

    def test_cosh_sinh_identity(self):
        v = np.array([math.cosh(2 / 3), 0.0, math.sinh(2 / 3)])
        assert mink_inner(v, v) == pytest.approx(-1.0, abs=1e-14)

    def test_bilinear_symmetric(self, rng):
        u, v = rng.normal(size=(2, 5))
        a, b = rng.normal(size=2)
        assert mink_inner(u, v) == pytest.approx(mink_inner(v, u))
        w = rng.normal(size=5)
        assert mink_inner(a * u + b * w, v) == pytest.approx(
            a * mink_inner(u, v) + b * mink_inner(w, v))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mink_inner([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_broadcasting(self, rng):
        u = rng.normal(size=(7, 4))
        v = rng.normal(size=4)
        out = mink_inner(u, v)
        assert out.shape == (7,)
        assert out[3] == pytest.approx(mink_inner(u[3], v))


class TestMembership:
    def test_quadric_flags(self):
        assert on_hyperboloid([1.0, 0.0, 0.0])
        assert not on_hyperboloid([-1.0, 0.0, 0.0])  # wrong sheet
        assert on_de_sitter([0.0, 1.0, 0.0])
        assert on_null_cone([1.0, 1.0, 0.0])
        assert not on_null_cone([-1.0, -1.0, 0.0])

    def test_timelike_coordinate_at_least_one(self, rng):
        # any unit timelike future vector has v0 >= 1
        for _ in range(200):
            v = random_hyperboloid_point(rng, n_ambient=4)
            assert v[0] >= 1.0


class TestBallModel:
    def test_base_point_to_center(self):
        np.testing.assert_allclose(to_poincare_ball([1.0, 0.0, 0.0]), [0.0, 0.0])

    def test_tanh_half_identity(self):
        p = to_poincare_ball([math.cosh(1.0), math.sinh(1.0), 0.0])
        np.testing.assert_allclose(p, [0.462117, 0.0], atol=1e-6)

    def test_inverse_of_tanh_half_identity(self):
        v = from_poincare_ball([0.462117, 0.0])
        np.testing.assert_allclose(v, [math.cosh(1.0), math.sinh(1.0), 0.0], atol=1e-5)

    def test_origin(self):
        np.testing.assert_allclose(from_poincare_ball([0.0, 0.0]), [1.0, 0.0, 0.0])

    def test_ideal_point_rejected(self):
        with pytest.raises(HyperquadricError, match="ideal point"):
            from_poincare_ball([1.0, 0.0])

    def test_off_hyperboloid_rejected(self):
        with pytest.raises(HyperquadricError):
            to_poincare_ball([2.0, 0.0, 0.0])

    def test_roundtrip_bulk(self, rng):
        # two-sided inverse to 1e-12 on 10^4 samples with |p| <= 0.999
        p = rng.uniform(-1.0, 1.0, size=(10_000, 3))
        norms = np.linalg.norm(p, axis=1)
        p *= (rng.uniform(0.0, 0.999, size=10_000) / np.maximum(norms, 1e-12))[:, None]
        v = from_poincare_ball(p)
        assert np.all(on_hyperboloid(v))
        assert np.all(np.linalg.norm(to_poincare_ball(v), axis=1) < 1.0)
        np.testing.assert_allclose(to_poincare_ball(v), p, atol=1e-12)

    @given(st.lists(st.floats(-0.49, 0.49), min_size=2, max_size=4))
    @settings(max_examples=200, deadline=None)
    def test_roundtrip_property(self, coords):
        p = np.asarray(coords)
        v = from_poincare_ball(p)
        np.testing.assert_allclose(to_poincare_ball(v), p, atol=1e-12)
        assert mink_inner(v, v) == pytest.approx(-1.0, abs=1e-9)


class TestGeodesicPoint:
    def test_time_zero_identity(self, rng):
        phi = random_hyperboloid_point(rng, 4)
        eta = random_unit_normal(rng, phi)
        np.testing.assert_allclose(geodesic_point(phi, eta, 0.0), phi)

    def test_base_frame_evaluation(self):
        out = geodesic_point([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0)
        np.testing.assert_allclose(out, [math.cosh(1.0), math.sinh(1.0), 0.0])

    def test_stays_on_hyperboloid(self, rng):
        for _ in range(100):
            phi = random_hyperboloid_point(rng, 4)
            eta = random_unit_normal(rng, phi)
            t = rng.uniform(-3.0, 3.0)
            out = geodesic_point(phi, eta, t)
            assert mink_inner(out, out) == pytest.approx(-1.0, abs=1e-9 * out[0] ** 2)

    def test_rejects_bad_frame(self):
        with pytest.raises(HyperquadricError):
            geodesic_point([1.0, 0.0, 0.0], [0.0, 2.0, 0.0], 1.0)

    @given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.integers(0, 10_000))
    @settings(max_examples=150, deadline=None)
    def test_flow_semigroup(self, s, t, seed):
        # flowing by s then t equals flowing by s+t, with the normal transported
        rng = np.random.default_rng(seed)
        phi = random_hyperboloid_point(rng, 3)
        eta = random_unit_normal(rng, phi)
        direct = geodesic_point(phi, eta, s + t)
        phi_s = geodesic_point(phi, eta, s)
        eta_s = phi * math.sinh(s) + eta * math.cosh(s)
        two_step = geodesic_point(phi_s, eta_s, t, rtol=1e-7)
        np.testing.assert_allclose(two_step, direct, atol=1e-10 * max(1.0, direct[0]))
