import math

import numpy as np
import pytest

from horocorr.conformal import (
    ConformalMetric,
    beta,
    flow_time_for_bound,
    horospherical_curvature,
    horospherical_scalar,
    path_length,
    realizability_report,
    rescale,
    schouten,
)
from horocorr.errors import SamplingError, SingularParameterError
from horocorr.sphere import BandChart, StereographicChart, constant_field, radial_band_field

from test_sphere import band_example_field


def band_metric(t=0.0):
    return ConformalMetric(BandChart(2), band_example_field(), t)


def cylinder_metric(t=1.0):
    rho = radial_band_field(
        f=lambda s: -math.log(math.cos(s)),
        fs=lambda s: math.tan(s),
        fss=lambda s: 1.0 / math.cos(s) ** 2,
    )
    return ConformalMetric(BandChart(2), rho, t)


class TestSchouten:
    def test_constant_factor_isotropy(self):
        # rho = c constant: tensor is (1/2) e^{-2c} ghat and lambda = 1/2 e^{-2c}
        c = 0.5 * math.log(2.0)
        metric = ConformalMetric(StereographicChart(2), constant_field(c))
        rep = schouten(metric, np.array([0.3, -0.8]))
        g = metric.chart.metric(np.array([0.3, -0.8]))
        np.testing.assert_allclose(rep.tensor, 0.5 * g, atol=1e-10)
        np.testing.assert_allclose(rep.eigenvalues, 0.25, atol=1e-10)

    def test_round_metric_eigenvalue_half(self):
        metric = ConformalMetric(BandChart(2), constant_field(0.0))
        rep = schouten(metric, np.array([0.4, 1.3]))
        np.testing.assert_allclose(rep.eigenvalues, 0.5, atol=1e-12)

    def test_band_radial_correction_formula(self):
        # the rho-correction part of the radial entry is -(1 + s^2/2)/(1-s^2)^2
        metric = band_metric()
        for s in (0.0, 0.3, 0.5, 0.7, 0.9):
            rep = schouten(metric, np.array([s, 0.7]))
            g = metric.chart.metric(np.array([s, 0.7]))
            correction = rep.tensor[0, 0] - 0.5 * g[0, 0]
            expected = -(1.0 + 0.5 * s * s) / (1.0 - s * s) ** 2
            assert correction == pytest.approx(expected, abs=1e-10)

    def test_cylinder_spectrum(self):
        # product-metric oracle: eigenvalues {-1/2, 1/2} scaled by e^{-2t}
        for t in (0.0, 1.0):
            rep = schouten(cylinder_metric(t), np.array([0.6, 2.0]))
            np.testing.assert_allclose(
                rep.eigenvalues, [-0.5 * math.exp(-2 * t), 0.5 * math.exp(-2 * t)],
                atol=1e-10)

    def test_fd_and_analytic_agree(self):
        chart = BandChart(2)
        rho = radial_band_field(
            f=lambda s: 0.2 * math.sin(s),
            fs=lambda s: 0.2 * math.cos(s),
            fss=lambda s: -0.2 * math.sin(s),
            h=1e-4,
        )
        exact = ConformalMetric(chart, rho)
        approx = ConformalMetric(chart, rho.without_jets())
        for s in (-0.8, 0.1, 0.9):
            u = np.array([s, 0.5])
            np.testing.assert_allclose(
                schouten(approx, u).eigenvalues, schouten(exact, u).eigenvalues,
                atol=5e-6)

    def test_eigenvalues_chart_invariant(self):
        from horocorr.sphere import field_from_ambient

        F = lambda x: 0.3 * x[2] + 0.1 * math.cos(x[0])
        band = BandChart(2)
        stereo = StereographicChart(2)
        m_band = ConformalMetric(band, field_from_ambient(band, F))
        m_st = ConformalMetric(stereo, field_from_ambient(stereo, F))
        u_band = np.array([0.4, 0.9])
        x = band.embed(u_band)
        u_st = x[:-1] / (1.0 + x[-1])
        np.testing.assert_allclose(
            schouten(m_band, u_band).eigenvalues,
            schouten(m_st, u_st).eigenvalues, atol=1e-6)


class TestHorosphericalCurvature:
    def test_totally_geodesic_pair(self):
        sectional, _ = horospherical_curvature(0.0, 0.0)
        assert sectional == -1.0

    def test_horosphere_limit(self):
        sectional, _ = horospherical_curvature(-1.0, -1.0)
        assert sectional == 0.0

    def test_schouten_entry_matches_dictionary(self):
        _, entry = horospherical_curvature(-3.0, 0.0)
        assert entry == pytest.approx(0.25)

    def test_convexity_boundary_rejected(self):
        with pytest.raises(SingularParameterError):
            horospherical_curvature(1.0, -0.5)

    def test_scalar_negative_for_product_spectrum(self):
        for kappa in (0.0, 0.3, 0.9):
            assert horospherical_scalar([kappa, 0.0, 0.0, 0.0]) < 0.0


class TestBeta:
    def test_constant(self):
        metric = ConformalMetric(StereographicChart(2), constant_field(0.7))
        assert beta(metric, np.zeros(2)) == pytest.approx(math.exp(1.4), abs=1e-12)

    def test_round(self):
        metric = ConformalMetric(BandChart(2), constant_field(0.0))
        assert beta(metric, np.array([0.2, 0.1])) == pytest.approx(1.0, abs=1e-12)

    def test_band_monotone_toward_boundary(self):
        metric = band_metric()
        values = [beta(metric, np.array([s, 0.0]))
                  for s in np.linspace(0.9, 0.99, 12)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestPathLength:
    def test_band_meridian(self):
        # integral of 1/sqrt(1-s^2) over (0,1) = pi/2 despite the endpoint blowup
        metric = band_metric()
        length = path_length(
            metric,
            curve=lambda tau: np.array([tau, 0.4]),
            velocity=lambda tau: np.array([1.0, 0.0]),
        )
        assert length == pytest.approx(math.pi / 2, abs=1e-4)

    def test_round_quarter_circle(self):
        metric = ConformalMetric(BandChart(2), constant_field(0.0))
        length = path_length(
            metric,
            curve=lambda tau: np.array([0.0, tau * math.pi / 2]),
            velocity=lambda tau: np.array([0.0, math.pi / 2]),
        )
        assert length == pytest.approx(math.pi / 2, abs=1e-10)

    def test_conformal_scaling(self):
        base = ConformalMetric(BandChart(2), constant_field(0.0))
        scaled = ConformalMetric(BandChart(2), constant_field(0.7))
        curve = lambda tau: np.array([0.3 * tau - 0.1, 0.9 * tau])
        velocity = lambda tau: np.array([0.3, 0.9])
        a = path_length(base, curve, velocity=velocity)
        b = path_length(scaled, curve, velocity=velocity)
        assert b == pytest.approx(math.exp(0.7) * a, rel=1e-10)

    def test_divergent_meridian_reports_inf(self):
        # toward the cylinder pole the integrand behaves like 1/(pi/2 - s)
        metric = cylinder_metric(0.0)
        length = path_length(
            metric,
            curve=lambda tau: np.array([tau * math.pi / 2, 0.0]),
            velocity=lambda tau: np.array([math.pi / 2, 0.0]),
        )
        assert length == math.inf


class TestRescaleAndRealizability:
    def test_rescale_identity(self):
        metric = band_metric()
        u = np.array([0.5, 0.2])
        np.testing.assert_allclose(
            schouten(rescale(metric, 0.0), u).eigenvalues,
            schouten(metric, u).eigenvalues)

    def test_rescale_scaling_law(self):
        c = 0.5 * math.log(2.0)
        metric = ConformalMetric(StereographicChart(2), constant_field(c))
        rep = schouten(rescale(metric, 1.0), np.array([0.1, 0.2]))
        np.testing.assert_allclose(rep.eigenvalues, 0.25 * math.exp(-2.0), atol=1e-12)

    def test_rescale_composes(self):
        metric = cylinder_metric(0.0)
        u = np.array([0.4, 1.0])
        one = schouten(rescale(metric, 0.9), u).eigenvalues
        two = schouten(rescale(rescale(metric, 0.4), 0.5), u).eigenvalues
        np.testing.assert_allclose(one, two, rtol=1e-14)

    def test_constant_example_realizable(self):
        metric = ConformalMetric(
            StereographicChart(2), constant_field(0.5 * math.log(2.0)))
        rep = realizability_report(metric, [np.array([0.0, 0.0]), np.array([1.0, 0.5])])
        assert rep.realizable
        assert rep.lambda_min == pytest.approx(0.25, abs=1e-10)
        assert rep.lambda_max == pytest.approx(0.25, abs=1e-10)
        assert rep.suggested_t0 == 0.0

    def test_round_not_realizable(self):
        metric = ConformalMetric(StereographicChart(2), constant_field(0.0))
        rep = realizability_report(metric, [np.zeros(2)], eps=0.1)
        assert not rep.realizable
        assert rep.suggested_t0 == pytest.approx(0.5 * math.log(0.5 / 0.4), abs=1e-12)

    def test_band_flags_unbounded_below(self):
        metric = band_metric()
        samples = [np.array([1.0 - 10.0 ** -k, 0.0]) for k in range(1, 8)]
        rep = realizability_report(metric, samples)
        assert "Schouten not bounded below" in rep.flags
        assert not rep.realizable

    def test_empty_samples_error(self):
        with pytest.raises(SamplingError):
            realizability_report(band_metric(), [])

    def test_flow_time_examples(self):
        assert flow_time_for_bound(-1.0, 0.1) == 0.0
        assert flow_time_for_bound(0.5, 0.1) == pytest.approx(0.111572, abs=1e-6)
