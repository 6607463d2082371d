"""The conformal metric ghat = e^{2(rho+t)} g_{S^n} and its curvature data.

The central object is the Schouten tensor of ghat, computed from the round
metric by the conformal transformation law

    Sch = 1/2 g_S - Hess(rho) + d rho (x) d rho - 1/2 |grad rho|^2 g_S,

taken as the defining expression for every n >= 2 (for n >= 3 it agrees with
the trace-adjusted Ricci tensor).  Eigenvalues are always reported relative to
ghat, sorted ascending; they are the lambda's of the hypersurface dictionary.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh

from .errors import ChartDomainError, SamplingError, SingularParameterError
from .sphere import DomainSample, ScalarField, gradient_hessian, metric_pack

REALIZABLE_MARGIN = 1e-3   # default strict gap eps below the 1/2 eigenvalue bound
REALIZABLE_FLOOR = 1e6     # default lower bound B on eigenvalues
LENGTH_CAP = 1e6           # partial-sum cap for divergence reporting


@dataclass(frozen=True)
class ConformalMetric:
    """Chart + log conformal factor rho + scale offset t.

    The effective log factor is rho(u) + t; rescaling by dt shifts t and
    scales every Schouten eigenvalue by e^{-2 dt}.
    """

    chart: object
    rho: ScalarField
    t: float = 0.0

    def effective(self, u):
        return float(self.rho.value(np.asarray(u, dtype=float))) + self.t


@dataclass(frozen=True)
class SchoutenReport:
    tensor: np.ndarray       # lower indices, in chart coordinates
    eigenvalues: np.ndarray  # relative to ghat, sorted ascending
    point: np.ndarray


def schouten(metric, u):
    """Schouten tensor of the conformal metric at a chart point.

    The tensor is returned with lower indices in chart coordinates; the
    eigenvalues solve Sch v = lambda ghat v and do not depend on the chart.
    """
    u = np.asarray(u, dtype=float)
    jets = gradient_hessian(metric.rho, metric.chart, u)
    g = metric.chart.metric(u)
    grad = jets.gradient
    tensor = (0.5 * g
              - jets.covariant_hessian
              + np.outer(grad, grad)
              - 0.5 * jets.grad_norm_sq * g)
    ghat = math.exp(2.0 * metric.effective(u)) * g
    eigenvalues = eigh(tensor, ghat, eigvals_only=True)
    return SchoutenReport(tensor, np.sort(eigenvalues), u)


def horospherical_curvature(kappa_i, kappa_j):
    """(sectional, schouten_i) of the horospherical metric from two principal
    curvatures: sectional = 1 - 1/(1-ki) - 1/(1-kj), schouten_i = 1/2 - 1/(1-ki)."""
    if kappa_i == 1.0 or kappa_j == 1.0:
        raise SingularParameterError("kappa = 1 is the horospherical-convexity boundary")
    sectional = 1.0 - 1.0 / (1.0 - kappa_i) - 1.0 / (1.0 - kappa_j)
    schouten_i = 0.5 - 1.0 / (1.0 - kappa_i)
    return sectional, schouten_i


def horospherical_scalar(kappas):
    """Sum of the pairwise sectional curvatures over ordered pairs i != j."""
    kappas = np.asarray(kappas, dtype=float)
    total = 0.0
    for i in range(len(kappas)):
        for j in range(len(kappas)):
            if i != j:
                total += horospherical_curvature(kappas[i], kappas[j])[0]
    return total


def beta(metric, u):
    """Divergence probe e^{2(rho+t)} + |grad rho|^2; blows up toward a
    boundary where the metric stays complete."""
    u = np.asarray(u, dtype=float)
    jets = gradient_hessian(metric.rho, metric.chart, u)
    return math.exp(2.0 * metric.effective(u)) + jets.grad_norm_sq


def _speed(metric, curve, velocity, tau):
    u = np.asarray(curve(tau), dtype=float)
    if not metric.rho.in_domain(metric.chart, u):
        raise ChartDomainError(f"curve leaves the domain interior at tau={tau}")
    if velocity is not None:
        v = np.asarray(velocity(tau), dtype=float)
    else:
        h = max(1e-9, 1e-6 * min(tau, 1.0 - tau))
        v = (np.asarray(curve(tau + h)) - np.asarray(curve(tau - h))) / (2 * h)
    g = metric.chart.metric(u)
    return math.exp(metric.effective(u)) * math.sqrt(max(float(v @ g @ v), 0.0))


def path_length(metric, curve, quadrature_n=32, velocity=None, cap=LENGTH_CAP):
    """Length of a parametrized path under the conformal metric.

    curve: tau in [0,1] -> chart coordinates, staying inside the domain except
    possibly at the endpoints; velocity: optional analytic tau-derivative
    (finite differences otherwise, which need interior room).

    Integration runs over dyadic shells accumulating toward each endpoint with
    a fixed Gauss-Legendre rule per shell, so integrable endpoint
    singularities converge while divergent ones are detected: the result is
    math.inf when the partial sums pass the cap or the shell contributions
    stop decaying.
    """
    if quadrature_n < 2:
        raise SamplingError("need at least 2 quadrature nodes per shell")
    nodes, weights = leggauss(quadrature_n)

    def shell(a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return half * sum(
            w * _speed(metric, curve, velocity, mid + half * x)
            for x, w in zip(nodes, weights))

    depth = 50
    total = 0.0
    for left in (False, True):
        contributions = []
        for k in range(1, depth + 1):
            lo, hi = 1.0 - 2.0 ** -k, 1.0 - 2.0 ** -(k + 1)
            if left:
                lo, hi = 1.0 - hi, 1.0 - lo
            c = shell(lo, hi)
            contributions.append(c)
            total += c
            if total > cap:
                return math.inf
        tail = [c for c in contributions[-7:] if c > 0]
        ratios = [b / a for a, b in zip(tail, tail[1:]) if a > 0]
        if ratios and np.mean(ratios) >= 0.98:
            return math.inf
    return total


def rescale(metric, dt):
    """Shift the scale offset by dt; eigenvalues scale by e^{-2 dt}."""
    return ConformalMetric(metric.chart, metric.rho, metric.t + dt)


def flow_time_for_bound(lambda_max, eps):
    """Smallest t >= 0 with lambda_max e^{-2t} <= 1/2 - eps."""
    if not 0.0 < eps < 0.5:
        raise SamplingError("margin eps must lie in (0, 1/2)")
    if lambda_max <= 0.0:
        return 0.0
    return max(0.0, 0.5 * math.log(lambda_max / (0.5 - eps)))


@dataclass(frozen=True)
class RealizabilityReport:
    lambda_min: float
    lambda_max: float
    realizable: bool
    suggested_t0: float
    n_samples: int
    flags: tuple = dc_field(default_factory=tuple)


def realizability_report(metric, samples, eps=REALIZABLE_MARGIN, B=REALIZABLE_FLOOR):
    """Aggregate Schouten eigenvalue extremes over a sample set.

    The metric is realizable (at margins eps, B) iff every eigenvalue lies in
    [-B, 1/2 - eps].  Samples may be chart points or DomainSample records;
    points outside the domain are skipped.
    """
    lam_min, lam_max = math.inf, -math.inf
    count = 0
    for sample in samples:
        u = sample.point if isinstance(sample, DomainSample) else sample
        u = np.asarray(u, dtype=float)
        if not metric.rho.in_domain(metric.chart, u):
            continue
        ev = schouten(metric, u).eigenvalues
        lam_min = min(lam_min, float(ev[0]))
        lam_max = max(lam_max, float(ev[-1]))
        count += 1
    if count == 0:
        raise SamplingError("no usable samples for the realizability report")
    flags = []
    if lam_min < -B:
        flags.append("Schouten not bounded below")
    if lam_max > 0.5 - eps:
        flags.append("eigenvalues reach the 1/2 bound")
    realizable = (lam_max <= 0.5 - eps) and (lam_min >= -B)
    return RealizabilityReport(
        lambda_min=lam_min,
        lambda_max=lam_max,
        realizable=realizable,
        suggested_t0=flow_time_for_bound(lam_max, eps),
        n_samples=count,
        flags=tuple(flags),
    )
