"""The dictionary between conformal metrics and hypersurfaces of hyperbolic
space.

Given a conformal metric e^{2(rho+t)} g_{S^n} on a spherical domain, the
representation formula produces an immersion phi into the hyperboloid together
with its unit normal eta and light-cone map psi = phi + eta:

    phi = (e^w/2)(1 + e^{-2w}(1 + |grad rho|^2))(1, x) + e^{-w}(0, -x + grad rho),
    psi = e^w (1, x),        w = rho(u) + t,

with x the sphere point of the chart coordinate u and grad rho its tangent
gradient pushed into R^{n+1}.  The hyperbolic Gauss map of the result is x
itself, and the principal curvatures kappa_i relate to the Schouten
eigenvalues lambda_i of the metric by lambda = 1/2 - 1/(1 - kappa).

The normal flow phi_t = phi cosh t + eta sinh t acts on this picture as a pure
scale change of the metric; principal curvatures evolve by the fraction
(kappa - tanh t)/(1 - kappa tanh t) and the induced metric by the factor
(cosh t - kappa sinh t)^2.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conformal import flow_time_for_bound, schouten
from .errors import (
    HyperquadricError,
    ImmersionError,
    SamplingError,
    SingularParameterError,
)
from .sphere import DomainSample, gradient_hessian

CANONICAL = "canonical"   # orientation with kappa < 1 on convex hypersurfaces
OPPOSITE = "opposite"     # flipped normal: kappa_opp = -kappa_can


@dataclass(frozen=True)
class HypersurfacePoint:
    """One parameter point of an immersed hypersurface: position phi on the
    hyperboloid, unit normal eta, light-cone map psi = phi + eta, and (when
    computed) tangent frame and fundamental forms."""

    phi: np.ndarray
    eta: np.ndarray
    psi: np.ndarray
    point: np.ndarray
    t: float
    tangents: Optional[np.ndarray] = None       # rows: d phi / d u^i
    first_form: Optional[np.ndarray] = None
    second_form: Optional[np.ndarray] = None


@dataclass(frozen=True)
class CurvatureSpectrum:
    """Sorted eigenvalue list with its orientation tag; kind is 'kappa' for
    principal curvatures, 'lambda' for Schouten eigenvalues."""

    values: np.ndarray
    orientation: str = CANONICAL
    kind: str = "kappa"


@dataclass(frozen=True)
class SupportData:
    rho_tilde: float          # log of the light-cone height psi_0
    gauss_point: np.ndarray   # unit vector of S^n


def immerse(metric, u, t=0.0, margin=None):
    """Evaluate the representation formula at a chart point.

    By default this is a pure evaluation (degenerate inputs produce the
    degenerate output, e.g. rho = 0 collapses to the base point).  Passing
    margin=eps enforces the spectral gate lambda_max e^{-2t} <= 1/2 - eps and
    raises ImmersionError('not immersed at this scale') when it fails.
    """
    u = np.asarray(u, dtype=float)
    if margin is not None:
        lam_max = float(schouten(metric, u).eigenvalues[-1])
        if lam_max * math.exp(-2.0 * t) > 0.5 - margin:
            raise ImmersionError("not immersed at this scale")
    chart = metric.chart
    x = chart.embed(u)
    jets = gradient_hessian(metric.rho, chart, u)
    grad_ambient = chart.jacobian(u) @ (chart.metric_inverse(u) @ jets.gradient)
    w = metric.effective(u) + t
    ew, emw = math.exp(w), math.exp(-w)
    d = len(x) + 1
    one_x = np.empty(d)
    one_x[0] = 1.0
    one_x[1:] = x
    radial = np.empty(d)
    radial[0] = 0.0
    radial[1:] = -x + grad_ambient
    phi = 0.5 * ew * (1.0 + emw**2 * (1.0 + jets.grad_norm_sq)) * one_x + emw * radial
    psi = ew * one_x
    return HypersurfacePoint(phi=phi, eta=psi - phi, psi=psi, point=u, t=t)


def immersion_batch(metric, points, t=0.0):
    """phi and eta arrays over a list of chart points (rows)."""
    phis, etas = [], []
    for u in points:
        p = immerse(metric, u, t)
        phis.append(p.phi)
        etas.append(p.eta)
    return np.array(phis), np.array(etas)


def extrinsic_curvatures(metric, u, t=0.0, h=None, return_point=False):
    """Principal curvatures at a chart point, canonical orientation.

    Tangents come from central differences of the immersion; the first
    fundamental form is I_ij = <d_i phi, d_j phi>, the second form
    II_ij = -<d_i eta, d_j phi> symmetrized, and the kappa's solve the
    generalized symmetric eigenproblem det(II - kappa I) = 0 via Cholesky
    whitening of I.  Raises ImmersionError('not an immersion') when I is not
    positive definite.
    """
    from .minkowski import mink_inner

    u = np.asarray(u, dtype=float)
    if h is None:
        h = metric.rho.h
    n = len(u)
    base = immerse(metric, u, t)
    dphi = np.empty((n, n + 2))
    deta = np.empty((n, n + 2))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        plus = immerse(metric, u + e, t)
        minus = immerse(metric, u - e, t)
        dphi[i] = (plus.phi - minus.phi) / (2 * h)
        deta[i] = (plus.eta - minus.eta) / (2 * h)
    I = np.array([[mink_inner(dphi[i], dphi[j]) for j in range(n)] for i in range(n)])
    II_raw = np.array([[-mink_inner(deta[i], dphi[j]) for j in range(n)] for i in range(n)])
    asym = np.abs(II_raw - II_raw.T).max()
    scale = max(1.0, np.abs(II_raw).max())
    if asym > 1e-4 * scale:
        raise ImmersionError(
            f"second fundamental form asymmetric beyond tolerance ({asym:.2e})")
    II = 0.5 * (II_raw + II_raw.T)
    try:
        L = np.linalg.cholesky(I)
    except np.linalg.LinAlgError:
        raise ImmersionError("not an immersion") from None
    Linv = np.linalg.inv(L)
    kappas = np.linalg.eigvalsh(Linv @ II @ Linv.T)
    spectrum = CurvatureSpectrum(np.sort(kappas), CANONICAL, "kappa")
    if return_point:
        point = HypersurfacePoint(
            phi=base.phi, eta=base.eta, psi=base.psi, point=u, t=t,
            tangents=dphi, first_form=I, second_form=II)
        return spectrum, point
    return spectrum


def lambda_kappa(value, orientation=CANONICAL, direction="lambda_to_kappa"):
    """Convert between Schouten eigenvalues and principal curvatures.

    canonical:  kappa = 1 - 2/(1 - 2 lambda)   <->  lambda = 1/2 - 1/(1 - kappa)
    opposite:   kappa = (1 + 2 lambda)/(1 - 2 lambda)  <->  lambda = (kappa - 1)/(2(kappa + 1))

    For a fixed lambda the two orientations give opposite kappa's.  Accepts
    scalars or arrays.
    """
    v = np.asarray(value, dtype=float)
    if orientation not in (CANONICAL, OPPOSITE):
        raise SingularParameterError(f"unknown orientation {orientation!r}")
    if direction == "lambda_to_kappa":
        if np.any(v >= 0.5):
            raise SingularParameterError("lambda must be < 1/2")
        out = 1.0 - 2.0 / (1.0 - 2.0 * v) if orientation == CANONICAL \
            else (1.0 + 2.0 * v) / (1.0 - 2.0 * v)
    elif direction == "kappa_to_lambda":
        if orientation == CANONICAL:
            if np.any(v == 1.0):
                raise SingularParameterError("kappa = 1 excluded (canonical)")
            out = 0.5 - 1.0 / (1.0 - v)
        else:
            if np.any(v == -1.0):
                raise SingularParameterError("kappa = -1 excluded (opposite)")
            out = (v - 1.0) / (2.0 * (v + 1.0))
    else:
        raise SingularParameterError(f"unknown direction {direction!r}")
    return out if np.ndim(value) else float(out)


def ricatti(kappa, t):
    """Principal curvature after normal flow time t:
    (kappa - tanh t)/(1 - kappa tanh t)."""
    kappa = np.asarray(kappa, dtype=float)
    th = math.tanh(t)
    denom = 1.0 - kappa * th
    if np.any(np.abs(denom) < 1e-14):
        raise SingularParameterError("flow pole: 1 - kappa tanh t = 0")
    out = (kappa - th) / denom
    return out if np.ndim(kappa) else float(out)


def flow_metric_factor(kappa, t):
    """Scale factor (cosh t - kappa sinh t)^2 of the induced metric under the
    normal flow."""
    kappa = np.asarray(kappa, dtype=float)
    out = (math.cosh(t) - kappa * math.sinh(t)) ** 2
    return out if np.ndim(kappa) else float(out)


def fg_metric(metric, u, r):
    """Boundary expansion ghat - r^2 Sch + (r^4/4) Q in chart coordinates,
    with Q_ij = ghat^{kl} Sch_ik Sch_jl."""
    if r < 0:
        raise SingularParameterError("expansion parameter r must be >= 0")
    u = np.asarray(u, dtype=float)
    rep = schouten(metric, u)
    ghat = math.exp(2.0 * metric.effective(u)) * metric.chart.metric(u)
    Q = rep.tensor @ np.linalg.inv(ghat) @ rep.tensor
    return ghat - r**2 * rep.tensor + 0.25 * r**4 * Q


def compactified_sectional(lam, r):
    """Sectional curvature lambda - (r^2/2) lambda^2 of the compactified flow
    metric."""
    lam = np.asarray(lam, dtype=float)
    out = lam - 0.5 * r**2 * lam**2
    return out if np.ndim(lam) else float(out)


def support_and_gauss(point, rtol=1e-8):
    """Support value and Gauss point from the light-cone map psi = e^rho (1, G)."""
    from .minkowski import mink_inner

    psi = point.psi if isinstance(point, HypersurfacePoint) else np.asarray(point, float)
    p0 = psi[..., 0]
    if np.any(p0 <= 0.0):
        raise HyperquadricError("light-cone map must have positive height")
    if np.any(np.abs(mink_inner(psi, psi)) > rtol * np.maximum(1.0, p0**2)):
        raise HyperquadricError("light-cone map is not null within tolerance")
    gauss = psi[..., 1:] / p0[..., None]
    rho_tilde = np.log(p0)
    if psi.ndim == 1:
        return SupportData(float(rho_tilde), gauss)
    return rho_tilde, gauss


def min_immersion_time(metric, samples, margin=1e-3):
    """Smallest flow time after which the spectral gate holds at every sample."""
    lam_max = -math.inf
    count = 0
    for sample in samples:
        u = sample.point if isinstance(sample, DomainSample) else sample
        u = np.asarray(u, dtype=float)
        if not metric.rho.in_domain(metric.chart, u):
            continue
        lam_max = max(lam_max, float(schouten(metric, u).eigenvalues[-1]))
        count += 1
    if count == 0:
        raise SamplingError("no usable samples for the immersion-time estimate")
    return flow_time_for_bound(lam_max, margin)
