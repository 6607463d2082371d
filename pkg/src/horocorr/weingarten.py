"""Elliptic calculus of symmetric curvature functions.

A curvature equation can be written on either side of the metric/hypersurface
dictionary: as f(lambda_1, ..., lambda_n) = const on Schouten eigenvalues, or
as W(kappa_1, ..., kappa_n) = const on principal curvatures in the opposite
orientation.  The two sides are conjugate under the componentwise Moebius map

    T(x) = 1/2 - 1/(1 + x),     T^{-1}(y) = (1 + 2y)/(1 - 2y),

which carries the cone K = {x_i > -1} onto C = {y_i < 1/2} and preserves
ellipticity (positivity of all partial derivatives).  The normal flow acts on
the hypersurface side by another componentwise Moebius shift by tanh(t).
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import RootBracketError, SingularParameterError

METRIC_SIDE = "metric"            # f acting on Schouten eigenvalues, cone in C
HYPERSURFACE_SIDE = "hypersurface"  # W acting on principal curvatures, cone in K

CONE_C = "C"        # all x_i < 1/2
CONE_K = "K"        # all x_i > -1
CONE_GAMMA_N = "Gamma_n"  # all x_i > 0


def in_cone(x, tag):
    x = np.asarray(x, dtype=float)
    if tag == CONE_C:
        return bool(np.all(x < 0.5))
    if tag == CONE_K:
        return bool(np.all(x > -1.0))
    if tag == CONE_GAMMA_N:
        return bool(np.all(x > 0.0))
    raise SingularParameterError(f"unknown cone tag {tag!r}")


@dataclass(frozen=True)
class ConePoint:
    coordinates: np.ndarray
    tag: str

    def __post_init__(self):
        if not in_cone(self.coordinates, self.tag):
            raise SingularParameterError(
                f"point {self.coordinates} violates the {self.tag} inequalities")


def t_map(x, direction="k_to_c"):
    """Componentwise Moebius map between the two eigenvalue cones.

    k_to_c: x -> 1/2 - 1/(1+x) for x in K; c_to_k: y -> (1+2y)/(1-2y) for
    y in C.  Both are strictly increasing in every component.
    """
    x = np.asarray(x, dtype=float)
    if direction == "k_to_c":
        if np.any(x <= -1.0):
            raise SingularParameterError("input outside K: needs all x > -1")
        return 0.5 - 1.0 / (1.0 + x)
    if direction == "c_to_k":
        if np.any(x >= 0.5):
            raise SingularParameterError("input outside C: needs all x < 1/2")
        return (1.0 + 2.0 * x) / (1.0 - 2.0 * x)
    raise SingularParameterError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class CurvatureFunction:
    """Symmetric function of n eigenvalues with optional analytic jets.

    cone(x) -> bool marks the admissible open set (sampled, not certified);
    gradient and hessian, when given, are analytic derivatives.
    """

    side: str
    n: int
    eval: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    cone: Optional[Callable[[np.ndarray], bool]] = None
    name: str = ""

    def __call__(self, x):
        return float(self.eval(np.asarray(x, dtype=float)))


def _sigma_value(x, k):
    # coefficients of prod(t + x_i) are the elementary symmetric polynomials
    return float(np.poly(-np.asarray(x, dtype=float))[k])


def elementary_symmetric(n, k, side=METRIC_SIDE):
    """Elementary symmetric polynomial sigma_k of n eigenvalues."""
    if not 1 <= k <= n:
        raise SingularParameterError("need 1 <= k <= n")

    def gradient(x):
        x = np.asarray(x, dtype=float)
        return np.array([
            _sigma_value(np.delete(x, i), k - 1) if k > 1 else 1.0
            for i in range(n)])

    def hessian(x):
        x = np.asarray(x, dtype=float)
        H = np.zeros((n, n))
        if k >= 2:
            for i in range(n):
                for j in range(i + 1, n):
                    rest = np.delete(x, [i, j])
                    H[i, j] = H[j, i] = (
                        _sigma_value(rest, k - 2) if k > 2 else 1.0)
        return H

    base_tag = CONE_C if side == METRIC_SIDE else CONE_K
    return CurvatureFunction(
        side=side,
        n=n,
        eval=lambda x: _sigma_value(x, k),
        gradient=gradient,
        hessian=hessian,
        cone=lambda x: in_cone(x, base_tag) and _sigma_value(x, k) > 0.0,
        name=f"sigma_{k}",
    )


def mean_function(n, side=METRIC_SIDE):
    sigma = elementary_symmetric(n, 1, side)
    return CurvatureFunction(
        side=side,
        n=n,
        eval=lambda x: sigma(x) / n,
        gradient=lambda x: np.full(n, 1.0 / n),
        hessian=lambda x: np.zeros((n, n)),
        cone=sigma.cone,
        name="mean",
    )


def power_mean(n, p, side=METRIC_SIDE):
    """((sum x_i^p)/n)^(1/p); admissible only on the positive cone."""
    if p == 0:
        raise SingularParameterError("p = 0 excluded; use the geometric mean directly")

    def value(x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0.0):
            raise SingularParameterError("power mean needs positive entries")
        return float((np.mean(x**p)) ** (1.0 / p))

    def gradient(x):
        x = np.asarray(x, dtype=float)
        m = np.mean(x**p)
        return (m ** (1.0 / p - 1.0)) * (x ** (p - 1.0)) / n

    base_tag = CONE_C if side == METRIC_SIDE else CONE_K
    return CurvatureFunction(
        side=side,
        n=n,
        eval=value,
        gradient=gradient,
        cone=lambda x: in_cone(x, CONE_GAMMA_N) and in_cone(x, base_tag),
        name=f"power_mean_{p}",
    )


def conjugate(F):
    """Transport a curvature function to the other side of the dictionary:
    metric-side f becomes W = f o T, hypersurface-side W becomes f = W o T^{-1}.
    Cone predicates and analytic gradients are transported along."""
    if F.side == METRIC_SIDE:
        fwd, back, new_side = "k_to_c", "c_to_k", HYPERSURFACE_SIDE

        def dmap(x):  # componentwise derivative of T on K
            return 1.0 / (1.0 + np.asarray(x, dtype=float)) ** 2
    elif F.side == HYPERSURFACE_SIDE:
        fwd, back, new_side = "c_to_k", "k_to_c", METRIC_SIDE

        def dmap(x):  # componentwise derivative of T^{-1} on C
            return 4.0 / (1.0 - 2.0 * np.asarray(x, dtype=float)) ** 2
    else:
        raise SingularParameterError(f"unknown side {F.side!r}")

    def value(x):
        return F.eval(t_map(x, fwd))

    gradient = None
    if F.gradient is not None:
        def gradient(x):
            return np.asarray(F.gradient(t_map(x, fwd)), dtype=float) * dmap(x)

    cone = None
    if F.cone is not None:
        def cone(x):
            x = np.asarray(x, dtype=float)
            if new_side == HYPERSURFACE_SIDE and np.any(x <= -1.0):
                return False
            if new_side == METRIC_SIDE and np.any(x >= 0.5):
                return False
            return bool(F.cone(t_map(x, fwd)))

    return CurvatureFunction(
        side=new_side,
        n=F.n,
        eval=value,
        gradient=gradient,
        cone=cone,
        name=f"conj[{F.name}]" if F.name else "",
    )


def flow_conjugate(W, t):
    """Hypersurface-side function after normal flow time t:
    W^t(x) = W((x - tanh t)/(1 - x tanh t)) componentwise."""
    if W.side != HYPERSURFACE_SIDE:
        raise SingularParameterError("flow conjugation acts on hypersurface-side functions")
    th = math.tanh(t)

    def shift(x):
        x = np.asarray(x, dtype=float)
        denom = 1.0 - x * th
        if np.any(np.abs(denom) < 1e-14):
            raise SingularParameterError("flow pole: 1 - x tanh t = 0")
        return (x - th) / denom

    def value(x):
        return W.eval(shift(x))

    gradient = None
    if W.gradient is not None:
        def gradient(x):
            x = np.asarray(x, dtype=float)
            inner = np.asarray(W.gradient(shift(x)), dtype=float)
            return inner * (1.0 - th**2) / (1.0 - x * th) ** 2

    cone = None
    if W.cone is not None:
        def cone(x):
            try:
                return bool(W.cone(shift(x)))
            except SingularParameterError:
                return False

    return CurvatureFunction(
        side=HYPERSURFACE_SIDE,
        n=W.n,
        eval=value,
        gradient=gradient,
        cone=cone,
        name=f"{W.name}^t" if W.name else "",
    )


@dataclass(frozen=True)
class EllipticityRecord:
    point: np.ndarray
    partials: np.ndarray
    elliptic: bool   # all partials strictly positive
    smooth: bool     # one-sided differences agree (no kink detected)


def ellipticity_check(F, points, h=1e-5):
    """Finite-difference ellipticity report at each point.

    A point is elliptic when every partial derivative is strictly positive.
    One-sided differences are compared to flag kinks (non-smooth evaluation),
    in which case elliptic is forced False.
    """
    records = []
    for point in points:
        x = np.asarray(point, dtype=float)
        f0 = F.eval(x)
        if not np.isfinite(f0):
            raise SingularParameterError(f"non-finite evaluation at {x}")
        partials = np.empty(F.n)
        smooth = True
        for i in range(F.n):
            e = np.zeros(F.n)
            e[i] = h
            fp, fm = F.eval(x + e), F.eval(x - e)
            if not (np.isfinite(fp) and np.isfinite(fm)):
                raise SingularParameterError(f"non-finite evaluation near {x}")
            forward = (fp - f0) / h
            backward = (f0 - fm) / h
            partials[i] = 0.5 * (forward + backward)
            if abs(forward - backward) > 100.0 * h * (1.0 + abs(f0) + abs(partials[i])):
                smooth = False
        records.append(EllipticityRecord(
            point=x,
            partials=partials,
            elliptic=bool(smooth and np.all(partials > 0.0)),
            smooth=smooth,
        ))
    return records


def hessian_transform(f, kappa, h=1e-4):
    """Hessian of the conjugate W = f o T expressed through f's jets:

        d2W/dk_i dk_j = f_ij / ((1+k_i)^2 (1+k_j)^2) - 2 delta_ij f_i / (1+k_i)^3

    evaluated at lambda = T(kappa).  f must be metric-side."""
    if f.side != METRIC_SIDE:
        raise SingularParameterError("hessian transform starts from a metric-side function")
    kappa = np.asarray(kappa, dtype=float)
    lam = t_map(kappa, "k_to_c")
    if f.gradient is not None:
        grad = np.asarray(f.gradient(lam), dtype=float)
    else:
        grad = _fd_gradient(f, lam, h)
    if f.hessian is not None:
        hess = np.asarray(f.hessian(lam), dtype=float)
    else:
        hess = _fd_hessian(f, lam, h)
    one = 1.0 + kappa
    out = hess / np.outer(one**2, one**2)
    out[np.diag_indices_from(out)] -= 2.0 * grad / one**3
    return 0.5 * (out + out.T)


def _fd_gradient(F, x, h):
    grad = np.empty(F.n)
    for i in range(F.n):
        e = np.zeros(F.n)
        e[i] = h
        grad[i] = (F.eval(x + e) - F.eval(x - e)) / (2 * h)
    return grad


def _fd_hessian(F, x, h):
    n = F.n
    f0 = F.eval(x)
    H = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        H[i, i] = (F.eval(x + e) - 2 * f0 + F.eval(x - e)) / h**2
    for i in range(n):
        for j in range(i + 1, n):
            ei, ej = np.zeros(n), np.zeros(n)
            ei[i], ej[j] = h, h
            H[i, j] = H[j, i] = (
                F.eval(x + ei + ej) - F.eval(x + ei - ej)
                - F.eval(x - ei + ej) + F.eval(x - ei - ej)) / (4 * h**2)
    return H


def hr_inequality(a):
    """Order inequality sum (a_i - 1)/(a_i + 1) <= 2 sum a_i - n for a_i > -1.

    Returns (lhs, rhs, holds); equality at a = 0."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= -1.0):
        raise SingularParameterError("inequality needs all entries > -1")
    lhs = float(np.sum((a - 1.0) / (a + 1.0)))
    rhs = float(2.0 * np.sum(a) - len(a))
    return lhs, rhs, bool(lhs <= rhs + 1e-12)


def admissible_constant(F, C, bracket, h=1e-6):
    """Diagonal root F(x, ..., x) = C inside a bracket.

    Validates a sign change over the bracket, that the root has a strictly
    positive diagonal derivative, and (when F carries a cone predicate) that
    the diagonal point is admissible."""
    a, b = bracket

    def diag(x):
        return F.eval(np.full(F.n, float(x))) - C

    fa, fb = diag(a), diag(b)
    if not (np.isfinite(fa) and np.isfinite(fb)):
        raise RootBracketError("bracket endpoints do not evaluate finitely")
    if fa * fb > 0:
        raise RootBracketError("bracket does not straddle a sign change")
    root = float(brentq(diag, a, b, xtol=1e-13))
    slope = (diag(root + h) - diag(root - h)) / (2 * h)
    if slope <= 0:
        raise RootBracketError("diagonal derivative nonpositive at the root")
    if F.cone is not None and not F.cone(np.full(F.n, root)):
        raise RootBracketError("diagonal root falls outside the admissible cone")
    return root
