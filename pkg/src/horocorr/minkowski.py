"""Minkowski linear algebra and hyperbolic model conversions.

Conventions
-----------
A point of R^{1,n+1} is a numpy array whose LAST axis has length n+2; index 0
is the timelike coordinate.  The inner product is

    <u, v> = -u[0]*v[0] + u[1]*v[1] + ... + u[n+1]*v[n+1].

The hyperboloid model H^{n+1} is {<v,v> = -1, v[0] > 0}, the de Sitter space
S1^{n+1} is {<v,v> = 1}, and the forward null cone N+ is {<v,v> = 0, v[0] > 0}.
A ball point is a numpy array of length n+1 with Euclidean norm < 1 (norm 1 is
reserved for ideal points).

All operations broadcast over leading axes, so an (m, n+2) array is treated as
m vectors at once.
"""

import numpy as np

from .errors import DimensionMismatch, HyperquadricError

# default relative tolerance for quadric membership checks
MEMBERSHIP_RTOL = 1e-9


def _check_dims(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise DimensionMismatch(
            f"ambient dimensions differ: {u.shape[-1]} vs {v.shape[-1]}")
    if u.shape[-1] < 2:
        raise DimensionMismatch("need at least a 1+1 dimensional ambient space")
    return u, v


def mink_inner(u, v):
    """Minkowski inner product -u0*v0 + sum(ui*vi), broadcasting over leading axes."""
    u, v = _check_dims(u, v)
    prod = u * v
    return prod[..., 1:].sum(axis=-1) - prod[..., 0]


def _scale(v):
    # magnitude reference for relative membership tolerances
    return np.maximum(1.0, np.asarray(v)[..., 0] ** 2)


def on_hyperboloid(v, rtol=MEMBERSHIP_RTOL):
    """True where <v,v> = -1 and v0 > 0 within relative tolerance."""
    v = np.asarray(v, dtype=float)
    return (np.abs(mink_inner(v, v) + 1.0) <= rtol * _scale(v)) & (v[..., 0] > 0)


def on_null_cone(v, rtol=MEMBERSHIP_RTOL):
    """True where <v,v> = 0 and v0 > 0 within relative tolerance."""
    v = np.asarray(v, dtype=float)
    return (np.abs(mink_inner(v, v)) <= rtol * _scale(v)) & (v[..., 0] > 0)


def on_de_sitter(v, rtol=MEMBERSHIP_RTOL):
    """True where <v,v> = 1 within relative tolerance."""
    v = np.asarray(v, dtype=float)
    return np.abs(mink_inner(v, v) - 1.0) <= rtol * _scale(v)


def to_poincare_ball(v, rtol=MEMBERSHIP_RTOL):
    """Map a hyperboloid point to the open unit ball: (v1,...,vn+1)/(1+v0).

    Raises HyperquadricError if v is not on the hyperboloid within tolerance.
    Broadcasts over leading axes.
    """
    v = np.asarray(v, dtype=float)
    if rtol is not None and not np.all(on_hyperboloid(v, rtol)):
        raise HyperquadricError("input is not on the hyperboloid within tolerance")
    return v[..., 1:] / (1.0 + v[..., 0])[..., None]


def from_poincare_ball(p):
    """Inverse of to_poincare_ball: x0 = (1+|p|^2)/(1-|p|^2), xi = 2 pi/(1-|p|^2).

    Raises HyperquadricError for |p| >= 1 (ideal point or beyond).
    """
    p = np.asarray(p, dtype=float)
    nsq = (p * p).sum(axis=-1)
    if np.any(nsq >= 1.0):
        raise HyperquadricError("ideal point: |p| >= 1 has no hyperboloid preimage")
    denom = 1.0 - nsq
    out = np.empty(p.shape[:-1] + (p.shape[-1] + 1,))
    out[..., 0] = (1.0 + nsq) / denom
    out[..., 1:] = 2.0 * p / denom[..., None]
    return out


def geodesic_point(phi, eta, t, rtol=MEMBERSHIP_RTOL):
    """Point phi*cosh(t) + eta*sinh(t) of the normal geodesic through phi.

    phi must lie on the hyperboloid and eta on de Sitter space with
    <phi,eta> = 0, all within tolerance (pass rtol=None to skip the check).
    t may be a scalar or an array broadcastable against the leading axes.
    """
    phi, eta = _check_dims(phi, eta)
    if rtol is not None:
        ok = (on_hyperboloid(phi, rtol)
              & on_de_sitter(eta, rtol)
              & (np.abs(mink_inner(phi, eta))
                 <= rtol * np.maximum(1.0, np.abs(phi[..., 0] * eta[..., 0]))))
        if not np.all(ok):
            raise HyperquadricError(
                "geodesic data must satisfy <phi,phi>=-1, <eta,eta>=1, <phi,eta>=0")
    t = np.asarray(t, dtype=float)[..., None]
    return phi * np.cosh(t) + eta * np.sinh(t)
