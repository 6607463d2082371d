"""Horospherically convex hypersurfaces in hyperbolic space from conformal
metrics on spherical domains.

The core dictionary: a conformal factor rho on a domain of the round sphere
determines an immersed hypersurface of hyperbolic space whose hyperbolic Gauss
map is the identity on the domain; curvature data translate back and forth
through the relation lambda = 1/2 - 1/(1 - kappa).  The package builds the
immersions, cross-validates intrinsic (Schouten) against extrinsic (principal)
curvatures, runs the normal flow, and implements the elliptic calculus of
curvature functions on both sides of the dictionary.
"""

__version__ = "0.1.0"
