import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def random_hyperboloid_point(rng, n_ambient=3, spread=0.9):
    """Random point of H^{d-1} via the ball model, d = n_ambient."""
    from horocorr.minkowski import from_poincare_ball

    p = rng.uniform(-1.0, 1.0, size=n_ambient - 1)
    norm = np.linalg.norm(p)
    if norm > 0:
        p *= rng.uniform(0.0, spread) / max(norm, 1e-12)
    return from_poincare_ball(p)


def random_unit_normal(rng, phi):
    """Random unit spacelike vector Minkowski-orthogonal to a hyperboloid point."""
    from horocorr.minkowski import mink_inner

    d = phi.shape[-1]
    while True:
        w = rng.normal(size=d)
        # project out the phi component: w -> w + <w,phi> phi  (since <phi,phi>=-1)
        w = w + mink_inner(w, phi) * phi
        norm_sq = mink_inner(w, w)
        if norm_sq > 1e-6:
            return w / np.sqrt(norm_sq)
