"""Shared construction helpers for the test suite."""

import numpy as np
from scipy.linalg import expm

from dilshape.curves import ManifoldCurve


def random_skew(rng, d, scale=1.0):
    m = rng.standard_normal((d, d))
    return scale * 0.5 * (m - m.T)


def random_rotation(rng, d, scale=1.0):
    """Rotation reachable by exp, angles well inside the principal branch."""
    return expm(random_skew(rng, d, scale))


def bounded_skew(rng, d, max_angle):
    """Skew matrix whose largest rotation angle is exactly ``max_angle``."""
    m = random_skew(rng, d)
    radius = np.abs(np.linalg.eigvals(m).imag).max()
    if radius == 0.0:
        return m
    return m * (max_angle / radius)


# A fixed smooth motion on SO(3) used wherever tests need a curve with a
# closed form at every parameter, not just at sample points.
_GEN_A = np.array([[0.0, -1.0, 0.3],
                   [1.0, 0.0, -0.5],
                   [-0.3, 0.5, 0.0]]) * 0.9
_GEN_B = np.array([[0.0, 0.4, -0.2],
                   [-0.4, 0.0, 1.1],
                   [0.2, -1.1, 0.0]]) * 0.8


def smooth_point(t):
    return expm(np.sin(np.pi * t / 2.0) * 2.0 * _GEN_A) @ expm(
        (t + 0.3 * np.sin(np.pi * t)) * _GEN_B)


def smooth_curve(params):
    """Sample the fixed smooth motion at the given parameters in [0, 1]."""
    pts = np.stack([smooth_point(t) for t in np.asarray(params, dtype=float)])
    return ManifoldCurve(points=pts)


def stepped_curve(rng, n, d, scale=0.35):
    """Random curve from the identity built out of moderate geodesic steps."""
    pts = np.empty((n + 1, d, d))
    pts[0] = np.eye(d)
    for k in range(n):
        pts[k + 1] = expm(random_skew(rng, d, scale)) @ pts[k]
    return ManifoldCurve(points=pts)


def exhaustive_lattice_min(q0, q1, g, steps):
    """Minimum warped gap over every admissible lattice path, by enumeration.

    Written independently of the production search: plain recursion over
    outgoing steps with direct evaluation of each edge integrand.  Reads both
    q sequences as values at segment midpoints, linear in between, flat past
    the ends.
    """
    def read(q, pos):
        n = q.shape[0]
        mids = (np.arange(n) + 0.5) / n
        flat = q.reshape(n, -1)
        return np.array([np.interp(pos, mids, flat[:, c])
                         for c in range(flat.shape[1])])

    from functools import lru_cache

    @lru_cache(maxsize=None)
    def from_node(i, j):
        if i == g and j == g:
            return 0.0
        best = np.inf
        for a, b in steps:
            if i + a > g or j + b > g:
                continue
            sigma = b / a
            cost = 0.0
            for r in range(a):
                t_mid = (i + r + 0.5) / g
                p_mid = min((j + sigma * (r + 0.5)) / g, 1.0)
                gap = read(q0, t_mid) - np.sqrt(sigma) * read(q1, p_mid)
                cost += float(gap @ gap)
            best = min(best, cost / g + from_node(i + a, j + b))
        return best

    return from_node(0, 0)
