"""Rotation-group primitives: exponential, principal log, metric, transport.

Group elements are plain orthogonal ndarrays with determinant +1, algebra
elements are skew-symmetric ndarrays.  The metric is the flat trace form
inner(A, B) = trace(A B^T), bi-invariant on the group; no extra scale factor
is applied, so dim 2 (where the Killing form vanishes) uses the same
formulas as everything else.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm, schur

from .errors import (
    DimMismatch,
    NearCutLocus,
    NotOrthogonal,
    NotSkew,
    NotTangent,
    WrongComponent,
)

CUT_MARGIN = 1e-6
ORTHOGONALITY_TOL = 1e-9
SKEW_TOL = 1e-10
TANGENT_TOL = 1e-8


def project_skew(m) -> np.ndarray:
    """Skew part (m - m^T) / 2."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m - m.T)


def ensure_skew(m, tol: float = SKEW_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
    if float(np.abs(m + m.T).max()) > tol * scale:
        raise NotSkew("matrix is not skew-symmetric within tolerance")
    return project_skew(m)


def ensure_rotation(g, tol: float = ORTHOGONALITY_TOL) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {g.shape}")
    if float(np.abs(g @ g.T - np.eye(g.shape[0])).max()) > tol:
        raise NotOrthogonal("matrix is not orthogonal within tolerance")
    return g


def component_sign(g) -> int:
    """+1 for the identity component, -1 for the reflection component."""
    return 1 if np.linalg.det(np.asarray(g, dtype=float)) > 0.0 else -1


def exp_group(omega) -> np.ndarray:
    """Matrix exponential of a skew-symmetric matrix; lands on det +1 rotations."""
    return expm(ensure_skew(omega))


def log_group(g, cut_margin: float = CUT_MARGIN) -> np.ndarray:
    """Principal logarithm of a rotation, skew-symmetric with angles below pi.

    Uses the real Schur form: an orthogonal matrix decomposes into planar
    rotation blocks and +-1 fixed directions, each with an unambiguous log
    as long as no rotation angle reaches pi.

    Raises
    ------
    WrongComponent
        det(g) = -1; no logarithm exists in the algebra.
    NearCutLocus
        Some rotation angle is >= pi - cut_margin, where the principal
        branch becomes unstable.
    """
    g = ensure_rotation(g)
    if component_sign(g) < 0:
        raise WrongComponent("determinant is -1")
    t, z = schur(g, output="real")
    n = g.shape[0]
    log_t = np.zeros((n, n))
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 1e-12:
            theta = np.arctan2(t[i + 1, i], t[i, i])
            if abs(theta) >= np.pi - cut_margin:
                raise NearCutLocus(f"rotation angle {abs(theta):.9f} within "
                                   f"{cut_margin:g} of pi")
            log_t[i, i + 1] = -theta
            log_t[i + 1, i] = theta
            i += 2
        else:
            # Orthogonal fixed directions carry +-1; -1 means an angle of pi.
            if t[i, i] < 0.0:
                raise NearCutLocus("eigenvalue -1: rotation angle is pi")
            i += 1
    return project_skew(z @ log_t @ z.T)


def inner(a, b) -> float:
    """trace(a b^T), the flat bi-invariant metric on the algebra."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.sum(a * b))


def norm(a) -> float:
    return float(np.sqrt(max(0.0, inner(a, a))))


def bracket(a, b) -> np.ndarray:
    """Commutator [a, b] = ab - ba of two algebra elements."""
    a = ensure_skew(a)
    b = ensure_skew(b)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")
    return project_skew(a @ b - b @ a)


def transport_to_identity(g, v) -> np.ndarray:
    """Right-translate a tangent vector v at g to the algebra: v g^T.

    Raises NotTangent when v g^T is not skew within tolerance, i.e. v was
    not actually tangent at g.
    """
    g = ensure_rotation(g)
    v = np.asarray(v, dtype=float)
    if v.shape != g.shape:
        raise DimMismatch(f"shapes {v.shape} and {g.shape} differ")
    omega = v @ g.T
    scale = max(1.0, float(np.abs(omega).max()))
    if float(np.abs(omega + omega.T).max()) > TANGENT_TOL * scale:
        raise NotTangent("v is not tangent at g")
    return project_skew(omega)


def geodesic(g0, g1, s: float) -> np.ndarray:
    """Point at parameter s on the geodesic from g0 to g1.

    exp(s log(g1 g0^T)) g0; s = 0 and s = 1 give the endpoints, the speed
    is constant, and the whole path stays in the group.
    """
    g0 = ensure_rotation(g0)
    g1 = ensure_rotation(g1)
    if g0.shape != g1.shape:
        raise DimMismatch(f"shapes {g0.shape} and {g1.shape} differ")
    return exp_group(float(s) * log_group(g1 @ g0.T)) @ g0


def geodesic_distance(g0, g1) -> float:
    """Length of the connecting geodesic: norm of log(g1 g0^T)."""
    g0 = ensure_rotation(g0)
    g1 = ensure_rotation(g1)
    return norm(log_group(g1 @ g0.T))
