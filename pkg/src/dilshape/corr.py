"""Correlation matrices: validation, ensemble estimation, synthetic processes.

A correlation matrix here is always symmetric positive definite with unit
diagonal.  Estimation works on a set of zero-mean realizations and averages
x[i]*x[j] across the ensemble, which is the only consistent estimator when a
single realization is not stationary.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import (
    DegenerateVariance,
    InsufficientRealizations,
    NonPositiveDiagonal,
    NotPositiveDefinite,
    NotSquare,
    NotSymmetric,
    OutOfRange,
)

DEFAULT_PSD_TOLERANCE = 1e-10
REPAIR_EIGENVALUE_FLOOR = 1e-8
SYMMETRY_RTOL = 1e-10

# Steps simulated before sample 0 so the recursion forgets its zero start.
_BURN_IN_FLOOR = 64


@dataclass(frozen=True)
class CorrelationMatrix:
    """Unit-diagonal symmetric positive definite matrix.

    Instances are produced by :func:`validate_spd` and the generators in this
    module, which establish the invariants.  ``repaired`` records whether the
    entries were projected back to the admissible cone during estimation.
    """

    entries: np.ndarray
    repaired: bool = False

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise NotSquare(f"expected a square matrix, got shape {e.shape}")
        if not np.array_equal(e, e.T):
            raise NotSymmetric("entries must be exactly symmetric at construction")
        if not np.allclose(np.diag(e), 1.0, atol=1e-12):
            raise NonPositiveDiagonal("diagonal must be one at construction")

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class RealizationSet:
    """Ensemble of process realizations, one per row."""

    samples: np.ndarray

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise OutOfRange("realizations must form a 2-d array (count, length)")

    @property
    def count(self) -> int:
        return self.samples.shape[0]

    @property
    def length(self) -> int:
        return self.samples.shape[1]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def validate_spd(matrix, psd_tolerance: float = DEFAULT_PSD_TOLERANCE) -> CorrelationMatrix:
    """Check and normalize a candidate correlation matrix.

    Parameters
    ----------
    matrix : array_like
        Square symmetric matrix with positive diagonal.  A diagonal other
        than one is allowed and rescaled away via D^{-1/2} M D^{-1/2}.
    psd_tolerance : float
        Smallest admissible eigenvalue after rescaling.

    Returns
    -------
    CorrelationMatrix

    Raises
    ------
    NotSquare, NotSymmetric, NonPositiveDiagonal, NotPositiveDefinite
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
    if float(np.abs(m - m.T).max()) > SYMMETRY_RTOL * scale:
        raise NotSymmetric("matrix is not symmetric within relative tolerance "
                           f"{SYMMETRY_RTOL:g}")
    m = 0.5 * (m + m.T)
    d = np.diag(m).copy()
    if np.any(d <= 0.0):
        raise NonPositiveDiagonal("diagonal entries must be strictly positive")
    if not np.allclose(d, 1.0, atol=1e-12):
        inv = 1.0 / np.sqrt(d)
        m = m * np.outer(inv, inv)
        m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 1.0)
    smallest = float(np.linalg.eigvalsh(m)[0])
    if smallest <= psd_tolerance:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {smallest:.3e} <= tolerance {psd_tolerance:g}")
    # PD with unit diagonal bounds entries by one; clip float dust only.
    m = np.clip(m, -1.0, 1.0)
    np.fill_diagonal(m, 1.0)
    return CorrelationMatrix(entries=_freeze(m))


def is_toeplitz(matrix, tol: float = 1e-8) -> bool:
    """True when every diagonal is constant to within ``tol`` (max minus min)."""
    e = getattr(matrix, "entries", matrix)
    n = e.shape[0]
    for lag in range(1, n):
        band = np.diagonal(e, offset=lag)
        if float(band.max() - band.min()) > tol:
            return False
    return True


def estimate_ensemble_correlation(data: RealizationSet, n: int,
                                  psd_tolerance: float = DEFAULT_PSD_TOLERANCE,
                                  repair: bool = True) -> CorrelationMatrix:
    """Estimate the correlation of the first ``n`` coordinates of an ensemble.

    The raw estimate is the ensemble average of x[i]*x[j], rescaled to unit
    diagonal.  When the rescaled estimate fails the positive-definiteness
    check and ``repair`` is set, eigenvalues are clipped at
    ``REPAIR_EIGENVALUE_FLOOR``, the diagonal renormalized, and the result
    flagged as repaired.  Caller-provided matrices are never repaired
    silently; only this estimator takes the clipping path.

    Raises
    ------
    InsufficientRealizations
        Fewer than two realizations.
    DegenerateVariance
        Some coordinate is identically zero across the ensemble.
    NotPositiveDefinite
        Estimate is not PD and ``repair`` is disabled.
    """
    if data.count < 2:
        raise InsufficientRealizations(f"need at least 2 realizations, got {data.count}")
    if n < 1 or n > data.length:
        raise OutOfRange(f"n={n} outside 1..{data.length}")
    x = data.samples[:, :n]
    second_moment = x.T @ x / data.count
    d = np.diag(second_moment).copy()
    if np.any(d <= 0.0):
        raise DegenerateVariance("a coordinate has zero sample variance")
    inv = 1.0 / np.sqrt(d)
    corr = second_moment * np.outer(inv, inv)
    try:
        return validate_spd(corr, psd_tolerance)
    except NotPositiveDefinite:
        if not repair:
            raise
    w, v = np.linalg.eigh(0.5 * (corr + corr.T))
    w = np.maximum(w, REPAIR_EIGENVALUE_FLOOR)
    repaired = (v * w) @ v.T
    result = validate_spd(repaired, psd_tolerance)
    return dataclasses.replace(result, repaired=True)


def gen_stationary_ar(a: float, n: int) -> CorrelationMatrix:
    """Correlation matrix a^{|i-j|} of a stationary first-order autoregression."""
    if not -1.0 < a < 1.0:
        raise OutOfRange(f"coefficient must lie in (-1, 1), got {a}")
    if n < 1:
        raise OutOfRange("n must be at least 1")
    row = a ** np.arange(n, dtype=float)
    return validate_spd(toeplitz(row))


def modulation_profile(period: int, depth: float, t) -> np.ndarray:
    """Periodic driving amplitude m(t) = 1 + depth*cos(2*pi*t/period)."""
    return 1.0 + depth * np.cos(2.0 * np.pi * np.asarray(t, dtype=float) / period)


def gen_pc_process(base_coefficient: float, period: int, depth: float, n: int,
                   seed: int, count: int = 256) -> RealizationSet:
    """Sample a periodically correlated first-order autoregression.

    The recursion is x_t = a*x_{t-1} + m(t)*eps_t with independent standard
    normal innovations and the periodic amplitude
    m(t) = 1 + depth*cos(2*pi*t/period) applied to the driving noise, which
    is what makes the correlation structure itself periodic rather than
    merely the variance.  depth=0 recovers the stationary model of
    :func:`gen_stationary_ar`.  The recursion starts from zero far enough in
    the past (8 periods plus a fixed floor) that the returned samples carry
    no visible transient.

    Randomness comes from a 64-bit PCG generator seeded with ``seed``; equal
    arguments give bit-identical output.
    """
    if not -1.0 < base_coefficient < 1.0:
        raise OutOfRange(f"coefficient must lie in (-1, 1), got {base_coefficient}")
    if period < 1:
        raise OutOfRange("period must be at least 1")
    if not 0.0 <= depth < 1.0:
        raise OutOfRange(f"depth must lie in [0, 1), got {depth}")
    if n < 1 or count < 1:
        raise OutOfRange("n and count must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    burn = 8 * period + _BURN_IN_FLOOR
    x = np.zeros(count)
    out = np.empty((count, n))
    for t in range(-burn, n):
        x = base_coefficient * x + modulation_profile(period, depth, t) * rng.standard_normal(count)
        if t >= 0:
            out[:, t] = x
    return RealizationSet(samples=_freeze(out))


def pc_covariance_oracle(base_coefficient: float, period: int, depth: float,
                         n: int) -> np.ndarray:
    """Exact second moments of :func:`gen_pc_process` samples.

    Propagates the variance recursion v_t = a^2 v_{t-1} + m(t)^2 from the
    same zero start the sampler uses, then fills cov(x_i, x_j) =
    a^{|i-j|} v_min(i,j).  Useful as an analytic reference for estimator
    tests; not needed by the pipeline itself.
    """
    a = base_coefficient
    burn = 8 * period + _BURN_IN_FLOOR
    v = 0.0
    variances = np.empty(n)
    for t in range(-burn, n):
        v = a * a * v + float(modulation_profile(period, depth, t)) ** 2
        if t >= 0:
            variances[t] = v
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            cov[i, j] = cov[j, i] = a ** (j - i) * variances[i]
    return cov
