"""Elastic comparison of rotation-group curves through velocity transforms.

The transported square-root-velocity transform maps a curve to the flat
sequence q_k = v_k / sqrt(|v_k|) of normalized right-trivialized velocities.
In these coordinates geodesics between curves are straight lines, the curve
distance is the L2 gap, and reparametrization acts as
q -> (q o phi) sqrt(phi'), which a dynamic program over monotone lattice
paths can minimize to give a parametrization-blind shape distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import ManifoldCurve, srv_values
from .errors import (
    DegenerateCurve,
    DimMismatch,
    GridMismatch,
    NotClosed,
    VanishingVelocity,
)
from .liegroup import exp_group, norm

Q_FLOOR = 1e-10
KARCHER_TOL = 1e-8

# Lattice steps (a, b): advance a nodes in t and b in phi, slopes 1/3 .. 3.
# The unit diagonal comes first so exact ties resolve to the identity warp.
DP_STEPS = ((1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2), (2, 2), (3, 3))

# Denser slopes around one for correction passes, where the leftover warp
# is near the identity and coarse steps over- or undershoot it.
FINE_STEPS = ((1, 1),) + tuple(
    (a, b)
    for a in range(1, 9)
    for b in range(1, 9)
    if (a, b) != (1, 1) and np.gcd(a, b) == 1 and 0.5 <= b / a <= 2.0
)

# Ladder of slopes approaching unity for the last correction level.  A
# lattice excursion of amplitude d costs about d (sqrt(1 + 1/a) - 1)^2 a
# per side, which falls off as 1 / a, so long near-diagonal steps let the
# search cancel path deviations too small for the coarser slope sets.
NEAR_STEPS = ((1, 1), (7, 8), (8, 7), (11, 12), (12, 11),
              (15, 16), (16, 15), (23, 24), (24, 23))


@dataclass(frozen=True)
class TsrvCurve:
    """Flat coordinates of a curve: start point plus q values per segment."""

    start: np.ndarray
    values: np.ndarray
    degenerate: np.ndarray

    @property
    def segments(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Reparametrization:
    """Piecewise-linear non-decreasing warp of [0, 1] onto itself."""

    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.ndim != 1 or v.size < 2:
            raise GridMismatch("warp needs at least two nodes")
        if abs(v[0]) > 1e-12 or abs(v[-1] - 1.0) > 1e-12:
            raise GridMismatch("warp must map 0 to 0 and 1 to 1")
        if np.any(np.diff(v) < -1e-15):
            raise GridMismatch("warp must be non-decreasing")

    def __call__(self, t):
        grid = np.linspace(0.0, 1.0, self.values.size)
        return np.interp(t, grid, self.values)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def tsrv(curve: ManifoldCurve, q_floor: float = Q_FLOOR) -> TsrvCurve:
    """Transform a curve to flat coordinates.

    Raises VanishingVelocity when any segment's q norm falls below
    ``q_floor``: such a curve has no well-defined direction there and cannot
    be transformed faithfully.
    """
    q, vnorms = srv_values(curve)
    qnorms = np.sqrt(vnorms)
    bad = qnorms < q_floor
    if bad.any():
        raise VanishingVelocity(
            f"{int(bad.sum())} of {q.shape[0]} segments below q_floor {q_floor:g}")
    flags = np.zeros(q.shape[0], dtype=bool)
    flags.setflags(write=False)
    return TsrvCurve(start=_frozen(curve.points[0]), values=_frozen(q), degenerate=flags)


def tsrv_inverse(t: TsrvCurve) -> ManifoldCurve:
    """Integrate flat coordinates back to a curve.

    x_{k+1} = exp(q_k |q_k| / N) x_k starting from the recorded start point;
    inverts :func:`tsrv` exactly up to roundoff.  Degenerate (zero) segments
    simply hold the point.
    """
    n = t.segments
    d = t.dim
    pts = np.empty((n + 1, d, d))
    pts[0] = t.start
    for k in range(n):
        q = t.values[k]
        step = q * (norm(q) / n)
        pts[k + 1] = exp_group(0.5 * (step - step.T)) @ pts[k]
    return ManifoldCurve(points=_frozen(pts), closed=False, base=None)


def _check_comparable(c0: ManifoldCurve, c1: ManifoldCurve, need_same_grid: bool):
    if c0.dim != c1.dim:
        raise DimMismatch(f"dims {c0.dim} and {c1.dim} differ")
    if need_same_grid and c0.segments != c1.segments:
        raise GridMismatch(f"grids {c0.segments} and {c1.segments} differ")
    for c in (c0, c1):
        if not c.starts_at_identity():
            raise GridMismatch("curves must start at the identity; "
                               "translate before comparing")


def curve_distance(c0: ManifoldCurve, c1: ManifoldCurve) -> float:
    """Parametrization-sensitive distance: L2 gap of the q sequences."""
    _check_comparable(c0, c1, need_same_grid=True)
    q0, _ = srv_values(c0)
    q1, _ = srv_values(c1)
    n = q0.shape[0]
    gap = q0 - q1
    return float(np.sqrt(np.sum(gap * gap) / n))


def geodesic_between(c0: ManifoldCurve, c1: ManifoldCurve, s: float) -> ManifoldCurve:
    """Point at parameter s on the geodesic of curves from c0 to c1.

    Interpolates linearly in flat coordinates and integrates back.
    Interpolated segments whose q norm collapses below the floor are flagged
    degenerate and contribute no motion instead of failing.
    """
    _check_comparable(c0, c1, need_same_grid=True)
    q0 = tsrv(c0)
    q1 = tsrv(c1)
    mix = (1.0 - s) * q0.values + s * q1.values
    flags = np.array([norm(m) < Q_FLOOR for m in mix])
    mix = mix.copy()
    mix[flags] = 0.0
    flags.setflags(write=False)
    eye = np.eye(c0.dim)
    combined = TsrvCurve(start=_frozen(eye), values=_frozen(mix), degenerate=flags)
    return tsrv_inverse(combined)


def _pl_at(q: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Piecewise-linear read of a q sequence at parameter positions.

    Values live at segment midpoints (k + 1/2) / n and extend flat beyond
    the first and last midpoint; this is the same composition rule the warp
    application uses, so search and evaluation agree.
    """
    n = q.shape[0]
    mids = (np.arange(n) + 0.5) / n
    flat = q.reshape(n, -1)
    out = np.empty((positions.size, flat.shape[1]))
    for col in range(flat.shape[1]):
        out[:, col] = np.interp(positions, mids, flat[:, col])
    return out


def _dp_align(q0: np.ndarray, q1: np.ndarray, grid: int,
              base: np.ndarray | None = None, steps=DP_STEPS,
              band: int | None = None):
    """Minimal warped q-gap over monotone lattice paths.

    Lattice nodes (i, j) represent (t, phi) = (i, j) / G where G is the
    smallest multiple of the t-side segment count at least ``grid``; that
    alignment lets the unit-diagonal path reproduce the plain curve
    distance.  Edges advance by DP_STEPS; the cost of an edge of slope
    sigma = b / a integrates |q0(t) - q1(phi(t)) sqrt(sigma)|^2 with the
    midpoint rule on the G sub-intervals it spans, reading both sequences
    through the piecewise-linear rule.  With ``base``, q1 is read through
    that warp first (values composed, slope factor folded in), which turns
    a second run into a correction of an earlier alignment; ``band`` then
    restricts nodes to |j - i| <= band, ample for corrections, which stay
    near the diagonal.  Returns (squared gap, warp nodes).
    """
    n0 = q0.shape[0]
    g = n0 * int(np.ceil(grid / n0))
    cellmids = (np.arange(g) + 0.5) / g
    p0 = _pl_at(q0, cellmids)
    a0 = np.einsum("md,md->m", p0, p0)

    if base is None:
        def read_q1(positions):
            return _pl_at(q1, positions)
    else:
        base_grid = np.linspace(0.0, 1.0, base.size)
        base_slopes = np.maximum(np.diff(base) * (base.size - 1), 0.0)

        def read_q1(positions):
            mapped = np.interp(positions, base_grid, base)
            cells = np.clip((positions * (base.size - 1)).astype(int),
                            0, base.size - 2)
            return _pl_at(q1, mapped) * np.sqrt(base_slopes[cells])[:, None]

    # q1 reads depend on (step, cell offset) only through a uniform shift,
    # so each pair gets one table of g + 1 interpolated rows.
    v_tab = []
    b_tab = []
    for a, b in steps:
        sigma = b / a
        vs = []
        bs = []
        for r in range(a):
            positions = np.minimum((np.arange(g + 1) + sigma * (r + 0.5)) / g, 1.0)
            v = read_q1(positions)
            vs.append(v)
            bs.append(np.einsum("md,md->m", v, v))
        v_tab.append(vs)
        b_tab.append(bs)
    inf = float("inf")
    dist = np.full((g + 1, g + 1), inf)
    dist[0, 0] = 0.0
    choice = np.full((g + 1, g + 1), -1, dtype=np.int8)
    for i2 in range(1, g + 1):
        row = dist[i2]
        for step_idx, (a, b) in enumerate(steps):
            i1 = i2 - a
            if i1 < 0 or b > g:
                continue
            j_lo, j_hi = 0, g - b
            if band is not None:
                j_lo = max(j_lo, i1 - band)
                j_hi = min(j_hi, i1 + band)
            if j_hi < j_lo:
                continue
            sigma = b / a
            root = np.sqrt(sigma)
            j1s = np.arange(j_lo, j_hi + 1)
            cost = np.zeros(j1s.size)
            for r in range(a):
                v = v_tab[step_idx][r]
                cost += (a0[i1 + r]
                         - 2.0 * root * (v[j1s] @ p0[i1 + r])
                         + sigma * b_tab[step_idx][r][j1s])
            cand = dist[i1, j1s] + cost / g
            j2s = j1s + b
            better = cand < row[j2s]
            if better.any():
                row[j2s[better]] = cand[better]
                choice[i2, j2s[better]] = step_idx
    if not np.isfinite(dist[g, g]):
        raise GridMismatch("no admissible lattice path; grid too coarse")
    # Trace the winning path back and fill phi at every t node.
    phi_nodes = np.empty(g + 1)
    i, j = g, g
    phi_nodes[g] = 1.0
    while i > 0:
        a, b = steps[choice[i, j]]
        pi, pj = i - a, j - b
        for t in range(pi, i):
            phi_nodes[t] = (pj + (b / a) * (t - pi)) / g
        i, j = pi, pj
    return max(float(dist[g, g]), 0.0), phi_nodes


def _eval_warp_cost(q0: np.ndarray, q1: np.ndarray, phi_nodes: np.ndarray) -> float:
    """Discretized warped q-gap for a piecewise-linear phi on uniform nodes.

    Uses the same midpoint rule and piecewise-linear reads as the lattice
    search, so evaluating a DP path reproduces its DP cost to roundoff.
    """
    g = phi_nodes.size - 1
    cellmids = (np.arange(g) + 0.5) / g
    p0 = _pl_at(q0, cellmids)
    phi_mid = 0.5 * (phi_nodes[:-1] + phi_nodes[1:])
    p1 = _pl_at(q1, phi_mid)
    sigma = np.maximum(np.diff(phi_nodes) * g, 0.0)
    gap = p0 - np.sqrt(sigma)[:, None] * p1
    return max(float(np.einsum("md,md->m", gap, gap).mean()), 0.0)


def _smooth_warp(phi_nodes: np.ndarray, halfwidth: int) -> np.ndarray:
    """Soften the slope quantization of a lattice path.

    Two moving-average passes with antisymmetric extension beyond the
    endpoints, which keeps phi(0) = 0, phi(1) = 1 and monotonicity while
    averaging the discrete slope levels toward the underlying smooth warp.
    """
    g = phi_nodes.size - 1
    h = min(halfwidth, g)
    if h < 1:
        return phi_nodes.copy()
    out = phi_nodes
    kernel = np.full(2 * h + 1, 1.0 / (2 * h + 1))
    for _ in range(2):
        padded = np.concatenate([-out[h:0:-1], out, 2.0 - out[-2:-h - 2:-1]])
        out = np.convolve(padded, kernel, mode="valid")
    out[0] = 0.0
    out[-1] = 1.0
    return np.maximum.accumulate(np.clip(out, 0.0, 1.0))


def _aligned(q0: np.ndarray, q1: np.ndarray, grid: int):
    """Best warp from iterated lattice searches with smoothing.

    The documented lattice search provides the global alignment; its path
    carries slope quantization noise, so each round smooths it at a few
    window widths and reruns the search, at a finer lattice with a denser
    near-unit slope set, against the warp found so far: the leftover warp
    sits near the identity where those corrections are cheap.  All
    candidates, the identity included, are scored by the common evaluation
    rule on one fine node grid and the lowest wins, so the result never
    exceeds the plain curve gap.
    """
    sq_raw, phi_raw = _dp_align(q0, q1, grid)
    g = phi_raw.size - 1
    gf = 6 * g
    fine_nodes = np.linspace(0.0, 1.0, gf + 1)

    def lift(phi):
        return np.interp(fine_nodes, np.linspace(0.0, 1.0, phi.size), phi)

    windows = sorted({max(2, gf // 200), max(3, gf // 100),
                      gf // 50, gf // 24, gf // 12})
    sq_best, phi_best = _eval_warp_cost(q0, q1, fine_nodes), fine_nodes
    candidates = [lift(phi_raw)]
    candidates += [_smooth_warp(candidates[0], h) for h in windows]
    for cand in candidates:
        sq = _eval_warp_cost(q0, q1, cand)
        if sq < sq_best:
            sq_best, phi_best = sq, cand
    for lattice, steps, passes in ((3 * g, FINE_STEPS, 2), (3 * g, NEAR_STEPS, 4)):
        for _ in range(passes):
            improved = False
            _, correction = _dp_align(q0, q1, lattice, base=phi_best,
                                      steps=steps, band=max(40, lattice // 10))
            correction = lift(correction)
            for h in (0, *windows):
                smoothed = correction if h == 0 else _smooth_warp(correction, h)
                composed = np.interp(smoothed, fine_nodes, phi_best)
                for cand in (composed, _smooth_warp(composed, windows[0])):
                    sq = _eval_warp_cost(q0, q1, cand)
                    if sq < sq_best * (1.0 - 1e-6):
                        sq_best, phi_best = sq, cand
                        improved = True
            if not improved:
                break
    return sq_best, phi_best


def _q_or_degenerate(c: ManifoldCurve) -> np.ndarray:
    q, vnorms = srv_values(c)
    if not np.any(vnorms > 0.0):
        raise DegenerateCurve("curve has no nonvanishing velocity")
    return q


def shape_distance(c0: ManifoldCurve, c1: ManifoldCurve,
                   grid: int) -> tuple[float, Reparametrization]:
    """Reparametrization-minimized distance and the optimizing warp.

    The warp applies to c1: the returned phi minimizes the flat-coordinate
    gap between q0 and (q1 o phi) sqrt(phi') over monotone piecewise-linear
    lattice paths with slopes between 1/3 and 3, refined by slope smoothing.
    """
    _check_comparable(c0, c1, need_same_grid=False)
    if grid < max(c0.segments, c1.segments):
        raise GridMismatch(f"grid {grid} below curve resolution "
                           f"{max(c0.segments, c1.segments)}")
    q0 = _q_or_degenerate(c0)
    q1 = _q_or_degenerate(c1)
    sq, phi_nodes = _aligned(q0, q1, grid)
    return float(np.sqrt(sq)), Reparametrization(values=_frozen(phi_nodes))


def closed_shape_distance(c0: ManifoldCurve, c1: ManifoldCurve, grid: int) -> float:
    """Shape distance of closed curves, minimized over starting points.

    Cyclically rotating a closed curve's samples only rotates its q
    sequence, so the minimum runs the alignment once per shift of c1.
    """
    if not (c0.closed and c1.closed):
        raise NotClosed("both curves must be closed")
    if c0.dim != c1.dim:
        raise DimMismatch(f"dims {c0.dim} and {c1.dim} differ")
    if grid < max(c0.segments, c1.segments):
        raise GridMismatch(f"grid {grid} below curve resolution "
                           f"{max(c0.segments, c1.segments)}")
    q0 = _q_or_degenerate(c0)
    q1 = _q_or_degenerate(c1)
    best = float("inf")
    for shift in range(q1.shape[0]):
        sq, _ = _aligned(q0, np.roll(q1, -shift, axis=0), grid)
        best = min(best, sq)
    return float(np.sqrt(best))


def warp_tsrv(q: np.ndarray, phi: Reparametrization) -> np.ndarray:
    """Apply a warp in flat coordinates: (q o phi) sqrt(phi') per segment.

    q samples are read as values at segment midpoints and composed by linear
    interpolation; the derivative factor is the per-segment slope of phi.
    """
    n = q.shape[0]
    d = q.shape[1]
    edges = np.linspace(0.0, 1.0, n + 1)
    phi_edges = np.asarray(phi(edges), dtype=float)
    slopes = np.maximum(np.diff(phi_edges) * n, 0.0)
    phi_mids = np.asarray(phi((edges[:-1] + edges[1:]) / 2.0), dtype=float)
    centers = (np.arange(n) + 0.5) / n
    flat = q.reshape(n, d * d)
    warped = np.empty_like(flat)
    for col in range(d * d):
        warped[:, col] = np.interp(phi_mids, centers, flat[:, col])
    warped *= np.sqrt(slopes)[:, None]
    return warped.reshape(n, d, d)


def karcher_mean(curves: list[ManifoldCurve], iters: int = 24,
                 grid: int | None = None, tol: float = KARCHER_TOL) -> ManifoldCurve:
    """Elastic mean of a family of curves on a common grid.

    Alternates aligning every curve to the current mean (through the shape
    warp) with averaging the aligned flat coordinates, and integrates the
    converged average back to a curve.  Stops when the mean's q values move
    less than ``tol`` or after ``iters`` rounds.
    """
    if not curves:
        raise GridMismatch("mean of an empty family")
    n = curves[0].segments
    d = curves[0].dim
    for c in curves:
        if c.segments != n or c.dim != d:
            raise GridMismatch("curves must share grid and dim; resample first")
        if not c.starts_at_identity():
            raise GridMismatch("curves must start at the identity")
    if grid is None:
        grid = 2 * n
    qs = [_q_or_degenerate(c) for c in curves]
    qbar = np.mean(qs, axis=0)
    if len(curves) > 1:
        for _ in range(iters):
            aligned = []
            for q in qs:
                _, phi_nodes = _aligned(qbar, q, grid)
                phi = Reparametrization(values=phi_nodes)
                aligned.append(warp_tsrv(q, phi))
            new = np.mean(aligned, axis=0)
            delta = float(np.abs(new - qbar).max())
            qbar = new
            if delta < tol:
                break
    flags = np.array([norm(m) < Q_FLOOR for m in qbar])
    qbar = qbar.copy()
    qbar[flags] = 0.0
    flags.setflags(write=False)
    mean = TsrvCurve(start=_frozen(np.eye(d)), values=_frozen(qbar), degenerate=flags)
    return tsrv_inverse(mean)
