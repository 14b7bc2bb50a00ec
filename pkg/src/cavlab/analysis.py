"""Free-boundary geometry of a computed minimizer.

The measured quantities all center on S(r), the supremum of the field over
discrete balls around a free-boundary node: its log-log slope estimates the
growth exponent, its lower envelope against r^(1 + |alpha|/2) tests the
explicit nondegeneracy constant

    2 * sqrt((1/L) * d^d / (d+2)^(d+2)),

and its dyadic decay tests the halving bound 2^(k (alpha/2 - 1)).  Fits use
only radii in [4h, domain_radius/4]: below 4h the lattice dominates, above a
quarter radius the boundary data leaks into the local regime.  Slack factors
(1.2 on dyadic decay, 0.5 on nondegeneracy, 0.15 on the exponent) are fixed
discretization allowances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

EXPONENT_SLACK = 0.15
NONDEG_SLACK = 0.5
DYADIC_SLACK = 1.2


def growth_exponent(alpha):
    """Sharp vanishing rate 1 + |alpha|/2 at a singular free-boundary point."""
    return 1.0 + abs(alpha) / 2.0


def _lsq_line(x, y):
    """Least-squares slope and intercept of y against x."""
    xm, ym = float(np.mean(x)), float(np.mean(y))
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    return slope, ym - slope * xm


def nondegeneracy_constant(d, L):
    """Explicit lower-growth constant 2 * sqrt((1/L) d^d / (d+2)^(d+2))."""
    return 2.0 * math.sqrt((1.0 / L) * d ** d / float(d + 2) ** (d + 2))


# -- free boundary extraction -------------------------------------------------


@dataclass
class FreeBoundarySet:
    cells: list
    points: np.ndarray

    def __len__(self):
        return len(self.cells)


def extract_free_boundary(u):
    """Cells whose vertices mix strictly positive and zero values."""
    if np.any(u.values < 0):
        raise ValueError("field must be nonnegative")
    g = u.grid
    pos = u.values > 0.0
    core = (slice(None, -1),) * g.dim
    any_pos = np.zeros_like(pos[core])
    any_zero = np.zeros_like(pos[core])
    for corner in np.ndindex(*(2,) * g.dim):
        sl = tuple(slice(1, None) if c else slice(None, -1) for c in corner)
        any_pos |= pos[sl]
        any_zero |= ~pos[sl]
    mixed = any_pos & any_zero
    cells = [tuple(int(i) for i in idx) for idx in np.argwhere(mixed)]
    h = g.h
    points = np.array([[g.lo[k] + (c[k] + 0.5) * h for k in range(g.dim)]
                       for c in cells]) if cells else np.zeros((0, g.dim))
    return FreeBoundarySet(cells=cells, points=points)


def free_boundary_nodes(u):
    """Boolean mask of zero nodes with at least one strictly positive neighbor."""
    g = u.grid
    pos = u.values > 0.0
    near_pos = np.zeros(g.shape, dtype=bool)
    for k in range(g.dim):
        lo = [slice(None)] * g.dim
        hi = [slice(None)] * g.dim
        lo[k] = slice(None, -1)
        hi[k] = slice(1, None)
        near_pos[tuple(lo)] |= pos[tuple(hi)]
        near_pos[tuple(hi)] |= pos[tuple(lo)]
    return (~pos) & near_pos


def full_positive_neighborhood(u):
    """Interior positive nodes all of whose neighbors are positive too.

    At these nodes a converged minimizer solves the stencil equation, so the
    flux divergence must vanish there; the discrete measure lives on the
    complementary zero nodes with positive neighbors.
    """
    g = u.grid
    pos = u.values > 0.0
    out = pos & g.interior_mask()
    for k in range(g.dim):
        lo = [slice(None)] * g.dim
        hi = [slice(None)] * g.dim
        lo[k] = slice(None, -1)
        hi[k] = slice(1, None)
        both = np.ones(g.shape, dtype=bool)
        both[tuple(lo)] &= pos[tuple(hi)]
        both[tuple(hi)] &= pos[tuple(lo)]
        out &= both
    return out


def canonical_fb_node(u, spec=None):
    """Index of the reference free-boundary node for point measurements.

    With a singular weight: the FB node closest to the blow-up set (the
    theorems live at such points).  Otherwise: closest to the origin.
    Lexicographic order breaks ties deterministically.
    """
    mask = free_boundary_nodes(u)
    idxs = np.argwhere(mask)
    if idxs.size == 0:
        raise ValueError("field has no free boundary")
    g = u.grid
    pts = np.array([[g.lo[k] + i[k] * g.h for k in range(g.dim)] for i in idxs])
    if spec is not None and spec.singular_set():
        dist = spec.distance_to_singular(pts)
    else:
        dist = np.sqrt(np.sum(pts ** 2, axis=1))
    order = np.lexsort(tuple(idxs[:, k] for k in reversed(range(g.dim))) + (dist,))
    return tuple(int(v) for v in idxs[order[0]])


def node_point(grid, idx):
    return np.array([grid.lo[k] + idx[k] * grid.h for k in range(grid.dim)])


# -- growth of the supremum ----------------------------------------------------


@dataclass
class GrowthReport:
    center: tuple
    radii: np.ndarray
    S_values: np.ndarray
    grid_h: float
    domain_radius: float
    wall_distance: float = math.inf
    alpha: float = 0.0
    fitted_exponent: float = math.nan
    fitted_constant: float = math.nan
    local_slopes: np.ndarray = field(default_factory=lambda: np.array([]))
    nondeg_ratios: np.ndarray = field(default_factory=lambda: np.array([]))
    paper_constant: float = math.nan

    def usable(self):
        lo = 4.0 * self.grid_h
        hi = min(self.domain_radius / 4.0, self.wall_distance - self.grid_h)
        return (self.radii >= lo - 1e-12) & (self.radii <= hi + 1e-12) \
            & (self.S_values > 0)


def dyadic_radii(grid, levels=8):
    """Radii domain_radius/2, /4, ... clipped to the usable window floor."""
    R = _domain_radius(grid)
    rs = [R * 2.0 ** (-j) for j in range(1, levels + 1)]
    return np.array([r for r in rs if r >= grid.h])


def growth_radii(grid, z0, per_octave=4):
    """Quarter-octave radii covering the usable window at the FB node z0.

    Balls must stay inside the domain for the local growth to mean anything,
    so the top radius respects the distance from z0 to the fixed boundary;
    quarter-octave spacing keeps at least 4 radii even when the positive set
    is a thin band along the boundary.
    """
    h = grid.h
    hi = min(_domain_radius(grid) / 4.0, _wall_distance(grid, z0) - h)
    r = 4.0 * h
    out = []
    factor = 2.0 ** (1.0 / per_octave)
    while r <= hi + 1e-12:
        out.append(r)
        r *= factor
    return np.array(out)


def _domain_radius(grid):
    return min(hi - lo for lo, hi in zip(grid.lo, grid.hi)) / 2.0


def _wall_distance(grid, z0):
    p = node_point(grid, tuple(z0))
    return min(min(p[k] - grid.lo[k], grid.hi[k] - p[k]) for k in range(grid.dim))


def growth_function(u, z0, radii, alpha=0.0):
    """S(r) = max of the field over the discrete ball around the FB node z0."""
    g = u.grid
    z0 = tuple(z0)
    if u.values[z0] != 0.0 or not free_boundary_nodes(u)[z0]:
        raise ValueError("z0 must be a zero node with a positive neighbor")
    center = node_point(g, z0)
    mesh = g.node_mesh()
    d2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    radii = np.asarray(sorted(float(r) for r in radii))
    S = np.array([float(np.max(u.values[d2 <= r * r + 1e-14])) for r in radii])
    return GrowthReport(center=z0, radii=radii, S_values=S, grid_h=g.h,
                        domain_radius=_domain_radius(g),
                        wall_distance=_wall_distance(g, z0), alpha=alpha)


def fit_growth_exponent(report):
    """Least-squares slope of log S against log r over the usable window.

    Fills the fitted exponent, the constant, and per-step local slopes into
    the report and returns the slope.  Needs at least 4 usable radii.
    """
    use = report.usable()
    r = report.radii[use]
    S = report.S_values[use]
    if r.size < 4:
        raise ValueError(f"only {r.size} usable radii, need at least 4")
    logs_r, logs_S = np.log(r), np.log(S)
    slope, intercept = _lsq_line(logs_r, logs_S)
    report.fitted_exponent = slope
    report.fitted_constant = math.exp(intercept)
    report.local_slopes = np.diff(logs_S) / np.diff(logs_r)
    return slope


@dataclass
class RegularityCheck:
    inferred_constant: float
    small_radius_slopes: tuple
    threshold: float
    passed: bool


def check_optimal_regularity(report, alpha):
    """Upper-growth check: finite envelope constant and near-sharp small-r slopes.

    The envelope constant is max S(r) / r^(1+|alpha|/2) over usable radii;
    the octave slopes starting from the two smallest usable radii must reach
    the sharp exponent minus the fixed slack.
    """
    use = report.usable()
    r = report.radii[use]
    S = report.S_values[use]
    if r.size < 4:
        raise ValueError("not enough usable radii")
    p = growth_exponent(alpha)
    C = float(np.max(S / r ** p))
    small = tuple(_octave_slope(r, S, i) for i in (0, 1))
    threshold = p - EXPONENT_SLACK
    passed = math.isfinite(C) and all(s >= threshold for s in small)
    return RegularityCheck(inferred_constant=C, small_radius_slopes=small,
                           threshold=threshold, passed=passed)


def _octave_slope(r, S, i):
    """Slope of log S between r[i] and the first radius at least 2 r[i]."""
    j = int(np.searchsorted(r, 2.0 * r[i] - 1e-12))
    j = min(j, r.size - 1)
    if j <= i:
        j = i + 1
    return float((math.log(S[j]) - math.log(S[i]))
                 / (math.log(r[j]) - math.log(r[i])))


@dataclass
class NondegeneracyCheck:
    min_ratio: float
    paper_constant: float
    L_bound: float
    passed: bool


def check_nondegeneracy(report, alpha, L_bound, d):
    """Lower-growth check against the explicit constant, with 0.5 slack."""
    use = report.usable()
    r = report.radii[use]
    S = report.S_values[use]
    if r.size == 0:
        raise ValueError("no usable radii")
    p = growth_exponent(alpha)
    ratios = S / r ** p
    report.nondeg_ratios = ratios
    const = nondegeneracy_constant(d, L_bound)
    report.paper_constant = const
    min_ratio = float(np.min(ratios))
    return NondegeneracyCheck(min_ratio=min_ratio, paper_constant=const,
                              L_bound=L_bound,
                              passed=min_ratio >= NONDEG_SLACK * const)


# -- dyadic decay ---------------------------------------------------------------


@dataclass
class DyadicDecayRow:
    k: int
    sup: float
    bound: float
    passed: bool
    truncated: bool = False


def dyadic_decay_check(u_rescaled, alpha, k_max, effective_h=None):
    """Level-k suprema against 2^(k (alpha/2 - 1)) with the 1.2 slack factor.

    ``u_rescaled`` is the normalized zoom of a minimizer at a free-boundary
    point (sup over the unit ball at most 1, origin on the free boundary).
    Levels finer than 4 times the effective resolution are reported as
    truncated, not failed; pass ``effective_h`` when the field was
    interpolated from a coarser source.
    """
    g = u_rescaled.grid
    h_eff = g.h if effective_h is None else float(effective_h)
    mesh = g.node_mesh()
    d2 = sum(m ** 2 for m in mesh)
    rows = []
    for k in range(1, k_max + 1):
        rk = 2.0 ** (-k)
        bound = 2.0 ** (k * (alpha / 2.0 - 1.0))
        if rk < 4.0 * h_eff:
            rows.append(DyadicDecayRow(k=k, sup=math.nan, bound=bound,
                                       passed=True, truncated=True))
            continue
        sup = float(np.max(u_rescaled.values[d2 <= rk * rk + 1e-14]))
        rows.append(DyadicDecayRow(k=k, sup=sup, bound=bound,
                                   passed=sup <= DYADIC_SLACK * bound))
    return rows


def normalized_rescaling(u, z0, rho):
    """The field around z0 blown up and normalized for the dyadic decay check.

    Returns (field, effective_h): node values are u(z0 + rho x) divided by
    the supremum of u over the discrete ball B_rho(z0), on a centered grid of
    half-width 1/2 (every dyadic level k >= 1 fits inside).  effective_h is
    the source resolution mapped to the zoomed coordinates.
    """
    from .grid import Grid, ScalarField, interpolate_at

    g = u.grid
    center = node_point(g, z0)
    mesh = g.node_mesh()
    d2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    sup = float(np.max(u.values[d2 <= rho * rho + 1e-14]))
    if sup <= 0:
        raise ValueError("field vanishes on the normalization ball")
    ref = Grid.centered(g.dim, g.n, 0.5)
    pts = center + rho * ref.node_points()
    # box corners of the zoom frame may stick out of the source box; those
    # samples are outside every dyadic ball, fill them with zero
    inside = np.ones(pts.shape[0], dtype=bool)
    for k in range(g.dim):
        inside &= (pts[:, k] >= g.lo[k] - 1e-12) & (pts[:, k] <= g.hi[k] + 1e-12)
    vals = np.zeros(pts.shape[0])
    vals[inside] = interpolate_at(u, pts[inside])
    vals = vals.reshape(ref.shape)
    return ScalarField(ref, np.maximum(vals, 0.0) / sup), g.h / rho


# -- density and distance comparability ------------------------------------------


@dataclass
class DensityReport:
    radii: np.ndarray
    fractions: np.ndarray
    min_fraction: float


def positive_density(u, z0, radii):
    """Node-count fractions |B_r ∩ {u>0}| / |B_r| around the FB node z0."""
    g = u.grid
    center = node_point(g, tuple(z0))
    mesh = g.node_mesh()
    d2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    pos = u.values > 0.0
    radii = np.asarray(sorted(float(r) for r in radii))
    fractions = []
    for r in radii:
        ball = d2 <= r * r + 1e-14
        fractions.append(float(np.count_nonzero(pos & ball))
                         / float(np.count_nonzero(ball)))
    fractions = np.array(fractions)
    return DensityReport(radii=radii, fractions=fractions,
                         min_fraction=float(np.min(fractions)))


@dataclass
class ComparabilityReport:
    c_lower: float
    c_upper: float
    n_samples: int

    @property
    def eccentricity(self):
        return self.c_upper / self.c_lower


def distance_comparability(u, alpha, fb, min_dist_cells=2):
    """Spread of u(x) / dist(x, FB)^(1+|alpha|/2) over the positive set.

    Distances are taken to free-boundary cell centers; samples closer than
    ``min_dist_cells`` cells are skipped as sub-lattice noise.
    """
    if len(fb) == 0:
        raise ValueError("free boundary is empty")
    g = u.grid
    tree = cKDTree(fb.points)
    pos = u.values > 0.0
    idxs = np.argwhere(pos & g.interior_mask())
    pts = np.array([[g.lo[k] + i[k] * g.h for k in range(g.dim)] for i in idxs])
    dist, _ = tree.query(pts)
    keep = dist >= min_dist_cells * g.h
    if not np.any(keep):
        raise ValueError("no positive samples far enough from the free boundary")
    vals = u.values[pos & g.interior_mask()][keep]
    ratios = vals / dist[keep] ** growth_exponent(alpha)
    return ComparabilityReport(c_lower=float(np.min(ratios)),
                               c_upper=float(np.max(ratios)),
                               n_samples=int(np.count_nonzero(keep)))


# -- empirical Hoelder modulus -----------------------------------------------------


@dataclass
class HolderReport:
    rhos: np.ndarray
    oscillations: np.ndarray
    exponent: float
    seminorm: float
    degenerate: bool = False


def holder_modulus(u, sub_lo, sub_hi, n_centers=5):
    """Oscillation-decay estimate of the continuity exponent on a subdomain.

    Tabulates the largest ball oscillation per dyadic radius over a coarse
    lattice of centers, fits the log-log slope, and evaluates the seminorm
    max |u(x)-u(y)| / |x-y|^tau over the sampled center pairs.  A constant
    field is flagged degenerate with zero seminorm.
    """
    g = u.grid
    sub_lo = np.asarray(sub_lo, dtype=float)
    sub_hi = np.asarray(sub_hi, dtype=float)
    if np.any(sub_lo < np.asarray(g.lo)) or np.any(sub_hi > np.asarray(g.hi)):
        raise ValueError("subdomain must lie inside the grid")
    centers = _center_lattice(sub_lo, sub_hi, n_centers)
    half = float(np.min(sub_hi - sub_lo)) / 2.0
    rhos = []
    rho = half / 4.0  # below the center spacing, so one ball cannot span two centers
    while rho >= 4.0 * g.h:
        rhos.append(rho)
        rho /= 2.0
    rhos = np.array(rhos)
    if rhos.size < 2:
        raise ValueError("subdomain too small for the oscillation table")
    mesh = g.node_mesh()
    osc = np.zeros(rhos.size)
    for c in centers:
        d2 = sum((m - ck) ** 2 for m, ck in zip(mesh, c))
        for j, r in enumerate(rhos):
            ball = d2 <= r * r + 1e-14
            vals = u.values[ball]
            osc[j] = max(osc[j], float(np.max(vals) - np.min(vals)))
    if np.max(osc) == 0.0:
        return HolderReport(rhos=rhos, oscillations=osc, exponent=math.nan,
                            seminorm=0.0, degenerate=True)
    good = osc > 0
    if int(good.sum()) < 2:
        raise ValueError("oscillation table has fewer than 2 nonzero levels")
    slope, _ = _lsq_line(np.log(rhos[good]), np.log(osc[good]))
    cvals = np.array([u.values[_nearest_node(g, c)] for c in centers])
    seminorm = 0.0
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            dist = float(np.linalg.norm(centers[i] - centers[j]))
            if dist == 0:
                continue
            seminorm = max(seminorm, abs(cvals[i] - cvals[j]) / dist ** slope)
    return HolderReport(rhos=rhos, oscillations=osc, exponent=slope,
                        seminorm=seminorm)


def fb_window(grid, z0, frac=0.45):
    """Subdomain for oscillation measurements anchored at a FB node: a box of
    half-width ``frac`` of the domain half-width around z0, clipped one cell
    inside the grid."""
    p0 = node_point(grid, tuple(z0))
    hw = frac * _domain_radius(grid)
    lo = np.maximum(p0 - hw, np.asarray(grid.lo) + grid.h)
    hi = np.minimum(p0 + hw, np.asarray(grid.hi) - grid.h)
    return lo, hi


def _center_lattice(lo, hi, n_centers):
    axes = [np.linspace(lo[k], hi[k], n_centers + 2)[1:-1] for k in range(lo.size)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _nearest_node(grid, point):
    return tuple(int(round((point[k] - grid.lo[k]) / grid.h))
                 for k in range(grid.dim))
