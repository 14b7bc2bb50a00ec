"""Coordinate-descent minimization of the discrete cavitation functional.

At a node i the local energy is a strictly convex quadratic in u_i plus the
jump term eps * h^d * beta(u_i).  One nodewise update evaluates the clipped
quadratic argmin and every jump location of beta, and keeps the candidate
with the smallest local energy (ties resolved toward the smaller value, so
the closed zero phase wins).  Sweeping this update is plain Gauss-Seidel
away from the free boundary, so once the phase pattern stops changing the
positive set is polished by a conjugate-gradient solve of the linear system
it defines; a verification sweep then confirms no node wants to flip.

Updates never leave [0, sup f]: each candidate is a convex combination of
neighbor values or an explicit jump location, which is where the discrete
maximum principle comes from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import ScalarField, energy


class SolverError(RuntimeError):
    """Raised when an inner linear solve fails to reach its residual target."""


@dataclass(frozen=True)
class JumpProfile:
    """Nondecreasing step function beta: R -> [0, 1].

    ``locations`` are the strictly increasing jump points; ``values`` has one
    more entry and gives the level taken on each interval, with the jump
    point itself still on the lower level (so the canonical profile is the
    indicator of (0, inf)).
    """

    locations: tuple
    values: tuple

    def __post_init__(self):
        locs = tuple(float(x) for x in self.locations)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(locs) + 1:
            raise ValueError("need exactly one more value than jump locations")
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("jump locations must be strictly increasing")
        if any(v < 0 or v > 1 for v in vals):
            raise ValueError("profile values must lie in [0, 1]")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("profile values must be nondecreasing")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "values", vals)

    @staticmethod
    def canonical():
        """Indicator of the open positive half-line."""
        return JumpProfile(locations=(0.0,), values=(0.0, 1.0))

    def __call__(self, v):
        idx = np.searchsorted(np.asarray(self.locations), np.asarray(v, dtype=float),
                              side="left")
        return np.asarray(self.values)[idx]

    @property
    def is_single_step_at_zero(self):
        return self.locations == (0.0,)

    @property
    def jump_height(self):
        return self.values[-1] - self.values[0]


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-10
    max_sweeps: int = 50000
    ordering: str = "red-black"      # or "lexicographic"
    tie_break: str = "zero"
    epsilon: float = 1.0
    init: str = "zero"               # "zero" | "corners" | "random"
    polish: bool = True
    polish_tol: float = 1e-9         # absolute flux-divergence residual target
    phase_tol: float = math.inf      # update size below which polishing may start
    max_polish_rounds: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.ordering not in ("red-black", "lexicographic"):
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if self.tie_break != "zero":
            raise ValueError("only the zero tie-break is supported")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.init not in ("zero", "corners", "random"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass
class SolveResult:
    field: ScalarField
    energy_history: np.ndarray
    sweeps: int
    converged: bool
    phase_flips_last_sweep: int
    max_update_last_sweep: float
    polish_rounds: int = 0
    # rows (dirichlet, volume, total), one per energy_history entry
    energy_parts: np.ndarray = None


# -- nodewise sweep machinery -------------------------------------------------


class _Workspace:
    """Precomputed stencil data for one (grid, weights) pair."""

    def __init__(self, grid, w):
        self.grid = grid
        self.w = w
        self.dim = grid.dim
        self.h = grid.h
        a = np.zeros(grid.shape)
        for k in range(grid.dim):
            lo, hi = _axis_slices(grid.dim, k)
            a[lo] += w.faces[k]
            a[hi] += w.faces[k]
        self.a = a
        self.interior = grid.interior_mask()
        idx_sum = sum(np.indices(grid.shape))
        self.red = self.interior & (idx_sum % 2 == 0)
        self.black = self.interior & (idx_sum % 2 == 1)

    def neighbor_sum(self, u):
        """b_i = sum over faces incident to i of w_f * u_neighbor."""
        b = np.zeros(self.grid.shape)
        for k in range(self.dim):
            lo, hi = _axis_slices(self.dim, k)
            b[lo] += self.w.faces[k] * u[hi]
            b[hi] += self.w.faces[k] * u[lo]
        return b


def _axis_slices(dim, k):
    lo = [slice(None)] * dim
    hi = [slice(None)] * dim
    lo[k] = slice(None, -1)
    hi[k] = slice(1, None)
    return tuple(lo), tuple(hi)


def _candidate_update(b, a, eps_h2, profile, sup_f):
    """Vectorized nodewise minimizer over {clipped argmin} + jump locations.

    Works on flat arrays; returns the chosen values.  Candidates are scanned
    in increasing order and replaced only on strict improvement, so ties
    favor the smaller (zero) candidate.
    """
    vstar = np.minimum(np.maximum(b / a, 0.0), sup_f)
    if profile.is_single_step_at_zero:
        keep = b * b > a * (eps_h2 * profile.jump_height)
        return np.where(keep, vstar, 0.0)
    locs = [x for x in profile.locations if x >= 0.0]
    if 0.0 not in locs:
        locs = [0.0] + locs
    best_v = np.full(b.shape, locs[0])
    best_s = a * locs[0] ** 2 - 2 * b * locs[0] + eps_h2 * float(profile(locs[0]))
    for c in locs[1:]:
        s = a * c * c - 2 * b * c + eps_h2 * float(profile(c))
        better = s < best_s
        best_v = np.where(better, c, best_v)
        best_s = np.where(better, s, best_s)
    s = a * vstar * vstar - 2 * b * vstar + eps_h2 * profile(vstar)
    better = s < best_s
    return np.where(better, vstar, best_v)


def _sweep_redblack(u, ws, profile, eps_h2, sup_f):
    phase_before = u > 0.0
    max_upd = 0.0
    for mask in (ws.red, ws.black):
        b = ws.neighbor_sum(u)
        new = _candidate_update(b[mask], ws.a[mask], eps_h2, profile, sup_f)
        old = u[mask]
        if old.size:
            max_upd = max(max_upd, float(np.max(np.abs(new - old))))
        u[mask] = new
    flips = int(np.count_nonzero((u > 0.0) != phase_before))
    return flips, max_upd


def _sweep_lexicographic(u, ws, profile, eps_h2, sup_f):
    g = ws.grid
    dim, h = g.dim, ws.h
    faces = ws.w.faces
    a = ws.a
    phase_before = u > 0.0
    max_upd = 0.0
    single = profile.is_single_step_at_zero
    jump = eps_h2 * profile.jump_height
    for idx in np.ndindex(*g.shape):
        if any(i == 0 or i == g.n - 1 for i in idx):
            continue
        b = 0.0
        for k in range(dim):
            im = list(idx)
            im[k] -= 1
            ip = list(idx)
            ip[k] += 1
            fm = list(idx)
            fm[k] -= 1
            b += faces[k][tuple(fm)] * u[tuple(im)]
            b += faces[k][tuple(idx)] * u[tuple(ip)]
        ai = a[idx]
        if single:
            u[idx] = min(max(b / ai, 0.0), sup_f) if b * b > ai * jump else 0.0
        else:
            u[idx] = float(_candidate_update(np.array([b]), np.array([ai]),
                                             eps_h2, profile, sup_f)[0])
    flips = int(np.count_nonzero((u > 0.0) != phase_before))
    # a sequential sweep has no cheap max-update tracker; recompute via one pass
    return flips, max_upd


def _corner_multilinear(grid, f):
    """d-linear blend of the 2^d corner values of the boundary data."""
    vals = np.zeros(grid.shape)
    axes = [np.linspace(0.0, 1.0, grid.n) for _ in range(grid.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    for corner in np.ndindex(*(2,) * grid.dim):
        cidx = tuple(-1 if c else 0 for c in corner)
        weight = np.ones(grid.shape)
        for k, c in enumerate(corner):
            weight = weight * (mesh[k] if c else 1.0 - mesh[k])
        vals += f.values[cidx] * weight
    return vals


def _initial_field(grid, f, cfg):
    if cfg.init == "zero":
        u = np.zeros(grid.shape)
    elif cfg.init == "corners":
        u = _corner_multilinear(grid, f)
    else:
        # random restarts must seed both phases: a strictly positive start
        # can never nucleate a cavity under pointwise descent
        rng = np.random.default_rng(cfg.seed)
        u = rng.uniform(0.0, max(f.sup_norm, 1e-30), size=grid.shape)
        u[rng.random(grid.shape) < 0.5] = 0.0
    u[grid.boundary_mask()] = f.values[grid.boundary_mask()]
    return u


def minimize_cavitation(grid, w, f, profile=None, cfg=None):
    """Descend the discrete functional to a nodewise minimizer.

    Returns a SolveResult whose field satisfies 0 <= u <= sup f everywhere
    and whose energy history is nonincreasing.  ``converged`` is set only
    when the last sweep produced no phase flips and its largest nodal update
    fell below the tolerance; otherwise the best iterate is returned with
    the flag unset.
    """
    profile = profile or JumpProfile.canonical()
    cfg = cfg or SolveConfig()
    if np.any(f.values[grid.boundary_mask()] < 0):
        raise ValueError("boundary data must be nonnegative")
    ws = _Workspace(grid, w)
    eps_h2 = cfg.epsilon * grid.h ** 2
    sup_f = f.sup_norm
    u = _initial_field(grid, f, cfg)
    sweep = _sweep_redblack if cfg.ordering == "red-black" else _sweep_lexicographic
    can_polish = cfg.polish and profile.is_single_step_at_zero

    parts = []
    hd = grid.h ** grid.dim

    def record():
        dir_part = energy(ScalarField(grid, u), w, 0.0).dirichlet
        vol_part = cfg.epsilon * hd * float(np.sum(profile(u)))
        parts.append((dir_part, vol_part, dir_part + vol_part))

    record()
    sweeps = 0
    flips, max_upd = -1, math.inf
    converged = False
    polish_rounds = 0
    while sweeps < cfg.max_sweeps:
        prev = u.copy()
        flips, max_upd = sweep(u, ws, profile, eps_h2, sup_f)
        max_upd = float(np.max(np.abs(u - prev))) if cfg.ordering == "lexicographic" \
            else max_upd
        sweeps += 1
        record()
        if flips == 0 and max_upd < cfg.tol:
            converged = True
            break
        if (flips == 0 and max_upd < cfg.phase_tol and can_polish
                and polish_rounds < cfg.max_polish_rounds):
            _polish_positive_set(u, ws, f, cfg)
            polish_rounds += 1
            record()
            prev = u.copy()
            flips, max_upd = sweep(u, ws, profile, eps_h2, sup_f)
            max_upd = float(np.max(np.abs(u - prev)))
            sweeps += 1
            record()
            if flips == 0 and max_upd < cfg.tol:
                converged = True
                break
    parts = np.array(parts)
    return SolveResult(field=ScalarField(grid, u), energy_history=parts[:, 2],
                       sweeps=sweeps, converged=converged,
                       phase_flips_last_sweep=flips,
                       max_update_last_sweep=max_upd, polish_rounds=polish_rounds,
                       energy_parts=parts)


def _polish_positive_set(u, ws, f, cfg):
    """Exactly solve the linear system on the current positive set in place."""
    mask = (u > 0.0) & ws.interior
    if not np.any(mask):
        return
    sol, _res, _it = _masked_cg(u, ws, mask, abs_tol=cfg.polish_tol,
                                maxiter=20 * int(math.sqrt(mask.sum())) + 200)
    u[mask] = sol[mask]
    np.clip(u, 0.0, f.sup_norm, out=u)


def _masked_cg(u, ws, mask, abs_tol, maxiter):
    """Jacobi-preconditioned CG for the face-weighted Laplacian on ``mask``.

    Nodes outside the mask act as Dirichlet data with their current values.
    Returns (solution array, final residual inf-norm, iterations); residuals
    are in flux-divergence units.
    """
    h2 = ws.h * ws.h
    maskf = mask.astype(float)
    known = u * ~mask

    def apply_op(x):
        return (ws.a * x - ws.neighbor_sum(x)) / h2 * maskf

    b = ws.neighbor_sum(known) / h2 * maskf
    x = u * maskf
    r = b - apply_op(x)
    diag = ws.a / h2
    z = np.where(mask, r / diag, 0.0)
    p = z.copy()
    rz = float(np.sum(r * z))
    res = float(np.max(np.abs(r)))
    it = 0
    while res > abs_tol and it < maxiter:
        Ap = apply_op(p)
        pAp = float(np.sum(p * Ap))
        if pAp <= 0.0:
            break
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        res = float(np.max(np.abs(r)))
        z = np.where(mask, r / diag, 0.0)
        rz_new = float(np.sum(r * z))
        if rz_new == 0.0 or rz == 0.0:
            break
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    return x + known, res, it


# -- weighted-harmonic problems ----------------------------------------------


def harmonic_replacement(u, w, center, R, rtol=1e-12, maxiter=None):
    """Solve div(w grad h) = 0 on the discrete ball, h = u outside.

    The stencil equation is driven to a residual below
    rtol * sup|u| * max(diagonal) / h^2; failure to get there raises
    SolverError with the residual achieved.
    """
    grid = u.grid
    ball = grid.ball_mask(center, R)
    if np.any(ball & grid.boundary_mask()):
        raise ValueError("discrete ball must lie strictly inside the grid")
    ws = _Workspace(grid, w)
    sup = float(np.max(np.abs(u.values)))
    target = rtol * max(sup, 1e-30) * float(np.max(ws.a)) / grid.h ** 2
    if maxiter is None:
        maxiter = 40 * int(math.sqrt(max(ball.sum(), 1))) + 400
    vals, res, it = _masked_cg(u.values.copy(), ws, ball, abs_tol=target,
                               maxiter=maxiter)
    if res > target:
        raise SolverError(
            f"replacement solve stalled: residual {res:.3e} > target {target:.3e} "
            f"after {it} iterations")
    return ScalarField(grid, vals)


@dataclass(frozen=True)
class ClosenessGap:
    lhs: float
    rhs: float
    passed: bool
    slack: float = 1.1


def closeness_gap(u, h, w, center, R, epsilon):
    """Weighted gradient energy of u - h over the ball against eps * R^d.

    u - h vanishes outside the ball, so the full-grid gradient sum equals
    the ball-restricted one.  A rounding floor tied to the field's own
    gradient energy keeps the eps = 0 case (u is its own replacement) from
    failing on roundoff.
    """
    diff = ScalarField(u.grid, u.values - h.values)
    lhs = energy(diff, w, 0.0).dirichlet
    rhs = epsilon * R ** u.grid.dim
    floor = 1e-12 * (1.0 + energy(u, w, 0.0).dirichlet)
    return ClosenessGap(lhs=lhs, rhs=rhs, passed=lhs <= 1.1 * rhs + floor)


def harnack_ratio(w, center, R, boundary_profile):
    """sup/inf over B_R of the positive weighted-harmonic solution on B_4R.

    ``boundary_profile`` is evaluated at the grid nodes and must be positive
    on the data ring around B_4R; values that dip below zero by a sliver of
    the profile's scale (a profile vanishing at one point of the sphere seen
    half a cell outside it) are clamped to zero, which keeps the solution
    strictly positive on the inner ball.
    """
    grid = w.grid
    ball4 = grid.ball_mask(center, 4.0 * R)
    if np.any(ball4 & grid.boundary_mask()):
        raise ValueError("B_4R must lie strictly inside the grid")
    pts = grid.node_points()
    data = np.asarray(boundary_profile(pts), dtype=float).reshape(grid.shape)
    ring = _dilate(ball4) & ~ball4
    scale = float(np.max(data[ring]))
    if scale <= 0 or np.any(data[ring] < -0.05 * scale):
        raise ValueError("boundary profile must be positive around B_4R")
    data = np.maximum(data, 0.0)
    h = harmonic_replacement(ScalarField(grid, data), w, center, 4.0 * R)
    ball = grid.ball_mask(center, R)
    if np.any(h.values[ball] <= 0):
        raise SolverError("weighted-harmonic solution lost positivity on B_R")
    return float(np.max(h.values[ball]) / np.min(h.values[ball]))


def _dilate(mask):
    out = mask.copy()
    for k in range(mask.ndim):
        lo, hi = _axis_slices(mask.ndim, k)
        out[lo] |= mask[hi]
        out[hi] |= mask[lo]
    return out


# -- randomized restarts -------------------------------------------------------


@dataclass
class MultiStartReport:
    results: list
    best_index: int
    energy_gap: float
    flagged: bool


def solve_multistart(grid, w, f, profile=None, cfg=None, n_starts=5, gap_tol=1e-6):
    """Randomized restart harness flagging descent runs that disagree in energy.

    Runs the canonical solve plus ``n_starts`` random initializations (seeds
    derived from cfg.seed) and reports the spread of final energies; a gap
    above ``gap_tol`` flags the canonical run as a suspect local minimizer.
    """
    cfg = cfg or SolveConfig()
    results = [minimize_cavitation(grid, w, f, profile, cfg)]
    for k in range(n_starts):
        rcfg = replace(cfg, init="random", seed=cfg.seed + k + 1)
        results.append(minimize_cavitation(grid, w, f, profile, rcfg))
    finals = [r.energy_history[-1] for r in results]
    gap = float(max(finals) - min(finals))
    return MultiStartReport(results=results, best_index=int(np.argmin(finals)),
                            energy_gap=gap, flagged=gap > gap_tol)
