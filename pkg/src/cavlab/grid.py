"""Uniform Cartesian grids, nodal fields, face-sampled weights, and the
discrete cavitation energy.

The energy of a field u with face weights w and jump coefficient eps is

    sum_faces w_f * ((u_+ - u_-)/h)^2 * h^d  +  eps * h^d * #{u > 0},

with the positivity set defined by strict inequality.  The conservative
flux divergence is its (negative half-) gradient, which is what the
summation-by-parts test in the suite checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Axis-aligned cube with n nodes per axis and uniform spacing h."""

    dim: int
    n: int
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n < 3:
            raise ValueError(f"need at least 3 nodes per axis, got {self.n}")
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != self.dim or len(hi) != self.dim:
            raise ValueError("box extents must match dim")
        sides = [b - a for a, b in zip(lo, hi)]
        if min(sides) <= 0:
            raise ValueError("box is degenerate")
        if max(sides) - min(sides) > 1e-12 * max(sides):
            raise ValueError("box must be a cube so the spacing is uniform")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @staticmethod
    def centered(dim, n, half_width=1.0):
        return Grid(dim=dim, n=n, lo=(-half_width,) * dim, hi=(half_width,) * dim)

    @property
    def h(self):
        return (self.hi[0] - self.lo[0]) / (self.n - 1)

    @property
    def shape(self):
        return (self.n,) * self.dim

    def axis(self, k):
        return np.linspace(self.lo[k], self.hi[k], self.n)

    def node_mesh(self):
        """List of d coordinate arrays of shape (n,)*d."""
        return np.meshgrid(*[self.axis(k) for k in range(self.dim)], indexing="ij")

    def node_points(self):
        """(n^d, d) array of node coordinates in row-major node order."""
        mesh = self.node_mesh()
        return np.stack([m.ravel() for m in mesh], axis=1)

    def boundary_mask(self):
        mask = np.zeros(self.shape, dtype=bool)
        for k in range(self.dim):
            sl = [slice(None)] * self.dim
            sl[k] = 0
            mask[tuple(sl)] = True
            sl[k] = -1
            mask[tuple(sl)] = True
        return mask

    def interior_mask(self):
        return ~self.boundary_mask()

    def ball_mask(self, center, radius):
        """Nodes with |node - center| <= radius (ties included)."""
        mesh = self.node_mesh()
        center = np.asarray(center, dtype=float)
        d2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
        return d2 <= radius * radius + 1e-14 * radius * radius

    def face_centers(self, k):
        """(n-1 along axis k) x n^(d-1) face-center coordinates, flattened."""
        axes = [self.axis(j) for j in range(self.dim)]
        axes[k] = axes[k][:-1] + 0.5 * self.h
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def copy(self):
        return ScalarField(self.grid, self.values.copy())

    @staticmethod
    def zeros(grid):
        return ScalarField(grid, np.zeros(grid.shape))

    @staticmethod
    def from_function(grid, fn):
        pts = grid.node_points()
        return ScalarField(grid, np.asarray(fn(pts), dtype=float).reshape(grid.shape))


@dataclass
class BoundaryData:
    """Nonnegative Dirichlet data; only the boundary entries of ``values`` bind."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("boundary data shape must match grid")
        bmask = self.grid.boundary_mask()
        if np.any(self.values[bmask] < 0):
            raise ValueError("boundary data must be nonnegative")
        if not np.all(np.isfinite(self.values[bmask])):
            raise ValueError("boundary data must be bounded")

    @property
    def sup_norm(self):
        return float(np.max(self.values[self.grid.boundary_mask()]))

    @staticmethod
    def from_constant(grid, level):
        return BoundaryData(grid, np.full(grid.shape, float(level)))

    @staticmethod
    def from_function(grid, fn):
        pts = grid.node_points()
        vals = np.asarray(fn(pts), dtype=float).reshape(grid.shape)
        return BoundaryData(grid, vals)


@dataclass
class FaceWeightField:
    """Per-axis arrays of face weights, clamped into [tau0, cap]."""

    grid: Grid
    faces: tuple
    tau0: float
    cap: float

    def __post_init__(self):
        for k, arr in enumerate(self.faces):
            want = list(self.grid.shape)
            want[k] -= 1
            if arr.shape != tuple(want):
                raise ValueError(f"axis {k} face array has shape {arr.shape}")

    @staticmethod
    def constant(grid, value=1.0):
        faces = []
        for k in range(grid.dim):
            shape = list(grid.shape)
            shape[k] -= 1
            faces.append(np.full(shape, float(value)))
        return FaceWeightField(grid, tuple(faces), tau0=float(value), cap=float(value))


def sample_face_weights(spec, grid):
    """Face-center samples of the weight, with the symmetric-offset policy on
    singular hits and values clamped to [tau0, cap(h/8)]."""
    if spec.dim != grid.dim:
        raise ValueError("weight and grid dimensions differ")
    h = grid.h
    cap = spec.singular_cap(h / 8.0)
    offset = h * math.sqrt(grid.dim) / 8.0
    faces = []
    for k in range(grid.dim):
        pts = grid.face_centers(k)
        vals = spec.eval_regularized(pts, offset)
        vals = np.clip(vals, spec.tau0, cap)
        shape = list(grid.shape)
        shape[k] -= 1
        faces.append(vals.reshape(shape))
    return FaceWeightField(grid, tuple(faces), tau0=spec.tau0, cap=cap)


@dataclass(frozen=True)
class EnergyBreakdown:
    dirichlet: float
    volume: float
    total: float
    epsilon: float


def energy(u, w, epsilon):
    """Discrete functional value split into gradient and jump parts."""
    g = u.grid
    h = g.h
    hd = h ** g.dim
    dirichlet = 0.0
    for k in range(g.dim):
        diff = np.diff(u.values, axis=k) / h
        dirichlet += float(np.sum(w.faces[k] * diff * diff)) * hd
    volume = epsilon * hd * int(np.count_nonzero(u.values > 0.0))
    return EnergyBreakdown(dirichlet=dirichlet, volume=volume,
                           total=dirichlet + volume, epsilon=epsilon)


def discrete_flux_divergence(u, w):
    """Conservative stencil sum_k (w_{f+}(u_+ - u_i) - w_{f-}(u_i - u_-)) / h^2.

    Boundary nodes are set to zero.  For a converged minimizer this field is
    the discrete measure: nonnegative everywhere, vanishing where the
    positivity set has a full neighborhood.
    """
    g = u.grid
    h2 = g.h * g.h
    out = np.zeros(g.shape)
    for k in range(g.dim):
        flux = w.faces[k] * np.diff(u.values, axis=k)
        lo = [slice(None)] * g.dim
        hi = [slice(None)] * g.dim
        mid = [slice(None)] * g.dim
        lo[k] = slice(None, -1)
        hi[k] = slice(1, None)
        mid[k] = slice(1, -1)
        out[tuple(mid)] += (flux[tuple(hi)] - flux[tuple(lo)]) / h2
    out[g.boundary_mask()] = 0.0
    return ScalarField(g, out)


def node_weights(w):
    """Per-node weight as the mean of the incident face weights."""
    g = w.grid
    acc = np.zeros(g.shape)
    cnt = np.zeros(g.shape)
    for k in range(g.dim):
        lo = [slice(None)] * g.dim
        hi = [slice(None)] * g.dim
        lo[k] = slice(None, -1)
        hi[k] = slice(1, None)
        acc[tuple(lo)] += w.faces[k]
        acc[tuple(hi)] += w.faces[k]
        cnt[tuple(lo)] += 1
        cnt[tuple(hi)] += 1
    return acc / cnt


class UndefinedRatio(ZeroDivisionError):
    """Raised when a quotient of quadratic forms has a vanishing denominator."""


def poincare_ratio(f, w, center, R):
    """(sum f^2 w_node h^d) / (R^2 * gradient energy of f), f supported in B_R.

    ``f`` must vanish at every node at distance >= R from the center; its
    zero extension is then the discrete competitor for the ball inequality.
    """
    g = f.grid
    ball = g.ball_mask(center, R)
    outside = ~ball
    sup = float(np.max(np.abs(f.values)))
    if np.any(np.abs(f.values[outside]) > 1e-12 * max(sup, 1.0)):
        raise ValueError("field must vanish outside the ball B_R")
    hd = g.h ** g.dim
    num = float(np.sum(f.values ** 2 * node_weights(w))) * hd
    den = energy(f, w, 0.0).dirichlet
    if den == 0.0:
        raise UndefinedRatio("field has no gradient energy in the ball")
    return num / (R * R * den)


def interpolate_at(field, pts):
    """Multilinear interpolation of a nodal field at arbitrary points.

    Points must lie inside the field's box (a hair of rounding slack is
    tolerated); anything further out raises.
    """
    from scipy.interpolate import RegularGridInterpolator

    g = field.grid
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    eps = 1e-9 * g.h
    for k in range(g.dim):
        if np.any(pts[:, k] < g.lo[k] - eps) or np.any(pts[:, k] > g.hi[k] + eps):
            raise ValueError("interpolation points fall outside the field's box")
    pts = np.clip(pts, np.asarray(g.lo), np.asarray(g.hi))
    interp = RegularGridInterpolator(
        tuple(g.axis(k) for k in range(g.dim)), field.values, method="linear")
    return interp(pts)


# -- text dump format ---------------------------------------------------------

def write_field(field, path):
    """Text dump: header "d n1 ... nd h", then node values row-major, one per
    line, full double precision.  The box origin is not stored; the reader
    reconstructs a cube centered at the origin."""
    with open(path, "w") as fh:
        fh.write(dump_field(field))
    return str(path)


def dump_field(field):
    g = field.grid
    header = " ".join([str(g.dim)] + [str(g.n)] * g.dim + [_fmt(g.h)])
    lines = [header]
    lines.extend(_fmt(v) for v in field.values.ravel())
    return "\n".join(lines) + "\n"


def read_field(path):
    with open(path) as fh:
        return parse_field(fh.read())


def parse_field(text):
    lines = text.strip().split("\n")
    head = lines[0].split()
    dim = int(head[0])
    ns = [int(v) for v in head[1:1 + dim]]
    h = float(head[1 + dim])
    if len(set(ns)) != 1:
        raise ValueError("per-axis node counts must agree")
    n = ns[0]
    half = (n - 1) * h / 2.0
    grid = Grid.centered(dim, n, half)
    vals = np.array([float(v) for v in lines[1:1 + n ** dim]])
    if vals.size != n ** dim:
        raise ValueError(f"expected {n ** dim} values, got {vals.size}")
    return ScalarField(grid, vals.reshape(grid.shape))


def _fmt(x):
    return format(float(x), ".17g")
