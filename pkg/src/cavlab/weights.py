"""Singular weight families for the degenerate diffusion coefficient.

A weight here is a measurable function w(x) > 0 on a box around the origin
that may blow up along a union of coordinate subspaces (its singular set).
The families implemented:

  constant              w = c
  power_subspace        w = |x'|^a,  x' the first m coordinates
  anisotropic_product   w = prod_i |x_i|^(a_i)
  two_cone              w = |x'|^(a1) * |x''|^(a2), complementary blocks
  angular_modulated     w = |x'|^a * theta(angle), theta tabulated (d = 2)
  perturbed             w = theta(x) * base(x) + g(x), with theta a bounded
                        oscillating multiplier and g a milder radial power

All exponents are constrained so that both w and 1/w are locally integrable,
which is what keeps the averaged-product constant of the family finite.
Every spec is immutable and safe to evaluate concurrently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

INFINITE = math.inf

KINDS = (
    "constant",
    "power_subspace",
    "anisotropic_product",
    "two_cone",
    "angular_modulated",
    "perturbed",
)


class InvalidWeightSpec(ValueError):
    """Raised at construction time for parameters outside the admissible range."""


@dataclass(frozen=True)
class WeightSpec:
    """Immutable description of one weight family member.

    ``alpha`` is the homogeneity degree at the origin (the weight scales as
    t^alpha under x -> t*x for the homogeneous kinds).  ``tau0`` is a
    positive lower bound of the weight over the ball of radius
    ``domain_radius`` around the origin, computed per kind at construction.
    Use the module-level factory functions rather than this constructor.
    """

    kind: str
    dim: int
    alpha: float
    tau0: float
    domain_radius: float
    value: float = 1.0
    codim: int = 0
    per_axis_exponents: tuple = ()
    cone_split: int = 0
    cone_exponents: tuple = (0.0, 0.0)
    angular_values: tuple = ()
    base: "WeightSpec | None" = None
    multiplier_amp: float = 0.0
    multiplier_freq: float = 0.0
    additive_coef: float = 0.0
    additive_exponent: float = 0.0

    # -- evaluation ---------------------------------------------------------

    def weight_at(self, x):
        return eval_weight(self, x)

    def eval_many(self, pts):
        """Raw weight values on an (npts, dim) array; inf on the singular set."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[1] != self.dim:
            raise ValueError(f"points have dim {pts.shape[1]}, spec has dim {self.dim}")
        return _eval_array(self, pts)

    def eval_regularized(self, pts, offset):
        """Weight values with singular points replaced by symmetric-offset means.

        A point landing exactly on the singular set is replaced by the average
        of the 2^d evaluations at diagonal offsets of length ``offset``.  The
        weight is locally integrable, so this keeps quadrature sums finite and
        convergent under refinement.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        vals = _eval_array(self, pts)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            step = offset / math.sqrt(self.dim)
            signs = np.array(
                [[(1 if (s >> k) & 1 else -1) for k in range(self.dim)]
                 for s in range(2 ** self.dim)], dtype=float)
            sub = pts[bad]
            acc = np.zeros(sub.shape[0])
            for sgn in signs:
                acc += _eval_array(self, sub + step * sgn)
            vals = vals.copy()
            vals[bad] = acc / len(signs)
        return vals

    # -- structure ----------------------------------------------------------

    @property
    def is_homogeneous(self):
        if self.kind == "perturbed":
            return self.multiplier_amp == 0.0 and self.additive_coef == 0.0
        return True

    def homogeneous_part(self):
        """The homogeneous weight this spec converges to under zoom-in."""
        if self.kind == "perturbed":
            return self.base
        return self

    def singular_set(self):
        """Descriptor of the blow-up set: list of coordinate-subspace components.

        Each component is a tuple of coordinate indices; the component is the
        subspace where all those coordinates vanish.  Empty list for bounded
        weights.
        """
        if self.kind == "constant":
            return []
        if self.kind == "power_subspace":
            return [tuple(range(self.codim))] if self.alpha < 0 else []
        if self.kind == "anisotropic_product":
            return [(i,) for i, a in enumerate(self.per_axis_exponents) if a < 0]
        if self.kind == "two_cone":
            comps = []
            a1, a2 = self.cone_exponents
            if a1 < 0:
                comps.append(tuple(range(self.cone_split)))
            if a2 < 0:
                comps.append(tuple(range(self.cone_split, self.dim)))
            return comps
        if self.kind == "angular_modulated":
            return [tuple(range(self.codim))] if self.alpha < 0 else []
        if self.kind == "perturbed":
            comps = list(self.base.singular_set())
            if self.additive_coef > 0 and self.additive_exponent < 0:
                origin = tuple(range(self.dim))
                if origin not in comps:
                    comps.append(origin)
            return comps
        raise AssertionError(self.kind)

    def distance_to_singular(self, pts):
        """Euclidean distance from each point to the singular set (inf if empty)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        comps = self.singular_set()
        if not comps:
            return np.full(pts.shape[0], np.inf)
        dists = [np.sqrt(np.sum(pts[:, list(c)] ** 2, axis=1)) for c in comps]
        return np.min(dists, axis=0)

    def singular_cap(self, delta):
        """Largest value the weight attains at distance >= delta from its singular set.

        Used to clamp face samples: the cap refines as delta -> 0 so the
        continuum weight is recovered under grid refinement.
        """
        if delta <= 0:
            raise ValueError("delta must be positive")
        R = self.domain_radius
        if self.kind == "constant":
            return self.value
        if self.kind == "power_subspace":
            return delta ** self.alpha if self.alpha < 0 else 1.0
        if self.kind == "anisotropic_product":
            neg = sum(a for a in self.per_axis_exponents if a < 0)
            return delta ** neg
        if self.kind == "two_cone":
            a1, a2 = self.cone_exponents
            cap = 1.0
            cap *= delta ** a1 if a1 < 0 else R ** a1
            cap *= delta ** a2 if a2 < 0 else R ** a2
            return cap
        if self.kind == "angular_modulated":
            theta_max = max(self.angular_values)
            return theta_max * (delta ** self.alpha if self.alpha < 0 else 1.0)
        if self.kind == "perturbed":
            cap = (1.0 + abs(self.multiplier_amp)) * self.base.singular_cap(delta)
            if self.additive_coef > 0:
                g = self.additive_exponent
                cap += self.additive_coef * (delta ** g if g < 0 else R ** g)
            return cap
        raise AssertionError(self.kind)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self):
        d = {"kind": self.kind, "dim": self.dim}
        if self.kind == "constant":
            d["value"] = self.value
        elif self.kind == "power_subspace":
            d.update(alpha=self.alpha, codim=self.codim)
        elif self.kind == "anisotropic_product":
            d["exponents"] = list(self.per_axis_exponents)
        elif self.kind == "two_cone":
            d.update(split=self.cone_split, exponents=list(self.cone_exponents))
        elif self.kind == "angular_modulated":
            d.update(alpha=self.alpha, codim=self.codim,
                     profile=list(self.angular_values))
        elif self.kind == "perturbed":
            d["base"] = self.base.to_json_dict()
            d.update(multiplier_amp=self.multiplier_amp,
                     multiplier_freq=self.multiplier_freq,
                     additive_coef=self.additive_coef,
                     additive_exponent=self.additive_exponent)
        d["domain_radius"] = self.domain_radius
        return d

    def to_json(self):
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def spec_from_json_dict(d):
    kind = d["kind"]
    dim = int(d["dim"])
    R = float(d.get("domain_radius", math.sqrt(dim)))
    if kind == "constant":
        return constant(float(d.get("value", 1.0)), dim=dim, domain_radius=R)
    if kind == "power_subspace":
        return power_subspace(float(d["alpha"]), int(d["codim"]), dim=dim,
                              domain_radius=R)
    if kind == "anisotropic_product":
        return anisotropic_product([float(a) for a in d["exponents"]],
                                   domain_radius=R)
    if kind == "two_cone":
        e = d["exponents"]
        return two_cone(float(e[0]), float(e[1]), int(d["split"]), dim=dim,
                        domain_radius=R)
    if kind == "angular_modulated":
        return angular_modulated(float(d["alpha"]), int(d["codim"]),
                                 [float(v) for v in d["profile"]],
                                 dim=dim, domain_radius=R)
    if kind == "perturbed":
        return perturbed(spec_from_json_dict(d["base"]),
                         multiplier_amp=float(d.get("multiplier_amp", 0.0)),
                         multiplier_freq=float(d.get("multiplier_freq", 0.0)),
                         additive_coef=float(d.get("additive_coef", 0.0)),
                         additive_exponent=float(d.get("additive_exponent", 0.0)))
    raise InvalidWeightSpec(f"unknown kind {kind!r}")


def spec_from_json(text):
    return spec_from_json_dict(json.loads(text))


def with_domain_radius(spec, domain_radius):
    """Rebuild a spec (recursively for perturbed kinds) for a new domain size,
    so the positive lower bound tau0 is recomputed for the larger box."""
    d = spec.to_json_dict()

    def patch(doc):
        doc = dict(doc)
        doc["domain_radius"] = float(domain_radius)
        if "base" in doc:
            doc["base"] = patch(doc["base"])
        return doc

    return spec_from_json_dict(patch(d))


# -- factories --------------------------------------------------------------

def _check_dim(dim):
    if not isinstance(dim, int) or dim < 1:
        raise InvalidWeightSpec(f"dim must be a positive integer, got {dim}")


def constant(value=1.0, dim=2, domain_radius=None):
    _check_dim(dim)
    if not (value > 0) or not math.isfinite(value):
        raise InvalidWeightSpec(f"constant weight must be finite positive, got {value}")
    R = math.sqrt(dim) if domain_radius is None else float(domain_radius)
    return WeightSpec(kind="constant", dim=dim, alpha=0.0, tau0=value,
                      domain_radius=R, value=value)


def power_subspace(alpha, codim, dim=2, domain_radius=None):
    """w = |x'|^alpha with x' the first ``codim`` coordinates; -codim < alpha <= 0."""
    _check_dim(dim)
    if not (0 <= codim < dim):
        raise InvalidWeightSpec(f"codim must satisfy 0 <= codim < dim, got {codim}")
    if codim == 0:
        if alpha != 0:
            raise InvalidWeightSpec("codim 0 admits only alpha = 0")
    elif not (-codim < alpha <= 0):
        raise InvalidWeightSpec(
            f"alpha must lie in (-{codim}, 0] for codim {codim}, got {alpha}")
    R = math.sqrt(dim) if domain_radius is None else float(domain_radius)
    tau0 = R ** alpha if alpha < 0 else 1.0
    return WeightSpec(kind="power_subspace", dim=dim, alpha=float(alpha),
                      tau0=tau0, domain_radius=R, codim=codim)


def anisotropic_product(exponents, domain_radius=None):
    """w = prod_i |x_i|^(a_i); each a_i in (-1, 0]."""
    exps = tuple(float(a) for a in exponents)
    dim = len(exps)
    _check_dim(dim)
    for a in exps:
        if not (-1.0 < a <= 0.0):
            raise InvalidWeightSpec(f"per-axis exponents must lie in (-1, 0], got {a}")
    alpha = sum(exps)
    R = math.sqrt(dim) if domain_radius is None else float(domain_radius)
    return WeightSpec(kind="anisotropic_product", dim=dim, alpha=alpha,
                      tau0=R ** alpha, domain_radius=R, per_axis_exponents=exps)


def two_cone(alpha1, alpha2, split, dim=3, domain_radius=None):
    """w = |x'|^(a1) * |x''|^(a2) with x' the first ``split`` coordinates.

    Admissible: -split < a1 <= 0 and -(dim - split) < a2 <= 0, so each block
    factor is integrable across its vanishing subspace.  The degree at the
    origin is a1 + a2.
    """
    _check_dim(dim)
    if not (0 < split < dim):
        raise InvalidWeightSpec(f"split must satisfy 0 < split < dim, got {split}")
    a1, a2 = float(alpha1), float(alpha2)
    if not (-split < a1 <= 0):
        raise InvalidWeightSpec(f"first exponent must lie in (-{split}, 0], got {a1}")
    if not (-(dim - split) < a2 <= 0):
        raise InvalidWeightSpec(
            f"second exponent must lie in (-{dim - split}, 0], got {a2}")
    R = math.sqrt(dim) if domain_radius is None else float(domain_radius)
    return WeightSpec(kind="two_cone", dim=dim, alpha=a1 + a2,
                      tau0=R ** (a1 + a2), domain_radius=R,
                      cone_split=split, cone_exponents=(a1, a2))


def angular_modulated(alpha, codim, profile_values, dim=2, domain_radius=None):
    """w = |x'|^alpha * theta(angle), theta tabulated on a uniform circle grid.

    Only d = 2 is supported: the profile is a positive table over [0, 2*pi)
    interpolated periodically.  Higher-dimensional angular tables would add
    sphere geometry without changing the mathematics being exercised.
    """
    if dim != 2:
        raise InvalidWeightSpec("angular_modulated weights are implemented for dim 2")
    if not (0 < codim < dim):
        raise InvalidWeightSpec(f"codim must satisfy 0 < codim < dim, got {codim}")
    if not (-codim < alpha <= 0):
        raise InvalidWeightSpec(f"alpha must lie in (-{codim}, 0], got {alpha}")
    vals = tuple(float(v) for v in profile_values)
    if len(vals) < 4:
        raise InvalidWeightSpec("angular profile needs at least 4 samples")
    if min(vals) <= 0:
        raise InvalidWeightSpec("angular profile must be strictly positive")
    c0 = min(min(vals), 1.0 / max(vals))
    R = math.sqrt(dim) if domain_radius is None else float(domain_radius)
    tau0 = c0 * (R ** alpha if alpha < 0 else 1.0)
    return WeightSpec(kind="angular_modulated", dim=dim, alpha=float(alpha),
                      tau0=tau0, domain_radius=R, codim=codim,
                      angular_values=vals)


def perturbed(base, multiplier_amp=0.0, multiplier_freq=0.0,
              additive_coef=0.0, additive_exponent=0.0):
    """theta(x) * base(x) + g(x) around a homogeneous base weight.

    theta(x) = 1 + amp * sin(freq * sum(x)) with |amp| < 1, so theta stays
    within fixed positive bounds and flattens to 1 under zoom-in.
    g(x) = coef * |x|^p with p > -|alpha| of the base, so |x|^|alpha| g(x)
    vanishes at the origin and the base survives as the zoom-in limit.
    """
    if not isinstance(base, WeightSpec):
        raise InvalidWeightSpec("base must be a WeightSpec")
    if base.kind == "perturbed" or not base.is_homogeneous:
        raise InvalidWeightSpec("base of a perturbed weight must be homogeneous")
    amp = float(multiplier_amp)
    if not (-1.0 < amp < 1.0):
        raise InvalidWeightSpec(f"multiplier amplitude must lie in (-1, 1), got {amp}")
    coef = float(additive_coef)
    if coef < 0:
        raise InvalidWeightSpec("additive coefficient must be nonnegative")
    p = float(additive_exponent)
    if coef > 0 and p <= -abs(base.alpha):
        raise InvalidWeightSpec(
            f"additive exponent must exceed -|alpha| = {-abs(base.alpha)}, got {p}")
    if coef > 0 and p <= -base.dim:
        raise InvalidWeightSpec("additive term must stay locally integrable")
    tau0 = (1.0 - abs(amp)) * base.tau0
    return WeightSpec(kind="perturbed", dim=base.dim, alpha=base.alpha,
                      tau0=tau0, domain_radius=base.domain_radius, base=base,
                      multiplier_amp=amp, multiplier_freq=float(multiplier_freq),
                      additive_coef=coef, additive_exponent=p)


# -- pointwise evaluation ----------------------------------------------------

def _block_norm_power(pts, idx, alpha):
    r = np.sqrt(np.sum(pts[:, idx] ** 2, axis=1))
    if alpha == 0:
        return np.ones(pts.shape[0])
    out = np.full(pts.shape[0], np.inf)
    pos = r > 0
    out[pos] = r[pos] ** alpha
    return out


def _eval_array(spec, pts):
    n = pts.shape[0]
    if spec.kind == "constant":
        return np.full(n, spec.value)
    if spec.kind == "power_subspace":
        return _block_norm_power(pts, list(range(spec.codim)), spec.alpha)
    if spec.kind == "anisotropic_product":
        out = np.ones(n)
        for i, a in enumerate(spec.per_axis_exponents):
            if a == 0:
                continue
            xi = np.abs(pts[:, i])
            fac = np.full(n, np.inf)
            pos = xi > 0
            fac[pos] = xi[pos] ** a
            out = out * fac
        return out
    if spec.kind == "two_cone":
        a1, a2 = spec.cone_exponents
        m = spec.cone_split
        return (_block_norm_power(pts, list(range(m)), a1)
                * _block_norm_power(pts, list(range(m, spec.dim)), a2))
    if spec.kind == "angular_modulated":
        radial = _block_norm_power(pts, list(range(spec.codim)), spec.alpha)
        ang = np.arctan2(pts[:, 1], pts[:, 0]) % (2.0 * math.pi)
        table = np.asarray(spec.angular_values)
        k = len(table)
        pos = ang / (2.0 * math.pi) * k
        i0 = np.floor(pos).astype(int) % k
        frac = pos - np.floor(pos)
        theta = table[i0] * (1 - frac) + table[(i0 + 1) % k] * frac
        return radial * theta
    if spec.kind == "perturbed":
        vals = _eval_array(spec.base, pts)
        if spec.multiplier_amp != 0.0:
            theta = 1.0 + spec.multiplier_amp * np.sin(
                spec.multiplier_freq * np.sum(pts, axis=1))
            vals = vals * theta
        if spec.additive_coef > 0.0:
            r = np.sqrt(np.sum(pts ** 2, axis=1))
            p = spec.additive_exponent
            if p == 0:
                g = np.full(pts.shape[0], spec.additive_coef)
            else:
                g = np.full(pts.shape[0], np.inf if p < 0 else 0.0)
                pos = r > 0
                g[pos] = spec.additive_coef * r[pos] ** p
            vals = vals + g
        return vals
    raise AssertionError(spec.kind)


def eval_weight(spec, x):
    """Weight value at one point; INFINITE exactly on the singular set."""
    pts = np.asarray(x, dtype=float).reshape(1, -1)
    if pts.shape[1] != spec.dim:
        raise ValueError(f"point has dim {pts.shape[1]}, spec has dim {spec.dim}")
    return float(_eval_array(spec, pts)[0])


# -- rescaling and zoom-in limits -------------------------------------------

def rescaled_weight(spec, lam):
    """The zoomed weight lam^|alpha| * w(lam * x) as a spec of the same family.

    Homogeneous kinds are exact fixed points.  Perturbed kinds keep their
    base and shrink the perturbation: the multiplier frequency contracts by
    lam and the additive coefficient by lam^(|alpha| + p).
    """
    if not (0.0 < lam < 1.0):
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if spec.kind != "perturbed":
        return spec
    shrink = lam ** (abs(spec.alpha) + spec.additive_exponent)
    return replace(spec,
                   multiplier_freq=spec.multiplier_freq * lam,
                   additive_coef=spec.additive_coef * shrink)


@dataclass(frozen=True)
class HomogenizationLimit:
    limit_spec: WeightSpec
    lambda_sequence: tuple
    l1_residuals: tuple
    non_convergent: bool


def homogenized_limit(spec, lambdas, resolution=48):
    """Zoom-in limit of the weight with integral residuals over the unit ball.

    Residual at each lambda is the quadrature of |w_lam - w_0| over the unit
    ball, w_0 being the declared homogeneous part.  A residual sequence that
    fails to decay flags the spec as numerically non-convergent.
    """
    lams = tuple(float(l) for l in lambdas)
    if any(not (0 < l < 1) for l in lams):
        raise ValueError("lambdas must lie in (0, 1)")
    if any(b <= a for a, b in zip(lams[1:], lams[:-1])):
        raise ValueError("lambdas must be strictly decreasing")
    limit = spec.homogeneous_part()
    pts, cell_diag = _unit_ball_nodes(spec.dim, resolution)
    w0 = limit.eval_regularized(pts, cell_diag / 8.0)
    residuals = []
    for lam in lams:
        wl = rescaled_weight(spec, lam).eval_regularized(pts, cell_diag / 8.0)
        residuals.append(float(np.mean(np.abs(wl - w0))) * _ball_volume(spec.dim))
    atol = 1e-10 * (1.0 + residuals[0])
    non_conv = not (residuals[-1] < residuals[0] or residuals[-1] <= atol)
    return HomogenizationLimit(limit_spec=limit, lambda_sequence=lams,
                               l1_residuals=tuple(residuals),
                               non_convergent=non_conv)


@dataclass(frozen=True)
class SingularityBounds:
    radii: tuple
    averages: tuple
    tau_star: float
    L_bound: float


def singularity_bounds(spec, radii, resolution=48):
    """Two-sided power bounds tau* r^alpha <= avg_{B_r} w <= L r^alpha.

    The same unit node layout is scaled to every radius, so homogeneous
    weights give radius-independent ratios up to rounding.
    """
    rs = tuple(float(r) for r in radii)
    if any(not (0 < r <= 1) for r in rs):
        raise ValueError("radii must lie in (0, 1]")
    pts, cell_diag = _unit_ball_nodes(spec.dim, resolution)
    avgs, ratios = [], []
    for r in rs:
        vals = spec.eval_regularized(r * pts, r * cell_diag / 8.0)
        avg = float(np.mean(vals))
        avgs.append(avg)
        ratios.append(avg / r ** spec.alpha)
    return SingularityBounds(radii=rs, averages=tuple(avgs),
                             tau_star=min(ratios), L_bound=max(ratios))


# -- averaged-product constant ----------------------------------------------

@dataclass(frozen=True)
class A2Report:
    c1_estimate: float
    ball_family: tuple
    per_ball_products: tuple
    quadrature_resolution: int
    skipped_balls: int = 0


def _unit_ball_nodes(dim, resolution):
    """Midpoint nodes of a uniform grid over [-1,1]^d kept inside the unit ball."""
    side = 2.0 / resolution
    mids = -1.0 + (np.arange(resolution) + 0.5) * side
    grids = np.meshgrid(*([mids] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    inside = np.sum(pts ** 2, axis=1) <= 1.0
    return pts[inside], side * math.sqrt(dim)


def _ball_volume(dim):
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def ball_average(spec, center, radius, resolution=32, inverse=False):
    """Midpoint-quadrature average of the weight (or its reciprocal) over a ball."""
    center = np.asarray(center, dtype=float)
    pts, cell_diag = _unit_ball_nodes(spec.dim, resolution)
    vals = spec.eval_regularized(center + radius * pts, radius * cell_diag / 8.0)
    if inverse:
        with np.errstate(divide="ignore"):
            vals = np.where(np.isfinite(vals), 1.0 / vals, 0.0)
    return float(np.mean(vals))


def dyadic_ball_family(box_lo, box_hi, levels=range(1, 7), centers_per_axis=5):
    """Deterministic (center, radius) family: lattice centers, dyadic radii.

    Radii are 2^-j times the smallest half-side; only balls contained in the
    box are kept.
    """
    lo = np.asarray(box_lo, dtype=float)
    hi = np.asarray(box_hi, dtype=float)
    dim = lo.size
    half = float(np.min(hi - lo)) / 2.0
    axes = [np.linspace(lo[k], hi[k], centers_per_axis + 2)[1:-1] for k in range(dim)]
    grids = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=1)
    family = []
    for j in levels:
        r = half * 2.0 ** (-j)
        for c in centers:
            if np.all(c - r >= lo - 1e-12) and np.all(c + r <= hi + 1e-12):
                family.append((tuple(c), r))
    return family


def a2_constant(spec, box_lo, box_hi, family=None, resolution=16):
    """Lower estimate of the averaged-product constant over a finite ball family.

    For each ball the product avg(w) * avg(1/w) is computed by midpoint
    quadrature with the symmetric-offset policy at singular nodes.  The
    maximum over the family underestimates the true supremum over all balls;
    refining the family can only increase the estimate.
    """
    if resolution < 8:
        raise ValueError("quadrature resolution must be at least 8 points per axis")
    if family is None:
        family = dyadic_ball_family(box_lo, box_hi)
    if not family:
        raise ValueError("ball family is empty")
    products = []
    kept = []
    skipped = 0
    for center, radius in family:
        avg_w = ball_average(spec, center, radius, resolution)
        avg_inv = ball_average(spec, center, radius, resolution, inverse=True)
        if not (math.isfinite(avg_w) and math.isfinite(avg_inv)):
            skipped += 1
            continue
        products.append(avg_w * avg_inv)
        kept.append((tuple(np.atleast_1d(center)), float(radius)))
    if not products:
        raise ValueError("all balls skipped: quadrature saw only singular samples")
    return A2Report(c1_estimate=max(products), ball_family=tuple(kept),
                    per_ball_products=tuple(products),
                    quadrature_resolution=resolution, skipped_balls=skipped)
