import math

import numpy as np
import pytest

import cavlab as cl

# poincare quotient of the cone bump (1 - |x|/R)+ with unit weight, d=2,
# R=0.5, n=65; first computed by the independent loop below, then frozen
BUMP_RATIO_N65 = 0.1697034273382089


def naive_energy(u, w, eps):
    g = u.grid
    h = g.h
    hd = h ** g.dim
    dir_sum = 0.0
    for k in range(g.dim):
        for idx in np.ndindex(*w.faces[k].shape):
            up = list(idx)
            up[k] += 1
            diff = (u.values[tuple(up)] - u.values[idx]) / h
            dir_sum += w.faces[k][idx] * diff * diff * hd
    vol = eps * hd * sum(1 for idx in np.ndindex(*g.shape) if u.values[idx] > 0)
    return dir_sum, vol


def naive_divergence(u, w):
    g = u.grid
    h2 = g.h * g.h
    out = np.zeros(g.shape)
    for idx in np.ndindex(*g.shape):
        if any(i == 0 or i == g.n - 1 for i in idx):
            continue
        acc = 0.0
        for k in range(g.dim):
            up = list(idx)
            up[k] += 1
            dn = list(idx)
            dn[k] -= 1
            fup = idx
            fdn = tuple(dn)
            acc += w.faces[k][fup] * (u.values[tuple(up)] - u.values[idx])
            acc -= w.faces[k][fdn] * (u.values[idx] - u.values[tuple(dn)])
        out[idx] = acc / h2
    return out


def test_grid_validation():
    with pytest.raises(ValueError):
        cl.Grid(2, 2, (-1, -1), (1, 1))
    with pytest.raises(ValueError):
        cl.Grid(2, 5, (-1, -1), (1, 2))
    with pytest.raises(ValueError):
        cl.Grid(4, 5, (-1,) * 4, (1,) * 4)
    g = cl.Grid.centered(2, 5, 1.0)
    assert g.h == pytest.approx(0.5)


def test_face_sampling_examples():
    g = cl.Grid.centered(2, 9, 1.0)
    w = cl.sample_face_weights(cl.constant(1.0, 2), g)
    for arr in w.faces:
        assert np.all(arr == 1.0)

    spec = cl.power_subspace(-0.5, 1, dim=2)
    w = cl.sample_face_weights(spec, g)
    assert np.all(np.isfinite(w.faces[0]))
    assert np.all(np.isfinite(w.faces[1]))
    # y-faces centered on the line x1 = 0 are clamped to the cap
    i0 = 4  # node column at x1 = 0
    assert np.all(w.faces[1][i0, :] == w.cap)
    # x-face centered at x1 = 0.5 evaluates the weight directly
    gx = cl.Grid(2, 3, (0.0, 0.0), (2.0, 2.0))
    wx = cl.sample_face_weights(spec, gx)
    assert wx.faces[0][0, 0] == pytest.approx(0.5 ** -0.5, rel=1e-12)


def test_energy_trivial_examples():
    g = cl.Grid.centered(2, 9, 1.0)
    w = cl.sample_face_weights(cl.constant(1.0, 2), g)
    zero = cl.ScalarField.zeros(g)
    assert cl.energy(zero, w, 1.0).total == 0.0

    ones = cl.ScalarField(g, np.ones(g.shape))
    eb = cl.energy(ones, w, 1.0)
    assert eb.dirichlet == 0.0
    assert eb.volume == pytest.approx(g.h ** 2 * g.n ** 2, rel=1e-14)
    assert eb.volume == pytest.approx(4.0, rel=0.3)  # roughly the box measure


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_energy_matches_naive_summation(dim):
    rng = np.random.default_rng(dim)
    g = cl.Grid.centered(dim, 8, 1.0)
    spec = cl.anisotropic_product([-0.3] * dim)
    w = cl.sample_face_weights(spec, g)
    u = cl.ScalarField(g, rng.uniform(-1, 1, size=g.shape))
    eb = cl.energy(u, w, 0.7)
    nd, nv = naive_energy(u, w, 0.7)
    assert eb.dirichlet == pytest.approx(nd, rel=1e-12)
    assert eb.volume == pytest.approx(nv, rel=1e-12)
    assert eb.total == eb.dirichlet + eb.volume


def test_energy_monotone_in_epsilon():
    rng = np.random.default_rng(0)
    g = cl.Grid.centered(2, 9, 1.0)
    w = cl.sample_face_weights(cl.constant(1.0, 2), g)
    u = cl.ScalarField(g, np.abs(rng.uniform(-1, 1, size=g.shape)))
    e1 = cl.energy(u, w, 0.5)
    e2 = cl.energy(u, w, 1.25)
    count = int(np.count_nonzero(u.values > 0))
    assert e2.total - e1.total == pytest.approx(0.75 * g.h ** 2 * count, rel=1e-13)


def test_flux_divergence_affine_and_quadratic():
    g = cl.Grid.centered(2, 9, 1.0)
    w = cl.sample_face_weights(cl.constant(1.0, 2), g)
    mesh = g.node_mesh()
    aff = cl.ScalarField(g, 1.0 + 2.0 * mesh[0] - 3.0 * mesh[1])
    div = cl.discrete_flux_divergence(aff, w)
    assert np.max(np.abs(div.values)) <= 1e-12

    quad = cl.ScalarField(g, mesh[0] ** 2)
    div = cl.discrete_flux_divergence(quad, w)
    inner = div.values[1:-1, 1:-1]
    assert np.allclose(inner, 2.0, atol=1e-11)
    assert np.all(div.values[g.boundary_mask()] == 0.0)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_flux_divergence_matches_naive(dim):
    rng = np.random.default_rng(17 + dim)
    g = cl.Grid.centered(dim, 8, 1.0)
    w = cl.sample_face_weights(cl.anisotropic_product([-0.2] * dim), g)
    u = cl.ScalarField(g, rng.uniform(-1, 1, size=g.shape))
    div = cl.discrete_flux_divergence(u, w)
    ref = naive_divergence(u, w)
    scale = np.max(np.abs(ref)) + 1.0
    assert np.max(np.abs(div.values - ref)) <= 1e-12 * scale


def test_flux_divergence_is_energy_gradient():
    rng = np.random.default_rng(23)
    g = cl.Grid.centered(2, 9, 1.0)
    w = cl.sample_face_weights(cl.power_subspace(-0.5, 1, dim=2), g)
    u = cl.ScalarField(g, rng.uniform(-1, 1, size=g.shape))
    phi = np.zeros(g.shape)
    phi[1:-1, 1:-1] = rng.uniform(-1, 1, size=(g.n - 2, g.n - 2))
    t = 1e-4
    up = cl.ScalarField(g, u.values + t * phi)
    um = cl.ScalarField(g, u.values - t * phi)
    deriv = (cl.energy(up, w, 0.0).dirichlet - cl.energy(um, w, 0.0).dirichlet) / (2 * t)
    div = cl.discrete_flux_divergence(u, w)
    pairing = -2.0 * float(np.sum(phi * div.values)) * g.h ** 2
    assert deriv == pytest.approx(pairing, rel=1e-8)


def bump_field(g, R):
    mesh = g.node_mesh()
    rr = np.sqrt(sum(m ** 2 for m in mesh))
    return cl.ScalarField(g, np.maximum(1.0 - rr / R, 0.0))


def test_poincare_bump_frozen_and_oracle():
    g = cl.Grid.centered(2, 65, 1.0)
    w = cl.sample_face_weights(cl.constant(1.0, 2), g)
    R = 0.5
    f = bump_field(g, R)
    ratio = cl.poincare_ratio(f, w, np.zeros(2), R)
    assert ratio == pytest.approx(BUMP_RATIO_N65, rel=1e-12)

    # independent direct summation of both quadratic forms
    wn = np.zeros(g.shape)
    cnt = np.zeros(g.shape)
    for k in range(2):
        for idx in np.ndindex(*w.faces[k].shape):
            up = list(idx)
            up[k] += 1
            wn[idx] += w.faces[k][idx]
            wn[tuple(up)] += w.faces[k][idx]
            cnt[idx] += 1
            cnt[tuple(up)] += 1
    wn = wn / cnt
    num = float(np.sum(f.values ** 2 * wn)) * g.h ** 2
    den, _ = naive_energy(f, w, 0.0)
    assert ratio == pytest.approx(num / (R * R * den), rel=1e-12)


def test_poincare_ring_field_is_finite():
    g = cl.Grid.centered(2, 33, 1.0)
    w = cl.sample_face_weights(cl.constant(1.0, 2), g)
    R = 0.5
    mesh = g.node_mesh()
    rr = np.sqrt(mesh[0] ** 2 + mesh[1] ** 2)
    vals = np.where((rr > R - 3 * g.h) & (rr < R - g.h), 1.0, 0.0)
    ratio = cl.poincare_ratio(cl.ScalarField(g, vals), w, np.zeros(2), R)
    assert math.isfinite(ratio) and ratio > 0


def test_poincare_errors():
    g = cl.Grid.centered(2, 17, 1.0)
    w = cl.sample_face_weights(cl.constant(1.0, 2), g)
    with pytest.raises(cl.UndefinedRatio):
        cl.poincare_ratio(cl.ScalarField.zeros(g), w, np.zeros(2), 0.5)
    ones = cl.ScalarField(g, np.ones(g.shape))
    with pytest.raises(ValueError):
        cl.poincare_ratio(ones, w, np.zeros(2), 0.5)


def test_poincare_scale_invariance_homogeneous_weight():
    g = cl.Grid.centered(2, 129, 1.0)
    for spec in (cl.constant(1.0, 2), cl.power_subspace(-0.5, 1, dim=2)):
        w = cl.sample_face_weights(spec, g)
        vals = [cl.poincare_ratio(bump_field(g, R), w, np.zeros(2), R)
                for R in (0.8, 0.4)]
        assert abs(vals[0] - vals[1]) / vals[0] <= 0.02


def test_dump_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(5)
    g = cl.Grid.centered(2, 9, 1.0)
    f = cl.ScalarField(g, rng.standard_normal(g.shape) * np.exp(
        rng.uniform(-30, 30, size=g.shape)))
    path = tmp_path / "f.txt"
    cl.write_field(f, path)
    back = cl.read_field(path)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)
    assert cl.dump_field(back) == cl.dump_field(f)


def test_parse_field_errors():
    with pytest.raises(ValueError):
        cl.parse_field("2 5 5 0.5\n1.0\n")


def test_interpolate_at_rejects_outside_points():
    g = cl.Grid.centered(2, 9, 1.0)
    f = cl.ScalarField(g, np.zeros(g.shape))
    with pytest.raises(ValueError):
        cl.interpolate_at(f, np.array([[1.5, 0.0]]))
