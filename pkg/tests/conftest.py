"""Shared independent oracles: plain-loop summations and a direct sparse solve.

These deliberately re-derive the quantities the library computes with
vectorized code, so the two routes stay independent.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


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
            acc += w.faces[k][idx] * (u.values[tuple(up)] - u.values[idx])
            acc -= w.faces[k][tuple(dn)] * (u.values[idx] - u.values[tuple(dn)])
        out[idx] = acc / h2
    return out


def spsolve_oracle(u, w, mask):
    """Direct sparse solve of the face-weighted stencil on the masked nodes."""
    g = u.grid
    ids = -np.ones(g.shape, dtype=int)
    unknowns = np.argwhere(mask)
    for row, idx in enumerate(unknowns):
        ids[tuple(idx)] = row
    n_unk = len(unknowns)
    rows, cols, vals = [], [], []
    rhs = np.zeros(n_unk)
    h2 = g.h * g.h
    for row, idx in enumerate(unknowns):
        idx = tuple(idx)
        diag = 0.0
        for k in range(g.dim):
            for sgn in (-1, 1):
                nb = list(idx)
                nb[k] += sgn
                face = list(idx)
                if sgn < 0:
                    face[k] -= 1
                wf = w.faces[k][tuple(face)]
                diag += wf
                if ids[tuple(nb)] >= 0:
                    rows.append(row)
                    cols.append(ids[tuple(nb)])
                    vals.append(-wf / h2)
                else:
                    rhs[row] += wf * u.values[tuple(nb)] / h2
        rows.append(row)
        cols.append(row)
        vals.append(diag / h2)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n_unk, n_unk))
    x = spla.spsolve(A, rhs)
    out = u.values.copy()
    out[mask] = x
    return out
