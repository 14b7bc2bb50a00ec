"""Figure rendering for experiment reports.

Every function writes one PNG next to the delimited output and returns the
path.  Rendering is headless (Agg) and deterministic.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_growth(report, path, target_exponent=None):
    """Log-log S(r) with the fitted slope and, optionally, the sharp rate."""
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    use = report.usable()
    ax.loglog(report.radii, report.S_values, "o", ms=4, color="0.55", label="S(r)")
    if np.any(use):
        r = report.radii[use]
        ax.loglog(r, report.S_values[use], "o", ms=5, color="C0",
                  label="usable window")
        if np.isfinite(report.fitted_exponent):
            fit = report.fitted_constant * r ** report.fitted_exponent
            ax.loglog(r, fit, "-", color="C1",
                      label=f"fit slope {report.fitted_exponent:.3f}")
        if target_exponent is not None:
            ref = report.S_values[use][0] * (r / r[0]) ** target_exponent
            ax.loglog(r, ref, "--", color="C3",
                      label=f"slope {target_exponent:.2f}")
    ax.set_xlabel("r")
    ax.set_ylabel("sup over B_r")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_energy_history(history, path):
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(np.arange(len(history)), history, "-", lw=1.2)
    ax.set_xlabel("sweep")
    ax.set_ylabel("energy")
    ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_field(field, path, fb_points=None, title=None):
    """Heatmap of a 2-d field with the free-boundary cell centers overlaid."""
    g = field.grid
    if g.dim != 2:
        return None
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    im = ax.imshow(field.values.T, origin="lower",
                   extent=(g.lo[0], g.hi[0], g.lo[1], g.hi[1]),
                   cmap="viridis")
    if fb_points is not None and len(fb_points):
        ax.plot(fb_points[:, 0], fb_points[:, 1], ".", ms=1.5, color="w",
                alpha=0.8)
    fig.colorbar(im, ax=ax, shrink=0.85)
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_residuals(lambdas, residuals, path):
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    ax.loglog(lambdas, residuals, "o-", ms=4)
    ax.set_xlabel("lambda")
    ax.set_ylabel("L1 residual over the unit ball")
    ax.invert_xaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_density(report, path):
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    ax.semilogx(report.radii, report.fractions, "o-", ms=4)
    ax.axhline(report.min_fraction, ls="--", color="C3", lw=0.8,
               label=f"min {report.min_fraction:.3f}")
    ax.set_xlabel("r")
    ax.set_ylabel("positive fraction of B_r")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_blowup_distances(seq, path):
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    lams = seq.lambdas[1:len(seq.successive_sup_distances) + 1]
    ax.loglog(lams, seq.successive_sup_distances, "o-", ms=4)
    ax.set_xlabel("lambda")
    ax.set_ylabel("sup distance to previous scale")
    ax.invert_xaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Date": None})
    plt.close(fig)
    return path
