"""Matplotlib figure emission (band diagram, soliton profile, wavepacket
slices, convergence plot) as self-contained deterministic SVG files."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

# reproducible SVG ids and no embedded timestamps
matplotlib.rcParams["svg.hashsalt"] = "blochnls"
_SAVEFIG = dict(format="svg", metadata={"Date": None})


def band_figure(table, path, highlight=None):
    """Band diagram along a k path: arclength on the abscissa, corner ticks.

    highlight=(k_index, band_index) marks one (k, lambda_n) point.
    """
    s = table.arclength
    if s is None:
        s = np.arange(len(table.k_grid))
    fig, ax = plt.subplots(figsize=(5, 4))
    for n in range(table.n_max):
        ax.plot(s, table.bands[:, n], lw=1.2)
    if table.path_ticks:
        ax.set_xticks([t for t, _ in table.path_ticks])
        ax.set_xticklabels([lbl for _, lbl in table.path_ticks])
        for t, _ in table.path_ticks:
            ax.axvline(t, color="0.85", lw=0.6, zorder=0)
    if highlight is not None:
        i, n = highlight
        ax.plot([s[i]], [table.bands[i, n - 1]], "ko", ms=5, fillstyle="none")
    ax.set_ylabel(r"$\lambda_n(k)$")
    ax.set_xlim(s[0], s[-1])
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def soliton_figure(profile, path):
    """Radial ground-state profile R(r)."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(profile.r_grid, profile.R, lw=1.4)
    ax.set_xlabel("$r$")
    ax.set_ylabel("$R(r)$")
    ax.set_xlim(0, min(profile.r_max, 4 * profile.r_trust))
    ax.axhline(0.0, color="0.8", lw=0.6)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def wavepacket_slices_figure(u, ws, path):
    """|u| along the axis through the envelope center: the x1 slice at the
    peak's x2 row and (for d=2) the x2 slice at the peak's x1 column."""
    vals = np.abs(u.values)
    axes_coords = u.coordinates()
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    fig, axs = plt.subplots(1, u.lattice.dim, figsize=(5 * u.lattice.dim, 3.5),
                            squeeze=False)
    for j in range(u.lattice.dim):
        take = list(idx)
        take[j] = slice(None)
        axs[0, j].plot(axes_coords[j], vals[tuple(take)], lw=1.0)
        axs[0, j].set_xlabel(f"$x_{j + 1}$")
        axs[0, j].set_ylabel("$|u|$")
    fig.suptitle(f"t = {u.time:g}, eps = {ws.eps:g}")
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def convergence_figure(report, path):
    """log-log error-vs-eps scatter with the fitted power law."""
    eps = np.asarray(report.eps_list, dtype=float)
    err = np.asarray(report.max_sup_error, dtype=float)
    good = np.isfinite(err) & (err > 0)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(eps[good], err[good], "o", label="max sup-norm error")
    if np.isfinite(report.fitted_slope) and np.count_nonzero(good) >= 2:
        xs = np.linspace(eps[good].min(), eps[good].max(), 50)
        ys = np.exp(report.fit_intercept) * xs**report.fitted_slope
        label = f"slope {report.fitted_slope!r}"
        ax.loglog(xs, ys, "-", lw=1.0, label=label)
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel(r"$\sup_x |u - u_{\mathrm{app}}|$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)
