"""Figures for the CLI report path. Everything renders off-screen to PNG files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no Software/date chunks, so identical data gives identical files
_PNG_META = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_matrix(m, path, title: str = "") -> Path:
    """Pixel image: +1 (N) white, -1 (S) black, 0 grey."""
    fig, ax = plt.subplots(figsize=(3, 3))
    ax.imshow(m.cells, cmap="gray", vmin=-1, vmax=1, interpolation="nearest")
    ax.set_xticks([])
    ax.set_yticks([])
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_interaction_map(imap, path, title: str = "interaction over translations") -> Path:
    n = imap.order - 1
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(imap.scores, cmap="coolwarm", vmin=-1, vmax=1, origin="lower",
                   extent=(-n - 0.5, n + 0.5, -n - 0.5, n + 0.5), interpolation="nearest")
    ax.set_xlabel("dx (pixels)")
    ax.set_ylabel("dy (pixels)")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="normalized score")
    fig.tight_layout()
    return _save(fig, path)


def plot_force_map(fmap, path) -> Path:
    n = fmap.order - 1
    lim = max(float(np.abs(fmap.forces).max()), 1e-12)
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(fmap.forces, cmap="coolwarm", vmin=-lim, vmax=lim, origin="lower",
                   extent=(-n - 0.5, n + 0.5, -n - 0.5, n + 0.5), interpolation="nearest")
    ax.set_xlabel("dx (pixels)")
    ax.set_ylabel("dy (pixels)")
    ax.set_title("predicted force")
    fig.colorbar(im, ax=ax, label="force (N)")
    fig.tight_layout()
    return _save(fig, path)


def plot_rotation_profile(profile, path, bound: float | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(profile.angles, profile.scores, marker="o", ms=3, lw=1)
    if bound is not None:
        ax.axhline(bound, color="tab:red", ls="--", lw=0.8)
    ax.set_xlim(-180, 180)
    ax.set_ylim(-1.05, 1.05)
    ax.set_xlabel("rotation (deg)")
    ax.set_ylabel("normalized score")
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(report, path) -> Path:
    """Largest clique per threshold, plus the census at the stopping threshold."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3))
    ts = [h.threshold for h in report.history]
    ax1.step(ts, [h.max_clique_size for h in report.history], where="mid")
    ax1.invert_xaxis()
    ax1.set_xlabel("pair threshold")
    ax1.set_ylabel("max clique size")
    sizes = sorted(report.census)
    ax2.bar([str(s) for s in sizes], [report.census[s] for s in sizes], color="tab:gray")
    ax2.set_xlabel("maximal clique size")
    ax2.set_ylabel("count")
    ax2.set_title(f"threshold {report.threshold:g}")
    fig.tight_layout()
    return _save(fig, path)
