"""Figure rendering for snapshot files.

Four panels per snapshot (density, x-velocity, temperature, heat flux)
with kinetic cells shaded. Figures are an additive convenience on top of
the CSV contract; nothing downstream reads them back.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np

from .output import read_snapshot

_PANELS = (("rho", "density"), ("ux", "velocity u_x"),
           ("T", "temperature"), ("qx", "heat flux q_x"))


def _kinetic_runs(x: np.ndarray, regime: np.ndarray):
    """Contiguous kinetic stretches as (x_lo, x_hi) cell-edge intervals."""
    dx = x[1] - x[0] if x.size > 1 else 1.0
    mask = regime < -0.5
    runs = []
    start = None
    for j, m in enumerate(mask):
        if m and start is None:
            start = j
        elif not m and start is not None:
            runs.append((x[start] - dx / 2, x[j - 1] + dx / 2))
            start = None
    if start is not None:
        runs.append((x[start] - dx / 2, x[-1] + dx / 2))
    return runs


def snapshot_figure(csv_path, png_path) -> None:
    t, meta, cols = read_snapshot(csv_path)
    x = cols["x"]
    runs = _kinetic_runs(x, cols["regime"])

    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    for ax, (name, label) in zip(axes.flat, _PANELS):
        ax.plot(x, cols[name], lw=1.2, color="tab:blue")
        for lo, hi in runs:
            ax.axvspan(lo, hi, color="tab:orange", alpha=0.18, lw=0)
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("x")
    fig.suptitle(
        f"{meta.get('case', '?')} / {meta.get('model', '?')}  t = {t:g}"
        + ("  (shaded = kinetic)" if runs else "")
    )
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
