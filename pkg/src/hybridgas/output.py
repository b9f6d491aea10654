"""Snapshot serialization: one CSV per output time, deterministic bytes.

Layout of every file:
  line 1   # hybridgas-csv-v1          (schema version)
  line 2   # key=value key=value ...    (full config echo, sorted keys)
  line 3   # t=<snapshot time>
  line 4   column names
  rest     one row per cell, every number printed with %.17g

Columns: x, rho, ux, uy, uz, T, qx, regime, vns_eig1..3, l1_eq_dist.
regime is -1 on kinetic cells and 0 on fluid cells. qx is the moment heat
flux on kinetic cells and the closure value (zero at order 0, -eps kappa
dT/dx at order 1) on fluid cells. vns_eig* are the eigenvalues of the
first-order realizability matrix in ascending order. l1_eq_dist is the
L1 velocity-space distance to the moment-matched equilibrium on kinetic
cells and 0 on fluid cells.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .equilibrium import CEClosure
from .grids import SpatialGrid, VelocityGrid
from .hybrid import KINETIC, HybridState, lift, work_conserved
from .indicators import FieldGradients, v_matrix_ns
from .moments import heat_flux, split_conserved

SCHEMA = "hybridgas-csv-v1"
COLUMNS = (
    "x", "rho", "ux", "uy", "uz", "T", "qx", "regime",
    "vns_eig1", "vns_eig2", "vns_eig3", "l1_eq_dist",
)


def snapshot_rows(
    state: HybridState,
    vg: VelocityGrid,
    grid: SpatialGrid,
    eps: np.ndarray,
    closure: CEClosure,
) -> np.ndarray:
    """(n_cells, 12) array in COLUMNS order."""
    n = state.regime.size
    U = work_conserved(state, vg)
    rho, u, T = split_conserved(U)
    g = FieldGradients.from_fields(rho, u, T, grid.dx, grid.boundary, second=False)
    eig = np.linalg.eigvalsh(v_matrix_ns(rho, u, T, g, eps, closure))

    kin = state.regime == KINETIC
    qx = np.zeros(n)
    l1 = np.zeros(n)
    if kin.any():
        qx[kin] = heat_flux(state.f[kin], vg)[:, 0]
        l1[kin] = np.abs(state.f[kin] - lift(U[kin], vg)).sum(axis=1) * vg.weight
    if (~kin).any() and closure.order == 1:
        qx[~kin] = -(eps * closure.kappa(rho, T) * g.dT)[~kin]

    return np.column_stack([
        grid.centers, rho, u[:, 0], u[:, 1], u[:, 2], T, qx,
        state.regime.astype(float), eig[:, 0], eig[:, 1], eig[:, 2], l1,
    ])


def write_snapshot(path, rows: np.ndarray, meta: dict, t: float) -> None:
    """Rows to CSV with the schema header; %.17g keeps bytes reproducible."""
    buf = io.StringIO()
    buf.write(f"# {SCHEMA}\n")
    buf.write("# " + " ".join(f"{k}={meta[k]}" for k in sorted(meta)) + "\n")
    buf.write(f"# t={float(t)!r}\n")
    buf.write(",".join(COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    Path(path).write_text(buf.getvalue())


def read_snapshot(path):
    """-> (t, meta dict, {column: array}). Rejects unknown schema versions."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != f"# {SCHEMA}":
        raise ValueError(f"{path}: not a {SCHEMA} file")
    meta = dict(kv.split("=", 1) for kv in lines[1][2:].split() if "=" in kv)
    t = float(lines[2].split("=", 1)[1])
    names = lines[3].split(",")
    data = np.loadtxt(io.StringIO("\n".join(lines[4:])), delimiter=",", ndmin=2)
    return t, meta, {name: data[:, j] for j, name in enumerate(names)}
