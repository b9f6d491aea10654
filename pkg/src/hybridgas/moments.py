"""Velocity moments of distribution fields.

All functionals accept a stack of cells, shape (n_cells, n_nodes), or a single
slice (n_nodes,). Quadrature is the midpoint rule of the shared VelocityGrid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCell, NonPositiveTemperature
from .grids import VelocityGrid

RHO_FLOOR = 1e-12


@dataclass
class MacroState:
    """Per-cell macroscopic state (density, mean velocity, temperature)."""

    rho: float
    u: np.ndarray
    T: float

    @property
    def energy(self) -> float:
        """Total energy density E = rho|u|^2/2 + (3/2) rho T."""
        return 0.5 * self.rho * float(self.u @ self.u) + 1.5 * self.rho * self.T


def _cells(f: np.ndarray) -> np.ndarray:
    return f[None, :] if f.ndim == 1 else f


def conserved_moments(f: np.ndarray, vg: VelocityGrid) -> np.ndarray:
    """Discrete (rho, rho*u, E) moments, shape (n_cells, 5)."""
    return _cells(f) @ vg.conserved_basis * vg.weight


def split_conserved(U: np.ndarray, rho_floor: float = RHO_FLOOR):
    """Conserved (n,5) -> (rho, u, T); raises on degenerate cells."""
    U = np.atleast_2d(U)
    rho = U[:, 0]
    if np.any(rho <= rho_floor) or not np.all(np.isfinite(rho)):
        raise DegenerateCell(f"density at/below floor {rho_floor:g}")
    u = U[:, 1:4] / rho[:, None]
    T = (2.0 * U[:, 4] / rho - np.einsum("ij,ij->i", u, u)) / 3.0
    if np.any(T <= 0.0):
        raise NonPositiveTemperature("temperature moment <= 0")
    return rho, u, T


def primitive_moments(f: np.ndarray, vg: VelocityGrid, rho_floor: float = RHO_FLOOR):
    """Discrete (rho, u, T) of a distribution stack."""
    return split_conserved(conserved_moments(f, vg), rho_floor)


def macro_state(f_slice: np.ndarray, vg: VelocityGrid) -> MacroState:
    rho, u, T = primitive_moments(f_slice, vg)
    return MacroState(float(rho[0]), u[0].copy(), float(T[0]))


def peculiar(vg: VelocityGrid, u: np.ndarray):
    """Centered node velocities v - u per cell, three (n_cells, n_nodes) arrays."""
    u = np.atleast_2d(u)
    return (
        vg.vx[None, :] - u[:, 0:1],
        vg.vy[None, :] - u[:, 1:2],
        vg.vz[None, :] - u[:, 2:3],
    )


def heat_flux(f: np.ndarray, vg: VelocityGrid) -> np.ndarray:
    """q = (1/2) sum (v-u)|v-u|^2 f dv^3, shape (n_cells, 3)."""
    f = _cells(f)
    _, u, _ = primitive_moments(f, vg)
    cx, cy, cz = peculiar(vg, u)
    csq = cx**2 + cy**2 + cz**2
    fw = f * vg.weight
    return 0.5 * np.stack(
        [(fw * cx * csq).sum(axis=1), (fw * cy * csq).sum(axis=1), (fw * cz * csq).sum(axis=1)],
        axis=1,
    )


def stress_tensor(f: np.ndarray, vg: VelocityGrid) -> np.ndarray:
    """Centered second moment Theta = (1/rho) sum (v-u)(x)(v-u) f dv^3, (n,3,3)."""
    f = _cells(f)
    rho, u, _ = primitive_moments(f, vg)
    cx, cy, cz = peculiar(vg, u)
    fw = f * vg.weight
    c = (cx, cy, cz)
    th = np.empty((f.shape[0], 3, 3))
    for i in range(3):
        for j in range(i, 3):
            th[:, i, j] = th[:, j, i] = (fw * c[i] * c[j]).sum(axis=1) / rho
    return th


@dataclass
class RealizabilityBundle:
    """Dimensionless moments entering the realizability matrix.

    Abar = <A(V)>_f, Bbar = <B(V)>_f, Cbar = (2/3)<(|V|^2/2 - 3/2)^2>_f with
    V = (v-u)/sqrt(T) and <.>_f = (1/rho) sum . f dv^3.
    """

    Abar: np.ndarray
    Bbar: np.ndarray
    Cbar: np.ndarray

    @property
    def v_reduced(self) -> np.ndarray:
        """Reduced realizability matrix I + Abar - (2/(3 Cbar)) Bbar (x) Bbar."""
        eye = np.eye(3)
        if self.Abar.ndim == 2:
            return eye + self.Abar - (2.0 / (3.0 * self.Cbar)) * np.outer(self.Bbar, self.Bbar)
        outer = np.einsum("ci,cj->cij", self.Bbar, self.Bbar)
        return eye[None] + self.Abar - (2.0 / 3.0) * outer / self.Cbar[:, None, None]


def realizability_moments(f: np.ndarray, vg: VelocityGrid) -> RealizabilityBundle:
    """Abar, Bbar, Cbar of a distribution stack (squeezed for a single slice)."""
    single = f.ndim == 1
    f = _cells(f)
    rho, u, T = primitive_moments(f, vg)
    cx, cy, cz = peculiar(vg, u)
    rt = np.sqrt(T)[:, None]
    Vx, Vy, Vz = cx / rt, cy / rt, cz / rt
    Vsq = Vx**2 + Vy**2 + Vz**2
    fw = f * (vg.weight / rho[:, None])

    V = (Vx, Vy, Vz)
    Abar = np.empty((f.shape[0], 3, 3))
    for i in range(3):
        for j in range(i, 3):
            m = (fw * V[i] * V[j]).sum(axis=1)
            if i == j:
                m -= (fw * Vsq).sum(axis=1) / 3.0
            Abar[:, i, j] = Abar[:, j, i] = m
    half_shift = 0.5 * (Vsq - 5.0)
    Bbar = np.stack([(fw * half_shift * Vi).sum(axis=1) for Vi in V], axis=1)
    Cbar = (2.0 / 3.0) * (fw * (0.5 * Vsq - 1.5) ** 2).sum(axis=1)
    if single:
        return RealizabilityBundle(Abar[0], Bbar[0], Cbar[0])
    return RealizabilityBundle(Abar, Bbar, Cbar)


def l1_distance(f: np.ndarray, g: np.ndarray, vg: VelocityGrid) -> np.ndarray:
    """Per-cell L1 velocity-space distance sum |f - g| dv^3."""
    return np.abs(_cells(f) - _cells(g)).sum(axis=1) * vg.weight
