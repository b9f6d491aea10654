"""Compressible fluid solvers on the conserved variables (rho, rho u, E).

Monatomic ideal gas, gamma = 5/3, p = rho T. The hyperbolic part is a
second-order central scheme: minmod reconstruction, local Lax-Friedrichs
face flux, Heun time stepping. The Navier-Stokes variant adds centered
viscous and heat fluxes scaled by the local Knudsen field; with a zero
closure order those terms are switched off and the step is plain Euler.

Face fluxes can be overridden with externally supplied values; the hybrid
driver injects velocity moments of the kinetic flux at coupling interfaces.
Overrides are held fixed across both Heun stages, so the net flux through an
overridden face over the whole step equals the injected value exactly.
"""

from __future__ import annotations

import numpy as np

from .equilibrium import CEClosure
from .errors import CFLViolation, ConfigError, NegativePressure
from .moments import DegenerateCell, NonPositiveTemperature, split_conserved

GAMMA = 5.0 / 3.0
DEFAULT_CFL = 0.45
DEFAULT_PARABOLIC_CFL = 0.4


def conserved_from_primitive(rho, u, T) -> np.ndarray:
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    u = np.atleast_2d(np.asarray(u, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    U = np.empty((rho.size, 5))
    U[:, 0] = rho
    U[:, 1:4] = rho[:, None] * u
    U[:, 4] = 0.5 * rho * np.einsum("ij,ij->i", u, u) + 1.5 * rho * T
    return U


def fluid_primitives(U: np.ndarray):
    """(rho, u, T) of a conserved stack; NegativePressure when p = rho T <= 0."""
    try:
        return split_conserved(U)
    except (DegenerateCell, NonPositiveTemperature) as exc:
        raise NegativePressure(str(exc)) from exc


def sound_speed(T) -> np.ndarray:
    return np.sqrt(GAMMA * np.asarray(T, dtype=float))


def _euler_flux(U: np.ndarray, rho, u, T) -> np.ndarray:
    p = rho * T
    F = np.empty_like(U)
    F[:, 0] = U[:, 1]
    F[:, 1] = U[:, 1] * u[:, 0] + p
    F[:, 2] = U[:, 2] * u[:, 0]
    F[:, 3] = U[:, 3] * u[:, 0]
    F[:, 4] = u[:, 0] * (U[:, 4] + p)
    return F


def ghost_extend_conserved(U: np.ndarray, boundary: str) -> np.ndarray:
    Ue = np.empty((U.shape[0] + 4, 5))
    Ue[2:-2] = U
    if boundary == "periodic":
        Ue[0:2] = U[-2:]
        Ue[-2:] = U[0:2]
    elif boundary == "copy":
        Ue[0:2] = U[0]
        Ue[-2:] = U[-1]
    elif boundary == "wall":
        flip = np.array([1.0, -1.0, 1.0, 1.0, 1.0])
        Ue[1] = U[0] * flip
        Ue[0] = U[1] * flip
        Ue[-2] = U[-1] * flip
        Ue[-1] = U[-2] * flip
    else:
        raise ConfigError(f"unknown boundary {boundary!r}")
    return Ue


def _extend_field(field: np.ndarray, boundary: str) -> np.ndarray:
    out = np.empty(field.size + 4)
    out[2:-2] = field
    if boundary == "periodic":
        out[0:2] = field[-2:]
        out[-2:] = field[0:2]
    else:
        out[0:2] = field[0]
        out[-2:] = field[-1]
    return out


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = np.sign(a)
    return np.where(s * np.sign(b) > 0, s * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _reconstruct(Ue: np.ndarray):
    """Face states from limited slopes; slopes are flattened where the
    reconstructed pressure would go non-positive."""
    diffs = Ue[1:] - Ue[:-1]
    sigma = _minmod(diffs[:-1], diffs[1:])  # cells 1..n+2 of the extended array
    cells = Ue[1:-1]
    for side in (+0.5, -0.5):
        cand = cells + side * sigma
        rho = cand[:, 0]
        bad = rho <= 0.0
        ok = ~bad
        e_int = np.empty_like(rho)
        e_int[ok] = cand[ok, 4] - 0.5 * (cand[ok, 1:4] ** 2).sum(axis=1) / rho[ok]
        e_int[bad] = -1.0
        sigma[e_int <= 0.0] = 0.0
    U_L = cells[:-1] + 0.5 * sigma[:-1]  # left of each interior face
    U_R = cells[1:] - 0.5 * sigma[1:]
    return U_L, U_R


def hyperbolic_fluxes(Ue: np.ndarray) -> np.ndarray:
    """Central face fluxes for the n+1 faces of n interior cells."""
    U_L, U_R = _reconstruct(Ue)
    rho_l, u_l, T_l = fluid_primitives(U_L)
    rho_r, u_r, T_r = fluid_primitives(U_R)
    a = np.maximum(
        np.abs(u_l[:, 0]) + sound_speed(T_l), np.abs(u_r[:, 0]) + sound_speed(T_r)
    )
    F_l = _euler_flux(U_L, rho_l, u_l, T_l)
    F_r = _euler_flux(U_R, rho_r, u_r, T_r)
    return 0.5 * (F_l + F_r) - 0.5 * a[:, None] * (U_R - U_L)


def viscous_fluxes(
    Ue: np.ndarray, dx: float, eps_e: np.ndarray, closure: CEClosure
) -> np.ndarray:
    """Centered diffusive face fluxes eps * (stress, heat) for n+1 faces.

    Signs follow d_t U + d_x (F_hyp - G) = 0, so G is subtracted from the
    hyperbolic flux. The xx stress carries the 4/3 longitudinal factor of a
    zero-bulk-viscosity gas.
    """
    rho, u, T = fluid_primitives(Ue[1:-1])
    dux = (u[1:, 0] - u[:-1, 0]) / dx
    duy = (u[1:, 1] - u[:-1, 1]) / dx
    duz = (u[1:, 2] - u[:-1, 2]) / dx
    dT = (T[1:] - T[:-1]) / dx
    rho_f = 0.5 * (rho[1:] + rho[:-1])
    T_f = 0.5 * (T[1:] + T[:-1])
    u_f = 0.5 * (u[1:] + u[:-1])
    eps_f = 0.5 * (eps_e[2:-1] + eps_e[1:-2])
    mu_f = eps_f * closure.mu(rho_f, T_f)
    kappa_f = eps_f * closure.kappa(rho_f, T_f)

    G = np.zeros((rho_f.size, 5))
    G[:, 1] = mu_f * (4.0 / 3.0) * dux
    G[:, 2] = mu_f * duy
    G[:, 3] = mu_f * duz
    G[:, 4] = (
        mu_f * ((4.0 / 3.0) * u_f[:, 0] * dux + u_f[:, 1] * duy + u_f[:, 2] * duz)
        + kappa_f * dT
    )
    return G


def fluid_fluxes(
    U: np.ndarray,
    dx: float,
    boundary: str,
    closure: CEClosure,
    eps=None,
) -> np.ndarray:
    """Net face fluxes of the configured model for the n+1 interior faces."""
    Ue = ghost_extend_conserved(U, boundary)
    F = hyperbolic_fluxes(Ue)
    if closure.order == 1:
        if eps is None:
            raise ConfigError("Navier-Stokes fluxes need the Knudsen field eps")
        eps_e = _extend_field(np.broadcast_to(np.asarray(eps, float), (U.shape[0],)), boundary)
        F -= viscous_fluxes(Ue, dx, eps_e, closure)
    return F


def apply_overrides(F: np.ndarray, overrides) -> np.ndarray:
    if overrides is not None:
        faces, values = overrides
        F[faces] = values
    return F


def fluid_step(
    U: np.ndarray,
    dt: float,
    dx: float,
    closure: CEClosure,
    boundary: str = "copy",
    eps=None,
    overrides=None,
    freeze_mask=None,
) -> np.ndarray:
    """One Heun step of the Euler (order 0) or Navier-Stokes (order 1) system.

    Cells under freeze_mask are held at their input values between stages:
    they belong to another solver and only serve as stencil data here.
    """
    r = dt / dx
    F1 = apply_overrides(fluid_fluxes(U, dx, boundary, closure, eps), overrides)
    U1 = U - r * (F1[1:] - F1[:-1])
    if freeze_mask is not None:
        U1[freeze_mask] = U[freeze_mask]
    F2 = apply_overrides(fluid_fluxes(U1, dx, boundary, closure, eps), overrides)
    return 0.5 * (U + U1 - r * (F2[1:] - F2[:-1]))


def fluid_cfl_dt(U: np.ndarray, dx: float, cfl: float = DEFAULT_CFL) -> float:
    _, u, T = fluid_primitives(U)
    wave = np.abs(u[:, 0]) + sound_speed(T)
    return cfl * dx / float(wave.max())


def parabolic_dt(
    U: np.ndarray,
    dx: float,
    eps,
    closure: CEClosure,
    cfl: float = DEFAULT_PARABOLIC_CFL,
) -> float:
    """Diffusive stability bound dt <= cfl dx^2 rho / (eps max(mu, kappa))."""
    if closure.order == 0:
        return np.inf
    rho, _, T = fluid_primitives(U)
    eps = np.broadcast_to(np.asarray(eps, dtype=float), rho.shape)
    diff = eps * np.maximum(closure.mu(rho, T), closure.kappa(rho, T))
    if not np.any(diff > 0.0):
        return np.inf
    return cfl * dx * dx * float((rho / np.where(diff > 0.0, diff, np.inf)).min())


def check_fluid_dt(U: np.ndarray, dt: float, dx: float, cfl: float = DEFAULT_CFL):
    limit = fluid_cfl_dt(U, dx, cfl)
    if dt > limit * (1.0 + 1e-12):
        raise CFLViolation(f"fluid dt {dt:g} exceeds advective bound {limit:g}")
