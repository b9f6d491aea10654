"""Regime-decision machinery.

Realizability matrices at first and second closure order are assembled from
macroscopic fields and their x-derivatives, V = I + Abar - (2/3) Bbar (x) Bbar
with the scalar normalization equal to one at these orders. A fluid cell is
flagged for kinetic treatment when the eigenvalues of V drift too far from
the equilibrium value 1 (order 0) or when first- and second-order matrices
disagree (order 1). A kinetic cell may return to the fluid description when
its distribution sits close to the matching Chapman-Enskog truncation in L1
and the step resolves the collision time.

All evaluators are pure per-cell functions of a frozen state; second-order
expressions exist for beta = 0 only and are guarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import CEClosure, burnett_guard, ce_truncation, discrete_equilibrium, strain_1d
from .errors import ConfigError, NewtonDivergence
from .grids import VelocityGrid
from .moments import conserved_moments, l1_distance, split_conserved


@dataclass(frozen=True)
class IndicatorConfig:
    """Thresholds for both switching directions.

    eta0 bounds eigenvalue drift, delta0 the density-relative L1 distance.
    dt_over_eps_min keeps cells kinetic while the step still resolves the
    collision scale; the default separates the benchmark plateaus from their
    tails at the reference resolutions.
    """

    eta0: float = 1e-2
    delta0: float = 1e-4
    dt_over_eps_min: float = 0.05
    fd_stencil: str = "central-2nd"

    def __post_init__(self):
        if self.eta0 <= 0.0 or self.delta0 <= 0.0:
            raise ConfigError("indicator thresholds must be positive")
        if self.fd_stencil != "central-2nd":
            raise ConfigError("only the central-2nd stencil is implemented")


def _extend1(field: np.ndarray, boundary: str, parity: float = 1.0) -> np.ndarray:
    """One ghost value per side; parity = -1 for wall-odd fields like ux."""
    out = np.empty(field.shape[0] + 2)
    out[1:-1] = field
    if boundary == "periodic":
        out[0], out[-1] = field[-1], field[0]
    elif boundary == "copy":
        out[0], out[-1] = field[0], field[-1]
    elif boundary == "wall":
        out[0], out[-1] = parity * field[0], parity * field[-1]
    else:
        raise ConfigError(f"unknown boundary {boundary!r}")
    return out


def d_dx(field: np.ndarray, dx: float, boundary: str, parity: float = 1.0) -> np.ndarray:
    e = _extend1(field, boundary, parity)
    return (e[2:] - e[:-2]) / (2.0 * dx)


def d2_dx2(field: np.ndarray, dx: float, boundary: str, parity: float = 1.0) -> np.ndarray:
    e = _extend1(field, boundary, parity)
    return (e[2:] - 2.0 * e[1:-1] + e[:-2]) / (dx * dx)


@dataclass
class FieldGradients:
    """Central-difference x-derivatives of the macroscopic fields."""

    drho: np.ndarray
    du: np.ndarray  # (n, 3)
    dT: np.ndarray
    d2rho: np.ndarray | None = None
    d2u: np.ndarray | None = None

    @classmethod
    def from_fields(cls, rho, u, T, dx: float, boundary: str, second: bool = True):
        du = np.stack(
            [d_dx(u[:, i], dx, boundary, parity=-1.0 if i == 0 else 1.0) for i in range(3)],
            axis=1,
        )
        g = cls(
            drho=d_dx(rho, dx, boundary),
            du=du,
            dT=d_dx(T, dx, boundary),
        )
        if second:
            g.d2rho = d2_dx2(rho, dx, boundary)
            g.d2u = np.stack(
                [
                    d2_dx2(u[:, i], dx, boundary, parity=-1.0 if i == 0 else 1.0)
                    for i in range(3)
                ],
                axis=1,
            )
        return g


def _assemble(Abar: np.ndarray, Bbar: np.ndarray) -> np.ndarray:
    outer = np.einsum("ci,cj->cij", Bbar, Bbar)
    return np.eye(3)[None] + Abar - (2.0 / 3.0) * outer


def _first_order(rho, u, T, g: FieldGradients, eps, closure: CEClosure):
    rho = np.atleast_1d(rho)
    T = np.atleast_1d(T)
    eps = np.broadcast_to(np.asarray(eps, dtype=float), rho.shape)
    D = strain_1d(g.du)
    Abar = -(eps * closure.mu(rho, T) / (rho * T))[:, None, None] * D
    Bbar = np.zeros((rho.size, 3))
    Bbar[:, 0] = -eps * closure.kappa(rho, T) / (rho * T**1.5) * g.dT
    return Abar, Bbar, D, eps


def v_matrix_ns(rho, u, T, g: FieldGradients, eps, closure: CEClosure) -> np.ndarray:
    """First-order realizability matrices, (n, 3, 3)."""
    Abar, Bbar, _, _ = _first_order(rho, u, T, g, eps, closure)
    return _assemble(Abar, Bbar)


def v_matrix_burnett(rho, u, T, g: FieldGradients, eps, closure: CEClosure) -> np.ndarray:
    """Second-order realizability matrices (beta = 0 only), (n, 3, 3).

    Gradient conventions for fields varying along x only: the velocity
    gradient has entries d(u_i)/dx in its x-column, div(grad u) is the vector
    Laplacian, and Hess(rho) carries d2rho in its xx slot.
    """
    burnett_guard(closure)
    if g.d2rho is None or g.d2u is None:
        raise ConfigError("second derivatives required for the Burnett matrix")
    Abar, Bbar, D, eps = _first_order(rho, u, T, g, eps, closure)
    rho = np.atleast_1d(rho)
    T = np.atleast_1d(T)
    mu = closure.mu(rho, T)
    divu = g.du[:, 0]

    # ---- second-order tensor correction ----
    brace_a = np.zeros((rho.size, 3, 3))
    brace_a[:, 0, 0] += (
        -T / rho * g.d2rho
        + T / rho**2 * g.drho**2
        - g.dT * g.drho / rho
        + g.dT**2 / T
    )
    brace_a += np.einsum("ci,cj->cij", g.du, g.du)  # (grad u)(grad u)^T
    brace_a -= (divu / 3.0)[:, None, None] * D
    Abar = Abar - (2.0 * eps**2 * mu**2 / (rho**2 * T**2))[:, None, None] * brace_a

    # ---- second-order vector correction ----
    grad_p = T * g.drho + rho * g.dT  # d(rho T)/dx
    brace_b = np.zeros((rho.size, 3))
    brace_b[:, 0] += (25.0 / 6.0) * divu * g.dT
    lap_term = T[:, None] * g.d2u
    lap_term[:, 0] += divu * g.dT
    lap_term += 6.0 * g.du * g.dT[:, None]
    brace_b -= (5.0 / 3.0) * lap_term
    brace_b += (2.0 / rho * grad_p)[:, None] * D[:, :, 0]
    div_D = np.empty_like(g.d2u)
    div_D[:, 0] = (4.0 / 3.0) * g.d2u[:, 0]
    div_D[:, 1:] = g.d2u[:, 1:]
    brace_b += 2.0 * T[:, None] * div_D
    brace_b += 16.0 * D[:, :, 0] * g.dT[:, None]
    Bbar = Bbar - (eps**2 * mu**2 / (rho**2 * T**2.5))[:, None] * brace_b

    return _assemble(Abar, Bbar)


def sorted_eig_mismatch(V1: np.ndarray, V2: np.ndarray) -> np.ndarray:
    """Largest pairwise gap between ascending eigenvalues, per cell.

    Sorted pairing, not all-pairs: identical matrices with distinct
    eigenvalues must report zero mismatch.
    """
    return np.abs(np.linalg.eigvalsh(V1) - np.linalg.eigvalsh(V2)).max(axis=-1)


def fluid_breakdown(
    k: int,
    rho,
    u,
    T,
    g: FieldGradients,
    eps,
    closure: CEClosure,
    config: IndicatorConfig = IndicatorConfig(),
) -> np.ndarray:
    """Per-cell flags: the order-k closure is no longer trustworthy."""
    V_ns = v_matrix_ns(rho, u, T, g, eps, closure)
    if k == 0:
        drift = np.abs(np.linalg.eigvalsh(V_ns) - 1.0).max(axis=-1)
        return drift > config.eta0
    if k == 1:
        V_b = v_matrix_burnett(rho, u, T, g, eps, closure)
        return sorted_eig_mismatch(V_ns, V_b) > config.eta0
    raise ConfigError("closure order k must be 0 or 1")


def kinetic_to_fluid(
    f: np.ndarray,
    vg: VelocityGrid,
    g: FieldGradients,
    k: int,
    dt: float,
    eps,
    closure: CEClosure,
    config: IndicatorConfig = IndicatorConfig(),
    base: np.ndarray | None = None,
) -> np.ndarray:
    """Per-cell flags: the distribution is ready for the order-k fluid model.

    Requires closeness to the matching Chapman-Enskog truncation relative to
    the local density AND a time step that no longer resolves eps. base, if
    given, must be the discrete equilibrium at f's own moments; the collision
    step that produced f already solved for it (relaxation preserves
    moments), so passing it here skips a redundant Newton solve per step.
    """
    if k not in (0, 1):
        raise ConfigError("closure order k must be 0 or 1")
    U = conserved_moments(f, vg)
    rho, u, T = split_conserved(U)
    eps_arr = np.broadcast_to(np.asarray(eps, dtype=float), rho.shape)
    trunc = CEClosure(order=k, beta=closure.beta, nu_omega=closure.nu_omega)
    if base is None:
        # measure against the discrete hydrodynamic manifold: the collision
        # operator relaxes toward the moment-matched equilibrium, not toward
        # the analytic sample, and the two differ by the quadrature defect
        try:
            base = discrete_equilibrium(U, vg)
        except NewtonDivergence:
            base = None  # sampled-Maxwellian distance is an upper bound
    f_k = ce_truncation(rho, u, T, g.du, g.dT, trunc, vg, eps_arr, base=base)
    close = l1_distance(f, f_k, vg) <= config.delta0 * rho
    coarse = dt / eps_arr >= config.dt_over_eps_min
    return close & coarse
