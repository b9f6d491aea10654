"""Equilibrium distributions and near-equilibrium closures.

Provides analytic Maxwellians, the anisotropic Gaussian of the ES-BGK
relaxation operator, discretely moment-matched versions of both (exponential
family + damped Newton, so collision updates conserve the discrete
invariants to round-off), and the order-0/1 Chapman-Enskog truncation used
for lifting and for regime indicators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ModelMismatch, NewtonDivergence, NonSPDTensor
from .grids import VelocityGrid
from .moments import split_conserved

log = logging.getLogger(__name__)

# exp argument cap: keeps f and its basis-weighted sums finite in float64
_EXP_CLIP = 600.0


@dataclass(frozen=True)
class CEClosure:
    """Chapman-Enskog closure order and ES-BGK collision parameters.

    order: 0 -> Euler / local Maxwellian, 1 -> Navier-Stokes truncation.
    beta: ES-BGK anisotropy, Pr = 1/(1-beta); beta = 0 is plain BGK.
    nu_omega: collision frequency law nu = rho * T^(1-omega); omega = 1 gives
    the constant-collision-rate baseline nu = rho.
    """

    order: int = 0
    beta: float = 0.0
    nu_omega: float = 1.0

    def __post_init__(self):
        if self.order not in (0, 1):
            raise ConfigError("closure order must be 0 or 1")
        if not -0.5 <= self.beta < 1.0:
            raise ConfigError("beta must lie in [-1/2, 1)")

    def nu(self, rho, T):
        if self.nu_omega == 1.0:
            return np.asarray(rho, dtype=float).copy()
        return rho * np.asarray(T, dtype=float) ** (1.0 - self.nu_omega)

    def mu(self, rho, T):
        """Shear viscosity rho*T / ((1-beta) nu)."""
        return rho * T / ((1.0 - self.beta) * self.nu(rho, T))

    def kappa(self, rho, T):
        """Heat conductivity (5/2) rho*T / nu."""
        return 2.5 * rho * T / self.nu(rho, T)

    @property
    def prandtl(self) -> float:
        return 1.0 / (1.0 - self.beta)


def _fields(rho, u, T):
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    u = np.atleast_2d(np.asarray(u, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    return rho, u, T


def maxwellian(rho, u, T, vg: VelocityGrid) -> np.ndarray:
    """Analytic Maxwellian sampled at the velocity nodes, (n_cells, n_nodes)."""
    rho, u, T = _fields(rho, u, T)
    csq = (
        (vg.vx[None, :] - u[:, 0:1]) ** 2
        + (vg.vy[None, :] - u[:, 1:2]) ** 2
        + (vg.vz[None, :] - u[:, 2:3]) ** 2
    )
    pref = rho * (2.0 * np.pi * T) ** -1.5
    return pref[:, None] * np.exp(-csq / (2.0 * T[:, None]))


def es_tensor(theta: np.ndarray, T: np.ndarray, beta: float, validate: bool = True):
    """Relaxation tensor (1-beta) T I + beta Theta; SPD required for sampling."""
    theta = theta if theta.ndim == 3 else theta[None]
    T = np.atleast_1d(T)
    tt = beta * theta + (1.0 - beta) * T[:, None, None] * np.eye(3)[None]
    if validate and beta != 0.0:
        if np.any(np.linalg.eigvalsh(tt)[:, 0] <= 0.0):
            raise NonSPDTensor("relaxation tensor not positive definite")
    return tt


def anisotropic_gaussian(rho, u, tt: np.ndarray, vg: VelocityGrid) -> np.ndarray:
    """Gaussian rho/sqrt(det 2 pi TT) exp(-(v-u) TT^-1 (v-u)/2) at the nodes."""
    rho, u, _ = _fields(rho, u, np.ones_like(np.atleast_1d(rho)))
    tt = tt if tt.ndim == 3 else tt[None]
    inv = np.linalg.inv(tt)
    det = np.linalg.det(2.0 * np.pi * tt)
    if np.any(det <= 0.0):
        raise NonSPDTensor("non-positive determinant in Gaussian sampling")
    c = [vg.vx[None, :] - u[:, 0:1], vg.vy[None, :] - u[:, 1:2], vg.vz[None, :] - u[:, 2:3]]
    quad = np.zeros_like(c[0])
    for i in range(3):
        for j in range(3):
            quad += inv[:, i, j, None] * c[i] * c[j]
    return (rho / np.sqrt(det))[:, None] * np.exp(-0.5 * quad)


def _newton_family(
    basis: np.ndarray,
    target: np.ndarray,
    scale: np.ndarray,
    alpha0: np.ndarray,
    node_weight: float,
    tol: float,
    max_iter: int,
    base: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton solve of sum_m base*exp(alpha.b(m)) b(m) w = target.

    basis (M,p), target/scale/alpha0 (n,p). Returns (f, alpha). Raises
    NewtonDivergence if any cell fails to reach tol within max_iter.
    """
    bw = basis * node_weight
    alpha = alpha0.copy()

    def eval_rows(a_rows, rows):
        arg = a_rows @ basis.T
        np.clip(arg, -_EXP_CLIP, _EXP_CLIP, out=arg)
        f_rows = np.exp(arg)
        if base is not None:
            f_rows *= base[rows]
        res_rows = f_rows @ bw - target[rows]
        err_rows = np.abs(res_rows / scale[rows]).max(axis=1)
        return f_rows, res_rows, np.where(np.isfinite(err_rows), err_rows, np.inf)

    everything = np.arange(alpha.shape[0])
    f, res, err = eval_rows(alpha, everything)
    for _ in range(max_iter):
        live = np.flatnonzero(err > tol)
        if live.size == 0:
            return f, alpha
        jac = np.einsum("cm,mi,mj->cij", f[live], basis, basis) * node_weight
        try:
            step = np.linalg.solve(jac, -res[live][..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(f"singular moment Jacobian: {exc}") from exc
        step = np.where(np.isfinite(step), step, 0.0)
        damp = np.ones(live.size)
        for _ in range(30):
            cand = alpha[live] + damp[:, None] * step
            f_c, res_c, err_c = eval_rows(cand, live)
            worse = err_c > err[live]
            if not worse.any():
                break
            damp[worse] *= 0.5
        alpha[live], f[live], res[live], err[live] = cand, f_c, res_c, err_c
    if (err > tol).any():
        raise NewtonDivergence(
            f"moment matching stalled at max rel residual {err.max():.3e} (tol {tol:g})"
        )
    return f, alpha


def _maxwellian_alpha(rho, u, T):
    usq = np.einsum("ij,ij->i", u, u)
    a = np.empty((rho.size, 5))
    a[:, 0] = np.log(rho * (2.0 * np.pi * T) ** -1.5) - usq / (2.0 * T)
    a[:, 1:4] = u / T[:, None]
    a[:, 4] = -1.0 / (2.0 * T)
    return a


def _invariant_scale(rho, u, T):
    speed = np.sqrt(T) + np.linalg.norm(u, axis=1)
    s = np.empty((rho.size, 5))
    s[:, 0] = rho
    s[:, 1:4] = (rho * speed)[:, None]
    s[:, 4] = rho * (3.0 * T + np.einsum("ij,ij->i", u, u))
    return s


def discrete_equilibrium(
    U: np.ndarray,
    vg: VelocityGrid,
    tol: float = 1e-13,
    max_iter: int = 50,
    base: np.ndarray | None = None,
) -> np.ndarray:
    """Distribution exp(alpha . (1, v, |v|^2)) whose DISCRETE moments match U.

    U is conserved (n,5) = (rho, rho u, E). With `base` given, returns
    base * exp(alpha . m) instead (defect correction around a sampled shape).
    """
    U = np.atleast_2d(U)
    rho, u, T = split_conserved(U)
    target = U.copy()
    target[:, 4] *= 2.0  # basis carries |v|^2, not |v|^2/2
    scale = _invariant_scale(rho, u, T)
    alpha0 = np.zeros((rho.size, 5)) if base is not None else _maxwellian_alpha(rho, u, T)
    f, _ = _newton_family(vg.invariants, target, scale, alpha0, vg.weight, tol, max_iter, base)
    return f


def _aniso_basis(vg: VelocityGrid) -> np.ndarray:
    one = np.ones(vg.n_nodes)
    return np.stack(
        [one, vg.vx, vg.vy, vg.vz,
         vg.vx**2, vg.vy**2, vg.vz**2,
         vg.vx * vg.vy, vg.vx * vg.vz, vg.vy * vg.vz],
        axis=1,
    )


def discrete_gaussian(
    rho, u, tt: np.ndarray, vg: VelocityGrid, tol: float = 1e-13, max_iter: int = 50
) -> np.ndarray:
    """Anisotropic Gaussian with discretely matched (1, v, v(x)v) moments.

    10-parameter Newton in the exponential family; falls back to the analytic
    sample corrected on the five conserved moments if that Newton fails.
    """
    rho, u, _ = _fields(rho, u, np.ones_like(np.atleast_1d(rho)))
    tt = tt if tt.ndim == 3 else tt[None]
    n = rho.size

    second = tt + np.einsum("ci,cj->cij", u, u)  # (1/rho) int v(x)v f
    pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]
    target = np.empty((n, 10))
    target[:, 0] = rho
    target[:, 1:4] = rho[:, None] * u
    for k, (i, j) in enumerate(pairs):
        target[:, 4 + k] = rho * second[:, i, j]

    T_eff = np.trace(tt, axis1=1, axis2=2) / 3.0
    scale = np.empty((n, 10))
    scale[:, :4] = _invariant_scale(rho, u, T_eff)[:, :4]
    scale[:, 4:] = (rho * (T_eff + np.einsum("ij,ij->i", u, u)))[:, None]

    inv = np.linalg.inv(tt)
    det = np.linalg.det(2.0 * np.pi * tt)
    if np.any(det <= 0.0):
        raise NonSPDTensor("non-positive determinant in Gaussian matching")
    alpha0 = np.empty((n, 10))
    alpha0[:, 0] = np.log(rho / np.sqrt(det)) - 0.5 * np.einsum("ci,cij,cj->c", u, inv, u)
    alpha0[:, 1:4] = np.einsum("cij,cj->ci", inv, u)
    # cross terms appear once in the basis but twice in (v-u).S.(v-u)/2
    for k, (i, j) in enumerate(pairs):
        alpha0[:, 4 + k] = (-0.5 if i == j else -1.0) * inv[:, i, j]

    try:
        f, _ = _newton_family(_aniso_basis(vg), target, scale, alpha0, vg.weight, tol, max_iter)
        return f
    except NewtonDivergence:
        log.warning("anisotropic moment matching diverged; conserving fallback engaged")
        E = 0.5 * rho * (np.einsum("ij,ij->i", u, u) + np.trace(tt, axis1=1, axis2=2))
        U = np.concatenate([rho[:, None], rho[:, None] * u, E[:, None]], axis=1)
        return discrete_equilibrium(U, vg, tol, max_iter, base=anisotropic_gaussian(rho, u, tt, vg))


# Chapman-Enskog first-order coefficients of the two-term ansatz
# g1 = c_A A(V):D(u) + c_B B(V) . grad(sqrt T), fixed by matching the
# Navier-Stokes moments Abar = -eps (mu/rho T) D, Bbar = -eps (kappa/rho T^1.5) grad T.
def ce_coefficients(rho, T, closure: CEClosure):
    c_a = -closure.mu(rho, T) / (2.0 * rho * T)
    c_b = -0.8 * closure.kappa(rho, T) / (rho * T)
    return c_a, c_b


def strain_1d(du: np.ndarray) -> np.ndarray:
    """Traceless strain D(u) for fields varying along x only; du is (n,3)."""
    du = np.atleast_2d(du)
    D = np.zeros((du.shape[0], 3, 3))
    D[:, 0, 0] = 4.0 / 3.0 * du[:, 0]
    D[:, 1, 1] = D[:, 2, 2] = -2.0 / 3.0 * du[:, 0]
    D[:, 0, 1] = D[:, 1, 0] = du[:, 1]
    D[:, 0, 2] = D[:, 2, 0] = du[:, 2]
    return D


def ce_truncation(
    rho, u, T, du, dT, closure: CEClosure, vg: VelocityGrid, eps, base=None
) -> np.ndarray:
    """Chapman-Enskog distribution of the closure order.

    Order 0 is the local Maxwellian; order 1 multiplies it by
    (1 + eps g1) with the two-term g1 above. du (n,3) and dT (n,) are the
    x-derivatives of mean velocity and temperature; eps is scalar or (n,).
    base, if given, replaces the sampled Maxwellian as the weight; pass the
    moment-matched discrete equilibrium when the result is compared against
    distributions relaxed by the collision operator, whose fixed point on a
    coarse grid differs from the analytic sample by its quadrature defect.
    Order-1 values may dip below zero in strong gradients; callers that need
    a distribution (not a distance target) should clamp.
    """
    rho, u, T = _fields(rho, u, T)
    M = maxwellian(rho, u, T, vg) if base is None else np.atleast_2d(base)
    if closure.order == 0:
        return M

    du = np.atleast_2d(np.asarray(du, dtype=float))
    dT = np.atleast_1d(np.asarray(dT, dtype=float))
    eps = np.broadcast_to(np.asarray(eps, dtype=float), rho.shape)
    rt = np.sqrt(T)[:, None]
    Vx = (vg.vx[None, :] - u[:, 0:1]) / rt
    Vy = (vg.vy[None, :] - u[:, 1:2]) / rt
    Vz = (vg.vz[None, :] - u[:, 2:3]) / rt
    Vsq = Vx**2 + Vy**2 + Vz**2

    D = strain_1d(du)
    a_contract = (
        D[:, 0, 0, None] * Vx**2
        + D[:, 1, 1, None] * Vy**2
        + D[:, 2, 2, None] * Vz**2
        + 2.0 * D[:, 0, 1, None] * Vx * Vy
        + 2.0 * D[:, 0, 2, None] * Vx * Vz
    )
    grad_rt = dT / (2.0 * np.sqrt(T))  # d/dx sqrt(T)
    b_contract = 0.5 * (Vsq - 5.0) * Vx * grad_rt[:, None]
    c_a, c_b = ce_coefficients(rho, T, closure)
    g1 = c_a[:, None] * a_contract + c_b[:, None] * b_contract
    return M * (1.0 + eps[:, None] * g1)


def negative_fraction(f: np.ndarray) -> float:
    """Fraction of nodes where a truncation dipped below zero."""
    return float(np.mean(f < 0.0))


def burnett_guard(closure: CEClosure):
    if closure.beta != 0.0:
        raise ModelMismatch("Burnett-order expressions are only available for beta = 0")
