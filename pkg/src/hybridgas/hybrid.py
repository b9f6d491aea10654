"""Hybrid time loop: per-cell regime decisions and coupled advances.

Every cell is owned by exactly one representation per step: a conserved
fluid state or a velocity distribution. Classification runs on time-level-n
data, transitions lift (moment-matched equilibrium) or project (moments), a
repair pass keeps every contiguous zone at least two cells wide by expanding
kinetic regions only, and both solvers then advance with one global dt.

Coupling is conservative by construction: the kinetic transport fluxes at a
zone edge are reduced to their five conserved moments and injected as frozen
face-flux overrides into the fluid update, so the two sides exchange exactly
the same amount of mass, momentum and energy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import CEClosure, discrete_equilibrium, maxwellian
from .errors import NewtonDivergence, ZoneTooNarrow
from .fluid import fluid_cfl_dt, fluid_step, parabolic_dt
from .grids import VelocityGrid
from .indicators import (
    FieldGradients,
    IndicatorConfig,
    fluid_breakdown,
    kinetic_to_fluid,
)
from .kinetic import collision_step, kinetic_cfl_dt, transport_step
from .moments import conserved_moments, split_conserved

log = logging.getLogger(__name__)

KINETIC = -1
FLUID = 0


@dataclass(frozen=True)
class HybridConfig:
    """Driver knobs; closure.order is the hydrodynamic order k of the run."""

    closure: CEClosure = CEClosure()
    indicators: IndicatorConfig = field(default_factory=IndicatorConfig)
    boundary: str = "copy"
    cfl_kinetic: float = 0.5
    cfl_fluid: float = 0.45
    cfl_parabolic: float = 0.4
    newton_tol: float = 1e-13
    min_zone: int = 2
    force_regime: str | None = None  # None | "kinetic" | "fluid"


@dataclass
class HybridState:
    """f rows are authoritative on kinetic cells, U rows on fluid cells.

    Pure runs carry only one representation: f is None for fluid-only
    states, U is None for kinetic-only ones.
    """

    f: np.ndarray | None
    U: np.ndarray | None
    regime: np.ndarray
    t: float = 0.0
    step_count: int = 0
    # discrete equilibria saved by the last collision step; rows are fresh
    # exactly where regime == KINETIC, because every cell that is kinetic
    # at classification time went through the zone advance that wrote them
    eq_cache: np.ndarray | None = None

    def copy(self) -> "HybridState":
        return HybridState(
            None if self.f is None else self.f.copy(),
            None if self.U is None else self.U.copy(),
            self.regime.copy(),
            self.t,
            self.step_count,
        )


@dataclass
class StepStats:
    kinetic_cells: int
    to_kinetic: int
    to_fluid: int

    @property
    def transitions(self) -> int:
        return self.to_kinetic + self.to_fluid


def project(f_rows: np.ndarray, vg: VelocityGrid) -> np.ndarray:
    """Kinetic -> fluid: the five conserved moments, same quadrature."""
    return conserved_moments(f_rows, vg)


_lift_fallback_warned = False


def lift(U_rows: np.ndarray, vg: VelocityGrid, tol: float = 1e-13) -> np.ndarray:
    """Fluid -> kinetic: moment-matched equilibrium.

    Falls back to the analytic Maxwellian sample if the matching Newton
    fails; the conservation defect is then quadrature-level and logged.
    The fallback recurs every step on a grid too coarse for the Newton
    solve, so only the first occurrence warns; the rest go to debug.
    """
    global _lift_fallback_warned
    U_rows = np.atleast_2d(U_rows)
    try:
        return discrete_equilibrium(U_rows, vg, tol=tol)
    except NewtonDivergence:
        rho, u, T = split_conserved(U_rows)
        f = maxwellian(rho, u, T, vg)
        defect = np.abs(conserved_moments(f, vg) - U_rows).max()
        if _lift_fallback_warned:
            log.debug("lift fell back to sampled Maxwellian; moment defect %.3e", defect)
        else:
            _lift_fallback_warned = True
            log.warning(
                "lift fell back to sampled Maxwellian; moment defect %.3e "
                "(repeats on this grid are logged at debug level)", defect,
            )
        return f


def work_conserved(state: HybridState, vg: VelocityGrid) -> np.ndarray:
    """Conserved fields on all cells: fluid rows as-is, kinetic rows projected."""
    if state.U is None:
        return project(state.f, vg)
    U = state.U.copy()
    kin = state.regime == KINETIC
    if kin.any():
        U[kin] = project(state.f[kin], vg)
    return U


def zone_spans(regime: np.ndarray, label: int):
    """Contiguous [a, b) runs carrying the given label."""
    mask = regime == label
    if not mask.any():
        return []
    padded = np.concatenate([[False], mask, [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return list(zip(edges[0::2], edges[1::2]))


def repair_zones(regime: np.ndarray, min_zone: int = 2) -> np.ndarray:
    """Expand kinetic regions until every zone spans at least min_zone cells."""
    regime = regime.copy()
    n = regime.size
    if n < min_zone:
        raise ZoneTooNarrow(f"domain of {n} cells cannot hold a {min_zone}-cell zone")
    for _ in range(n + 1):
        spans = [(a, b, regime[a]) for a, b in zone_spans(regime, KINETIC)] + [
            (a, b, regime[a]) for a, b in zone_spans(regime, FLUID)
        ]
        spans.sort()
        bad = next(((a, b, v) for a, b, v in spans if b - a < min_zone), None)
        if bad is None:
            return regime
        a, b, val = bad
        if val == FLUID:
            regime[a:b] = KINETIC  # absorbed by the kinetic neighbors
        elif b < n:
            regime[b] = KINETIC  # grow a narrow kinetic zone rightward
        elif a > 0:
            regime[a - 1] = KINETIC
        else:
            raise ZoneTooNarrow("single zone narrower than the stencil")
    raise ZoneTooNarrow("zone repair failed to converge")  # pragma: no cover


def classify(
    state: HybridState,
    vg: VelocityGrid,
    dx: float,
    dt: float,
    eps,
    cfg: HybridConfig,
) -> np.ndarray:
    """Next-step regime map from time-level-n data; each cell moves at most once."""
    regime = state.regime.copy()
    eps_arr = np.broadcast_to(np.asarray(eps, dtype=float), (regime.size,))
    k = cfg.closure.order
    rho, u, T = split_conserved(work_conserved(state, vg))
    g = FieldGradients.from_fields(rho, u, T, dx, cfg.boundary, second=(k == 1))

    fluid_mask = state.regime == FLUID
    if fluid_mask.any():
        broken = fluid_breakdown(k, rho, u, T, g, eps_arr, cfg.closure, cfg.indicators)
        regime[fluid_mask & broken] = KINETIC

    kin_mask = state.regime == KINETIC
    if kin_mask.any():
        sub = FieldGradients(
            drho=g.drho[kin_mask], du=g.du[kin_mask], dT=g.dT[kin_mask]
        )
        base = state.eq_cache[kin_mask] if state.eq_cache is not None else None
        ready = kinetic_to_fluid(
            state.f[kin_mask], vg, sub, k, dt, eps_arr[kin_mask],
            cfg.closure, cfg.indicators, base=base,
        )
        regime[np.flatnonzero(kin_mask)[ready]] = FLUID

    return repair_zones(regime, cfg.min_zone)


def apply_transitions(
    state: HybridState, new_regime: np.ndarray, vg: VelocityGrid, tol: float = 1e-13
) -> tuple[int, int]:
    """Lift cells turning kinetic, project cells turning fluid."""
    to_kin = (state.regime == FLUID) & (new_regime == KINETIC)
    to_fluid = (state.regime == KINETIC) & (new_regime == FLUID)
    if to_kin.any():
        state.f[to_kin] = lift(state.U[to_kin], vg, tol)
    if to_fluid.any():
        state.U[to_fluid] = project(state.f[to_fluid], vg)
    state.regime = new_regime
    return int(to_kin.sum()), int(to_fluid.sum())


def compute_dt(
    state: HybridState,
    vg: VelocityGrid,
    dx: float,
    eps,
    cfg: HybridConfig,
) -> float:
    """Global step bound for the coupled system.

    With classification active any fluid cell may turn kinetic during the
    step, so the kinetic CFL applies globally. Forced regime maps never
    transition and keep only the bound of their own regime, which makes
    the degenerate limits match the pure solvers step for step.
    """
    dt = np.inf
    kin = state.regime == KINETIC
    if cfg.force_regime is None or kin.any():
        dt = min(dt, kinetic_cfl_dt(vg, dx, cfg.cfl_kinetic))
    if (~kin).any():
        U_f = state.U[~kin]
        dt = min(dt, fluid_cfl_dt(U_f, dx, cfg.cfl_fluid))
        if cfg.closure.order == 1:
            eps_arr = np.broadcast_to(np.asarray(eps, dtype=float), (state.regime.size,))
            dt = min(dt, parabolic_dt(U_f, dx, eps_arr[~kin], cfg.closure, cfg.cfl_parabolic))
    return float(dt)


def hybrid_step(
    state: HybridState,
    vg: VelocityGrid,
    dx: float,
    eps,
    cfg: HybridConfig,
    dt: float,
) -> StepStats:
    """Advance the coupled system by dt in place."""
    n = state.regime.size
    eps_arr = np.broadcast_to(np.asarray(eps, dtype=float), (n,))

    if cfg.force_regime is None:
        new_regime = classify(state, vg, dx, dt, eps_arr, cfg)
        to_kin, to_fluid = apply_transitions(state, new_regime, vg, cfg.newton_tol)
    else:
        to_kin = to_fluid = 0

    regime = state.regime
    kin = regime == KINETIC
    spans = zone_spans(regime, KINETIC)
    U_work = work_conserved(state, vg)

    # kinetic zones first: their edge fluxes become the fluid overrides
    faces, values = [], []
    for a, b in spans:
        left = right = None
        if a > 0:
            if a < 2:
                raise ZoneTooNarrow("kinetic zone lacks a two-cell fluid neighbor")
            left = lift(U_work[a - 2 : a], vg, cfg.newton_tol)
        if b < n:
            if b > n - 2:
                raise ZoneTooNarrow("kinetic zone lacks a two-cell fluid neighbor")
            right = lift(U_work[b : b + 2], vg, cfg.newton_tol)
        fz, F = transport_step(
            state.f[a:b], vg, dt, dx, cfg.boundary, left, right,
            cfg.cfl_kinetic, return_fluxes=True,
        )
        if cfg.closure.beta == 0.0:
            if state.eq_cache is None:
                state.eq_cache = np.empty_like(state.f)
            state.f[a:b], state.eq_cache[a:b] = collision_step(
                fz, vg, dt, eps_arr[a:b], cfg.closure, cfg.newton_tol,
                return_equilibrium=True,
            )
        else:
            state.f[a:b] = collision_step(
                fz, vg, dt, eps_arr[a:b], cfg.closure, cfg.newton_tol
            )
        if a > 0:
            faces.append(a)
            values.append(F[0] @ vg.conserved_basis * vg.weight)
        if b < n:
            faces.append(b)
            values.append(F[-1] @ vg.conserved_basis * vg.weight)

    if (~kin).any():
        overrides = (np.array(faces), np.array(values)) if faces else None
        U_next = fluid_step(
            U_work, dt, dx, cfg.closure, cfg.boundary, eps=eps_arr,
            overrides=overrides, freeze_mask=kin if kin.any() else None,
        )
        state.U[~kin] = U_next[~kin]

    state.t += dt
    state.step_count += 1
    return StepStats(int(kin.sum()), to_kin, to_fluid)


def forced_regime_map(n: int, which: str) -> np.ndarray:
    if which == "kinetic":
        return np.full(n, KINETIC, dtype=np.int8)
    if which == "fluid":
        return np.full(n, FLUID, dtype=np.int8)
    raise ValueError(f"unknown forced regime {which!r}")
