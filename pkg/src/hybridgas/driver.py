"""Run orchestration: time loop, snapshot emission, run log, timing.

One global dt per step, clipped so snapshot times and t_end are hit
exactly. Pure models advance a single representation; hybrid models go
through the coupled step. The run log carries one line per step in the
fixed format `step=<n> t=<t> kinetic_cells=<m> transitions=<p>` and is
byte-deterministic; wall-clock timing goes to a separate file.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from .cases import CaseConfig, CaseSetup, build_case
from .fluid import fluid_cfl_dt, fluid_step, parabolic_dt
from .hybrid import compute_dt, hybrid_step, StepStats
from .kinetic import kinetic_cfl_dt, kinetic_step
from .output import snapshot_rows, write_snapshot

_MAX_STEPS = 10_000_000


@dataclass
class RunResult:
    cfg: CaseConfig
    out_dir: Path
    snapshots: dict  # nominal time -> csv path
    wall_seconds: float
    steps: int
    setup: CaseSetup


def _dt_bound(setup: CaseSetup) -> float:
    cfg, state = setup.cfg, setup.state
    if cfg.model == "bgk":
        return kinetic_cfl_dt(setup.vg, setup.grid.dx, cfg.cfl_kinetic)
    if cfg.model in ("euler", "cns"):
        dt = fluid_cfl_dt(state.U, setup.grid.dx, cfg.cfl_fluid)
        if setup.closure.order == 1:
            dt = min(dt, parabolic_dt(state.U, setup.grid.dx, setup.eps,
                                      setup.closure, cfg.cfl_parabolic))
        return dt
    return compute_dt(state, setup.vg, setup.grid.dx, setup.eps, setup.hybrid)


def _advance(setup: CaseSetup, dt: float) -> StepStats:
    cfg, state = setup.cfg, setup.state
    if cfg.model == "bgk":
        state.f = kinetic_step(state.f, setup.vg, dt, setup.grid.dx, setup.eps,
                               setup.closure, cfg.boundary,
                               cfl_limit=cfg.cfl_kinetic)
        stats = StepStats(state.regime.size, 0, 0)
    elif cfg.model in ("euler", "cns"):
        state.U = fluid_step(state.U, dt, setup.grid.dx, setup.closure,
                             cfg.boundary, eps=setup.eps)
        stats = StepStats(0, 0, 0)
    else:
        return hybrid_step(state, setup.vg, setup.grid.dx, setup.eps,
                           setup.hybrid, dt)
    state.t += dt
    state.step_count += 1
    return stats


def run(cfg: CaseConfig, on_step=None) -> RunResult:
    """Execute one configured run; returns paths and timing.

    on_step, if given, is called as on_step(state, stats) after every
    step; tests use it to watch the regime map evolve.
    """
    setup = build_case(cfg)
    cfg = setup.cfg
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    state = setup.state
    snaps = list(cfg.snap_times)
    snapshots: dict = {}
    log_lines = []
    si = 0

    t0 = time.perf_counter()
    while state.t < cfg.t_end - 1e-12:
        if state.step_count >= _MAX_STEPS:
            raise RuntimeError(
                f"step limit reached at t={state.t:g} (case={cfg.case}, model={cfg.model})"
            )
        target = snaps[si] if si < len(snaps) else cfg.t_end
        dt = _dt_bound(setup)
        # land on the snapshot time, but never stretch past the stability
        # bound: accumulated t round-off can push target - t above it, so
        # the remainder is taken as an extra (possibly tiny) step instead
        if target - state.t <= dt:
            dt = target - state.t
        stats = _advance(setup, dt)
        log_lines.append(
            f"step={state.step_count} t={state.t:.12g} "
            f"kinetic_cells={stats.kinetic_cells} transitions={stats.transitions}"
        )
        if on_step is not None:
            on_step(state, stats)
        if si < len(snaps) and state.t >= snaps[si] - 1e-12:
            t_nom = snaps[si]
            path = out / f"snap_{t_nom:.6f}.csv"
            rows = snapshot_rows(state, setup.vg, setup.grid, setup.eps, setup.closure)
            write_snapshot(path, rows, cfg.echo(), t_nom)
            if cfg.figures:
                from .plots import snapshot_figure  # matplotlib only on demand

                snapshot_figure(path, out / f"snap_{t_nom:.6f}.png")
            snapshots[t_nom] = path
            si += 1
    wall = time.perf_counter() - t0

    (out / "run.log").write_text("\n".join(log_lines) + "\n" if log_lines else "")
    (out / "timing.txt").write_text(
        f"case={cfg.case} model={cfg.model} epsilon={cfg.epsilon} "
        f"nx={cfg.nx} nv={cfg.nv} wall_seconds={wall:.3f} steps={state.step_count}\n"
    )
    return RunResult(cfg, out, snapshots, wall, state.step_count, setup)
