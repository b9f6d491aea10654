"""Post-processing: run-to-run error norms and the timing/speedup table."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .cases import CaseConfig
from .output import read_snapshot

COMPARE_FIELDS = ("rho", "ux", "T", "qx")


def _snapshots(run_dir) -> dict:
    """Nominal time -> parsed snapshot, keyed with 9-decimal rounding."""
    out = {}
    for path in sorted(Path(run_dir).glob("snap_*.csv")):
        t, meta, cols = read_snapshot(path)
        out[round(t, 9)] = cols
    return out


def compare(run_a, run_b, fields=COMPARE_FIELDS) -> dict:
    """Relative L1/Linf errors of run_a against reference run_b.

    Snapshots are matched by time; the finer grid is interpolated onto the
    coarser one. Norms are relative to run_b except when the reference
    norm vanishes, where the absolute norm is reported instead.
    """
    snaps_a, snaps_b = _snapshots(run_a), _snapshots(run_b)
    times = sorted(set(snaps_a) & set(snaps_b))
    if not times:
        raise ValueError(f"no common snapshot times between {run_a} and {run_b}")

    report = {}
    for t in times:
        ca, cb = snaps_a[t], snaps_b[t]
        xa, xb = ca["x"], cb["x"]
        x = xa if xa.size <= xb.size else xb
        entry = {}
        for name in fields:
            a = ca[name] if xa.size == x.size else np.interp(x, xa, ca[name])
            b = cb[name] if xb.size == x.size else np.interp(x, xb, cb[name])
            ref_l1 = np.abs(b).sum()
            ref_inf = np.abs(b).max()
            entry[name] = {
                "l1": float(np.abs(a - b).sum() / (ref_l1 if ref_l1 > 0 else 1.0)),
                "linf": float(np.abs(a - b).max() / (ref_inf if ref_inf > 0 else 1.0)),
            }
        report[t] = entry
    return report


def format_comparison(report: dict) -> str:
    lines = []
    for t in sorted(report):
        lines.append(f"t={t:g}")
        for name, err in report[t].items():
            lines.append(f"  {name:<4} L1={err['l1']:.3e}  Linf={err['linf']:.3e}")
    return "\n".join(lines)


# timing-matrix: Sod at two Knudsen numbers, blast at three
_MATRIX_CASES = (
    ("sod", 1e-2), ("sod", 1e-3),
    ("blast", 1e-2), ("blast", 5e-3), ("blast", 1e-3),
)
_MATRIX_MODELS = ("bgk", "hybrid-euler", "hybrid-cns", "euler", "cns")


def timing_suite(suite: str = "timing-matrix", out_root="bench_out", nx=50, nv=12):
    """Run the benchmark matrix at desk scale; wall times plus speedups.

    Absolute seconds are hardware noise; only the speedup ratios against
    the full kinetic run carry meaning, and even those only as ordering.
    """
    from .driver import run  # deferred: analysis is importable without solvers

    if suite != "timing-matrix":
        raise ValueError(f"unknown suite {suite!r}")
    rows = []
    for case, eps in _MATRIX_CASES:
        walls = {}
        for model in _MATRIX_MODELS:
            cfg = CaseConfig(
                case=case, model=model, epsilon=eps, nx=nx, nv=nv,
                out_dir=str(Path(out_root) / f"{case}_{eps:g}_{model}"),
            )
            walls[model] = run(cfg).wall_seconds
        for model in _MATRIX_MODELS:
            rows.append({
                "case": case, "epsilon": eps, "model": model,
                "wall_seconds": walls[model],
                "speedup_vs_bgk": walls["bgk"] / max(walls[model], 1e-12),
            })
    return rows


def format_timing(rows) -> str:
    lines = [f"{'case':<7}{'epsilon':<10}{'model':<14}{'wall[s]':>10}{'speedup':>9}"]
    for r in rows:
        lines.append(
            f"{r['case']:<7}{r['epsilon']:<10g}{r['model']:<14}"
            f"{r['wall_seconds']:>10.3f}{r['speedup_vs_bgk']:>9.2f}"
        )
    return "\n".join(lines)
