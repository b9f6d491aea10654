"""Command line front end.

    hybridgas run --case sod --model hybrid-euler --epsilon 1e-2 --out out/
    hybridgas compare RUN_A RUN_B
    hybridgas bench --suite timing-matrix

`run` accepts a flat key=value config file via --config; command-line
flags override file entries. Every run writes per-snapshot CSVs, a
run.log with per-step regime statistics, and timing.txt.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .cases import CASES, MODELS, CaseConfig
from .errors import HybridGasError

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(CaseConfig)}


def _parse_value(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ValueError(f"unknown config key {key!r}")
    if key == "epsilon":
        return raw if raw == "far" else float(raw)
    if key == "snap_times":
        return tuple(float(v) for v in raw.split(",") if v)
    if key == "figures":
        return raw.lower() in ("1", "true", "yes")
    if key in ("nx", "nv"):
        return int(raw)
    if key in ("case", "model", "out_dir", "force_regime"):
        return raw
    return float(raw)


def load_config_file(path: str) -> dict:
    """Flat key=value lines; blank lines and # comments are skipped."""
    values = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, raw = (s.strip() for s in line.split("=", 1))
            values[key] = _parse_value(key, raw)
    return values


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridgas",
                                description="multi-scale gas dynamics benchmarks")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute one configured case")
    r.add_argument("--config", help="flat key=value config file")
    r.add_argument("--case", choices=CASES)
    r.add_argument("--model", choices=MODELS)
    r.add_argument("--epsilon", help="Knudsen number, or 'far' for the far-case profile")
    r.add_argument("--nx", type=int)
    r.add_argument("--nv", type=int, help="velocity nodes per axis")
    r.add_argument("--t-end", dest="t_end", type=float)
    r.add_argument("--eta0", type=float, help="realizability eigenvalue threshold")
    r.add_argument("--delta0", type=float, help="kinetic-to-fluid closeness threshold")
    r.add_argument("--beta", type=float, help="anisotropy parameter, Pr = 1/(1-beta)")
    r.add_argument("--nu-omega", dest="nu_omega", type=float,
                   help="collision frequency exponent in nu = rho T^(1-omega)")
    r.add_argument("--out", dest="out_dir", help="output directory")
    r.add_argument("--figures", action="store_true",
                   help="render a PNG next to each snapshot CSV")

    c = sub.add_parser("compare", help="error norms between two run directories")
    c.add_argument("run_a")
    c.add_argument("run_b", help="reference run")

    b = sub.add_parser("bench", help="timing/speedup table")
    b.add_argument("--suite", default="timing-matrix", choices=["timing-matrix"])
    b.add_argument("--out", dest="out_dir", default="bench_out")
    b.add_argument("--nx", type=int, default=50)
    b.add_argument("--nv", type=int, default=12)
    return p


def _cmd_run(args) -> int:
    from .driver import run

    values = load_config_file(args.config) if args.config else {}
    for key in ("case", "model", "nx", "nv", "t_end", "eta0", "delta0",
                "beta", "nu_omega", "out_dir"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if args.epsilon is not None:
        values["epsilon"] = _parse_value("epsilon", args.epsilon)
    if args.figures:
        values["figures"] = True

    result = run(CaseConfig(**values))
    print(f"wrote {len(result.snapshots)} snapshots to {result.out_dir} "
          f"({result.steps} steps, {result.wall_seconds:.2f}s)")
    for t in sorted(result.snapshots):
        print(f"  t={t:g}  {result.snapshots[t]}")
    return 0


def _cmd_compare(args) -> int:
    from .analysis import compare, format_comparison

    print(format_comparison(compare(args.run_a, args.run_b)))
    return 0


def _cmd_bench(args) -> int:
    from .analysis import format_timing, timing_suite

    rows = timing_suite(args.suite, out_root=args.out_dir, nx=args.nx, nv=args.nv)
    print(format_timing(rows))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "compare": _cmd_compare, "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except (HybridGasError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
