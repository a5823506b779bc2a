"""Command-line front end: ``dodiff {kernel,solve,bounds,compare,validate}``.

Every command except ``validate`` reads a JSON :class:`~dodiff.config.RunConfig`
and writes one CSV file, ``kernel.csv``, ``solution.csv``, ``bounds.csv`` or
``compare.csv``, prefixed by ``--out`` (or inside it when ``--out`` is a
directory).  Numbers are written with 17 significant digits.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from dodiff import bounds, validation
from dodiff.config import ConfigError, RunConfig, load_config
from dodiff.errors import DodiffError, InvalidDiffusionParameter, NumericalError, ProblemError
from dodiff.problems import solve
from dodiff.spectral import kernel_batch

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def _fmt(v: float) -> str:
    return "nan" if not math.isfinite(v) else f"{v:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, str)) else _fmt(float(v)) for v in row])


def _target(out: str, name: str) -> Path:
    """``out`` is a filename prefix, or a directory when it names one."""
    if out and (out.endswith(("/", os.sep)) or Path(out).is_dir()):
        return Path(out) / name
    return Path(f"{out}{name}")


def _single_mode(cfg: RunConfig, command: str) -> int:
    if len(cfg.modes) != 1:
        raise ConfigError(f"{command} takes exactly one mode, got {cfg.modes}")
    return cfg.modes[0]


def cmd_kernel(cfg: RunConfig, out: str, threads: int = 1) -> int:
    C = cfg.diffusion_parameter.build()
    q = cfg.quadrature.build()
    t = np.sort(cfg.t_grid.build())
    modes = sorted(set(cfg.modes))

    # one quadrature per mode, so results do not depend on the thread count
    def one(n: int):
        return kernel_batch(C, [n * math.pi], t, q)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = dict(zip(modes, pool.map(one, modes)))
    rows = [
        (t[j], n, results[n][0][0, j], results[n][1][0, j])
        for j in range(t.size)
        for n in modes
    ]
    path = _target(out, "kernel.csv")
    _write_csv(path, ["t", "n", "B", "err"], rows)
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def cmd_solve(cfg: RunConfig, out: str, threads: int = 1) -> int:
    if cfg.problem is None:
        raise ConfigError("solve needs a 'problem' section")
    C = cfg.diffusion_parameter.build()
    spec = cfg.problem.build()
    x = np.sort(cfg.x_grid.build())
    t = np.sort(cfg.t_grid.build())
    sol = solve(C, spec, x, t, cfg.quadrature.build())
    rows = [(t[j], x[i], sol.u[j, i]) for j in range(t.size) for i in range(x.size)]
    path = _target(out, "solution.csv")
    _write_csv(path, ["t", "x", "u"], rows)
    print(f"wrote {len(rows)} rows to {path}")
    print(f"max truncation estimate {float(np.max(sol.truncation_error)):.3e}")
    print(f"max quadrature error {float(np.max(sol.quadrature_error)):.3e}")
    return EXIT_OK


def cmd_bounds(cfg: RunConfig, out: str, threads: int = 1) -> int:
    C = cfg.diffusion_parameter.build()
    n = _single_mode(cfg, "bounds")
    t = np.sort(cfg.t_grid.build())
    if not C.is_density:
        print("warning: point-mass parameter, lower bound not available", file=sys.stderr)
    rep = bounds.bounds_report(C, n * math.pi, t, cfg.quadrature.build())
    rows = [
        (rep.times[j], rep.central[j], rep.lower[j], rep.upper[j], rep.m, rep.r0)
        for j in range(t.size)
    ]
    path = _target(out, "bounds.csv")
    _write_csv(path, ["t", "I", "lower", "upper", "m", "r0"], rows)
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def verdict(v: bounds.CompareVerdict) -> str:
    """``SLOWER(C1)``, ``SLOWER(C2)``, ``INDISTINGUISHABLE`` or ``MIXED``.

    Margins within twice the combined quadrature error are ignored.
    """
    sig = np.abs(v.pointwise_margin) > 2.0 * v.margin_err
    pos = sig & (v.pointwise_margin > 0)
    neg = sig & (v.pointwise_margin < 0)
    if not np.any(sig):
        return "INDISTINGUISHABLE"
    if not np.any(neg):
        return "SLOWER(C1)"
    if not np.any(pos):
        return "SLOWER(C2)"
    if v.times[neg].max() < v.times[pos].min():
        return f"MIXED (C2 slower up to t = {v.times[neg].max():.6g}, C1 slower from t = {v.times[pos].min():.6g})"
    if v.times[pos].max() < v.times[neg].min():
        return f"MIXED (C1 slower up to t = {v.times[pos].max():.6g}, C2 slower from t = {v.times[neg].min():.6g})"
    return "MIXED"


def cmd_compare(cfg: RunConfig, out: str, threads: int = 1) -> int:
    if cfg.second_parameter is None:
        raise ConfigError("compare needs 'second_parameter'")
    C1 = cfg.diffusion_parameter.build()
    C2 = cfg.second_parameter.build()
    n = _single_mode(cfg, "compare")
    t = np.sort(cfg.t_grid.build())
    v = bounds.compare_decay(C1, C2, n * math.pi, t, cfg.quadrature.build())
    rows = [(t[j], v.I1[j], v.I2[j], v.pointwise_margin[j]) for j in range(t.size)]
    path = _target(out, "compare.csv")
    _write_csv(path, ["t", "I1", "I2", "margin"], rows)
    print(f"wrote {len(rows)} rows to {path}")
    print(f"verdict: {verdict(v)}")
    held = "held" if v.sufficient_condition_holds else "did not hold"
    print(f"pointwise sufficient condition {held}")
    return EXIT_OK


def cmd_validate(rel_tol: float | None = None) -> int:
    from dodiff.spectral import QuadratureSpec

    q = QuadratureSpec(rel_tol=rel_tol) if rel_tol is not None else None
    results = []
    for check in validation.CHECKS:
        r = check(q)
        print(r.line(), flush=True)
        results.append(r)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return EXIT_OK if passed == len(results) else EXIT_VALIDATION


COMMANDS = {
    "kernel": cmd_kernel,
    "solve": cmd_solve,
    "bounds": cmd_bounds,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dodiff",
        description="Distributed-order sub-diffusion: kernels, solutions, bounds and decay comparisons.",
    )
    p.add_argument("command", choices=[*COMMANDS, "validate"])
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", default="", help="output directory or filename prefix (default: current directory)")
    p.add_argument("--rel-tol", type=float, default=None, help="override quadrature relative tolerance")
    p.add_argument("--threads", type=int, default=1, help="worker threads for per-mode work")
    p.add_argument("--dump-config", action="store_true", help="print the parsed configuration and exit")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.rel_tol is not None and not args.rel_tol > 0:
        print("error: --rel-tol must be positive", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate" and not args.dump_config:
        return cmd_validate(args.rel_tol)

    try:
        if args.config is None:
            raise ConfigError(f"{args.command} needs --config")
        cfg = load_config(args.config)
        if args.rel_tol is not None:
            quad = cfg.quadrature.model_copy(update={"rel_tol": args.rel_tol})
            cfg = cfg.model_copy(update={"quadrature": quad})
        if args.dump_config:
            print(cfg.dump())
            return EXIT_OK
        return COMMANDS[args.command](cfg, args.out, args.threads)
    except (ConfigError, InvalidDiffusionParameter, ProblemError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DodiffError, ArithmeticError) as exc:
        print(f"numerical failure in {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
