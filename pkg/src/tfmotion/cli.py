"""Command-line front end: spectrum | simulate | covariance | decay | limits.

Every command validates its parameters, computes through the library modules,
and emits one table as CSV or JSON.  Runs are deterministic given the flags
and seed; the worker-thread count (--threads or TFMOTION_THREADS) never
changes numeric output.  Exit codes: 0 ok, 2 invalid usage/parameters,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import NumericsError
from .kernels import ProcessParams, QuadratureConfig
from .gaussian import (SampleGrid, simulate_gaussian_paths, covariance_tfbm2,
                       tfgn1_spectral_density, tfgn2_spectral_density)
from .stable import DiscretizationPlan, simulate_tfsm_paths
from .dependence import decay_diagnostic, global_limit_check, local_limit_check

_FLOAT_FMT = "%.17g"  # round-trip exact for binary64


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _FLOAT_FMT % v
    return str(v)


def _emit(path: str | None, fmt: str, command: str, meta: dict,
          columns: list[str], rows: list[list]) -> None:
    meta = {k: meta[k] for k in sorted(meta)}
    if fmt == "csv":
        lines = ["# tfmotion " + command + " "
                 + " ".join(f"{k}={_fmt(v)}" for k, v in meta.items())]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        payload = {"command": command, "meta": meta,
                   "columns": columns, "rows": rows}
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _parse_grid_spec(spec: str) -> np.ndarray:
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ValueError(f"grid spec must be 'min:max:count', got {spec!r}") from exc
    if n < 2 or hi <= lo:
        raise ValueError(f"grid spec needs max > min and count >= 2, got {spec!r}")
    return np.linspace(lo, hi, n)


def _parse_list(spec: str) -> list[float]:
    vals = [float(x) for x in spec.split(",") if x.strip()]
    if not vals:
        raise ValueError(f"empty value list {spec!r}")
    return vals


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("TFMOTION_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Merge a JSON config file under explicit flags (flags win)."""
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    for key, val in cfg.items():
        dest = "lam" if key == "lambda" else key.replace("-", "_")
        if not hasattr(args, dest):
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, val)
    return args


def _build_params(args, kind: str | None = None) -> ProcessParams:
    return ProcessParams(H=args.H, alpha=args.alpha, lam=args.lam,
                         sigma=args.sigma, beta=args.beta,
                         kind=kind or args.kind)


def _add_common(sp, *, kind=True, alpha=True, stable_extras=True) -> None:
    sp.add_argument("--H", type=float, default=None)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    if alpha:
        sp.add_argument("--alpha", type=float, default=None)
    if stable_extras:
        sp.add_argument("--sigma", type=float, default=None)
        sp.add_argument("--beta", type=float, default=None)
    if kind:
        sp.add_argument("--kind", choices=("I", "II"), default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("csv", "json"), default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--config", default=None)


def _defaults(args, **kw) -> None:
    for k, v in kw.items():
        if getattr(args, k, None) is None:
            setattr(args, k, v)


def cmd_spectrum(args) -> int:
    _defaults(args, alpha=2.0, sigma=1.0, beta=0.0, kind="II", seed=0,
              tol=1e-10, format="csv", omega_grid="-3.141592653589793:3.141592653589793:201")
    if args.H is None or args.lam is None:
        raise ValueError("spectrum requires --H and --lambda")
    if args.H <= 0 or args.lam <= 0:
        raise ValueError("spectrum requires H > 0 and lambda > 0")
    omegas = _parse_grid_spec(args.omega_grid)
    if omegas[0] < -math.pi - 1e-9 or omegas[-1] > math.pi + 1e-9:
        raise ValueError("omega grid must lie inside [-pi, pi]")
    rows = []
    for w in omegas:
        v1, e1 = tfgn1_spectral_density(args.H, args.lam, float(w), args.tol)
        v2, e2 = tfgn2_spectral_density(args.H, args.lam, float(w), args.tol)
        rows.append([float(w), v1, v2, e1, e2])
    meta = {"H": args.H, "lambda": args.lam, "tol": args.tol}
    _emit(args.out, args.format, "spectrum", meta,
          ["omega", "tfgn_density", "tfgn2_density", "err_bound_1", "err_bound_2"],
          rows)
    return 0


def cmd_simulate(args) -> int:
    _defaults(args, alpha=2.0, sigma=1.0, beta=0.0, kind="II", seed=0,
              tol=1e-9, format="csv", n=17, t_max=1.0, n_paths=1)
    if args.H is None or args.lam is None:
        raise ValueError("simulate requires --H and --lambda")
    params = _build_params(args)
    if params.lam <= 0.0:
        raise ValueError("simulate requires lambda > 0")
    grid = SampleGrid.regular(args.t_max, args.n, include_zero=True)
    workers = _threads(args)
    if params.alpha == 2.0:
        if params.kind != "II":
            raise ValueError("exact Gaussian simulation covers kind=II only; "
                             "use alpha < 2 for first-kind paths")
        ens = simulate_gaussian_paths(params.H, params.lam, grid,
                                      args.n_paths, args.seed, n_workers=workers)
    else:
        dy = args.plan_dy if args.plan_dy is not None else args.t_max / 256.0
        plan = DiscretizationPlan.for_grid(grid, params, dy,
                                           cutoff=args.plan_cutoff)
        ens = simulate_tfsm_paths(params, grid, plan, args.n_paths, args.seed,
                                  n_workers=workers)
    rows = [[i, float(t), float(ens.paths[i, j])]
            for i in range(args.n_paths) for j, t in enumerate(grid.times)]
    meta = {"H": params.H, "alpha": params.alpha, "lambda": params.lam,
            "sigma": params.sigma, "beta": params.beta, "kind": params.kind,
            "seed": args.seed, "t_max": args.t_max, "n": args.n,
            "n_paths": args.n_paths}
    _emit(args.out, args.format, "simulate", meta, ["path_id", "t", "value"], rows)
    return 0


def cmd_covariance(args) -> int:
    _defaults(args, alpha=2.0, sigma=1.0, beta=0.0, kind="II", seed=0,
              tol=1e-9, format="csv", n=9, t_max=2.0)
    if args.H is None or args.lam is None:
        raise ValueError("covariance requires --H and --lambda")
    if args.H <= 0 or args.lam <= 0:
        raise ValueError("covariance requires H > 0 and lambda > 0")
    grid = SampleGrid.regular(args.t_max, args.n, include_zero=False)
    rows = []
    for s in grid.times:
        for t in grid.times:
            rows.append([float(s), float(t),
                         covariance_tfbm2(args.H, args.lam, float(s), float(t))])
    meta = {"H": args.H, "lambda": args.lam, "t_max": args.t_max, "n": args.n}
    _emit(args.out, args.format, "covariance", meta, ["s", "t", "cov"], rows)
    return 0


def cmd_decay(args) -> int:
    _defaults(args, alpha=1.5, sigma=1.0, beta=0.0, kind="II", seed=0,
              tol=1e-8, format="csv", t_min=10, t_max=40, t_step=2,
              theta1=1.0, theta2=1.0, band_factor=3.0)
    if args.H is None or args.lam is None:
        raise ValueError("decay requires --H and --lambda")
    params = _build_params(args)
    q = QuadratureConfig(rel_tol=min(args.tol, 1e-2))
    lags = range(int(args.t_min), int(args.t_max) + 1, int(args.t_step))
    diag = decay_diagnostic(params, lags, args.theta1, args.theta2, q,
                            band_factor=args.band_factor)
    rows = [[int(t), float(i), float(r), diag.p_used]
            for t, i, r in zip(diag.t_values, diag.i_values, diag.ratio)]
    meta = {"H": params.H, "alpha": params.alpha, "lambda": params.lam,
            "kind": params.kind, "theta1": args.theta1, "theta2": args.theta2,
            "p_used": diag.p_used, "slope": diag.slope,
            "band_factor": diag.band_factor, "band_ok": diag.band_ok}
    _emit(args.out, args.format, "decay", meta,
          ["t", "codifference", "ratio", "p_used"], rows)
    return 0


def cmd_limits(args) -> int:
    _defaults(args, alpha=2.0, sigma=1.0, beta=0.0, seed=0, tol=1e-9,
              format="csv", b_global="25,50,100,200", b_local="0.1,0.01,0.001")
    if args.H is None or args.lam is None:
        raise ValueError("limits requires --H and --lambda")
    if args.lam <= 0:
        raise ValueError("limits requires lambda > 0")
    q = QuadratureConfig(abs_tol=1e-12, rel_tol=min(args.tol, 1e-2))
    rows = []
    for kind in ("II", "I"):
        params = _build_params(args, kind=kind)
        rows += [[r["regime"], r["kind"], r["b"], r["normalized"], r["limit"],
                  r["rel_gap"], r["in_theorem_range"]]
                 for r in global_limit_check(params, _parse_list(args.b_global), q)]
    for kind in ("II", "I"):
        params = _build_params(args, kind=kind)
        rows += [[r["regime"], r["kind"], r["b"], r["normalized"], r["limit"],
                  r["rel_gap"], r["in_theorem_range"]]
                 for r in local_limit_check(params, _parse_list(args.b_local), q)]
    meta = {"H": args.H, "alpha": args.alpha, "lambda": args.lam}
    _emit(args.out, args.format, "limits", meta,
          ["regime", "kind", "b", "normalized", "limit", "rel_gap",
           "in_theorem_range"], rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tfmotion",
        description="Tempered fractional Brownian/stable motions: spectra, "
                    "covariances, simulation, and dependence diagnostics.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="spectral densities of the increment noises")
    _add_common(sp, kind=False, alpha=False, stable_extras=False)
    sp.add_argument("--omega-grid", default=None,
                    help="omega grid as 'min:max:count' inside [-pi, pi]")
    sp.set_defaults(func=cmd_spectrum, alpha=2.0, sigma=1.0, beta=0.0, kind="II")

    sp = sub.add_parser("simulate", help="sample process paths")
    _add_common(sp)
    sp.add_argument("--t-max", type=float, default=None)
    sp.add_argument("--n", type=int, default=None, help="grid points incl. t=0")
    sp.add_argument("--n-paths", type=int, default=None)
    sp.add_argument("--plan-dy", type=float, default=None,
                    help="moving-average cell width (alpha < 2)")
    sp.add_argument("--plan-cutoff", type=float, default=None,
                    help="left truncation distance (alpha < 2)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("covariance", help="TFBM II covariance table")
    _add_common(sp, kind=False, alpha=False, stable_extras=False)
    sp.add_argument("--t-max", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.set_defaults(func=cmd_covariance, alpha=2.0, sigma=1.0, beta=0.0, kind="II")

    sp = sub.add_parser("decay", help="codifference decay diagnostic")
    _add_common(sp)
    sp.add_argument("--t-min", type=int, default=None)
    sp.add_argument("--t-max", type=int, default=None)
    sp.add_argument("--t-step", type=int, default=None)
    sp.add_argument("--theta1", type=float, default=None)
    sp.add_argument("--theta2", type=float, default=None)
    sp.add_argument("--band-factor", type=float, default=None)
    sp.set_defaults(func=cmd_decay)

    sp = sub.add_parser("limits", help="global/local self-similarity limit tables")
    _add_common(sp, kind=False)
    sp.add_argument("--b-global", default=None, help="comma list of large scales")
    sp.add_argument("--b-local", default=None, help="comma list of small scales")
    sp.set_defaults(func=cmd_limits)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args = _apply_config(args)
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"tfmotion: error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"tfmotion: numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
