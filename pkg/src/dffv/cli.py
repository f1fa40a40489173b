"""Command-line front end: run benchmark cases, convergence studies, and the
acceptance suite.

    dffv run <case> [--n N | --nx NX --ny NY] [--t-final T] [--theta TH]
                    [--cfl C] [--no-post-processing] [--out DIR]
                    [--format csv|grid] [--snapshot-interval DT] [--config F]
    dffv convergence <case> --levels K [--n BASE] [--out DIR]
    dffv accept [--out DIR]

A JSON config file may preset any run key; explicit flags win over the file,
the file wins over case defaults.  DFFV_THREADS caps worker parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from .bench import case_registry, case_params, diagonal_slice, get_case, make_state, schlieren
from .bench import convergence_study
from .errors import ConfigError, DffvError
from .euler import GasConstants
from .fileio import format_float, write_csv, write_grid, write_meta
from .solver import SchemeParams, run_to_time

_CONFIG_KEYS = {
    "n", "nx", "ny", "t_final", "theta", "cfl", "post_processing", "out",
    "format", "snapshot_interval",
}


@dataclass
class RunConfig:
    case: str
    n: int = None
    nx: int = None
    ny: int = None
    t_final: float = None
    theta: float = None
    cfl: float = None
    post_processing: bool = True
    out: str = "."
    format: str = None
    snapshot_interval: float = None


def _load_config_file(path):
    with open(path) as fh:
        data = json.load(fh)
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    return data


def parse_config(argv, parser=None):
    """Resolve a `run` invocation into a RunConfig.

    Precedence: explicit CLI flag > config file > case default.  Unknown CLI
    flags and unknown config-file keys raise ConfigError.
    """
    parser = parser or _build_parser()
    ns, extra = parser.parse_known_args(argv)
    if extra:
        raise ConfigError(f"unknown argument(s): {extra}")
    if ns.command != "run":
        raise ConfigError("parse_config handles `run` invocations")
    return _resolve_run_config(ns)


def _resolve_run_config(ns) -> RunConfig:
    get_case(ns.case)  # validate name early
    file_vals = _load_config_file(ns.config) if ns.config else {}
    cfg = RunConfig(case=ns.case)
    for key in sorted(_CONFIG_KEYS):
        flag_val = getattr(ns, key, None)
        if key == "post_processing":
            flag_val = False if ns.no_post_processing else None
        if flag_val is not None:
            setattr(cfg, key, flag_val)
        elif key in file_vals:
            setattr(cfg, key, file_vals[key])
    if cfg.format not in (None, "csv", "grid"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    return cfg


def _build_parser():
    p = argparse.ArgumentParser(prog="dffv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one benchmark case")
    run.add_argument("case", choices=sorted(case_registry()))
    run.add_argument("--n", type=int)
    run.add_argument("--nx", type=int)
    run.add_argument("--ny", type=int)
    run.add_argument("--t-final", dest="t_final", type=float)
    run.add_argument("--theta", type=float)
    run.add_argument("--cfl", type=float)
    run.add_argument("--no-post-processing", action="store_true")
    run.add_argument("--out", type=str)
    run.add_argument("--format", choices=["csv", "grid"])
    run.add_argument("--snapshot-interval", dest="snapshot_interval", type=float)
    run.add_argument("--config", type=str)

    conv = sub.add_parser("convergence", help="resolution ladder with L1 errors")
    conv.add_argument("case", choices=sorted(case_registry()))
    conv.add_argument("--levels", type=int, default=3)
    conv.add_argument("--n", type=int, help="coarsest resolution of the ladder")
    conv.add_argument("--t-final", dest="t_final", type=float)
    conv.add_argument("--out", type=str, default=".")

    acc = sub.add_parser("accept", help="run the acceptance suite")
    acc.add_argument("--out", type=str, default="acceptance_out")
    return p


def _resolved_params(case, cfg) -> SchemeParams:
    params = case_params(case)
    if cfg.theta is not None:
        params = replace(params, theta=cfg.theta)
    if cfg.cfl is not None:
        params = replace(params, cfl=cfg.cfl)
    if not cfg.post_processing:
        params = replace(params, post_processing=False)
    return params


def _resolution(case, cfg):
    if case.dim == 1:
        return cfg.n if cfg.n is not None else case.default_n[0]
    nx = cfg.nx if cfg.nx is not None else cfg.n
    ny = cfg.ny if cfg.ny is not None else cfg.n
    return (
        nx if nx is not None else case.default_n[0],
        ny if ny is not None else case.default_n[1],
    )


def _write_1d_snapshots(out, case, state, tag=""):
    grid = state.grid
    xp = grid.centers("primal")
    xs = grid.centers("stag")
    paths = []
    if state.system.m == 1:
        u_cols = ("x", "q")
        v_cols = ("x", "q")
        u_data = [xp, state.u.interior[0]]
        v_data = [xs, state.v.interior[0]]
    else:
        u_cols = ("x", "rho", "momentum", "energy")
        v_cols = ("x", "rho", "u", "p")
        u_data = [xp] + [state.u.interior[c] for c in range(3)]
        v_data = [xs] + [state.v.interior[c] for c in range(3)]
    for stem, cols, data in (("U", u_cols, u_data), ("V", v_cols, v_data)):
        path = f"{out}/{case.name}_{stem}{tag}.csv"
        write_csv(path, cols, data)
        paths.append(path)
    return paths


_U2_NAMES = ("rho", "momentum_x", "momentum_y", "energy")
_V2_NAMES = ("rho", "u", "v", "p")


def _write_2d_snapshots(out, case, state, fmt, tag=""):
    grid = state.grid
    paths = []
    meshes = (("U", state.u, _U2_NAMES), ("Vx", state.vx, _V2_NAMES),
              ("Vy", state.vy, _V2_NAMES))
    if fmt == "csv":
        for stem, field, names in meshes:
            xc, yc = grid.centers(field.mesh)
            xg = np.repeat(xc, len(yc))
            yg = np.tile(yc, len(xc))
            cols = [xg, yg] + [field.interior[c].reshape(-1) for c in range(4)]
            path = f"{out}/{case.name}_{stem}{tag}.csv"
            write_csv(path, ("x", "y") + names, cols)
            paths.append(path)
    else:
        for stem, field, names in meshes:
            path = f"{out}/{case.name}_{stem}{tag}.grid"
            write_grid(path, names, [field.interior[c] for c in range(4)])
            paths.append(path)
    raster = schlieren(state.u.interior[0], grid.dx, grid.dy)
    spath = f"{out}/{case.name}_schlieren{tag}.grid"
    write_grid(spath, ["schlieren"], [raster])
    paths.append(spath)
    return paths


def _totals(state):
    vol = state.grid.dx if state.system.m != 4 or not hasattr(state.grid, "dy") else None
    if hasattr(state, "v"):
        vol = state.grid.dx
        sums = [math.fsum(state.u.interior[c].ravel()) for c in range(state.system.m)]
    else:
        vol = state.grid.dx * state.grid.dy
        sums = [math.fsum(state.u.interior[c].ravel()) for c in range(state.system.m)]
    return vol, np.array(sums)


def run_case(cfg: RunConfig):
    """Run one case per config; writes snapshots plus a metadata record.

    Returns (exit_code, meta_dict)."""
    case = get_case(cfg.case)
    params = _resolved_params(case, cfg)
    n = _resolution(case, cfg)
    t_final = cfg.t_final if cfg.t_final is not None else case.t_final
    fmt = cfg.format or ("csv" if case.dim == 1 else "grid")
    out = cfg.out or "."

    state, system, bc = make_state(case, n)
    vol, sums0 = _totals(state)

    snapshots = []
    next_snap = [cfg.snapshot_interval] if cfg.snapshot_interval else [None]

    def snap_cb(st, step):
        if next_snap[0] is not None and st.time >= next_snap[0] - 1e-12:
            tag = f"_t{st.time:.6f}"
            if case.dim == 1:
                snapshots.extend(_write_1d_snapshots(out, case, st, tag))
            else:
                snapshots.extend(_write_2d_snapshots(out, case, st, fmt, tag))
            next_snap[0] += cfg.snapshot_interval

    t0 = time.perf_counter()
    state, log = run_to_time(state, bc, params, t_final, callbacks=[snap_cb])
    wall = time.perf_counter() - t0

    if case.dim == 1:
        paths = _write_1d_snapshots(out, case, state)
    else:
        paths = _write_2d_snapshots(out, case, state, fmt)
    _, sums1 = _totals(state)
    drift = vol * (sums1 - sums0)
    balance = drift + log.boundary_flux_integral

    meta = {
        "case": cfg.case,
        "config": {k: v for k, v in asdict(cfg).items()},
        "resolution": list(np.atleast_1d(n).astype(int).tolist()),
        "t_final": t_final,
        "theta": params.theta,
        "cfl": params.cfl,
        "post_processing": params.post_processing,
        "n_steps": log.n_steps,
        "wall_time_s": wall,
        "conservation": {
            "total_change": [format_float(d) for d in drift],
            "boundary_flux_integral": [
                format_float(b) for b in log.boundary_flux_integral
            ],
            "balance_residual": [format_float(b) for b in balance],
        },
        "outputs": sorted(p.rsplit("/", 1)[-1] for p in paths + snapshots),
    }
    write_meta(f"{out}/{cfg.case}_meta.json", meta)
    return 0, meta


def _cmd_run(ns):
    cfg = _resolve_run_config(ns)
    code, meta = run_case(cfg)
    print(
        f"{cfg.case}: {meta['n_steps']} steps to t={meta['t_final']} "
        f"in {meta['wall_time_s']:.2f}s -> {cfg.out or '.'}"
    )
    return code


def _cmd_convergence(ns):
    case = get_case(ns.case)
    base = ns.n if ns.n is not None else max(case.default_n[0] // 2 ** (ns.levels - 1), 8)
    resolutions = [base * 2 ** i for i in range(ns.levels)]
    if ns.t_final is not None:
        case = replace(case, t_final=ns.t_final)
    report = convergence_study(case, resolutions)
    print(report.format_table())
    rows = {"N": report.resolutions}
    for lab, es in report.errors.items():
        rows[f"{lab}_error"] = es
        rows[f"{lab}_rate"] = [float("nan")] + report.rates[lab]
    write_csv(
        f"{ns.out}/{ns.case}_convergence.csv",
        list(rows),
        [np.asarray(v, dtype=float) for v in rows.values()],
    )
    return 0


def _cmd_accept(ns):
    from .acceptance import run_all

    results = run_all(out_dir=ns.out, verbose=True)
    return 0 if all(r["passed"] for r in results) else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns, extra = parser.parse_known_args(argv)
        if extra:
            raise ConfigError(f"unknown argument(s): {extra}")
        if ns.command == "run":
            return _cmd_run(ns)
        if ns.command == "convergence":
            return _cmd_convergence(ns)
        return _cmd_accept(ns)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DffvError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
