"""Benchmark case registry, error norms, convergence studies, and rasters.

Discontinuous (Riemann-type) initial data are sampled pointwise by the
midpoint rule; a staggered cell whose center lands exactly on a jump takes
the two-state mean, which is that cell's exact average and keeps the
initial velocity/pressure tear split symmetrically across the two adjacent
primal cells.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import IncompatibleGrids, NonSquareGrid
from .euler import EulerSystem1D, EulerSystem2D, GasConstants
from .grid import (
    BoundaryCondition,
    Field,
    StaggeredGrid1D,
    StaggeredGrid2D,
    build_grid_1d,
    build_grid_2d,
    sample_cell_averages,
)
from .riemann import shock_vortex_ic, vortex_exact
from .solver import (
    SchemeParams,
    init_state_1d,
    init_state_2d,
    linear_advection_system,
    run_to_time,
)

__all__ = [
    "CaseSpec",
    "ErrorReport",
    "case_registry",
    "get_case",
    "make_system",
    "make_state",
    "case_params",
    "l1_error",
    "restrict_to",
    "convergence_study",
    "schlieren",
    "diagonal_slice",
]


@dataclass(frozen=True)
class CaseSpec:
    """One benchmark definition: domain, data, BCs, final time, defaults."""

    name: str
    dim: int
    x_bounds: tuple
    t_final: float
    default_n: tuple
    ic: callable
    bc: BoundaryCondition
    y_bounds: tuple = None
    theta: float = None
    quad: str = "midpoint"
    system: str = "euler"
    advect_speed: float = 1.0
    exact: callable = None  # exact(x[, y], t) -> primitive components


def _jump_mean(x, x0, left, right):
    """Piecewise-constant data; exactly at the jump, the two-state mean."""
    x = np.asarray(x, dtype=float)
    left = np.asarray(left, dtype=float).reshape(-1, *([1] * x.ndim))
    right = np.asarray(right, dtype=float).reshape(-1, *([1] * x.ndim))
    out = np.where(x < x0, left, right) * np.ones_like(x)
    at = np.abs(x - x0) < 1e-12 * max(1.0, abs(x0))
    if np.any(at):
        out[:, at] = np.broadcast_to(0.5 * (left + right), out.shape)[:, at]
    return out


def _sod_ic(x):
    return _jump_mean(x, 0.5, [1.0, 0.0, 1.0], [0.125, 0.0, 0.1])


def _double_rarefaction_ic(x):
    return _jump_mean(x, 0.5, [1.0, -2.0, 0.4], [1.0, 2.0, 0.4])


_SHU_OSHER_LEFT = (3.857143, 2.629369, 10.333333)


def _shu_osher_ic(x):
    x = np.asarray(x, dtype=float)
    rho_r = 1.0 + 0.2 * np.sin(5.0 * x)
    rho = np.where(x < -4.0, _SHU_OSHER_LEFT[0], rho_r)
    u = np.where(x < -4.0, _SHU_OSHER_LEFT[1], 0.0)
    p = np.where(x < -4.0, _SHU_OSHER_LEFT[2], 1.0)
    at = np.abs(x + 4.0) < 1e-12 * 4.0
    if np.any(at):
        rho[at] = 0.5 * (_SHU_OSHER_LEFT[0] + rho_r[at])
        u[at] = 0.5 * _SHU_OSHER_LEFT[1]
        p[at] = 0.5 * (_SHU_OSHER_LEFT[2] + 1.0)
    return np.stack([rho, u * np.ones_like(x), p * np.ones_like(x)])


def _woodward_colella_ic(x):
    x = np.asarray(x, dtype=float)
    p = np.where(x < 0.1, 1e3, np.where(x > 0.9, 1e2, 1e-2)) * np.ones_like(x)
    for x0, lo, hi in ((0.1, 1e3, 1e-2), (0.9, 1e-2, 1e2)):
        at = np.abs(x - x0) < 1e-12
        p[at] = 0.5 * (lo + hi)
    return np.stack([np.ones_like(x), np.zeros_like(x), p])


def _explosion_ic(x, y):
    r = np.sqrt(np.asarray(x) ** 2 + np.asarray(y) ** 2)
    rho = np.where(r < 0.4, 1.0, 0.125)
    p = np.where(r < 0.4, 1.0, 0.1)
    z = np.zeros_like(rho)
    return np.stack(np.broadcast_arrays(rho, z, z, p))


_R2D_STATES = (
    (1.5, 0.0, 0.0, 1.5),        # x > 1, y > 1
    (0.5323, 1.206, 0.0, 0.3),   # x < 1, y > 1
    (0.138, 1.206, 1.206, 0.029),  # x < 1, y < 1
    (0.5323, 0.0, 1.206, 0.3),   # x > 1, y < 1
)


def _riemann2d_ic(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    q = [np.asarray(s, dtype=float) for s in _R2D_STATES]
    xg, yg = x >= 1.0, y >= 1.0
    shape = np.broadcast_shapes(x.shape, y.shape)
    out = np.empty((4,) + shape)
    for c in range(4):
        out[c] = np.where(
            xg & yg, q[0][c],
            np.where(~xg & yg, q[1][c], np.where(~xg & ~yg, q[2][c], q[3][c])),
        )
    return out


def _square_wave_ic(x):
    x = np.asarray(x, dtype=float)
    return np.where((x >= 0.25) & (x < 0.75), 1.0, 0.0)[None]


def _square_wave_exact(x, t, a=1.0):
    return _square_wave_ic(np.mod(np.asarray(x) - a * t, 1.0))


_GAS = GasConstants()


def _vortex_ic(x, y):
    return vortex_exact(x, y, 0.0, _GAS)


def _shock_vortex_case_ic(x, y):
    return shock_vortex_ic(x, y, _GAS)


def case_registry():
    """All benchmark cases with the published constants."""
    cases = [
        CaseSpec(
            name="vortex", dim=2, x_bounds=(-10.0, 10.0), y_bounds=(-10.0, 10.0),
            t_final=0.1, default_n=(100, 100), ic=_vortex_ic,
            bc=BoundaryCondition.periodic(2), quad="gauss3",
            exact=lambda x, y, t: vortex_exact(x, y, t, _GAS),
        ),
        CaseSpec(
            name="sod", dim=1, x_bounds=(0.0, 1.0), t_final=0.2, default_n=(200,),
            ic=_sod_ic, bc=BoundaryCondition.free(1),
        ),
        CaseSpec(
            name="double_rarefaction", dim=1, x_bounds=(0.0, 1.0), t_final=0.15,
            default_n=(200,), ic=_double_rarefaction_ic, bc=BoundaryCondition.free(1),
        ),
        CaseSpec(
            name="shu_osher", dim=1, x_bounds=(-5.0, 5.0), t_final=1.8,
            default_n=(600,), ic=_shu_osher_ic,
            bc=BoundaryCondition.from_kinds(
                left=("inflow", list(_SHU_OSHER_LEFT)), right="free"
            ),
        ),
        CaseSpec(
            name="woodward_colella", dim=1, x_bounds=(0.0, 1.0), t_final=0.038,
            default_n=(400,), ic=_woodward_colella_ic,
            bc=BoundaryCondition.from_kinds(left="wall", right="wall"), theta=1.1,
        ),
        CaseSpec(
            name="explosion", dim=2, x_bounds=(-1.0, 1.0), y_bounds=(-1.0, 1.0),
            t_final=0.25, default_n=(400, 400), ic=_explosion_ic,
            bc=BoundaryCondition.free(2),
        ),
        CaseSpec(
            name="shock_vortex", dim=2, x_bounds=(0.0, 2.0), y_bounds=(0.0, 1.0),
            t_final=0.7, default_n=(600, 301), ic=_shock_vortex_case_ic,
            bc=BoundaryCondition.from_kinds(
                left=("inflow", [1.0, float(np.sqrt(1.4) * 1.5), 0.0, 1.0]),
                right="free", bottom="wall", top="wall",
            ),
        ),
        CaseSpec(
            name="riemann2d_cfg3", dim=2, x_bounds=(0.0, 1.2), y_bounds=(0.0, 1.2),
            t_final=1.0, default_n=(1000, 1000), ic=_riemann2d_ic,
            bc=BoundaryCondition.free(2),
        ),
        CaseSpec(
            name="advection_square", dim=1, x_bounds=(0.0, 1.0), t_final=1.0,
            default_n=(100,), ic=_square_wave_ic, bc=BoundaryCondition.periodic(1),
            system="advection", advect_speed=1.0,
            exact=lambda x, t: _square_wave_exact(x, t),
        ),
    ]
    return {c.name: c for c in cases}


def get_case(name: str) -> CaseSpec:
    reg = case_registry()
    if name not in reg:
        raise KeyError(f"unknown case {name!r}; known: {sorted(reg)}")
    return reg[name]


def make_system(case: CaseSpec, gas: GasConstants = None):
    if case.system == "advection":
        return linear_advection_system(case.advect_speed)
    gas = gas or GasConstants()
    return EulerSystem2D(gas) if case.dim == 2 else EulerSystem1D(gas)


def case_params(case: CaseSpec, base: SchemeParams = None) -> SchemeParams:
    base = base or SchemeParams()
    if case.theta is not None and case.theta != base.theta:
        base = replace(base, theta=case.theta)
    return base


def make_state(case: CaseSpec, n=None, gas: GasConstants = None):
    """Build (state, system, bc) for a case at resolution n (int or (nx, ny))."""
    system = make_system(case, gas)
    if case.dim == 1:
        nn = int(n) if n is not None else case.default_n[0]
        grid = build_grid_1d(case.x_bounds[0], case.x_bounds[1], nn)
        state = init_state_1d(system, grid, case.ic, case.bc, quad=case.quad)
    else:
        if n is None:
            nx, ny = case.default_n
        elif np.isscalar(n):
            nx = ny = int(n)
        else:
            nx, ny = int(n[0]), int(n[1])
        grid = build_grid_2d(case.x_bounds, case.y_bounds, nx, ny)
        state = init_state_2d(system, grid, case.ic, case.bc, quad=case.quad)
    return state, system, case.bc


# ---------------------------------------------------------------------------
# error norms and grid transfer
# ---------------------------------------------------------------------------

def _stag_weights(field: Field):
    """Cell-volume weights; staggered-axis edge cells count half (they stick
    dx/2 out of the domain, and under periodic wrap duplicate each other)."""
    nc = field.n_interior
    if isinstance(field.grid, StaggeredGrid1D):
        w = np.ones(nc[0])
        if field.mesh == "stag":
            w[0] = w[-1] = 0.5
        return w * field.grid.dx
    wx = np.ones(nc[0])
    wy = np.ones(nc[1])
    if field.mesh == "xstag":
        wx[0] = wx[-1] = 0.5
    if field.mesh == "ystag":
        wy[0] = wy[-1] = 0.5
    return (wx[:, None] * wy[None, :]) * (field.grid.dx * field.grid.dy)


def _cell_edges(grid, mesh, axis):
    if isinstance(grid, StaggeredGrid1D):
        n, d, x0 = grid.n, grid.dx, grid.x_left
        stag = mesh == "stag"
    else:
        if axis == 0:
            n, d, x0 = grid.nx, grid.dx, grid.x_left
            stag = mesh == "xstag"
        else:
            n, d, x0 = grid.ny, grid.dy, grid.y_bottom
            stag = mesh == "ystag"
    if stag:
        return x0 + (np.arange(n + 2) - 0.5) * d
    return x0 + np.arange(n + 1) * d


def _overlap_matrix(coarse_edges, fine_edges):
    """Row-stochastic restriction: fraction of each coarse cell covered by
    each fine cell (clipped to the fine mesh extent)."""
    nc = len(coarse_edges) - 1
    nf = len(fine_edges) - 1
    w = np.zeros((nc, nf))
    lo = np.maximum(coarse_edges[:-1, None], fine_edges[None, :-1])
    hi = np.minimum(coarse_edges[1:, None], fine_edges[None, 1:])
    w = np.maximum(hi - lo, 0.0)
    norm = w.sum(axis=1, keepdims=True)
    return w / np.where(norm == 0.0, 1.0, norm)


def restrict_to(fine: Field, coarse_grid, mesh: str) -> Field:
    """Conservative (overlap-weighted) restriction of a fine field onto a
    coarse mesh of the same domain."""
    fg, cg = fine.grid, coarse_grid
    if isinstance(fg, StaggeredGrid1D) != isinstance(cg, StaggeredGrid1D):
        raise IncompatibleGrids("dimension mismatch")
    one_d = isinstance(fg, StaggeredGrid1D)
    if one_d:
        same = (fg.x_left, fg.x_right) == (cg.x_left, cg.x_right)
    else:
        same = (fg.x_left, fg.x_right, fg.y_bottom, fg.y_top) == (
            cg.x_left, cg.x_right, cg.y_bottom, cg.y_top)
    if not same:
        raise IncompatibleGrids("domain mismatch")
    wx = _overlap_matrix(_cell_edges(cg, mesh, 0), _cell_edges(fg, fine.mesh, 0))
    out = Field.empty(cg, mesh, fine.kind, fine.data.shape[0])
    if one_d:
        out.interior = np.einsum("cf,mf->mc", wx, fine.interior)
    else:
        wy = _overlap_matrix(_cell_edges(cg, mesh, 1), _cell_edges(fg, fine.mesh, 1))
        out.interior = np.einsum("cf,dg,mfg->mcd", wx, wy, fine.interior)
    return out


def l1_error(field: Field, reference, quad: str = None, bc=None, t: float = None):
    """Per-component L1 distance between a field and a reference.

    reference may be a callable (exact point function of x[,y], averaged with
    the given quadrature like the initialization) or a finer Field on the
    same domain (restricted conservatively).
    """
    if isinstance(reference, Field):
        ref = restrict_to(reference, field.grid, field.mesh)
        diff = np.abs(field.interior - ref.interior)
    elif callable(reference):
        fn = reference if t is None else (
            (lambda x, y: reference(x, y, t)) if not isinstance(field.grid, StaggeredGrid1D)
            else (lambda x: reference(x, t))
        )
        ref = sample_cell_averages(fn, field.grid, field.mesh, field.kind,
                                   quad or "midpoint", bc)
        diff = np.abs(field.interior - ref.interior)
    else:
        raise IncompatibleGrids("reference must be a Field or a callable")
    w = _stag_weights(field)
    axes = tuple(range(1, diff.ndim))
    return (diff * w[None]).sum(axis=axes)


@dataclass
class ErrorReport:
    resolutions: list
    errors: dict      # label -> list of errors per resolution
    rates: dict       # label -> list (len-1); rate between successive levels

    def format_table(self):
        labels = list(self.errors)
        lines = ["N      " + "  ".join(f"{lab:>11s} {'rate':>5s}" for lab in labels)]
        for i, n in enumerate(self.resolutions):
            cells = []
            for lab in labels:
                e = self.errors[lab][i]
                r = "--" if i == 0 else f"{self.rates[lab][i - 1]:5.2f}"
                cells.append(f"{e:11.4e} {r:>5s}")
            lines.append(f"{n:<6d} " + "  ".join(cells))
        return "\n".join(lines)


def convergence_study(case: CaseSpec, resolutions, gas: GasConstants = None,
                      params: SchemeParams = None) -> ErrorReport:
    """Run a case over a resolution ladder and report L1 errors and rates.

    Requires an exact solution on the case.  2-D Euler reports the rho-, mom_x-
    and E-components of the conserved field plus the v-component of the
    x-staggered and p-component of the y-staggered primitive fields; 1-D
    reports all conserved and primitive components.
    """
    if case.exact is None:
        raise ValueError(f"case {case.name} has no exact solution")
    gas = gas or GasConstants()
    params = case_params(case, params)
    errors = None
    for n in resolutions:
        state, system, bc = make_state(case, n, gas)
        state, _ = run_to_time(state, bc, params, case.t_final)
        t = case.t_final
        if case.dim == 2:
            exact_cons = lambda x, y, tt: system.prim_to_cons(
                np.asarray(case.exact(x, y, tt)))
            e_u = l1_error(state.u, exact_cons, quad=case.quad, bc=bc, t=t)
            e_vx = l1_error(state.vx, case.exact, quad=case.quad, bc=bc, t=t)
            e_vy = l1_error(state.vy, case.exact, quad=case.quad, bc=bc, t=t)
            cols = {
                "rho(U)": e_u[0], "mom_x(U)": e_u[1], "E(U)": e_u[3],
                "v(Vx)": e_vx[2], "p(Vy)": e_vy[3],
            }
        else:
            exact_cons = lambda x, tt: system.prim_to_cons(
                np.asarray(case.exact(x, tt)))
            e_u = l1_error(state.u, exact_cons, quad=case.quad, bc=bc, t=t)
            e_v = l1_error(state.v, case.exact, quad=case.quad, bc=bc, t=t)
            if system.m == 1:
                cols = {"U": e_u[0], "V": e_v[0]}
            else:
                cols = {
                    "rho(U)": e_u[0], "mom(U)": e_u[1], "E(U)": e_u[2],
                    "rho(V)": e_v[0], "u(V)": e_v[1], "p(V)": e_v[2],
                }
        if errors is None:
            errors = {k: [] for k in cols}
        for k, v in cols.items():
            errors[k].append(float(v))
    rates = {}
    res = [int(np.atleast_1d(r)[0]) for r in resolutions]
    for k, es in errors.items():
        rates[k] = [
            float(np.log(es[i] / es[i + 1]) / np.log(res[i + 1] / res[i]))
            if es[i + 1] > 0 and es[i] > 0 else float("nan")
            for i in range(len(es) - 1)
        ]
    return ErrorReport(resolutions=res, errors=errors, rates=rates)


# ---------------------------------------------------------------------------
# rasters and slices
# ---------------------------------------------------------------------------

def schlieren(rho, dx, dy, k: float = 80.0):
    """Schlieren shading exp(-K |grad rho| / max |grad rho|) in (0, 1].

    Central differences inside, one-sided at the edges; the normalizing max
    is taken over the interior.  A flat field maps to all ones.
    """
    rho = np.asarray(rho, dtype=float)
    gx = np.empty_like(rho)
    gy = np.empty_like(rho)
    gx[1:-1, :] = (rho[2:, :] - rho[:-2, :]) / (2.0 * dx)
    gx[0, :] = (rho[1, :] - rho[0, :]) / dx
    gx[-1, :] = (rho[-1, :] - rho[-2, :]) / dx
    gy[:, 1:-1] = (rho[:, 2:] - rho[:, :-2]) / (2.0 * dy)
    gy[:, 0] = (rho[:, 1] - rho[:, 0]) / dy
    gy[:, -1] = (rho[:, -1] - rho[:, -2]) / dy
    mag = np.sqrt(gx * gx + gy * gy)
    gmax = mag[1:-1, 1:-1].max() if min(rho.shape) > 2 else mag.max()
    if gmax < 1e-14:
        return np.ones_like(rho)
    return np.exp(-k * mag / gmax)


def diagonal_slice(field: Field):
    """Values of the cells whose centers lie on y = x, with the signed radial
    coordinate sqrt(x^2 + y^2) * sign(x)."""
    grid = field.grid
    if isinstance(grid, StaggeredGrid1D):
        raise NonSquareGrid("diagonal slice needs a 2-D field")
    nx, ny = field.n_interior
    if nx != ny:
        raise NonSquareGrid(f"nx != ny ({nx} x {ny})")
    if not np.isclose(grid.dx, grid.dy) or not (
        np.isclose(grid.x_left, grid.y_bottom) and np.isclose(grid.x_right, grid.y_top)
    ):
        raise NonSquareGrid("domain is not square")
    xc, _ = grid.centers(field.mesh)
    idx = np.arange(nx)
    values = field.interior[:, idx, idx]
    r = np.sqrt(2.0) * xc
    return r, values
