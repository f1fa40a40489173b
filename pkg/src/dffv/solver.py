"""Coupled dual-field time stepper.

Conserved cell averages on the primal mesh advance with plain
prim-to-cons fluxes evaluated from the staggered primitive averages; the
primitive averages advance with the PCCU right-hand side.  Both are
integrated in lockstep (SSPRK3 by default) and re-coupled once per completed
time step by the conservative post-processing.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import NonAdmissible
from .euler import GasConstants, LinearAdvection
from .grid import BoundaryCondition, Field, fill_ghosts, sample_cell_averages
from .pccu import axis_speeds, prim_rhs_1d, staggered_rhs_2d
from .recon import minmod_pair

__all__ = [
    "SchemeParams",
    "DualField1D",
    "DualField2D",
    "RunLog",
    "init_state_1d",
    "init_state_2d",
    "cons_rhs_1d",
    "cons_rhs_2d",
    "post_process_1d",
    "post_process_2d",
    "max_stable_dt",
    "ssprk3_step",
    "advance",
    "run_to_time",
    "linear_advection_system",
]


@dataclass(frozen=True)
class SchemeParams:
    """Scheme knobs: limiter theta, CFL number, gas closure, coupling flags."""

    theta: float = 1.3
    cfl: float = 0.475
    gas: GasConstants = GasConstants()
    post_processing: bool = True
    antidiffusion: bool = True
    integrator: str = "ssprk3"

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"cfl must be in (0, 1), got {self.cfl}")
        if not 1.0 <= self.theta <= 2.0:
            raise ValueError(f"theta must be in [1, 2], got {self.theta}")
        if self.integrator not in ("ssprk3", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")


@dataclass
class DualField1D:
    grid: object
    system: object
    u: Field
    v: Field
    time: float = 0.0


@dataclass
class DualField2D:
    grid: object
    system: object
    u: Field
    vx: Field
    vy: Field
    time: float = 0.0


@dataclass
class RunLog:
    n_steps: int = 0
    boundary_flux_integral: np.ndarray = None
    dts: list = dc_field(default_factory=list)


def linear_advection_system(a: float) -> LinearAdvection:
    """M=1 linear advection instance (PCCU reduces to second-order upwind)."""
    return LinearAdvection(a)


def init_state_1d(system, grid, ic_prim, bc, quad="midpoint") -> DualField1D:
    """Sample primitive averages on the staggered mesh and conserved averages
    on the primal mesh from a pointwise primitive IC."""
    v = sample_cell_averages(ic_prim, grid, "stag", "prim", quad, bc)

    def ic_cons(x):
        return system.prim_to_cons(np.asarray(ic_prim(x), dtype=float))

    u = sample_cell_averages(ic_cons, grid, "primal", "cons", quad, bc)
    if bc.is_periodic(0):
        # the two edge staggered cells are periodic images of one another
        v.interior[:, -1] = v.interior[:, 0]
    return DualField1D(grid, system, u, v)


def init_state_2d(system, grid, ic_prim, bc, quad="midpoint") -> DualField2D:
    vx = sample_cell_averages(ic_prim, grid, "xstag", "prim", quad, bc)
    vy = sample_cell_averages(ic_prim, grid, "ystag", "prim", quad, bc)

    def ic_cons(x, y):
        return system.prim_to_cons(np.asarray(ic_prim(x, y), dtype=float))

    u = sample_cell_averages(ic_cons, grid, "primal", "cons", quad, bc)
    if bc.is_periodic(0):
        vx.interior[:, -1, :] = vx.interior[:, 0, :]
    if bc.is_periodic(1):
        vy.interior[:, :, -1] = vy.interior[:, :, 0]
    return DualField2D(grid, system, u, vx, vy)


def _scratch(field: Field, interior=None) -> Field:
    out = Field.empty(field.grid, field.mesh, field.kind, field.data.shape[0])
    out.interior = field.interior if interior is None else interior
    return out


def _conj(system, w):
    return system.swap_xy(w).swapaxes(1, 2)


# ---------------------------------------------------------------------------
# conservative right-hand sides
# ---------------------------------------------------------------------------

def _cons_flux_diff_1d(system, v_int, dx):
    f = system.cons_flux_from_prim(v_int)
    rhs = -(f[:, 1:] - f[:, :-1]) / dx
    bflux = f[:, -1] - f[:, 0]
    return rhs, bflux


def _cons_flux_diff_2d(system, vx_int, vy_int, dx, dy):
    fx = system.cons_flux_from_prim(vx_int)
    gy = _conj(system, system.cons_flux_from_prim(_conj(system, vy_int)))
    rhs = -(
        (fx[:, 1:, :] - fx[:, :-1, :]) / dx + (gy[:, :, 1:] - gy[:, :, :-1]) / dy
    )
    bflux = dy * (fx[:, -1, :].sum(axis=1) - fx[:, 0, :].sum(axis=1)) + dx * (
        gy[:, :, -1].sum(axis=1) - gy[:, :, 0].sum(axis=1)
    )
    return rhs, bflux


def cons_rhs_1d(state: DualField1D, bc, params: SchemeParams):
    """Primal-mesh RHS -(F(U(Vbar))_{j+1/2} - F(U(Vbar))_{j-1/2})/dx."""
    v = _scratch(state.v)
    fill_ghosts(v, bc, params.gas)
    rhs, _ = _cons_flux_diff_1d(state.system, v.interior, state.grid.dx)
    return rhs


def cons_rhs_2d(state: DualField2D, bc, params: SchemeParams):
    vx, vy = _scratch(state.vx), _scratch(state.vy)
    fill_ghosts(vx, bc, params.gas)
    fill_ghosts(vy, bc, params.gas)
    rhs, _ = _cons_flux_diff_2d(
        state.system, vx.interior, vy.interior, state.grid.dx, state.grid.dy
    )
    return rhs


# ---------------------------------------------------------------------------
# conservative post-processing
# ---------------------------------------------------------------------------

def _post_sweep(system, u_pad, v_pad, h, ghost):
    """One post-processing sweep along data axis 1.

    u_pad: primal conserved averages (M, n+2g, ...); v_pad: staggered
    primitive averages (M, n+1+2g, ...), ghosts filled.  Returns
    (u_new, v_new) on the interior cells of axis 1 (batch axes pass through):
    the minmod(factor-2)-reconstructed interface values are averaged into
    U**, primitive averages are re-read from U**, and the primal averages are
    replaced by the mean of their two interface values, which telescopes to
    preserve the total.
    """
    g = ghost
    n_stag = v_pad.shape[1] - 2 * g
    n_prim = n_stag - 1
    u_stag = system.prim_to_cons(v_pad)

    p = u_pad[:, g - 1 : g + n_prim + 1]
    s_left = u_stag[:, g - 1 : g + n_prim + 1]
    s_right = u_stag[:, g : g + n_prim + 2]
    slope = 2.0 * minmod_pair((p - s_left) / h, (s_right - p) / h)

    u_minus = p[:, : n_prim + 1] + (0.5 * h) * slope[:, : n_prim + 1]
    u_plus = p[:, 1:] - (0.5 * h) * slope[:, 1:]
    u_star2 = 0.5 * (u_minus + u_plus)

    v_new = system.cons_to_prim(u_star2)
    u_new = 0.5 * (u_star2[:, :-1] + u_star2[:, 1:])
    return u_new, v_new


def post_process_1d(system, grid, u_star: Field, v_star: Field, bc,
                    params: SchemeParams):
    """Four-step conservative coupling; returns fresh (u, v) Fields."""
    fill_ghosts(u_star, bc, params.gas)
    fill_ghosts(v_star, bc, params.gas)
    u_new, v_new = _post_sweep(system, u_star.data, v_star.data, grid.dx, grid.ghost)
    return _scratch(u_star, u_new), _scratch(v_star, v_new)


def post_process_2d(system, grid, u_star: Field, vx_star: Field, vy_star: Field,
                    bc, params: SchemeParams):
    """Eight-step coupling run in xy and yx sweep orders, then averaged.

    The y-direction sweep is the x-direction sweep conjugated by the
    velocity-component swap and an axis transpose, so the whole operation is
    exactly equivariant under (x, y, u, v) -> (y, x, v, u).
    """
    g = grid.ghost
    dx, dy = grid.dx, grid.dy
    fill_ghosts(u_star, bc, params.gas)
    fill_ghosts(vx_star, bc, params.gas)
    fill_ghosts(vy_star, bc, params.gas)
    sysm = system

    # x then y: the intermediate primal field keeps its padded y-extent so the
    # y-sweep sees boundary-consistent values without a refill.
    u_tilde, vx_xy_full = _post_sweep(sysm, u_star.data, vx_star.data, dx, g)
    u_xy_s, vy_xy_s = _post_sweep(
        sysm, _conj(sysm, u_tilde), _conj(sysm, vy_star.data[:, g:-g, :]), dy, g
    )
    u_xy = _conj(sysm, u_xy_s)
    vx_xy = vx_xy_full[:, :, g:-g]
    vy_xy = _conj(sysm, vy_xy_s)

    # y then x
    u_tilde_s, vy_yx_s = _post_sweep(
        sysm, _conj(sysm, u_star.data), _conj(sysm, vy_star.data), dy, g
    )
    u_yx, vx_yx = _post_sweep(
        sysm, _conj(sysm, u_tilde_s), vx_star.data[:, :, g:-g], dx, g
    )
    vy_yx = _conj(sysm, vy_yx_s)[:, g:-g, :]

    u_new = 0.5 * (u_xy + u_yx)
    vx_new = 0.5 * (vx_xy + vx_yx)
    vy_new = 0.5 * (vy_xy + vy_yx)
    return (
        _scratch(u_star, u_new),
        _scratch(vx_star, vx_new),
        _scratch(vy_star, vy_new),
    )


# ---------------------------------------------------------------------------
# time stepping
# ---------------------------------------------------------------------------

def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("DFFV_THREADS", "1")))
    except ValueError:
        return 1


def max_stable_dt(state, bc, params: SchemeParams) -> float:
    """CFL time step from a fresh interface-speed sweep of the current state.

    1-D: cfl * dx / max|a|;  2-D: cfl / (max|a|/dx + max|b|/dy).  Zero wave
    speeds (possible only for degenerate systems) fall back to the mesh scale.
    """
    if isinstance(state, DualField1D):
        v = _scratch(state.v)
        fill_ghosts(v, bc, params.gas)
        amax = axis_speeds(state.system, v.data, params.theta, ghost=v.ghost)
        if amax <= 0.0:
            return params.cfl * state.grid.dx
        return params.cfl * state.grid.dx / amax

    g = state.grid.ghost
    vx, vy = _scratch(state.vx), _scratch(state.vy)
    fill_ghosts(vx, bc, params.gas)
    fill_ghosts(vy, bc, params.gas)
    sysm = state.system
    amax = max(
        axis_speeds(sysm, vx.data[:, :, g:-g], params.theta, ghost=g),
        axis_speeds(sysm, vy.data[:, :, g:-g], params.theta, ghost=g),
    )
    bmax = max(
        axis_speeds(sysm, _conj(sysm, vx.data)[:, :, g:-g], params.theta, ghost=g),
        axis_speeds(sysm, _conj(sysm, vy.data)[:, :, g:-g], params.theta, ghost=g),
    )
    denom = amax / state.grid.dx + bmax / state.grid.dy
    if denom <= 0.0:
        return params.cfl * min(state.grid.dx, state.grid.dy)
    return params.cfl / denom


def _rhs_1d(state, bc, params, v_int):
    vf = _scratch(state.v, v_int)
    fill_ghosts(vf, bc, params.gas)
    lv, _ = prim_rhs_1d(state.system, vf, params.theta, params.antidiffusion)
    lu, bflux = _cons_flux_diff_1d(state.system, vf.interior, state.grid.dx)
    return lu, lv, bflux


def _rhs_2d(state, bc, params, vx_int, vy_int):
    sysm, grid = state.system, state.grid
    vxf = _scratch(state.vx, vx_int)
    vyf = _scratch(state.vy, vy_int)
    fill_ghosts(vxf, bc, params.gas)
    fill_ghosts(vyf, bc, params.gas)

    def rhs_vx():
        out, _, _ = staggered_rhs_2d(
            sysm, vxf.data, grid.dx, grid.dy, params.theta, params.antidiffusion,
            ghost=grid.ghost,
        )
        return out

    def rhs_vy():
        out, _, _ = staggered_rhs_2d(
            sysm, vyf.data, grid.dx, grid.dy, params.theta, params.antidiffusion,
            ghost=grid.ghost,
        )
        return out

    if _worker_count() >= 2:
        with ThreadPoolExecutor(max_workers=2) as pool:
            fut_x = pool.submit(rhs_vx)
            fut_y = pool.submit(rhs_vy)
            lvx, lvy = fut_x.result(), fut_y.result()
    else:
        lvx, lvy = rhs_vx(), rhs_vy()
    lu, bflux = _cons_flux_diff_2d(sysm, vxf.interior, vyf.interior, grid.dx, grid.dy)
    return lu, lvx, lvy, bflux


def _advance_1d(state, bc, params, dt):
    u0, v0 = state.u.interior.copy(), state.v.interior.copy()

    if params.integrator == "euler":
        lu0, lv0, bf0 = _rhs_1d(state, bc, params, v0)
        u_star, v_star = u0 + dt * lu0, v0 + dt * lv0
        bflux = bf0
    else:
        lu0, lv0, bf0 = _rhs_1d(state, bc, params, v0)
        u1, v1 = u0 + dt * lu0, v0 + dt * lv0
        lu1, lv1, bf1 = _rhs_1d(state, bc, params, v1)
        u2 = 0.75 * u0 + 0.25 * (u1 + dt * lu1)
        v2 = 0.75 * v0 + 0.25 * (v1 + dt * lv1)
        lu2, lv2, bf2 = _rhs_1d(state, bc, params, v2)
        u_star = u0 / 3.0 + (2.0 / 3.0) * (u2 + dt * lu2)
        v_star = v0 / 3.0 + (2.0 / 3.0) * (v2 + dt * lv2)
        bflux = bf0 / 6.0 + bf1 / 6.0 + (2.0 / 3.0) * bf2

    uf = _scratch(state.u, u_star)
    vf = _scratch(state.v, v_star)
    if params.post_processing:
        uf, vf = post_process_1d(state.system, state.grid, uf, vf, bc, params)
    return (
        DualField1D(state.grid, state.system, uf, vf, state.time + dt),
        bflux,
    )


def _advance_2d(state, bc, params, dt):
    u0 = state.u.interior.copy()
    vx0 = state.vx.interior.copy()
    vy0 = state.vy.interior.copy()

    if params.integrator == "euler":
        lu0, lvx0, lvy0, bf0 = _rhs_2d(state, bc, params, vx0, vy0)
        u_star = u0 + dt * lu0
        vx_star, vy_star = vx0 + dt * lvx0, vy0 + dt * lvy0
        bflux = bf0
    else:
        lu0, lvx0, lvy0, bf0 = _rhs_2d(state, bc, params, vx0, vy0)
        u1, vx1, vy1 = u0 + dt * lu0, vx0 + dt * lvx0, vy0 + dt * lvy0
        lu1, lvx1, lvy1, bf1 = _rhs_2d(state, bc, params, vx1, vy1)
        u2 = 0.75 * u0 + 0.25 * (u1 + dt * lu1)
        vx2 = 0.75 * vx0 + 0.25 * (vx1 + dt * lvx1)
        vy2 = 0.75 * vy0 + 0.25 * (vy1 + dt * lvy1)
        lu2, lvx2, lvy2, bf2 = _rhs_2d(state, bc, params, vx2, vy2)
        u_star = u0 / 3.0 + (2.0 / 3.0) * (u2 + dt * lu2)
        vx_star = vx0 / 3.0 + (2.0 / 3.0) * (vx2 + dt * lvx2)
        vy_star = vy0 / 3.0 + (2.0 / 3.0) * (vy2 + dt * lvy2)
        bflux = bf0 / 6.0 + bf1 / 6.0 + (2.0 / 3.0) * bf2

    uf = _scratch(state.u, u_star)
    vxf = _scratch(state.vx, vx_star)
    vyf = _scratch(state.vy, vy_star)
    if params.post_processing:
        uf, vxf, vyf = post_process_2d(
            state.system, state.grid, uf, vxf, vyf, bc, params
        )
    return (
        DualField2D(state.grid, state.system, uf, vxf, vyf, state.time + dt),
        bflux,
    )


def advance(state, bc, params: SchemeParams, dt: float):
    """One full time step of size dt (stages plus one post-processing pass).

    Returns (new_state, boundary_flux_rate) where the rate is the
    stage-weighted net conserved-variable outflow through the domain boundary.
    """
    try:
        if isinstance(state, DualField1D):
            return _advance_1d(state, bc, params, dt)
        return _advance_2d(state, bc, params, dt)
    except NonAdmissible as exc:
        raise NonAdmissible(str(exc), time=state.time) from exc


def ssprk3_step(state, bc, params: SchemeParams, dt: float = None):
    """Advance one adaptive (or given) step with SSPRK3; returns the new state."""
    if params.integrator != "ssprk3":
        params = SchemeParams(
            theta=params.theta, cfl=params.cfl, gas=params.gas,
            post_processing=params.post_processing,
            antidiffusion=params.antidiffusion, integrator="ssprk3",
        )
    if dt is None:
        dt = max_stable_dt(state, bc, params)
    new_state, _ = advance(state, bc, params, dt)
    return new_state


def run_to_time(state, bc, params: SchemeParams, t_final: float, callbacks=(),
                fixed_dt: float = None, max_steps: int = 10 ** 9):
    """March to t_final, clipping the last step to land on it exactly.

    callbacks are invoked as cb(state, step_index) after every completed step.
    Returns (state, RunLog).
    """
    if t_final < state.time:
        raise ValueError("t_final precedes current state time")
    m = state.system.m
    log = RunLog(boundary_flux_integral=np.zeros(m))
    tiny = 1e-12 * max(1.0, abs(t_final))
    while state.time < t_final - tiny and log.n_steps < max_steps:
        dt = fixed_dt if fixed_dt is not None else max_stable_dt(state, bc, params)
        clipped = state.time + dt >= t_final
        if clipped:
            dt = t_final - state.time
        state, bflux = advance(state, bc, params, dt)
        if clipped:
            state.time = t_final
        log.boundary_flux_integral += dt * np.asarray(bflux)
        log.dts.append(dt)
        log.n_steps += 1
        for cb in callbacks:
            cb(state, log.n_steps - 1)
    return state, log
