"""Overlapping uniform staggered meshes, cell-average fields, ghost filling.

The primal mesh has cells ``[x_{j-1/2}, x_{j+1/2}]`` (centers at half-integer
multiples of dx); the staggered mesh has cells ``[x_j, x_{j+1}]`` centered on
the primal interfaces, one more cell than the primal mesh per staggered axis,
with the two edge cells extending dx/2 beyond the domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import BadResolution
from .euler import GasConstants, prim_to_cons

__all__ = [
    "StaggeredGrid1D",
    "StaggeredGrid2D",
    "Field",
    "BoundaryCondition",
    "build_grid_1d",
    "build_grid_2d",
    "fill_ghosts",
    "sample_cell_averages",
]

# Gauss-Legendre nodes/weights on [-1/2, 1/2]
_QUAD_RULES = {
    "midpoint": (np.array([0.0]), np.array([1.0])),
    "gauss3": (
        0.5 * np.array([-np.sqrt(3.0 / 5.0), 0.0, np.sqrt(3.0 / 5.0)]),
        np.array([5.0, 8.0, 5.0]) / 18.0,
    ),
    "gauss5": (
        0.5
        * np.array(
            [
                -np.sqrt(5.0 + 2.0 * np.sqrt(10.0 / 7.0)) / 3.0,
                -np.sqrt(5.0 - 2.0 * np.sqrt(10.0 / 7.0)) / 3.0,
                0.0,
                np.sqrt(5.0 - 2.0 * np.sqrt(10.0 / 7.0)) / 3.0,
                np.sqrt(5.0 + 2.0 * np.sqrt(10.0 / 7.0)) / 3.0,
            ]
        ),
        np.array(
            [
                (322.0 - 13.0 * np.sqrt(70.0)) / 1800.0,
                (322.0 + 13.0 * np.sqrt(70.0)) / 1800.0,
                128.0 / 450.0,
                (322.0 + 13.0 * np.sqrt(70.0)) / 1800.0,
                (322.0 - 13.0 * np.sqrt(70.0)) / 1800.0,
            ]
        ),
    ),
}


@dataclass(frozen=True)
class StaggeredGrid1D:
    x_left: float
    x_right: float
    n: int
    ghost: int = 2

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n

    def n_cells(self, mesh: str) -> int:
        return self.n if mesh == "primal" else self.n + 1

    def centers(self, mesh: str) -> np.ndarray:
        i = np.arange(self.n_cells(mesh), dtype=float)
        if mesh == "primal":
            return self.x_left + (i + 0.5) * self.dx
        return self.x_left + i * self.dx

    def mesh_axis_types(self, mesh: str):
        return ("S",) if mesh == "stag" else ("P",)


@dataclass(frozen=True)
class StaggeredGrid2D:
    x_left: float
    x_right: float
    y_bottom: float
    y_top: float
    nx: int
    ny: int
    ghost: int = 2

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_top - self.y_bottom) / self.ny

    def n_cells(self, mesh: str):
        if mesh == "primal":
            return (self.nx, self.ny)
        if mesh == "xstag":
            return (self.nx + 1, self.ny)
        if mesh == "ystag":
            return (self.nx, self.ny + 1)
        raise ValueError(f"unknown mesh {mesh!r}")

    def centers(self, mesh: str):
        ncx, ncy = self.n_cells(mesh)
        ix = np.arange(ncx, dtype=float)
        iy = np.arange(ncy, dtype=float)
        if mesh == "xstag":
            x = self.x_left + ix * self.dx
        else:
            x = self.x_left + (ix + 0.5) * self.dx
        if mesh == "ystag":
            y = self.y_bottom + iy * self.dy
        else:
            y = self.y_bottom + (iy + 0.5) * self.dy
        return x, y

    def mesh_axis_types(self, mesh: str):
        return {"primal": ("P", "P"), "xstag": ("S", "P"), "ystag": ("P", "S")}[mesh]


def build_grid_1d(x_left: float, x_right: float, n: int, ghost: int = 2) -> StaggeredGrid1D:
    if not x_left < x_right:
        raise BadResolution(f"bounds unordered: [{x_left}, {x_right}]")
    if n < 4:
        raise BadResolution(f"need n >= 4 cells, got {n}")
    return StaggeredGrid1D(x_left, x_right, n, ghost)


def build_grid_2d(xb, yb, nx: int, ny: int, ghost: int = 2) -> StaggeredGrid2D:
    if not (xb[0] < xb[1] and yb[0] < yb[1]):
        raise BadResolution(f"bounds unordered: {xb} x {yb}")
    if nx < 4 or ny < 4:
        raise BadResolution(f"need nx, ny >= 4, got {nx} x {ny}")
    return StaggeredGrid2D(xb[0], xb[1], yb[0], yb[1], nx, ny, ghost)


@dataclass
class Field:
    """Cell-average data on one mesh, ghost layers included.

    data has shape (M, n0 + 2*ghost[, n1 + 2*ghost]); `kind` is 'prim' or
    'cons' and controls inflow/wall ghost content.
    """

    grid: object
    mesh: str
    kind: str
    data: np.ndarray = dc_field(repr=False, default=None)

    @property
    def ghost(self) -> int:
        return self.grid.ghost

    @property
    def n_interior(self):
        nc = self.grid.n_cells(self.mesh)
        return nc if isinstance(nc, tuple) else (nc,)

    @property
    def interior(self) -> np.ndarray:
        g = self.ghost
        sl = (slice(None),) + tuple(slice(g, g + n) for n in self.n_interior)
        return self.data[sl]

    @interior.setter
    def interior(self, values):
        g = self.ghost
        sl = (slice(None),) + tuple(slice(g, g + n) for n in self.n_interior)
        self.data[sl] = values

    def copy(self) -> "Field":
        return Field(self.grid, self.mesh, self.kind, self.data.copy())

    @classmethod
    def empty(cls, grid, mesh: str, kind: str, m: int) -> "Field":
        nc = grid.n_cells(mesh)
        nc = nc if isinstance(nc, tuple) else (nc,)
        shape = (m,) + tuple(n + 2 * grid.ghost for n in nc)
        return cls(grid, mesh, kind, np.zeros(shape))


class BoundaryCondition:
    """Per-side boundary prescription.

    sides maps (axis, end) with end in {0, 1} to ('periodic' | 'free' |
    'wall' | 'inflow', inflow_prim_state_or_None).  1-D uses axis 0 only.
    """

    def __init__(self, sides):
        self.sides = dict(sides)
        axes = {ax for ax, _ in self.sides}
        for ax in axes:
            lo = self.sides[(ax, 0)][0]
            hi = self.sides[(ax, 1)][0]
            if ("periodic" in (lo, hi)) and lo != hi:
                raise ValueError("periodic BC must pair on opposite sides")

    @classmethod
    def periodic(cls, ndim=1):
        return cls({(ax, e): ("periodic", None) for ax in range(ndim) for e in (0, 1)})

    @classmethod
    def free(cls, ndim=1):
        return cls({(ax, e): ("free", None) for ax in range(ndim) for e in (0, 1)})

    @classmethod
    def from_kinds(cls, **kw):
        """Build from side names: left/right (axis 0), bottom/top (axis 1).

        Each value is 'periodic' | 'free' | 'wall' or ('inflow', prim_state).
        """
        name_to_key = {"left": (0, 0), "right": (0, 1), "bottom": (1, 0), "top": (1, 1)}
        sides = {}
        for name, spec in kw.items():
            if isinstance(spec, str):
                spec = (spec, None)
            else:
                spec = (spec[0], np.asarray(spec[1], dtype=float))
            sides[name_to_key[name]] = spec
        return cls(sides)

    def is_periodic(self, axis: int) -> bool:
        return self.sides[(axis, 0)][0] == "periodic"


def _normal_component(axis: int) -> int:
    # velocity / momentum slot normal to a wall on this axis
    return 1 + axis


def fill_ghosts(field: Field, bc: BoundaryCondition, gas: GasConstants = None) -> Field:
    """Populate ghost layers per the boundary condition; interior untouched.

    Axis 0 is filled first, then axis 1 across the full (already padded)
    x-extent so corner ghosts are consistent.
    """
    data = field.data
    g = field.ghost
    axis_types = field.grid.mesh_axis_types(field.mesh)
    ndim = data.ndim - 1

    for axis in range(ndim):
        n = field.n_interior[axis]
        mesh_type = axis_types[axis]
        for end in (0, 1):
            kind, state = bc.sides[(axis, end)]
            take, put, negate = [], [], False
            if kind == "periodic":
                period = n if mesh_type == "P" else n - 1
                for k in range(1, g + 1):
                    if end == 0:
                        put.append(g - k)
                        take.append(g - k + period)
                    else:
                        put.append(g + n - 1 + k)
                        take.append(g + n - 1 + k - period)
            elif kind == "free":
                for k in range(1, g + 1):
                    if end == 0:
                        put.append(g - k)
                        take.append(g)
                    else:
                        put.append(g + n - 1 + k)
                        take.append(g + n - 1)
            elif kind == "wall":
                negate = True
                for k in range(1, g + 1):
                    if end == 0:
                        put.append(g - k)
                        take.append(g + k - 1 if mesh_type == "P" else g + k)
                    else:
                        put.append(g + n - 1 + k)
                        take.append(g + n - k if mesh_type == "P" else g + n - 1 - k)
            elif kind == "inflow":
                ghost_state = np.asarray(state, dtype=float)
                if field.kind == "cons":
                    ghost_state = prim_to_cons(ghost_state, gas)
                sl = [slice(None)] * data.ndim
                rng = range(g) if end == 0 else range(g + n, data.shape[1 + axis])
                sl[1 + axis] = list(rng)
                shape = [len(ghost_state)] + [1] * ndim
                data[tuple(sl)] = ghost_state.reshape(shape)
                continue
            else:
                raise ValueError(f"unknown BC kind {kind!r}")

            sl_put = [slice(None)] * data.ndim
            sl_take = [slice(None)] * data.ndim
            sl_put[1 + axis] = put
            sl_take[1 + axis] = take
            data[tuple(sl_put)] = data[tuple(sl_take)]
            if negate:
                sl_neg = [slice(None)] * data.ndim
                sl_neg[0] = _normal_component(axis)
                sl_neg[1 + axis] = put
                data[tuple(sl_neg)] *= -1.0
    return field


def _extend_coords(x, x0, x1, periodic):
    if periodic:
        return x0 + np.mod(x - x0, x1 - x0)
    return np.clip(x, x0, x1)


def sample_cell_averages(ic, grid, mesh: str, kind: str, quad: str = "midpoint",
                         bc: BoundaryCondition = None) -> Field:
    """Approximate per-cell averages of `ic` on one mesh by quadrature.

    `ic` is a vectorized callable: ic(x) -> (M, ...) in 1-D, ic(x, y) in 2-D.
    Quadrature points of edge staggered cells that poke outside the domain are
    wrapped (periodic BC) or clamped to the boundary (everything else).
    Ghosts are left zero; fill them afterwards.
    """
    nodes, weights = _QUAD_RULES[quad]
    if isinstance(grid, StaggeredGrid1D):
        xc = grid.centers(mesh)
        per = bc is not None and bc.is_periodic(0)
        acc = None
        for s, w in zip(nodes, weights):
            pts = _extend_coords(xc + s * grid.dx, grid.x_left, grid.x_right, per)
            vals = np.asarray(ic(pts), dtype=float)
            acc = w * vals if acc is None else acc + w * vals
        fld = Field.empty(grid, mesh, kind, acc.shape[0])
        fld.interior = acc
        return fld

    xc, yc = grid.centers(mesh)
    per_x = bc is not None and bc.is_periodic(0)
    per_y = bc is not None and bc.is_periodic(1)
    acc = None
    for sx, wx in zip(nodes, weights):
        px = _extend_coords(xc + sx * grid.dx, grid.x_left, grid.x_right, per_x)
        for sy, wy in zip(nodes, weights):
            py = _extend_coords(yc + sy * grid.dy, grid.y_bottom, grid.y_top, per_y)
            vals = np.asarray(ic(px[:, None], py[None, :]), dtype=float)
            acc = wx * wy * vals if acc is None else acc + wx * wy * vals
    fld = Field.empty(grid, mesh, kind, acc.shape[0])
    fld.interior = acc
    return fld
