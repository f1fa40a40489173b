"""Dual-field finite-volume solver for hyperbolic conservation laws.

Conserved cell averages on a primal mesh and primitive cell averages on
overlapping staggered meshes are evolved in lockstep: the primitive
(nonconservative) system by a path-conservative central-upwind scheme with
built-in anti-diffusion, the conservative system by plain fluxes read from
the staggered averages, re-coupled once per step by a conservative
post-processing.  Instantiated for the 1-D and 2-D compressible Euler
equations.
"""

from .errors import (
    BadResolution,
    ConfigError,
    DegenerateEigenbasis,
    DffvError,
    IncompatibleGrids,
    NonAdmissible,
    NonSquareGrid,
    VacuumFormation,
)
from .euler import (
    EigenFrame,
    EulerSystem1D,
    EulerSystem2D,
    GasConstants,
    LinearAdvection,
)
from .grid import (
    BoundaryCondition,
    Field,
    StaggeredGrid1D,
    StaggeredGrid2D,
    build_grid_1d,
    build_grid_2d,
    fill_ghosts,
    sample_cell_averages,
)
from .solver import (
    DualField1D,
    DualField2D,
    SchemeParams,
    advance,
    init_state_1d,
    init_state_2d,
    linear_advection_system,
    max_stable_dt,
    post_process_1d,
    post_process_2d,
    run_to_time,
    ssprk3_step,
)

__version__ = "0.1.0"
