"""Slope limiters and piecewise-linear reconstruction.

Two distinct limiter code paths exist by design: the three-argument
generalized minmod (theta-weighted) acting on local characteristic variables
inside the PCCU right-hand side, and the plain two-argument minmod (factor 2,
component-wise on conserved variables) used by the conservative
post-processing.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateEigenbasis
from .euler import GasConstants, eigen_frame

__all__ = [
    "minmod",
    "minmod_pair",
    "generalized_minmod_slope",
    "characteristic_reconstruct",
    "reconstruct_cell_faces",
]


def minmod(values):
    """Component-wise minmod of a sequence: min if all positive, max if all
    negative, else zero."""
    stacked = np.stack([np.asarray(v, dtype=float) for v in values])
    out = np.where(
        np.all(stacked > 0.0, axis=0),
        np.min(stacked, axis=0),
        np.where(np.all(stacked < 0.0, axis=0), np.max(stacked, axis=0), 0.0),
    )
    return out


def minmod_pair(a, b):
    """Two-argument minmod, branch-free for array inputs."""
    return np.where(
        (a > 0.0) & (b > 0.0),
        np.minimum(a, b),
        np.where((a < 0.0) & (b < 0.0), np.maximum(a, b), 0.0),
    )


def generalized_minmod_slope(w_minus, w_center, w_plus, h, theta):
    """Generalized minmod slope from three neighbouring cell averages:

        minmod(theta*(wc-wm)/h, (wp-wm)/(2h), theta*(wp-wc)/h)
    """
    w_minus = np.asarray(w_minus, dtype=float)
    w_center = np.asarray(w_center, dtype=float)
    w_plus = np.asarray(w_plus, dtype=float)
    return minmod(
        (
            theta * (w_center - w_minus) / h,
            (w_plus - w_minus) / (2.0 * h),
            theta * (w_plus - w_center) / h,
        )
    )


def reconstruct_cell_faces(system, w, h, theta):
    """Characteristic-wise endpoint values for every cell with two neighbours.

    w : padded cell-average array (M, S, ...) along axis 1.
    Returns (left, right) arrays of shape (M, S-2, ...): the reconstructed
    values at the left and right face of cells 1..S-2.  Each cell's stencil is
    transformed by the frame built from its own average; frames flagged
    degenerate fall back to component-wise limiting.
    """
    wm = w[:, :-2]
    wc = w[:, 1:-1]
    wp = w[:, 2:]
    frame = system.char_frame(wc)
    gm = system.char_from_prim(frame, wm)
    gc = system.char_from_prim(frame, wc)
    gp = system.char_from_prim(frame, wp)
    half = (0.5 * h) * generalized_minmod_slope(gm, gc, gp, h, theta)
    left = system.prim_from_char(frame, gc - half)
    right = system.prim_from_char(frame, gc + half)
    return left, right


def characteristic_reconstruct(field, cell_index, direction, gas: GasConstants,
                               theta: float = 1.3):
    """Endpoint values (left-face, right-face) of one staggered-mesh cell.

    Transforms the three-cell stencil of primitive averages into the local
    characteristic frame built from the center cell's average, limits with the
    generalized minmod, and maps the endpoint values back.  Falls back to
    component-wise reconstruction on a degenerate eigenbasis.
    """
    data = field.data
    g = field.ghost
    if field.grid.__class__.__name__ == "StaggeredGrid1D":
        idx = (g + cell_index,)
        axis = 0
        h = field.grid.dx
    else:
        ix, iy = cell_index
        idx = (g + ix, g + iy)
        axis = 0 if direction == "x" else 1
        h = field.grid.dx if direction == "x" else field.grid.dy

    def cell(offset):
        pos = list(idx)
        pos[axis] += offset
        return data[(slice(None),) + tuple(pos)]

    vc = cell(0)
    try:
        frame = eigen_frame(vc, direction, gas)
        q, q_inv = frame.q, frame.q_inv
    except DegenerateEigenbasis:
        q = q_inv = np.eye(len(vc))
    gm, gc, gp = q_inv @ cell(-1), q_inv @ vc, q_inv @ cell(+1)
    half = (0.5 * h) * generalized_minmod_slope(gm, gc, gp, h, theta)
    return q @ (gc - half), q @ (gc + half)
