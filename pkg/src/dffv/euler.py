"""Compressible Euler equations in conservative and primitive form.

State arrays are component-first: shape ``(M, ...)`` where the trailing axes
are grid axes (or empty for a single state).  1-D uses M=3 with conserved
``(rho, rho*u, E)`` and primitive ``(rho, u, p)``; 2-D uses M=4 with
``(rho, rho*u, rho*v, E)`` and ``(rho, u, v, p)``.

The quasi-linear matrix of the primitive (nonconservative) formulation in the
x-direction is

        / u   rho   0    0  \
    A = | 0    u    0   1/r |        (1-D: drop the v row/column)
        | 0    0    u    0  |
        \ 0  g*p    0    u  /

with eigenvalues u-c, u, (u,) u+c and c = sqrt(g*p/rho).  Its y-direction
counterpart is the conjugate of A by the velocity-component swap, so all
y-direction work is routed through :func:`EulerSystem2D.swap_xy`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEigenbasis, NonAdmissible

__all__ = [
    "GasConstants",
    "EigenFrame",
    "sound_speed",
    "prim_to_cons",
    "cons_to_prim",
    "flux_cons_x",
    "flux_cons_y",
    "flux_prim_x",
    "flux_prim_y",
    "noncons_matrix_b",
    "noncons_matrix_c",
    "quasilinear_matrix",
    "eigen_frame",
    "EulerSystem1D",
    "EulerSystem2D",
    "LinearAdvection",
]

# Below this, characteristic frames fall back to component-wise limiting.
_FRAME_FLOOR = 1e-10


@dataclass(frozen=True)
class GasConstants:
    """Ideal-gas closure parameters.

    gamma : specific heat ratio (> 1)
    vacuum_floor : positive admissibility threshold for rho and p
    """

    gamma: float = 1.4
    vacuum_floor: float = 1e-12

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.vacuum_floor > 0.0:
            raise ValueError("vacuum_floor must be positive")


@dataclass(frozen=True)
class EigenFrame:
    """Similarity transform diagonalizing a quasi-linear system matrix.

    ``q_inv @ a @ q`` is diagonal with ``eigenvalues`` (ascending) on the
    diagonal, where ``a`` is the matrix the frame was built from.
    """

    q: np.ndarray
    q_inv: np.ndarray
    eigenvalues: np.ndarray


def _bad_index(mask):
    """Grid index of the first offending cell in a boolean mask."""
    flat = int(np.argmax(mask))
    if mask.ndim == 0:
        return None
    idx = np.unravel_index(flat, mask.shape)
    return idx if len(idx) > 1 else idx[0]


def sound_speed(rho, p, gas: GasConstants):
    return np.sqrt(gas.gamma * p / rho)


def prim_to_cons(v, gas: GasConstants):
    """Map primitive (rho,u[,v],p) to conserved (rho,rho*u[,rho*v],E).

    E = p/(gamma-1) + rho*(u^2[+v^2])/2.  Raises NonAdmissible when rho or p
    is at or below the vacuum floor.
    """
    v = np.asarray(v, dtype=float)
    rho, p = v[0], v[-1]
    bad = ~((rho > gas.vacuum_floor) & (p > gas.vacuum_floor))
    if np.any(bad):
        raise NonAdmissible("non-admissible primitive state", where=_bad_index(bad))
    u = np.empty_like(v)
    u[0] = rho
    ke = np.zeros_like(rho)
    for k in range(1, v.shape[0] - 1):
        u[k] = rho * v[k]
        ke = ke + v[k] * v[k]
    u[-1] = p / (gas.gamma - 1.0) + 0.5 * rho * ke
    return u


def cons_to_prim(u, gas: GasConstants):
    """Map conserved to primitive variables, checking admissibility.

    p = (gamma-1)(E - rho*(u^2[+v^2])/2); raises NonAdmissible on rho or p at
    or below the vacuum floor (signals blow-up or vacuum formation).
    """
    u = np.asarray(u, dtype=float)
    rho = u[0]
    bad = ~(rho > gas.vacuum_floor)
    if np.any(bad):
        raise NonAdmissible("density at/below vacuum floor", where=_bad_index(bad))
    v = np.empty_like(u)
    v[0] = rho
    ke = np.zeros_like(rho)
    for k in range(1, u.shape[0] - 1):
        v[k] = u[k] / rho
        ke = ke + u[k] * v[k]
    p = (gas.gamma - 1.0) * (u[-1] - 0.5 * ke)
    bad = ~(p > gas.vacuum_floor)
    if np.any(bad):
        raise NonAdmissible("pressure at/below vacuum floor", where=_bad_index(bad))
    v[-1] = p
    return v


def flux_cons_x(u, gas: GasConstants):
    """Conservative x-flux (rho*u, rho*u^2+p, [rho*u*v,] u*(E+p))."""
    u = np.asarray(u, dtype=float)
    v = cons_to_prim(u, gas)
    vel, p = v[1], v[-1]
    f = u * vel
    f[1] = f[1] + p
    f[-1] = f[-1] + vel * p
    return f


def flux_cons_y(u, gas: GasConstants):
    """Conservative y-flux, the momentum-swap conjugate of flux_cons_x."""
    u = np.asarray(u, dtype=float)
    if u.shape[0] != 4:
        raise ValueError("y-flux defined for 2-D states only")
    return flux_cons_x(u[[0, 2, 1, 3]], gas)[[0, 2, 1, 3]]


def flux_prim_x(v, gas: GasConstants):
    """Primitive-form x-flux (rho*u, u^2/2, [0,] p*u)."""
    v = np.asarray(v, dtype=float)
    f = np.zeros_like(v)
    rho, u, p = v[0], v[1], v[-1]
    f[0] = rho * u
    f[1] = 0.5 * u * u
    f[-1] = p * u
    return f


def flux_prim_y(v, gas: GasConstants):
    v = np.asarray(v, dtype=float)
    if v.shape[0] != 4:
        raise ValueError("y-flux defined for 2-D states only")
    return flux_prim_x(v[[0, 2, 1, 3]], gas)[[0, 2, 1, 3]]


def noncons_matrix_b(v, gas: GasConstants):
    """Nonconservative coupling matrix B(V) of the primitive x-equations.

    1-D: rows (0,0,0), (0,0,-1/rho), (0,-(g-1)p,0).
    2-D adds the transverse-advection entry -u at (v,v).
    """
    v = np.asarray(v, dtype=float)
    m = v.shape[0]
    rho, p = v[0], v[-1]
    b = np.zeros((m, m))
    b[1, -1] = -1.0 / rho
    b[-1, 1] = -(gas.gamma - 1.0) * p
    if m == 4:
        b[2, 2] = -v[1]
    return b


def noncons_matrix_c(v, gas: GasConstants):
    """Nonconservative coupling matrix C(V) of the primitive y-equations."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != 4:
        raise ValueError("C(V) defined for 2-D states only")
    perm = [0, 2, 1, 3]
    b = noncons_matrix_b(v[perm], gas)
    return b[np.ix_(perm, perm)]


def _prim_jacobian_x(v, gas: GasConstants):
    """d(flux_prim_x)/dV."""
    v = np.asarray(v, dtype=float)
    m = v.shape[0]
    rho, u, p = v[0], v[1], v[-1]
    j = np.zeros((m, m))
    j[0, 0] = u
    j[0, 1] = rho
    j[1, 1] = u
    j[-1, 1] = p
    j[-1, -1] = u
    return j


def quasilinear_matrix(v, direction, gas: GasConstants):
    """Quasi-linear matrix of the primitive system: dF~/dV - B (or y analogue)."""
    v = np.asarray(v, dtype=float)
    if direction == "x":
        return _prim_jacobian_x(v, gas) - noncons_matrix_b(v, gas)
    if direction == "y":
        if v.shape[0] != 4:
            raise ValueError("y-direction defined for 2-D states only")
        perm = [0, 2, 1, 3]
        a = quasilinear_matrix(v[perm], "x", gas)
        return a[np.ix_(perm, perm)]
    raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")


def eigen_frame(v, direction, gas: GasConstants) -> EigenFrame:
    """Closed-form eigen decomposition of the quasi-linear matrix.

    Right eigenvectors (columns of q), ordered by ascending eigenvalue:

        u-c : (rho, -c, [0,] g*p)
        u   : (1, 0, [0,] 0)            density carrier
        u   : (0, 0, 1, 0)              2-D only, transverse velocity
        u+c : (rho, +c, [0,] g*p)

    and the matching rows of q_inv:

        (0, -1/(2c), [0,] 1/(2 g p))
        (1,  0,      [0,] -1/c^2)
        (0,  0,      1,   0)
        (0, +1/(2c), [0,] 1/(2 g p))

    Raises DegenerateEigenbasis when cond(q) > 1e12.
    """
    v = np.asarray(v, dtype=float)
    if direction == "y":
        if v.shape[0] != 4:
            raise ValueError("y-direction defined for 2-D states only")
        perm = [0, 2, 1, 3]
        fr = eigen_frame(v[perm], "x", gas)
        return EigenFrame(
            q=fr.q[np.ix_(perm, range(4))],
            q_inv=fr.q_inv[np.ix_(range(4), perm)],
            eigenvalues=fr.eigenvalues,
        )
    if direction != "x":
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")

    m = v.shape[0]
    rho, u, p = float(v[0]), float(v[1]), float(v[-1])
    if not (rho > 0.0 and p > 0.0):
        raise DegenerateEigenbasis(f"no real eigenbasis for rho={rho}, p={p}")
    c = float(sound_speed(rho, p, gas))
    gp = gas.gamma * p
    if m == 3:
        q = np.array([[rho, 1.0, rho], [-c, 0.0, c], [gp, 0.0, gp]])
        q_inv = np.array(
            [
                [0.0, -0.5 / c, 0.5 / gp],
                [1.0, 0.0, -1.0 / (c * c)],
                [0.0, 0.5 / c, 0.5 / gp],
            ]
        )
        lam = np.array([u - c, u, u + c])
    else:
        q = np.array(
            [
                [rho, 1.0, 0.0, rho],
                [-c, 0.0, 0.0, c],
                [0.0, 0.0, 1.0, 0.0],
                [gp, 0.0, 0.0, gp],
            ]
        )
        q_inv = np.array(
            [
                [0.0, -0.5 / c, 0.0, 0.5 / gp],
                [1.0, 0.0, 0.0, -1.0 / (c * c)],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.5 / c, 0.0, 0.5 / gp],
            ]
        )
        lam = np.array([u - c, u, u, u + c])
    if np.linalg.cond(q) > 1e12:
        raise DegenerateEigenbasis(f"cond(q) > 1e12 for state {v.tolist()}")
    return EigenFrame(q=q, q_inv=q_inv, eigenvalues=lam)


class _CharFrame:
    """Per-cell characteristic transform data for a batch of frame states.

    Built from cell-average primitive states; `degenerate` flags cells where
    the transform would be ill-conditioned, for which char_from_prim /
    prim_from_char act as the identity (component-wise limiting fallback).
    """

    __slots__ = ("rho", "c", "gp", "inv_2c", "inv_2gp", "inv_c2", "degenerate")

    def __init__(self, rho, u, p, gamma):
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.sqrt(gamma * p / rho)
            degenerate = ~(
                (rho > _FRAME_FLOOR)
                & (p > _FRAME_FLOOR)
                & (c > _FRAME_FLOOR * (1.0 + np.abs(u)))
            )
            safe_c = np.where(degenerate, 1.0, c)
            safe_gp = np.where(degenerate, 1.0, gamma * p)
            self.rho = np.where(degenerate, 1.0, rho)
            self.c = safe_c
            self.gp = safe_gp
            self.inv_2c = 0.5 / safe_c
            self.inv_2gp = 0.5 / safe_gp
            self.inv_c2 = 1.0 / (safe_c * safe_c)
        self.degenerate = degenerate

    @property
    def any_degenerate(self):
        return bool(np.any(self.degenerate))


class EulerSystem1D:
    """1-D Euler system callbacks for the generic FV kernels."""

    m = 3
    two_d = False

    def __init__(self, gas: GasConstants = GasConstants()):
        self.gas = gas

    # -- state maps ---------------------------------------------------------
    def prim_to_cons(self, v):
        return prim_to_cons(v, self.gas)

    def cons_to_prim(self, u):
        return cons_to_prim(u, self.gas)

    # -- fluxes -------------------------------------------------------------
    def prim_flux(self, v):
        """F~(V) without admissibility checks (pure algebra)."""
        f = np.empty_like(v)
        f[0] = v[0] * v[1]
        f[1] = 0.5 * v[1] * v[1]
        f[2] = v[2] * v[1]
        return f

    def cons_flux_from_prim(self, v):
        """F(U(V)) evaluated directly from primitive values."""
        rho, u, p = v[0], v[1], v[2]
        e = p / (self.gas.gamma - 1.0) + 0.5 * rho * u * u
        f = np.empty_like(v)
        f[0] = rho * u
        f[1] = rho * u * u + p
        f[2] = u * (e + p)
        return f

    # -- wave structure -----------------------------------------------------
    def wave_bounds(self, v):
        """(lambda_min, lambda_max) = (u-c, u+c) of the quasi-linear matrix."""
        c = np.sqrt(self.gas.gamma * v[-1] / v[0])
        return v[1] - c, v[1] + c

    def noncons_apply(self, vref, w):
        """B(vref) @ w, vectorized."""
        out = np.zeros_like(w)
        out[1] = -w[2] / vref[0]
        out[2] = -(self.gas.gamma - 1.0) * vref[2] * w[1]
        return out

    # -- characteristic transforms -------------------------------------------
    def char_frame(self, vcell):
        return _CharFrame(vcell[0], vcell[1], vcell[2], self.gas.gamma)

    def char_from_prim(self, frame, w):
        g = np.empty_like(w)
        g[0] = -w[1] * frame.inv_2c + w[2] * frame.inv_2gp
        g[1] = w[0] - w[2] * frame.inv_c2
        g[2] = w[1] * frame.inv_2c + w[2] * frame.inv_2gp
        if frame.any_degenerate:
            g = np.where(frame.degenerate, w, g)
        return g

    def prim_from_char(self, frame, g):
        w = np.empty_like(g)
        s = g[0] + g[2]
        w[0] = frame.rho * s + g[1]
        w[1] = frame.c * (g[2] - g[0])
        w[2] = frame.gp * s
        if frame.any_degenerate:
            w = np.where(frame.degenerate, g, w)
        return w


class EulerSystem2D:
    """2-D Euler system callbacks; y-direction work is done by conjugating the
    x-direction formulas with the velocity-component swap (see swap_xy)."""

    m = 4
    two_d = True
    _SWAP = (0, 2, 1, 3)

    def __init__(self, gas: GasConstants = GasConstants()):
        self.gas = gas

    @staticmethod
    def swap_xy(w):
        """Exchange the roles of x and y components: (rho,a,b,q) -> (rho,b,a,q).

        Valid for both primitive (u,v) and conserved (rho*u, rho*v) layouts.
        """
        return w[list(EulerSystem2D._SWAP)]

    def prim_to_cons(self, v):
        return prim_to_cons(v, self.gas)

    def cons_to_prim(self, u):
        return cons_to_prim(u, self.gas)

    def prim_flux(self, v):
        f = np.empty_like(v)
        f[0] = v[0] * v[1]
        f[1] = 0.5 * v[1] * v[1]
        f[2] = np.zeros_like(v[2])
        f[3] = v[3] * v[1]
        return f

    def cons_flux_from_prim(self, v):
        rho, u, vv, p = v[0], v[1], v[2], v[3]
        e = p / (self.gas.gamma - 1.0) + 0.5 * rho * (u * u + vv * vv)
        f = np.empty_like(v)
        f[0] = rho * u
        f[1] = rho * u * u + p
        f[2] = rho * u * vv
        f[3] = u * (e + p)
        return f

    def wave_bounds(self, v):
        c = np.sqrt(self.gas.gamma * v[-1] / v[0])
        return v[1] - c, v[1] + c

    def noncons_apply(self, vref, w):
        out = np.zeros_like(w)
        out[1] = -w[3] / vref[0]
        out[2] = -vref[1] * w[2]
        out[3] = -(self.gas.gamma - 1.0) * vref[3] * w[1]
        return out

    def char_frame(self, vcell):
        return _CharFrame(vcell[0], vcell[1], vcell[3], self.gas.gamma)

    def char_from_prim(self, frame, w):
        g = np.empty_like(w)
        g[0] = -w[1] * frame.inv_2c + w[3] * frame.inv_2gp
        g[1] = w[0] - w[3] * frame.inv_c2
        g[2] = w[2]
        g[3] = w[1] * frame.inv_2c + w[3] * frame.inv_2gp
        if frame.any_degenerate:
            g = np.where(frame.degenerate, w, g)
        return g

    def prim_from_char(self, frame, g):
        w = np.empty_like(g)
        s = g[0] + g[3]
        w[0] = frame.rho * s + g[1]
        w[1] = frame.c * (g[3] - g[0])
        w[2] = g[2]
        w[3] = frame.gp * s
        if frame.any_degenerate:
            w = np.where(frame.degenerate, g, w)
        return w


class LinearAdvection:
    """Scalar advection U_t + a U_x = 0 as an M=1 system.

    Conservative and primitive formulations coincide; B == 0 and the
    characteristic transform is the identity.  With a > 0 the PCCU flux
    reduces to second-order upwinding.
    """

    m = 1
    two_d = False

    def __init__(self, a: float):
        self.a = float(a)

    def prim_to_cons(self, v):
        return np.array(v, dtype=float, copy=True)

    def cons_to_prim(self, u):
        return np.array(u, dtype=float, copy=True)

    def prim_flux(self, v):
        return self.a * v

    def cons_flux_from_prim(self, v):
        return self.a * v

    def wave_bounds(self, v):
        lam = np.full_like(v[0], self.a)
        return lam, lam.copy()

    def noncons_apply(self, vref, w):
        return np.zeros_like(w)

    def char_frame(self, vcell):
        return None

    def char_from_prim(self, frame, w):
        return w.copy()

    def prim_from_char(self, frame, g):
        return g.copy()
