"""Exact reference solutions: 1-D Riemann problems, stationary normal shocks,
and the unsteady isentropic vortex.

The Riemann solver follows the classical pressure-function construction:
Newton iteration on f(p) = f_L(p) + f_R(p) + (u_R - u_L) started from the
two-rarefaction guess, with a bisection fallback, and a similarity sampler
xi = x/t for the full wave fan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import VacuumFormation
from .euler import GasConstants, sound_speed

__all__ = [
    "RiemannSolution",
    "solve_riemann",
    "stationary_shock_state",
    "vortex_exact",
    "shock_vortex_ic",
    "SHOCK_VORTEX_GEOMETRY",
]


def _pressure_fn(p, state, gas):
    """f_K(p) and its derivative for one side of the Riemann problem."""
    rho_k, _, p_k = state
    g = gas.gamma
    c_k = sound_speed(rho_k, p_k, gas)
    if p > p_k:  # shock branch
        a_k = 2.0 / ((g + 1.0) * rho_k)
        b_k = (g - 1.0) / (g + 1.0) * p_k
        root = np.sqrt(a_k / (p + b_k))
        f = (p - p_k) * root
        df = root * (1.0 - 0.5 * (p - p_k) / (b_k + p))
    else:  # rarefaction branch
        pr = p / p_k
        f = 2.0 * c_k / (g - 1.0) * (pr ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = pr ** (-(g + 1.0) / (2.0 * g)) / (rho_k * c_k)
    return f, df


@dataclass
class RiemannSolution:
    """Solved Riemann problem with star state and a similarity sampler."""

    left: np.ndarray
    right: np.ndarray
    gas: GasConstants
    p_star: float
    u_star: float
    left_wave: str   # 'shock' | 'rarefaction'
    right_wave: str
    iterations: int

    def sample(self, xi):
        """Primitive state (rho, u, p) at similarity coordinates xi = x/t.

        Vectorized over xi; returns an array of shape (3,) + xi.shape.
        """
        xi = np.asarray(xi, dtype=float)
        g = self.gas.gamma
        gm1, gp1 = g - 1.0, g + 1.0
        rho_l, u_l, p_l = self.left
        rho_r, u_r, p_r = self.right
        c_l = float(sound_speed(rho_l, p_l, self.gas))
        c_r = float(sound_speed(rho_r, p_r, self.gas))
        ps, us = self.p_star, self.u_star

        rho = np.empty_like(xi)
        u = np.empty_like(xi)
        p = np.empty_like(xi)

        left_of_contact = xi <= us

        # left wave
        if self.left_wave == "shock":
            rho_sl = rho_l * ((ps / p_l + gm1 / gp1) / (gm1 / gp1 * ps / p_l + 1.0))
            s_l = u_l - c_l * np.sqrt(gp1 / (2.0 * g) * ps / p_l + gm1 / (2.0 * g))
            pre = xi < s_l
            for arr, v_pre, v_star in ((rho, rho_l, rho_sl), (u, u_l, us), (p, p_l, ps)):
                arr[left_of_contact] = np.where(
                    pre[left_of_contact], v_pre, v_star
                )
        else:
            c_sl = c_l * (ps / p_l) ** (gm1 / (2.0 * g))
            rho_sl = rho_l * (ps / p_l) ** (1.0 / g)
            head, tail = u_l - c_l, us - c_sl
            # clip: slots outside the fan are discarded by the selects below
            base = np.maximum(2.0 / gp1 + gm1 / (gp1 * c_l) * (u_l - xi), 1e-300)
            fan_rho = rho_l * base ** (2.0 / gm1)
            fan_u = 2.0 / gp1 * (c_l + gm1 / 2.0 * u_l + xi)
            fan_p = p_l * base ** (2.0 * g / gm1)
            for arr, v_pre, fan, v_star in (
                (rho, rho_l, fan_rho, rho_sl),
                (u, u_l, fan_u, us),
                (p, p_l, fan_p, ps),
            ):
                vals = np.where(xi < head, v_pre, np.where(xi < tail, fan, v_star))
                arr[left_of_contact] = vals[left_of_contact]

        # right wave
        ro = ~left_of_contact
        if self.right_wave == "shock":
            rho_sr = rho_r * ((ps / p_r + gm1 / gp1) / (gm1 / gp1 * ps / p_r + 1.0))
            s_r = u_r + c_r * np.sqrt(gp1 / (2.0 * g) * ps / p_r + gm1 / (2.0 * g))
            post = xi > s_r
            for arr, v_post, v_star in ((rho, rho_r, rho_sr), (u, u_r, us), (p, p_r, ps)):
                arr[ro] = np.where(post[ro], v_post, v_star)
        else:
            c_sr = c_r * (ps / p_r) ** (gm1 / (2.0 * g))
            rho_sr = rho_r * (ps / p_r) ** (1.0 / g)
            head, tail = u_r + c_r, us + c_sr
            base = np.maximum(2.0 / gp1 - gm1 / (gp1 * c_r) * (u_r - xi), 1e-300)
            fan_rho = rho_r * base ** (2.0 / gm1)
            fan_u = 2.0 / gp1 * (-c_r + gm1 / 2.0 * u_r + xi)
            fan_p = p_r * base ** (2.0 * g / gm1)
            for arr, v_post, fan, v_star in (
                (rho, rho_r, fan_rho, rho_sr),
                (u, u_r, fan_u, us),
                (p, p_r, fan_p, ps),
            ):
                vals = np.where(xi > head, v_post, np.where(xi > tail, fan, v_star))
                arr[ro] = vals[ro]

        return np.stack([rho, u, p])


def solve_riemann(left, right, gas: GasConstants, tol: float = 1e-12,
                  max_iter: int = 100) -> RiemannSolution:
    """Exact solution of the 1-D Euler Riemann problem.

    left/right are primitive (rho, u, p).  Newton iterates the pressure
    function to |dp|/p < tol, falling back to bisection if it fails to
    converge; raises VacuumFormation when the positivity condition fails.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    g = gas.gamma
    rho_l, u_l, p_l = left
    rho_r, u_r, p_r = right
    c_l = float(sound_speed(rho_l, p_l, gas))
    c_r = float(sound_speed(rho_r, p_r, gas))
    du = u_r - u_l
    if 2.0 * (c_l + c_r) / (g - 1.0) <= du:
        raise VacuumFormation(
            f"two-rarefaction positivity condition violated (du={du:.6g})"
        )

    # two-rarefaction initial guess
    z = (g - 1.0) / (2.0 * g)
    p0 = ((c_l + c_r - 0.5 * (g - 1.0) * du) / (c_l / p_l ** z + c_r / p_r ** z)) ** (
        1.0 / z
    )
    p0 = max(p0, 1e-14 * min(p_l, p_r))

    def f_total(p):
        fl, dfl = _pressure_fn(p, left, gas)
        fr, dfr = _pressure_fn(p, right, gas)
        return fl + fr + du, dfl + dfr

    p = p0
    converged = False
    its = 0
    for its in range(1, max_iter + 1):
        val, dval = f_total(p)
        dp = val / dval
        p_new = p - dp
        if p_new <= 0.0:
            p_new = 0.5 * p
        if abs(p_new - p) < tol * p_new:
            p = p_new
            converged = True
            break
        p = p_new
    if not converged:
        lo, hi = 1e-14 * min(p_l, p_r), 10.0 * max(p_l, p_r, p0)
        while f_total(hi)[0] < 0.0:
            hi *= 10.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f_total(mid)[0] > 0.0:
                hi = mid
            else:
                lo = mid
            if hi - lo < tol * mid:
                break
        p = 0.5 * (lo + hi)

    fl, _ = _pressure_fn(p, left, gas)
    fr, _ = _pressure_fn(p, right, gas)
    u_star = 0.5 * (u_l + u_r) + 0.5 * (fr - fl)
    return RiemannSolution(
        left=left,
        right=right,
        gas=gas,
        p_star=float(p),
        u_star=float(u_star),
        left_wave="shock" if p > p_l else "rarefaction",
        right_wave="shock" if p > p_r else "rarefaction",
        iterations=its,
    )


def stationary_shock_state(left, mach_s: float, gas: GasConstants):
    """Post-shock state of a stationary normal shock with upstream Mach M_s.

        rho_2 = (g+1) M^2 / ((g-1) M^2 + 2) * rho_1
        u_2   = ((g-1) M^2 + 2) / ((g+1) M^2) * u_1
        p_2   = (2 g M^2 - (g-1)) / (g+1) * p_1

    left is a 2-D primitive state (rho, u, v, p) with v ignored; the returned
    state has zero transverse velocity.
    """
    left = np.asarray(left, dtype=float)
    g = gas.gamma
    m2 = mach_s * mach_s
    rho = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0) * left[0]
    u = ((g - 1.0) * m2 + 2.0) / ((g + 1.0) * m2) * left[1]
    p = (2.0 * g * m2 - (g - 1.0)) / (g + 1.0) * left[-1]
    return np.array([rho, u, 0.0, p])


def vortex_exact(x, y, t, gas: GasConstants, bounds=(-10.0, 10.0)):
    """Isentropic vortex advected diagonally at unit speed, periodic wrap.

        kappa = 5/(2 pi) exp((1 - x^2 - y^2)/2)
        rho = (1 - (g-1) kappa^2 / (2 g))^(1/(g-1)),  p = rho^g
        u = 1 - kappa y,  v = 1 + kappa x

    evaluated at the wrapped point (x - t, y - t).
    """
    lo, hi = bounds
    span = hi - lo
    xs = lo + np.mod(np.asarray(x, dtype=float) - t - lo, span)
    ys = lo + np.mod(np.asarray(y, dtype=float) - t - lo, span)
    g = gas.gamma
    kappa = 5.0 / (2.0 * np.pi) * np.exp(0.5 * (1.0 - xs * xs - ys * ys))
    rho = (1.0 - (g - 1.0) * kappa * kappa / (2.0 * g)) ** (1.0 / (g - 1.0))
    p = rho ** g
    u = 1.0 - kappa * ys
    v = 1.0 + kappa * xs
    return np.stack(np.broadcast_arrays(rho, u, v, p))


# Shock-vortex interaction geometry: vortex core/annulus radii, center,
# vortex and shock Mach numbers, shock abscissa, specific gas constant.
SHOCK_VORTEX_GEOMETRY = {
    "a": 0.075,
    "b": 0.175,
    "center": (0.25, 0.5),
    "mach_vortex": 0.9,
    "mach_shock": 1.5,
    "x_shock": 0.5,
    "r_gas": 287.0,
}


def shock_vortex_ic(x, y, gas: GasConstants, geom=None):
    """Initial primitive state of the shock-vortex interaction problem.

    Left of the shock: uniform supersonic background with an isentropic
    vortex (rigid core r<=a, matched annulus a<r<b) superposed; right of the
    shock: the stationary post-shock state.  The temperature constants A and
    B enforce continuity of T at r=a and r=b; the gas constant R cancels in
    the p and rho ratios.
    """
    if geom is None:
        geom = SHOCK_VORTEX_GEOMETRY
    g = gas.gamma
    a, b = geom["a"], geom["b"]
    xc, yc = geom["center"]
    r_gas = geom["r_gas"]
    m_v, m_s = geom["mach_vortex"], geom["mach_shock"]

    rho3, u3, v3, p3 = 1.0, np.sqrt(g) * m_s, 0.0, 1.0
    state4 = stationary_shock_state(np.array([rho3, u3, v3, p3]), m_s, gas)
    t3 = p3 / (rho3 * r_gas)
    v_m = m_v * np.sqrt(g)

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dxv, dyv = x - xc, y - yc
    r = np.sqrt(dxv * dxv + dyv * dyv)
    theta = np.arctan2(dyv, dxv)

    # angular velocity profile, zero outside r >= b
    with np.errstate(divide="ignore", invalid="ignore"):
        v_theta = np.where(
            r <= a,
            v_m * r / a,
            np.where(r < b, v_m * a / (a * a - b * b) * (r - b * b / np.maximum(r, 1e-300)), 0.0),
        )

    # temperature profile with matching constants
    coef = (g - 1.0) / (r_gas * g) * v_m * v_m
    ann = a * a / ((a * a - b * b) ** 2)
    big_b = t3 - coef * ann * (0.5 * b * b - 2.0 * b * b * np.log(b) - 0.5 * b * b)
    big_a = (
        big_b
        + coef * ann * (0.5 * a * a - 2.0 * b * b * np.log(a) - 0.5 * b ** 4 / (a * a))
        - 0.5 * coef
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r = np.log(np.maximum(r, 1e-300))
        t_inner = big_a + coef * (0.5 * r * r / (a * a))
        t_annulus = big_b + coef * ann * (
            0.5 * r * r - 2.0 * b * b * log_r - 0.5 * b ** 4 / np.maximum(r * r, 1e-300)
        )
    temp = np.where(r <= a, t_inner, np.where(r < b, t_annulus, t3))

    ratio = temp / t3
    rho_v = rho3 * ratio ** (1.0 / (g - 1.0))
    p_v = p3 * ratio ** (g / (g - 1.0))
    u_v = u3 - v_theta * np.sin(theta)
    v_v = v3 + v_theta * np.cos(theta)

    right = x >= geom["x_shock"]
    rho = np.where(right, state4[0], rho_v)
    u = np.where(right, state4[1], u_v)
    v = np.where(right, state4[2], v_v)
    p = np.where(right, state4[3], p_v)
    return np.stack(np.broadcast_arrays(rho, u, v, p))
