"""Exact Riemann solution for the 1D monatomic Euler equations.

Test oracle, kept independent of the package under test. Star-region values
are found by Newton iteration on the standard pressure function and the full
similarity solution is sampled from them.

Frozen values for the (1, 0, 1) / (0.125, 0, 0.1) tube at gamma = 5/3,
computed from this solver and pinned so regressions in the iteration itself
are caught:
    p_star      = 0.2939451876660179
    u_star      = 0.8411948521688084
    rho_star_l  = 0.47968905872091755
    rho_star_r  = 0.229805749311947
    shock_speed = 1.8444733670538207
"""

from __future__ import annotations

import numpy as np

GAMMA = 5.0 / 3.0

SOD_LEFT = (1.0, 0.0, 1.0)  # rho, u, p
SOD_RIGHT = (0.125, 0.0, 0.1)

SOD_P_STAR = 0.2939451876660179
SOD_U_STAR = 0.8411948521688084
SOD_RHO_STAR_L = 0.47968905872091755
SOD_RHO_STAR_R = 0.229805749311947
SOD_SHOCK_SPEED = 1.8444733670538207


def _pressure_fn(p, rho_k, p_k, c_k, g=GAMMA):
    """Toro's f_K and its derivative for one side of the tube."""
    if p > p_k:  # shock branch
        a = 2.0 / ((g + 1.0) * rho_k)
        b = (g - 1.0) / (g + 1.0) * p_k
        root = np.sqrt(a / (p + b))
        f = (p - p_k) * root
        df = root * (1.0 - 0.5 * (p - p_k) / (p + b))
    else:  # rarefaction branch
        f = 2.0 * c_k / (g - 1.0) * ((p / p_k) ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = (p / p_k) ** (-(g + 1.0) / (2.0 * g)) / (rho_k * c_k)
    return f, df


def star_state(left, right, g=GAMMA):
    """(p_star, u_star) for states (rho, u, p)."""
    rho_l, u_l, p_l = left
    rho_r, u_r, p_r = right
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    p = max(0.5 * (p_l + p_r), 1e-12)
    for _ in range(100):
        f_l, df_l = _pressure_fn(p, rho_l, p_l, c_l, g)
        f_r, df_r = _pressure_fn(p, rho_r, p_r, c_r, g)
        step = (f_l + f_r + u_r - u_l) / (df_l + df_r)
        p_new = max(p - step, 1e-12)
        if abs(p_new - p) < 1e-14 * p:
            p = p_new
            break
        p = p_new
    u = 0.5 * (u_l + u_r) + 0.5 * (
        _pressure_fn(p, rho_r, p_r, c_r, g)[0] - _pressure_fn(p, rho_l, p_l, c_l, g)[0]
    )
    return p, u


def sample(xi, left, right, g=GAMMA):
    """Solution (rho, u, p) at similarity coordinates xi = x/t (array)."""
    rho_l, u_l, p_l = left
    rho_r, u_r, p_r = right
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    p_s, u_s = star_state(left, right, g)

    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    gm, gp = g - 1.0, g + 1.0
    for i, s in enumerate(xi):
        if s <= u_s:  # left of contact
            if p_s > p_l:  # left shock
                sl = u_l - c_l * np.sqrt(gp / (2 * g) * p_s / p_l + gm / (2 * g))
                if s < sl:
                    rho[i], u[i], p[i] = rho_l, u_l, p_l
                else:
                    rho[i] = rho_l * (p_s / p_l + gm / gp) / (gm / gp * p_s / p_l + 1.0)
                    u[i], p[i] = u_s, p_s
            else:  # left rarefaction
                c_sl = c_l * (p_s / p_l) ** (gm / (2 * g))
                head, tail = u_l - c_l, u_s - c_sl
                if s < head:
                    rho[i], u[i], p[i] = rho_l, u_l, p_l
                elif s > tail:
                    rho[i] = rho_l * (p_s / p_l) ** (1.0 / g)
                    u[i], p[i] = u_s, p_s
                else:  # fan interior
                    u[i] = (2.0 / gp) * (c_l + gm / 2.0 * u_l + s)
                    c = c_l - gm / 2.0 * (u[i] - u_l)
                    rho[i] = rho_l * (c / c_l) ** (2.0 / gm)
                    p[i] = p_l * (c / c_l) ** (2.0 * g / gm)
        else:  # right of contact
            if p_s > p_r:  # right shock
                sr = u_r + c_r * np.sqrt(gp / (2 * g) * p_s / p_r + gm / (2 * g))
                if s > sr:
                    rho[i], u[i], p[i] = rho_r, u_r, p_r
                else:
                    rho[i] = rho_r * (p_s / p_r + gm / gp) / (gm / gp * p_s / p_r + 1.0)
                    u[i], p[i] = u_s, p_s
            else:  # right rarefaction
                c_sr = c_r * (p_s / p_r) ** (gm / (2 * g))
                head, tail = u_r + c_r, u_s + c_sr
                if s > head:
                    rho[i], u[i], p[i] = rho_r, u_r, p_r
                elif s < tail:
                    rho[i] = rho_r * (p_s / p_r) ** (1.0 / g)
                    u[i], p[i] = u_s, p_s
                else:
                    u[i] = (2.0 / gp) * (-c_r + gm / 2.0 * u_r + s)
                    c = c_r + gm / 2.0 * (u[i] - u_r)
                    rho[i] = rho_r * (c / c_r) ** (2.0 / gm)
                    p[i] = p_r * (c / c_r) ** (2.0 * g / gm)
    return rho, u, p


def sod_profile(x, t, x0=0.0):
    """Sod tube solution (rho, u, p) at positions x, time t > 0."""
    return sample((np.asarray(x) - x0) / t, SOD_LEFT, SOD_RIGHT)
