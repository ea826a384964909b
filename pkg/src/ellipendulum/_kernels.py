"""Compiled fixed-step RK4 kernels.

All kernels integrate

    theta' = v
    v'     = -gamma*v - (1 + p*cos(omega*t))*sin(theta)
             - e*p*cos(omega*t - alpha)*cos(theta)

with a classical 4th order Runge-Kutta step of size h.  The drive
coefficients are tabulated once on the half-step grid of a single period
and reused for every subsequent period, so the discrete one-period map is
exactly the same map every period (no phase drift from accumulating
omega*t in floating point).

The variational kernel advances the 2x2 matrix M alongside the state with
the same RK4 stages, which makes the returned M the exact derivative of
the discrete map (up to roundoff), not merely an approximation of the
continuous monodromy.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

BLOWUP_LIMIT = 1.0e6


@njit(cache=True)
def drive_tables(p, omega, e, alpha, t0, h, n_steps):
    """Tabulate cy = 1 + p*cos(omega*t) and cx = e*p*cos(omega*t - alpha)
    on the half-step grid t0 + j*h/2, j = 0..2*n_steps."""
    m = 2 * n_steps + 1
    cy = np.empty(m)
    cx = np.empty(m)
    for j in range(m):
        t = t0 + 0.5 * h * j
        cy[j] = 1.0 + p * math.cos(omega * t)
        cx[j] = e * p * math.cos(omega * t - alpha)
    return cy, cx


@njit(cache=True)
def rk4_periods(theta, v, gamma, cy, cx, h, spp, n_periods):
    """Advance (theta, v) by n_periods forcing periods of spp steps each.

    Returns (theta, v, done, ok); ok is False when |v| exceeded the
    blow-up limit or a non-finite value appeared, done is the index of
    the period in which the failure was detected.
    """
    for period in range(n_periods):
        for i in range(spp):
            c0 = cy[2 * i]
            c1 = cy[2 * i + 1]
            c2 = cy[2 * i + 2]
            d0 = cx[2 * i]
            d1 = cx[2 * i + 1]
            d2 = cx[2 * i + 2]
            k1 = -gamma * v - c0 * math.sin(theta) - d0 * math.cos(theta)
            x2 = theta + 0.5 * h * v
            v2 = v + 0.5 * h * k1
            k2 = -gamma * v2 - c1 * math.sin(x2) - d1 * math.cos(x2)
            x3 = theta + 0.5 * h * v2
            v3 = v + 0.5 * h * k2
            k3 = -gamma * v3 - c1 * math.sin(x3) - d1 * math.cos(x3)
            x4 = theta + h * v3
            v4 = v + h * k3
            k4 = -gamma * v4 - c2 * math.sin(x4) - d2 * math.cos(x4)
            theta = theta + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not (math.isfinite(theta) and abs(v) <= BLOWUP_LIMIT):
            return theta, v, period, False
    return theta, v, n_periods, True


@njit(cache=True)
def rk4_steps(theta, v, gamma, cy, cx, h, n_steps):
    """Advance (theta, v) by n_steps RK4 steps (drive tables cover them).

    Returns (theta, v, done, ok) with done the index of the failing step."""
    for i in range(n_steps):
        c0 = cy[2 * i]
        c1 = cy[2 * i + 1]
        c2 = cy[2 * i + 2]
        d0 = cx[2 * i]
        d1 = cx[2 * i + 1]
        d2 = cx[2 * i + 2]
        k1 = -gamma * v - c0 * math.sin(theta) - d0 * math.cos(theta)
        x2 = theta + 0.5 * h * v
        v2 = v + 0.5 * h * k1
        k2 = -gamma * v2 - c1 * math.sin(x2) - d1 * math.cos(x2)
        x3 = theta + 0.5 * h * v2
        v3 = v + 0.5 * h * k2
        k3 = -gamma * v3 - c1 * math.sin(x3) - d1 * math.cos(x3)
        x4 = theta + h * v3
        v4 = v + h * k3
        k4 = -gamma * v4 - c2 * math.sin(x4) - d2 * math.cos(x4)
        theta = theta + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not (math.isfinite(theta) and abs(v) <= BLOWUP_LIMIT):
            return theta, v, i, False
    return theta, v, n_steps, True


@njit(cache=True)
def rk4_var_periods(theta, v, m11, m21, m12, m22, gamma, cy, cx, h, spp, n_periods):
    """Advance state and variational matrix together.

    The matrix obeys M' = J(theta(t), t) M with J = [[0, 1], [j21, -gamma]],
    j21 = -cy*cos(theta) + cx*sin(theta); both are advanced with the same
    RK4 stages so M is the exact Jacobian of the discrete flow.
    """
    for period in range(n_periods):
        for i in range(spp):
            c0 = cy[2 * i]
            c1 = cy[2 * i + 1]
            c2 = cy[2 * i + 2]
            d0 = cx[2 * i]
            d1 = cx[2 * i + 1]
            d2 = cx[2 * i + 2]

            s = math.sin(theta)
            c = math.cos(theta)
            k1 = -gamma * v - c0 * s - d0 * c
            j = -c0 * c + d0 * s
            a11_1 = m21
            a21_1 = j * m11 - gamma * m21
            a12_1 = m22
            a22_1 = j * m12 - gamma * m22

            x2 = theta + 0.5 * h * v
            v2 = v + 0.5 * h * k1
            n11 = m11 + 0.5 * h * a11_1
            n21 = m21 + 0.5 * h * a21_1
            n12 = m12 + 0.5 * h * a12_1
            n22 = m22 + 0.5 * h * a22_1
            s = math.sin(x2)
            c = math.cos(x2)
            k2 = -gamma * v2 - c1 * s - d1 * c
            j = -c1 * c + d1 * s
            a11_2 = n21
            a21_2 = j * n11 - gamma * n21
            a12_2 = n22
            a22_2 = j * n12 - gamma * n22

            x3 = theta + 0.5 * h * v2
            v3 = v + 0.5 * h * k2
            n11 = m11 + 0.5 * h * a11_2
            n21 = m21 + 0.5 * h * a21_2
            n12 = m12 + 0.5 * h * a12_2
            n22 = m22 + 0.5 * h * a22_2
            s = math.sin(x3)
            c = math.cos(x3)
            k3 = -gamma * v3 - c1 * s - d1 * c
            j = -c1 * c + d1 * s
            a11_3 = n21
            a21_3 = j * n11 - gamma * n21
            a12_3 = n22
            a22_3 = j * n12 - gamma * n22

            x4 = theta + h * v3
            v4 = v + h * k3
            n11 = m11 + h * a11_3
            n21 = m21 + h * a21_3
            n12 = m12 + h * a12_3
            n22 = m22 + h * a22_3
            s = math.sin(x4)
            c = math.cos(x4)
            k4 = -gamma * v4 - c2 * s - d2 * c
            j = -c2 * c + d2 * s
            a11_4 = n21
            a21_4 = j * n11 - gamma * n21
            a12_4 = n22
            a22_4 = j * n12 - gamma * n22

            theta = theta + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            m11 = m11 + (h / 6.0) * (a11_1 + 2.0 * a11_2 + 2.0 * a11_3 + a11_4)
            m21 = m21 + (h / 6.0) * (a21_1 + 2.0 * a21_2 + 2.0 * a21_3 + a21_4)
            m12 = m12 + (h / 6.0) * (a12_1 + 2.0 * a12_2 + 2.0 * a12_3 + a12_4)
            m22 = m22 + (h / 6.0) * (a22_1 + 2.0 * a22_2 + 2.0 * a22_3 + a22_4)
        if not (math.isfinite(theta) and abs(v) <= BLOWUP_LIMIT):
            return theta, v, m11, m21, m12, m22, period, False
    return theta, v, m11, m21, m12, m22, n_periods, True


@njit(cache=True)
def rk4_record_strobes(theta, v, gamma, cy, cx, h, spp, n_transient, n_record, out):
    """Discard n_transient strobe points, then write the next n_record
    (theta, v) strobe pairs into out (shape (n_record, 2)).

    Returns (theta, v, periods_done, ok)."""
    theta, v, done, ok = rk4_periods(theta, v, gamma, cy, cx, h, spp, n_transient)
    if not ok:
        return theta, v, done, False
    for r in range(n_record):
        theta, v, _, ok = rk4_periods(theta, v, gamma, cy, cx, h, spp, 1)
        out[r, 0] = theta
        out[r, 1] = v
        if not ok:
            return theta, v, n_transient + r, False
    return theta, v, n_transient + n_record, True


@njit(cache=True)
def rk4_sample_period(theta, v, gamma, cy, cx, h, spp, out_theta, out_v):
    """Integrate one period, recording the state at every step boundary.

    out_theta/out_v have length spp + 1 and include the initial state."""
    out_theta[0] = theta
    out_v[0] = v
    for i in range(spp):
        c0 = cy[2 * i]
        c1 = cy[2 * i + 1]
        c2 = cy[2 * i + 2]
        d0 = cx[2 * i]
        d1 = cx[2 * i + 1]
        d2 = cx[2 * i + 2]
        k1 = -gamma * v - c0 * math.sin(theta) - d0 * math.cos(theta)
        x2 = theta + 0.5 * h * v
        v2 = v + 0.5 * h * k1
        k2 = -gamma * v2 - c1 * math.sin(x2) - d1 * math.cos(x2)
        x3 = theta + 0.5 * h * v2
        v3 = v + 0.5 * h * k2
        k3 = -gamma * v3 - c1 * math.sin(x3) - d1 * math.cos(x3)
        x4 = theta + h * v3
        v4 = v + h * k3
        k4 = -gamma * v4 - c2 * math.sin(x4) - d2 * math.cos(x4)
        theta = theta + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out_theta[i + 1] = theta
        out_v[i + 1] = v
    return theta, v


@njit(cache=True)
def ensemble_periods(theta, v, p_arr, gamma, omega, e, alpha, t0, h, spp, n_periods):
    """Advance an ensemble of states by n_periods periods in place.

    p_arr holds the forcing amplitude per member (pass a length-1 array
    broadcast upstream for a shared amplitude).  Blown-up members are
    frozen at non-finite values instead of aborting the batch.
    """
    n = theta.shape[0]
    share_p = p_arr.shape[0] == 1
    m = 2 * spp + 1
    cos_y = np.empty(m)
    cos_x = np.empty(m)
    for j in range(m):
        t = t0 + 0.5 * h * j
        cos_y[j] = math.cos(omega * t)
        cos_x[j] = math.cos(omega * t - alpha)
    for mbr in range(n):
        x = theta[mbr]
        y = v[mbr]
        if not math.isfinite(x):
            continue
        p = p_arr[0] if share_p else p_arr[mbr]
        ok = True
        for _ in range(n_periods):
            for i in range(spp):
                c0 = 1.0 + p * cos_y[2 * i]
                c1 = 1.0 + p * cos_y[2 * i + 1]
                c2 = 1.0 + p * cos_y[2 * i + 2]
                d0 = e * p * cos_x[2 * i]
                d1 = e * p * cos_x[2 * i + 1]
                d2 = e * p * cos_x[2 * i + 2]
                k1 = -gamma * y - c0 * math.sin(x) - d0 * math.cos(x)
                x2 = x + 0.5 * h * y
                y2 = y + 0.5 * h * k1
                k2 = -gamma * y2 - c1 * math.sin(x2) - d1 * math.cos(x2)
                x3 = x + 0.5 * h * y2
                y3 = y + 0.5 * h * k2
                k3 = -gamma * y3 - c1 * math.sin(x3) - d1 * math.cos(x3)
                x4 = x + h * y3
                y4 = y + h * k3
                k4 = -gamma * y4 - c2 * math.sin(x4) - d2 * math.cos(x4)
                x = x + (h / 6.0) * (y + 2.0 * y2 + 2.0 * y3 + y4)
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not (math.isfinite(x) and abs(y) <= BLOWUP_LIMIT):
                ok = False
                break
        if ok:
            theta[mbr] = x
            v[mbr] = y
        else:
            theta[mbr] = np.nan
            v[mbr] = np.nan
