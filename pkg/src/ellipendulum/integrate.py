"""Fixed-step integration of the flow and of the variational equations.

The step size is locked to the forcing period (h = T/steps_per_period) so
stroboscopic section times are hit exactly, with no interpolation error.
The drive coefficients are tabulated once per period and reused, making
the one-period map exactly the same map every period.

The stroboscopic map and its Jacobian (the monodromy matrix) are the
basis for every stability statement downstream: the variational matrix is
advanced through the same RK4 stages as the state, so the returned
monodromy is the exact derivative of the discrete map up to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .model import PendulumParams, State

__all__ = [
    "IntegratorSettings",
    "StrobeResult",
    "BlowUpError",
    "flow",
    "strobe",
    "record_strobes",
    "refine_settings",
    "sample_period",
    "trajectory",
    "ensemble_periods",
]

BLOWUP_LIMIT = _kernels.BLOWUP_LIMIT


class BlowUpError(RuntimeError):
    """Raised when an integration produced a non-finite state or |v|
    beyond the blow-up limit.  Physical solutions of this system have
    |v| of order omega, so this signals bad inputs, not stiff dynamics."""

    def __init__(self, t_fail: float, theta: float, v: float):
        super().__init__(f"blow-up at t = {t_fail:.6g} (theta={theta:.3g}, v={v:.3g})")
        self.t_fail = t_fail


@dataclass(frozen=True)
class IntegratorSettings:
    """steps_per_period: RK4 steps per forcing period (>= 64).
    method: integration order tag; only the classical explicit RK4 is
    implemented."""

    steps_per_period: int = 1024
    method: str = "rk4"

    def __post_init__(self):
        if self.steps_per_period < 64:
            raise ValueError("steps_per_period must be at least 64")
        if self.method != "rk4":
            raise ValueError(f"unknown integration method {self.method!r}")

    def doubled(self) -> "IntegratorSettings":
        return IntegratorSettings(2 * self.steps_per_period, self.method)


@dataclass(frozen=True)
class StrobeResult:
    """State after k forcing periods, optionally with the monodromy
    matrix DP^k.  det(monodromy) equals exp(-gamma*k*T) up to the
    integrator's discretisation error (the velocity divergence of the
    flow being the constant -gamma)."""

    state: State
    monodromy: np.ndarray | None = None


DEFAULT_SETTINGS = IntegratorSettings()


@lru_cache(maxsize=256)
def _tables(gamma, p, omega, e, alpha, t0, h, n_steps):
    cy, cx = _kernels.drive_tables(p, omega, e, alpha, t0, h, n_steps)
    cy.setflags(write=False)
    cx.setflags(write=False)
    return cy, cx


def _period_tables(params: PendulumParams, t0: float, settings: IntegratorSettings):
    h = params.period / settings.steps_per_period
    cy, cx = _tables(params.gamma, params.p, params.omega, params.e, params.alpha,
                     t0, h, settings.steps_per_period)
    return cy, cx, h


def _rk4_single(params: PendulumParams, theta, v, t, h):
    """One off-grid RK4 step with directly evaluated drive coefficients."""
    g, p, om, e, al = params.gamma, params.p, params.omega, params.e, params.alpha

    def acc(x, y, tt):
        cy = 1.0 + p * math.cos(om * tt)
        cx = e * p * math.cos(om * tt - al)
        return -g * y - cy * math.sin(x) - cx * math.cos(x)

    k1 = acc(theta, v, t)
    x2, v2 = theta + 0.5 * h * v, v + 0.5 * h * k1
    k2 = acc(x2, v2, t + 0.5 * h)
    x3, v3 = theta + 0.5 * h * v2, v + 0.5 * h * k2
    k3 = acc(x3, v3, t + 0.5 * h)
    x4, v4 = theta + h * v3, v + h * k3
    k4 = acc(x4, v4, t + h)
    return (theta + (h / 6.0) * (v + 2 * v2 + 2 * v3 + v4),
            v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def flow(params: PendulumParams, s0: State, t_final: float,
         settings: IntegratorSettings = DEFAULT_SETTINGS) -> State:
    """Integrate from s0 to time t_final (t_final >= s0.t)."""
    if t_final < s0.t:
        raise ValueError("t_final must not precede the initial time")
    if t_final == s0.t:
        return s0
    spp = settings.steps_per_period
    cy, cx, h = _period_tables(params, s0.t, settings)
    span = t_final - s0.t
    n_exact = span / h
    n_steps = round(n_exact)
    partial = abs(n_exact - n_steps) > 1e-9
    if partial:
        n_steps = int(math.floor(n_exact))

    theta, v = s0.theta, s0.v
    n_periods, rem = divmod(n_steps, spp)
    if n_periods:
        theta, v, done, ok = _kernels.rk4_periods(theta, v, params.gamma, cy, cx,
                                                  h, spp, n_periods)
        if not ok:
            raise BlowUpError(s0.t + (done + 1) * params.period, theta, v)
    if rem:
        theta, v, done, ok = _kernels.rk4_steps(theta, v, params.gamma, cy, cx, h, rem)
        if not ok:
            raise BlowUpError(s0.t + n_periods * params.period + (done + 1) * h, theta, v)
    if partial:
        t_now = s0.t + n_steps * h
        theta, v = _rk4_single(params, theta, v, t_now, t_final - t_now)
        if not (math.isfinite(theta) and abs(v) <= BLOWUP_LIMIT):
            raise BlowUpError(t_final, theta, v)
    return State(theta, v, t_final)


def strobe(params: PendulumParams, s0: State, k: int = 1,
           settings: IntegratorSettings = DEFAULT_SETTINGS,
           want_jacobian: bool = False) -> StrobeResult:
    """Advance by exactly k forcing periods; optionally carry the
    variational matrix to obtain the monodromy DP^k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    spp = settings.steps_per_period
    cy, cx, h = _period_tables(params, s0.t, settings)
    if want_jacobian:
        th, v, m11, m21, m12, m22, done, ok = _kernels.rk4_var_periods(
            s0.theta, s0.v, 1.0, 0.0, 0.0, 1.0, params.gamma, cy, cx, h, spp, k)
        if not ok:
            raise BlowUpError(s0.t + (done + 1) * params.period, th, v)
        M = np.array([[m11, m12], [m21, m22]])
        return StrobeResult(State(th, v, s0.t + k * params.period), M)
    th, v, done, ok = _kernels.rk4_periods(s0.theta, s0.v, params.gamma, cy, cx, h, spp, k)
    if not ok:
        raise BlowUpError(s0.t + (done + 1) * params.period, th, v)
    return StrobeResult(State(th, v, s0.t + k * params.period), None)


def record_strobes(params: PendulumParams, s0: State, n_transient: int = 1000,
                   n_record: int = 64,
                   settings: IntegratorSettings = DEFAULT_SETTINGS) -> list[State]:
    """Discard n_transient strobe points and return the next n_record.

    theta is reported on the lift (not wrapped).  The default transient
    of 1000 forcing periods is the brute-force protocol used throughout
    the exploration routines."""
    if n_transient < 0 or n_record < 1:
        raise ValueError("need n_transient >= 0 and n_record >= 1")
    spp = settings.steps_per_period
    cy, cx, h = _period_tables(params, s0.t, settings)
    out = np.empty((n_record, 2))
    th, v, done, ok = _kernels.rk4_record_strobes(
        s0.theta, s0.v, params.gamma, cy, cx, h, spp, n_transient, n_record, out)
    if not ok:
        raise BlowUpError(s0.t + (done + 1) * params.period, th, v)
    T = params.period
    return [State(out[i, 0], out[i, 1], s0.t + (n_transient + i + 1) * T)
            for i in range(n_record)]


def refine_settings(params: PendulumParams, s0: State,
                    settings: IntegratorSettings = DEFAULT_SETTINGS,
                    k: int = 1, tol: float = 1e-9,
                    max_doublings: int = 6) -> IntegratorSettings:
    """Convergence guard: double steps_per_period until two successive
    refinements of the k-period strobe endpoint agree to tol."""
    current = settings
    a = strobe(params, s0, k, current).state
    for _ in range(max_doublings):
        finer = current.doubled()
        b = strobe(params, s0, k, finer).state
        if max(abs(a.theta - b.theta), abs(a.v - b.v)) <= tol:
            return current
        current, a = finer, b
    return current


def sample_period(params: PendulumParams, s0: State,
                  settings: IntegratorSettings = DEFAULT_SETTINGS):
    """Integrate one forcing period recording every step.

    Returns (t, theta, v) arrays of length steps_per_period + 1."""
    spp = settings.steps_per_period
    cy, cx, h = _period_tables(params, s0.t, settings)
    out_th = np.empty(spp + 1)
    out_v = np.empty(spp + 1)
    _kernels.rk4_sample_period(s0.theta, s0.v, params.gamma, cy, cx, h, spp,
                               out_th, out_v)
    t = s0.t + h * np.arange(spp + 1)
    return t, out_th, out_v


def trajectory(params: PendulumParams, s0: State, n_periods: int,
               settings: IntegratorSettings = DEFAULT_SETTINGS):
    """Dense trajectory over an integer number of forcing periods.

    Returns (t, theta, v) arrays sampled at every integration step."""
    ts, ths, vs = [], [], []
    s = s0
    for i in range(n_periods):
        t, th, v = sample_period(params, s, settings)
        if not (np.all(np.isfinite(th)) and np.all(np.abs(v) <= BLOWUP_LIMIT)):
            raise BlowUpError(t[-1], th[-1], v[-1])
        keep = slice(None) if i == n_periods - 1 else slice(None, -1)
        ts.append(t[keep])
        ths.append(th[keep])
        vs.append(v[keep])
        s = State(th[-1], v[-1], s.t + params.period)
    return np.concatenate(ts), np.concatenate(ths), np.concatenate(vs)


def ensemble_periods(params: PendulumParams, theta: np.ndarray, v: np.ndarray,
                     t0: float, n_periods: int,
                     settings: IntegratorSettings = DEFAULT_SETTINGS,
                     p_values: np.ndarray | None = None) -> None:
    """Advance a whole ensemble of initial conditions in place.

    Used by the brute-force exploration routines; members that blow up
    are set to NaN rather than aborting the batch.  p_values optionally
    assigns a forcing amplitude per member (for amplitude sweeps)."""
    if p_values is None:
        p_arr = np.array([params.p])
    else:
        p_arr = np.ascontiguousarray(p_values, dtype=float)
        if p_arr.shape != theta.shape:
            raise ValueError("p_values must match the ensemble shape")
    h = params.period / settings.steps_per_period
    _kernels.ensemble_periods(theta, v, p_arr, params.gamma, params.omega,
                              params.e, params.alpha, t0, h,
                              settings.steps_per_period, n_periods)
