"""Model definitions for the elliptically driven pendulum.

The dimensionless equation of motion is

    theta'' + gamma*theta' + (1 + p*cos(omega*t))*sin(theta)
            + e*p*cos(omega*t - alpha)*cos(theta) = 0

written as a first order system in (theta, v) with v = theta'.  For
alpha = pi/2 the horizontal drive term reduces to e*p*sin(omega*t)*cos(theta),
which is the upright-ellipse form.  e = 0 recovers the classical
parametrically excited pendulum.

Sign convention: with e > 0 and alpha = pi/2 the pivot motion favours
rotations with negative angular velocity (the rotation sense that follows
the base around the ellipse).  This orientation is a modelling choice tied
to the geometry of the driving; flipping the sign of e mirrors it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PendulumParams",
    "State",
    "PhysicalParams",
    "ForcingSpec",
    "eval_rhs",
    "eval_rhs_general",
    "eval_jacobian",
    "nondimensionalize",
    "reflect",
    "wrap_to_pi",
    "params_from_json",
]


def wrap_to_pi(theta):
    """Reduce an angle (scalar or array) to the interval [-pi, pi)."""
    if np.ndim(theta):
        return (np.asarray(theta) + np.pi) % (2 * np.pi) - np.pi
    return (theta + math.pi) % (2 * math.pi) - math.pi


def _require_finite(name, *values):
    for x in values:
        if not math.isfinite(x):
            raise ValueError(f"invalid state: non-finite {name}")


@dataclass(frozen=True)
class PendulumParams:
    """Dimensionless parameter vector (gamma, p, omega, e, alpha).

    gamma: viscous damping (>= 0)
    p:     scaled excitation amplitude (>= 0)
    omega: scaled excitation frequency (> 0)
    e:     ellipticity, ratio of horizontal to vertical first-harmonic
           diameters of the pivot path (any real; sign mirrors the system)
    alpha: phase shift between horizontal and vertical first harmonics,
           stored in [-pi, pi] (default pi/2, upright ellipse)
    """

    gamma: float
    p: float
    omega: float
    e: float = 0.0
    alpha: float = math.pi / 2

    def __post_init__(self):
        _require_finite("parameter", self.gamma, self.p, self.omega, self.e, self.alpha)
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.p < 0:
            raise ValueError("p must be non-negative")
        a = self.alpha
        if not (-math.pi <= a <= math.pi):
            a = (a + math.pi) % (2 * math.pi) - math.pi
            object.__setattr__(self, "alpha", a)

    @property
    def period(self) -> float:
        """Forcing period 2*pi/omega."""
        return 2 * math.pi / self.omega

    def replace(self, **kw) -> "PendulumParams":
        d = dict(gamma=self.gamma, p=self.p, omega=self.omega, e=self.e, alpha=self.alpha)
        d.update(kw)
        return PendulumParams(**d)


@dataclass(frozen=True)
class State:
    """Point on the universal cover of the cylinder plus phase time.

    theta is deliberately NOT reduced mod 2*pi, so that winding numbers of
    rotating solutions stay observable; use wrap_to_pi explicitly.
    """

    theta: float
    v: float
    t: float = 0.0

    def __post_init__(self):
        _require_finite("state", self.theta, self.v, self.t)

    def wrapped(self) -> "State":
        return State(wrap_to_pi(self.theta), self.v, self.t)


@dataclass(frozen=True)
class PhysicalParams:
    """Mechanical parameters of a pendulum driven around an ellipse.

    m: bob mass (kg), l: arm length (m), c: viscous damping (N m s),
    a: vertical displacement amplitude (m), b: horizontal amplitude (m),
    Omega: drive frequency (rad/s), g: gravity (m/s^2).
    """

    m: float
    l: float
    c: float
    a: float
    b: float
    Omega: float
    g: float = 9.81

    def __post_init__(self):
        _require_finite("physical parameter", self.m, self.l, self.c, self.a,
                        self.b, self.Omega, self.g)
        if self.m <= 0 or self.l <= 0 or self.Omega <= 0 or self.g <= 0:
            raise ValueError("m, l, Omega, g must be positive")
        if self.c < 0 or self.a < 0 or self.b < 0:
            raise ValueError("c, a, b must be non-negative")


class ForcingSpec:
    """Periodic forcing pair (fx, fy) with period 2*pi/omega.

    The equation of motion driven by a ForcingSpec is

        theta'' + gamma*theta' + omega*fy(t)*sin(theta)
                + omega*fx(t)*cos(theta) = 0.

    Either built from the elliptic form

        omega*fx(t) = eps*p*cos(omega*t - alpha)
        omega*fy(t) = p*cos(omega*t) + 1

    or from sampled tables covering exactly one period uniformly
    (t_i = i*T/N, i = 0..N-1), evaluated with linear interpolation and
    periodic wraparound.
    """

    def __init__(self, omega: float, fx, fy, kind: str = "callable"):
        if omega <= 0:
            raise ValueError("omega must be positive")
        self.omega = float(omega)
        self.kind = kind
        self._fx = fx
        self._fy = fy

    @classmethod
    def elliptic(cls, p: float, eps: float, alpha: float, omega: float) -> "ForcingSpec":
        def fx(t):
            return eps * p * np.cos(omega * t - alpha) / omega

        def fy(t):
            return (p * np.cos(omega * t) + 1.0) / omega

        spec = cls(omega, fx, fy, kind="elliptic")
        spec.p, spec.eps, spec.alpha = float(p), float(eps), float(alpha)
        return spec

    @classmethod
    def from_samples(cls, fx_samples, fy_samples, omega: float) -> "ForcingSpec":
        fx_samples = np.asarray(fx_samples, dtype=float)
        fy_samples = np.asarray(fy_samples, dtype=float)
        if fx_samples.size == 0 or fy_samples.size == 0:
            raise ValueError("empty forcing sample table")
        if not (np.all(np.isfinite(fx_samples)) and np.all(np.isfinite(fy_samples))):
            raise ValueError("forcing samples must be finite")
        T = 2 * math.pi / omega

        def interp(table):
            n = table.size
            ext = np.append(table, table[0])  # wraparound node at t = T

            def f(t):
                s = (np.asarray(t, dtype=float) % T) * (n / T)
                i = np.floor(s).astype(int)
                frac = s - i
                return (1 - frac) * ext[i] + frac * ext[i + 1]

            return f

        return cls(omega, interp(fx_samples), interp(fy_samples), kind="sampled")

    def fx(self, t):
        return self._fx(t)

    def fy(self, t):
        return self._fy(t)


def eval_rhs(params: PendulumParams, s: State):
    """Right hand side (dtheta/dt, dv/dt) of the elliptic pendulum."""
    _require_finite("state", s.theta, s.v, s.t)
    cy = 1.0 + params.p * math.cos(params.omega * s.t)
    cx = params.e * params.p * math.cos(params.omega * s.t - params.alpha)
    dv = -params.gamma * s.v - cy * math.sin(s.theta) - cx * math.cos(s.theta)
    return (s.v, dv)


def eval_rhs_general(f: ForcingSpec, gamma: float, s: State):
    """Right hand side for an arbitrary periodic forcing pair."""
    _require_finite("state", s.theta, s.v, s.t)
    om = f.omega
    dv = (-gamma * s.v
          - om * float(f.fy(s.t)) * math.sin(s.theta)
          - om * float(f.fx(s.t)) * math.cos(s.theta))
    return (s.v, dv)


def eval_jacobian(params: PendulumParams, s: State) -> np.ndarray:
    """State Jacobian d(dtheta/dt, dv/dt)/d(theta, v) as a 2x2 array."""
    _require_finite("state", s.theta, s.v, s.t)
    cy = 1.0 + params.p * math.cos(params.omega * s.t)
    cx = params.e * params.p * math.cos(params.omega * s.t - params.alpha)
    j21 = -cy * math.cos(s.theta) + cx * math.sin(s.theta)
    return np.array([[0.0, 1.0], [j21, -params.gamma]])


def nondimensionalize(phys: PhysicalParams) -> PendulumParams:
    """Convert mechanical parameters to the dimensionless set.

    omega0 = sqrt(g/l), gamma = c/(omega0*m*l^2), omega = Omega/omega0,
    p = a*Omega^2/g and e = b/a.  Time is scaled by omega0.
    """
    if phys.a == 0 and phys.b > 0:
        raise ValueError("horizontal-only excitation not representable; e undefined")
    omega0 = math.sqrt(phys.g / phys.l)
    gamma = phys.c / (omega0 * phys.m * phys.l ** 2)
    omega = phys.Omega / omega0
    p = phys.a * phys.Omega ** 2 / phys.g
    e = 0.0 if phys.b == 0 else phys.b / phys.a
    return PendulumParams(gamma=gamma, p=p, omega=omega, e=e, alpha=math.pi / 2)


def reflect(s: State) -> State:
    """Mirror a state: (theta, v, t) -> (-theta, -v, t).

    Trajectories of ellipticity e map to trajectories of -e under this
    reflection, which is the symmetry broken by the elliptic drive.
    """
    return State(-s.theta, -s.v, s.t)


def params_from_json(doc) -> PendulumParams:
    """Read parameters from a JSON document (string or parsed dict).

    Accepts either direct keys {"gamma","p","omega","e","alpha"} or a
    "physical" sub-object {"m","l","c","a","b","Omega","g"} converted via
    nondimensionalize.
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if "physical" in doc:
        extra = {k for k in doc if k not in ("physical",)}
        if extra & {"gamma", "p", "omega", "e", "alpha"}:
            raise ValueError("give either dimensionless keys or a physical block, not both")
        ph = doc["physical"]
        return nondimensionalize(PhysicalParams(
            m=ph["m"], l=ph["l"], c=ph["c"], a=ph["a"], b=ph["b"],
            Omega=ph["Omega"], g=ph.get("g", 9.81)))
    kw = {k: float(doc[k]) for k in ("gamma", "p", "omega", "e", "alpha") if k in doc}
    return PendulumParams(**kw)
