"""High-frequency reduction of the driven pendulum.

For fast forcing, a rotation locked to the drive has a slowly varying
phase offset phi = theta -+ omega*t whose dynamics, after averaging over
one forcing period, depend only on the first Fourier mode of the forcing.
With the normalisation

    omega*fy_c = p,  fy_s = 0,  omega*fx_c = eps*p*cos(alpha),
    omega*fx_s = eps*p*sin(alpha)

the averaged phase equation for positively directed rotations reads

    phi'' + (gamma/sqrt(omega))*phi' + gamma
          + (p/(2*omega)) * [(1 - eps*sin(alpha))*sin(phi)
                             + eps*cos(alpha)*cos(phi)] = 0

(slow time sqrt(omega)*t; the damping term only shapes transients, so the
equilibrium routines drop it).  Equilibria come in stable/saddle pairs
that collide in a fold when the sinusoid's amplitude equals gamma, which
gives the closed-form onset of rotations

    p_fold = 2*gamma*omega / sqrt(1 + eps^2 -+ 2*eps*sin(alpha))

with the minus sign for the positive rotation direction and the plus sign
for the negative one (alpha -> -alpha maps one direction to the other).
At alpha = pi/2 the two onsets are 2*gamma*omega/(1 - eps) and
2*gamma*omega/(1 + eps): the rotation sense that follows the pivot around
the ellipse starts at lower forcing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ForcingSpec

__all__ = [
    "FourierModes",
    "AveragedEquilibria",
    "AveragedPrediction",
    "fourier_modes",
    "normalize_modes",
    "averaged_equilibria",
    "measured_phase_equilibria",
    "steady_residual",
    "fold_prediction",
    "predict",
]

QUADRATURE_NODES = 1024


@dataclass(frozen=True)
class FourierModes:
    """First-harmonic coefficients of the forcing pair.

    fyc, fys: cosine/sine coefficients of fy; fxc, fxs: same for fx.
    f_c = (omega/pi) * integral of f(s)*cos(omega*s) over one period,
    f_s likewise with sin."""

    fyc: float
    fys: float
    fxc: float
    fxs: float


@dataclass(frozen=True)
class AveragedEquilibria:
    """Equilibria of the averaged phase equation for one rotation
    direction, or their absence below the fold."""

    exists: bool
    direction: int
    phi0_stable: float | None = None
    phi0_saddle: float | None = None
    amplitude: float = 0.0  # sinusoid amplitude (p/2w)*sqrt(1+eps^2 -+ 2 eps sin a)


@dataclass(frozen=True)
class AveragedPrediction:
    """Fold amplitudes for both rotation directions plus, when a forcing
    amplitude was supplied and exceeds the fold, the equilibrium phases
    of the averaged equation (positive direction).  An infinite fold
    amplitude marks a direction in which rotations are impossible at
    high frequency (circular drive against the base motion)."""

    p_fold_positive: float
    p_fold_negative: float
    phi0_stable: float | None = None
    phi0_saddle: float | None = None


def _wrap(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def fourier_modes(f: ForcingSpec, nodes: int = QUADRATURE_NODES) -> FourierModes:
    """First Fourier modes of a ForcingSpec by periodic trapezoid rule.

    On a uniform periodic grid the trapezoid rule is spectrally accurate
    for smooth integrands; nodes >= 256 keeps sampled tables honest."""
    if nodes < 256:
        raise ValueError("use at least 256 quadrature nodes")
    om = f.omega
    T = 2 * math.pi / om
    s = np.arange(nodes) * (T / nodes)
    fx = np.asarray(f.fx(s), dtype=float)
    fy = np.asarray(f.fy(s), dtype=float)
    c = np.cos(om * s)
    sn = np.sin(om * s)
    # (omega/pi) * integral == (2/nodes) * sum on this grid
    scale = 2.0 / nodes
    return FourierModes(
        fyc=scale * float(fy @ c),
        fys=scale * float(fy @ sn),
        fxc=scale * float(fx @ c),
        fxs=scale * float(fx @ sn),
    )


def normalize_modes(m: FourierModes, omega: float):
    """Normalise first Fourier modes to the (p, eps, alpha) parameters.

    Applies the time shift that zeroes the vertical sine coefficient (and
    makes the cosine one positive), then reads off p = omega*fyc',
    eps = omega*hypot(fxc', fxs')/p and alpha = atan2(fxs', fxc').

    Returns (p, eps, alpha, time_shift).  alpha is reported as 0 when
    eps = 0, where it is undefined.  Raises on a vanishing vertical first
    harmonic, for which this parametrisation is degenerate."""
    ry = math.hypot(m.fyc, m.fys)
    if omega * ry < 1e-12:
        raise ValueError("no-vertical-harmonic: fy has no first Fourier mode")
    beta = math.atan2(m.fys, m.fyc)
    cb, sb = math.cos(beta), math.sin(beta)
    # rotate both mode pairs by the shift beta = omega*tau
    fyc = m.fyc * cb + m.fys * sb
    fxc = m.fxc * cb + m.fxs * sb
    fxs = m.fxs * cb - m.fxc * sb
    p = omega * fyc
    rx = omega * math.hypot(fxc, fxs)
    eps = rx / p
    alpha = math.atan2(fxs, fxc) if eps > 1e-14 else 0.0
    return p, eps, alpha, beta / omega


def _equilibria(gamma, amp, psi, rhs_sign, direction):
    """Solve sign*gamma + amp*sin(phi + psi) = 0 for the two branches."""
    if amp < gamma:
        return AveragedEquilibria(False, direction, amplitude=amp)
    s = math.asin(min(1.0, gamma / amp))
    if rhs_sign > 0:
        # sin(phi+psi) = -gamma/amp; stable where cos(phi+psi) > 0
        phi_st = _wrap(-s - psi)
        phi_sd = _wrap(math.pi + s - psi)
    else:
        # sin(phi+psi) = +gamma/amp
        phi_st = _wrap(s - psi)
        phi_sd = _wrap(math.pi - s - psi)
    return AveragedEquilibria(True, direction, phi_st, phi_sd, amp)


def averaged_equilibria(p: float, eps: float, alpha: float, gamma: float,
                        omega: float, direction: int = 1) -> AveragedEquilibria:
    """Equilibria of the averaged phase equation, direction = +-1.

    direction = -1 replaces alpha by -alpha, which maps the equation for
    positively directed rotations onto the one whose equilibria track the
    negative direction.  Stability follows the sign of the restoring
    derivative of the phase force."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    a_eff = direction * alpha
    cs = 1.0 - eps * math.sin(a_eff)
    cc = eps * math.cos(a_eff)
    amp = (p / (2 * omega)) * math.hypot(cs, cc)
    psi = math.atan2(cc, cs)
    return _equilibria(gamma, amp, psi, +1, direction)


def measured_phase_equilibria(p: float, eps: float, alpha: float, gamma: float,
                              omega: float, direction: int = 1) -> AveragedEquilibria:
    """Equilibria expressed directly in the measured phase offset.

    For direction +1 the offset is theta - omega*t (identical to
    averaged_equilibria); for direction -1 it is theta + omega*t, whose
    steady balance is -gamma + (p/2w)*[(1+eps*sin(alpha))*sin(phi)
    + eps*cos(alpha)*cos(phi)] = 0.  This is the convention in which a
    simulated rotation's mean offset should satisfy the steady equation."""
    if direction > 0:
        return averaged_equilibria(p, eps, alpha, gamma, omega, 1)
    cs = 1.0 + eps * math.sin(alpha)
    cc = eps * math.cos(alpha)
    amp = (p / (2 * omega)) * math.hypot(cs, cc)
    psi = math.atan2(cc, cs)
    return _equilibria(gamma, amp, psi, -1, -1)


def steady_residual(phi: float, p: float, eps: float, alpha: float,
                    gamma: float, omega: float, direction: int = 1) -> float:
    """Residual of the measured-phase steady balance at offset phi.

    Zero at the equilibria of measured_phase_equilibria; used to check how
    well a simulated rotation's mean phase offset satisfies the averaged
    equation."""
    if direction > 0:
        return gamma + (p / (2 * omega)) * ((1 - eps * math.sin(alpha)) * math.sin(phi)
                                            + eps * math.cos(alpha) * math.cos(phi))
    return -gamma + (p / (2 * omega)) * ((1 + eps * math.sin(alpha)) * math.sin(phi)
                                         + eps * math.cos(alpha) * math.cos(phi))


def fold_prediction(gamma: float, eps: float, alpha: float, omega: float):
    """Closed-form fold amplitudes (p_plus, p_minus) for the onset of
    positively and negatively directed period-one rotations.

    A vanishing radicand (circular drive, rotations against the base)
    yields math.inf for that direction."""
    out = []
    for sign in (-1.0, +1.0):  # - for positive direction, + for negative
        rad = 1.0 + eps * eps + sign * 2.0 * eps * math.sin(alpha)
        if rad <= 0:
            out.append(math.inf)
        else:
            out.append(2.0 * gamma * omega / math.sqrt(rad))
    return out[0], out[1]


def predict(gamma: float, eps: float, alpha: float, omega: float,
            p: float | None = None) -> AveragedPrediction:
    """Bundle fold amplitudes with the averaged equilibria at p (if given)."""
    p_plus, p_minus = fold_prediction(gamma, eps, alpha, omega)
    phi_st = phi_sd = None
    if p is not None:
        eq = averaged_equilibria(p, eps, alpha, gamma, omega, 1)
        if eq.exists:
            phi_st, phi_sd = eq.phi0_stable, eq.phi0_saddle
    return AveragedPrediction(p_plus, p_minus, phi_st, phi_sd)
