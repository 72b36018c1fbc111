"""Closed-form predictions for the lossless doublet system.

With equal dipole ratios, two-photon resonance and the lasers tuned midway
between the doublet, the coherent Hamiltonian has a two-dimensional null
space. Nonadiabatic coupling between the two dark states accumulates a
geometric (Berry) phase gamma_f that fixes the final |1>/|2> superposition:
|c1|^2 = sin^2(gamma_f), |c2|^2 = cos^2(gamma_f).

Sign conventions note: the antisymmetric doublet combination entering the
second dark state is taken as (|4> - |3>)/sqrt(2); this is the sign forced by
the frame convention of the equations of motion (verified by the
commutator-equivalence test) and differs from the symmetric-well convention
only by a relabeling of the doublet.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureNonconvergence
from .model import Detuning, PulseParams, SystemParams, rabi_envelope

_SQRT2 = math.sqrt(2.0)


def mixing_theta(omega_p: float, omega_s: float) -> float:
    """STIRAP mixing angle, tan(theta) = Omega_p / Omega_s, in [0, pi/2]."""
    if omega_p == 0.0 and omega_s == 0.0:
        raise ValueError("mixing angle undefined: both Rabi frequencies are zero")
    return math.atan2(omega_p, omega_s)


def mixing_phi(omega_p: float, omega_s: float, omega43: float) -> float:
    """Doublet mixing angle, tan(phi) = (omega43/2) / sqrt(2 (Omega_s^2 + Omega_p^2))."""
    if omega43 == 0.0:
        return 0.0
    if omega_p == 0.0 and omega_s == 0.0:
        raise ValueError("phi indeterminate: omega43 > 0 with both fields off")
    return math.atan2(0.5 * omega43,
                      math.sqrt(2.0 * (omega_s ** 2 + omega_p ** 2)))


def dark_state_phi0(theta: float) -> np.ndarray:
    """Trapped ground-subband superposition cos(theta)|1> - sin(theta)|2>."""
    return np.array([math.cos(theta), -math.sin(theta), 0.0, 0.0],
                    dtype=complex)


def dark_state_phi1(theta: float, phi: float) -> np.ndarray:
    """Second dark state, mixing the ground subbands with the antisymmetric
    doublet combination (|4> - |3>)/sqrt(2)."""
    sp = math.sin(phi)
    cp = math.cos(phi)
    return np.array([
        math.sin(theta) * sp,
        math.cos(theta) * sp,
        -cp / _SQRT2,
        cp / _SQRT2,
    ], dtype=complex)


def asymptotic_state(gamma_f: float) -> np.ndarray:
    """Final superposition sin(gamma_f)|1> - cos(gamma_f)|2>."""
    return np.array([math.sin(gamma_f), -math.cos(gamma_f), 0.0, 0.0],
                    dtype=complex)


def _sech(x: np.ndarray) -> np.ndarray:
    # overflow-safe 1/cosh
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def berry_phase_integrand(t, pulses: PulseParams, omega43: float):
    """(d theta/dt) * sin(phi) along the pulse pair; vectorized in t.

    dtheta/dt is evaluated in log-ratio form, alpha / (2 cosh(ln(Op/Os))),
    which stays finite where both Gaussians underflow.
    """
    t = np.asarray(t, dtype=float)
    alpha = 2.0 * (pulses.t_p - pulses.t_s) / pulses.tau ** 2
    ln_ratio = (math.log(pulses.omega_p0 / pulses.omega_s0)
                + (2.0 * (pulses.t_p - pulses.t_s) * t
                   + pulses.t_s ** 2 - pulses.t_p ** 2) / pulses.tau ** 2)
    dtheta = 0.5 * alpha * _sech(ln_ratio)
    omega_p, omega_s = rabi_envelope(t, pulses)
    half = 0.5 * omega43
    sin_phi = half / np.sqrt(half ** 2 + 2.0 * (omega_p ** 2 + omega_s ** 2))
    return dtheta * sin_phi


def berry_phase(pulses: PulseParams, omega43: float,
                abs_tol: float = 1e-12, rel_tol: float = 1e-10,
                max_error: float = 1e-10) -> float:
    """Geometric phase accumulated over the full pulse pair.

    Adaptive quadrature of (d theta/dt) sin(phi); the window extends far enough
    that the exponentially decaying integrand is below 1e-20 at both ends.
    """
    if omega43 == 0.0 or pulses.t_p == pulses.t_s:
        return 0.0  # sin(phi) == 0, or theta is constant
    if pulses.omega_p0 == 0.0 or pulses.omega_s0 == 0.0:
        return 0.0  # theta pinned at 0 or pi/2
    alpha = 2.0 * abs(pulses.t_p - pulses.t_s) / pulses.tau ** 2
    mid = 0.5 * (pulses.t_p + pulses.t_s)
    halfwidth = 60.0 / alpha + 5.0 * pulses.tau
    value, err = quad(
        berry_phase_integrand, mid - halfwidth, mid + halfwidth,
        args=(pulses, omega43),
        epsabs=abs_tol, epsrel=rel_tol, limit=400,
        points=[pulses.t_s, pulses.t_p, mid],
    )
    if err > max_error:
        raise QuadratureNonconvergence(
            f"quadrature error estimate {err} exceeds {max_error}")
    return value


def coherent_hamiltonian(params: SystemParams, omega_p: float, omega_s: float,
                         det: Detuning) -> np.ndarray:
    """4x4 Hermitian matrix H such that -i[H, rho] reproduces every non-decay,
    non-eta term of the equations of motion (tested, not assumed)."""
    k, q = params.k, params.q
    dp, ds = det.delta_p, det.delta_s
    return np.array([
        [0.0, 0.0, -omega_p, -k * omega_p],
        [0.0, ds - dp, -omega_s, -q * omega_s],
        [-omega_p, -omega_s, -dp, 0.0],
        [-k * omega_p, -q * omega_s, 0.0, params.omega43 - dp],
    ], dtype=complex)
