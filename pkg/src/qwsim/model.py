"""Physical parameters and equations of motion for the four-subband double well.

The system consists of two ground subbands |1>, |2> (one per well) and a
tunneling-split excited doublet |3>, |4> sharing a continuum. A pump pulse
couples |1> to the doublet with Rabi frequencies (Omega_p, k*Omega_p) and a
Stokes pulse couples |2> with (Omega_s, q*Omega_s). Decay of the doublet into
the common continuum cross-couples |3> and |4> with strength eta, producing
Fano-type interference whose quality is eps = eta / sqrt(Gamma13 * Gamma14).

Units: hbar = 1; energies and rates in meV, time in meV^-1 (1 meV^-1 is about
0.658 ps). All containers are frozen dataclasses; `rhs` is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

#: tolerance applied when validating populations and the unit trace
TRACE_TOL = 1e-6


@dataclass(frozen=True)
class SystemParams:
    """Structure parameters: dipole ratios, doublet splitting, decay rates.

    ``target_epsilon=None`` selects the physical Fano coupling
    eta = sqrt(gamma3 * gamma4); a float in [0, 1] instead pins the
    interference factor directly via eta = eps * sqrt(Gamma13 * Gamma14),
    holding every decay and dephasing rate fixed.
    """

    k: float
    q: float
    omega43: float
    gamma31: float
    gamma32: float
    gamma41: float
    gamma42: float
    gamma2: float
    dph12: float
    dph13: float
    dph14: float
    dph23: float
    dph24: float
    dph34: float
    target_epsilon: float | None = None

    def __post_init__(self):
        rates = {
            "gamma31": self.gamma31, "gamma32": self.gamma32,
            "gamma41": self.gamma41, "gamma42": self.gamma42,
            "gamma2": self.gamma2, "dph12": self.dph12, "dph13": self.dph13,
            "dph14": self.dph14, "dph23": self.dph23, "dph24": self.dph24,
            "dph34": self.dph34,
        }
        for name, value in rates.items():
            if value < 0.0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        if self.omega43 < 0.0:
            raise ValueError(f"omega43 must be nonnegative, got {self.omega43}")
        if self.target_epsilon is not None and not 0.0 <= self.target_epsilon <= 1.0:
            raise ValueError(
                f"target_epsilon must lie in [0, 1], got {self.target_epsilon}")

    @property
    def gamma3(self) -> float:
        return self.gamma31 + self.gamma32

    @property
    def gamma4(self) -> float:
        return self.gamma41 + self.gamma42


@dataclass(frozen=True)
class PulseParams:
    """Gaussian pump/Stokes envelopes: peaks (meV), centers and width (meV^-1)."""

    omega_p0: float
    omega_s0: float
    tau: float
    t_p: float
    t_s: float

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.omega_p0 < 0.0 or self.omega_s0 < 0.0:
            raise ValueError("peak Rabi frequencies must be nonnegative")


@dataclass(frozen=True)
class Detuning:
    """Rotating-frame pump/Stokes detunings (meV)."""

    delta_p: float
    delta_s: float


@dataclass(frozen=True)
class DecayTable:
    """Total decoherence rates, upper-subband decay sums, and Fano coupling."""

    Gamma12: float
    Gamma13: float
    Gamma14: float
    Gamma23: float
    Gamma24: float
    Gamma34: float
    gamma3: float
    gamma4: float
    eta: float


@dataclass(frozen=True)
class DensityMatrix:
    """Upper-triangle storage of a Hermitian 4x4 density matrix.

    The lower triangle is never stored; rho_ji is always conj(rho_ij).
    Construction does not validate the unit trace (derivatives reuse the
    container); use `validate` on states.
    """

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho12: complex
    rho13: complex
    rho14: complex
    rho23: complex
    rho24: complex
    rho34: complex

    @classmethod
    def ground_state(cls) -> "DensityMatrix":
        """All population in subband |1>."""
        return cls(1.0, 0.0, 0.0, 0.0, 0j, 0j, 0j, 0j, 0j, 0j)

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "DensityMatrix":
        """Build from the 16-real integration layout."""
        return cls(
            float(y[0]), float(y[1]), float(y[2]), float(y[3]),
            complex(y[4], y[5]), complex(y[6], y[7]), complex(y[8], y[9]),
            complex(y[10], y[11]), complex(y[12], y[13]), complex(y[14], y[15]),
        )

    def to_vector(self) -> np.ndarray:
        y = np.empty(_kernels.NSTATE)
        y[0], y[1], y[2], y[3] = self.rho11, self.rho22, self.rho33, self.rho44
        for i, c in enumerate(
                (self.rho12, self.rho13, self.rho14,
                 self.rho23, self.rho24, self.rho34)):
            y[4 + 2 * i] = c.real
            y[5 + 2 * i] = c.imag
        return y

    def as_matrix(self) -> np.ndarray:
        """Full 4x4 complex matrix with the conjugate lower triangle filled in."""
        m = np.array([
            [self.rho11, self.rho12, self.rho13, self.rho14],
            [0, self.rho22, self.rho23, self.rho24],
            [0, 0, self.rho33, self.rho34],
            [0, 0, 0, self.rho44],
        ], dtype=complex)
        return m + np.conj(np.triu(m, 1)).T

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    @property
    def populations(self) -> tuple[float, float, float, float]:
        return (self.rho11, self.rho22, self.rho33, self.rho44)

    def validate(self, tol: float = TRACE_TOL) -> None:
        """Raise ValueError unless trace and population bounds hold within tol."""
        if abs(self.trace - 1.0) > tol:
            raise ValueError(f"trace {self.trace} deviates from 1 by more than {tol}")
        for name, pop in zip(("rho11", "rho22", "rho33", "rho44"),
                             self.populations):
            if not -tol <= pop <= 1.0 + tol:
                raise ValueError(f"population {name}={pop} outside [0, 1] (tol {tol})")


def rabi_envelope(t, pulses: PulseParams):
    """Gaussian pump/Stokes Rabi frequencies at time t (scalar or array)."""
    omega_p = pulses.omega_p0 * np.exp(-((t - pulses.t_p) / pulses.tau) ** 2)
    omega_s = pulses.omega_s0 * np.exp(-((t - pulses.t_s) / pulses.tau) ** 2)
    return omega_p, omega_s


def total_decay_rates(params: SystemParams) -> DecayTable:
    """Compose total decoherence rates and the Fano cross-coupling eta.

    Rejects parameter sets whose implied interference factor exceeds 1.
    """
    g3 = params.gamma3
    g4 = params.gamma4
    gam13 = g3 + params.dph13
    gam14 = g4 + params.dph14
    if params.target_epsilon is None:
        eta = math.sqrt(g3 * g4)
    else:
        eta = params.target_epsilon * math.sqrt(gam13 * gam14)
    table = DecayTable(
        Gamma12=params.gamma2 + params.dph12,
        Gamma13=gam13,
        Gamma14=gam14,
        Gamma23=params.gamma2 + g3 + params.dph23,
        Gamma24=params.gamma2 + g4 + params.dph24,
        Gamma34=g3 + g4 + params.dph34,
        gamma3=g3,
        gamma4=g4,
        eta=eta,
    )
    if gam13 * gam14 > 0.0 and fano_epsilon(table) > 1.0:
        raise ValueError(
            f"eta={eta} implies epsilon>1 (over-coherent cross coupling)")
    return table


def fano_epsilon(table: DecayTable) -> float:
    """Interference factor eps = eta / sqrt(Gamma13 * Gamma14), clamped to [0, 1]
    when within 1e-12 of either bound."""
    denom = table.Gamma13 * table.Gamma14
    if denom == 0.0:
        raise ZeroDivisionError(
            "epsilon undefined: Gamma13 * Gamma14 vanishes")
    eps = table.eta / math.sqrt(denom)
    if 1.0 < eps <= 1.0 + 1e-12:
        return 1.0
    if -1e-12 <= eps < 0.0:
        return 0.0
    return eps


def pack_params(params: SystemParams, table: DecayTable,
                pulses: PulseParams, det: Detuning) -> np.ndarray:
    """Flatten a parameter bundle into the kernel parameter vector."""
    p = np.empty(_kernels.NPARAMS)
    p[_kernels.P_K] = params.k
    p[_kernels.P_Q] = params.q
    p[_kernels.P_W43] = params.omega43
    p[_kernels.P_G31] = params.gamma31
    p[_kernels.P_G32] = params.gamma32
    p[_kernels.P_G41] = params.gamma41
    p[_kernels.P_G42] = params.gamma42
    p[_kernels.P_G2] = params.gamma2
    p[_kernels.P_ETA] = table.eta
    p[_kernels.P_GAM12] = table.Gamma12
    p[_kernels.P_GAM13] = table.Gamma13
    p[_kernels.P_GAM14] = table.Gamma14
    p[_kernels.P_GAM23] = table.Gamma23
    p[_kernels.P_GAM24] = table.Gamma24
    p[_kernels.P_GAM34] = table.Gamma34
    p[_kernels.P_OP0] = pulses.omega_p0
    p[_kernels.P_OS0] = pulses.omega_s0
    p[_kernels.P_TAU] = pulses.tau
    p[_kernels.P_TP] = pulses.t_p
    p[_kernels.P_TS] = pulses.t_s
    p[_kernels.P_DP] = det.delta_p
    p[_kernels.P_DS] = det.delta_s
    return p


def rhs(t: float, rho: DensityMatrix, params: SystemParams, table: DecayTable,
        pulses: PulseParams, det: Detuning) -> DensityMatrix:
    """Time derivative of the density matrix under the driven master equation.

    Total on finite inputs; the returned container holds derivative
    components (its trace is 0, not 1).
    """
    p = pack_params(params, table, pulses, det)
    dy = _kernels.rhs_flat(t, rho.to_vector(), p)
    return DensityMatrix.from_vector(dy)
