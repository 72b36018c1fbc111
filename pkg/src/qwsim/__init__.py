"""qwsim: density-matrix simulator for tunneling-controlled population
transfer in a four-subband asymmetric double quantum well."""

from .model import (DecayTable, DensityMatrix, Detuning, PulseParams,
                    SystemParams, fano_epsilon, rabi_envelope, rhs,
                    total_decay_rates)
from .integrator import IntegratorConfig, Method, Trajectory, final_state, integrate
from .analysis import (asymptotic_state, berry_phase, coherent_hamiltonian,
                       dark_state_phi0, dark_state_phi1, mixing_phi,
                       mixing_theta)
from .sweep import BaseParams, SweepSpec, SweepResult, SweepVariable, preset, run_sweep
from .config import RunConfig, parse_config, serialize

__version__ = "0.1.0"

__all__ = [
    "BaseParams", "DecayTable", "DensityMatrix", "Detuning",
    "IntegratorConfig", "Method", "PulseParams", "RunConfig", "SweepResult",
    "SweepSpec", "SweepVariable", "SystemParams", "Trajectory",
    "asymptotic_state", "berry_phase", "coherent_hamiltonian",
    "dark_state_phi0", "dark_state_phi1", "fano_epsilon", "final_state",
    "integrate", "mixing_phi", "mixing_theta", "parse_config", "preset",
    "rabi_envelope", "rhs", "run_sweep", "serialize", "total_decay_rates",
]
