"""Self-contained invariant battery behind the `check` CLI command.

Each check returns (name, passed, detail). Everything is seeded and
deterministic; the whole battery runs in a few seconds.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import analysis, config as config_mod, integrator, model, sweep


def _random_state(rng) -> model.DensityMatrix:
    """Random Hermitian, positive, unit-trace density matrix."""
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = a @ a.conj().T
    m /= np.trace(m).real
    return model.DensityMatrix(
        m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real,
        m[0, 1], m[0, 2], m[0, 3], m[1, 2], m[1, 3], m[2, 3])


def _fig2a():
    base = sweep.preset("fig2a").base
    return base


def check_trace_conservation(n=200, seed=7):
    """Population derivatives from the equations of motion sum to zero."""
    base = _fig2a()
    table = model.total_decay_rates(base.system)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        rho = _random_state(rng)
        t = rng.uniform(0.0, 100.0)
        d = model.rhs(t, rho, base.system, table, base.pulses, base.detuning)
        worst = max(worst, abs(d.trace))
    return worst < 1e-12, f"max |d trace/dt| = {worst:.2e}"


def check_linearity(n=50, seed=11):
    """rhs is linear in the state at fixed time."""
    base = _fig2a()
    table = model.total_decay_rates(base.system)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        y1 = _random_state(rng).to_vector()
        y2 = _random_state(rng).to_vector()
        a, b = rng.uniform(-2.0, 2.0, size=2)
        t = rng.uniform(0.0, 100.0)

        def deriv(y):
            return model.rhs(t, model.DensityMatrix.from_vector(y),
                             base.system, table, base.pulses,
                             base.detuning).to_vector()

        lhs = deriv(a * y1 + b * y2)
        rhs_ = a * deriv(y1) + b * deriv(y2)
        worst = max(worst, float(np.abs(lhs - rhs_).max()))
    return worst < 1e-10, f"max linearity residual = {worst:.2e}"


def check_commutator_equivalence(n=200, seed=13):
    """With every rate off, rhs equals -i[H, rho] for the coherent Hamiltonian."""
    base = _fig2a()
    lossless = dataclasses.replace(
        base.system, gamma31=0.0, gamma32=0.0, gamma41=0.0, gamma42=0.0,
        gamma2=0.0, dph12=0.0, dph13=0.0, dph14=0.0, dph23=0.0, dph24=0.0,
        dph34=0.0)
    table = model.total_decay_rates(lossless)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        rho = _random_state(rng)
        t = rng.uniform(0.0, 100.0)
        omega_p, omega_s = model.rabi_envelope(t, base.pulses)
        ham = analysis.coherent_hamiltonian(lossless, omega_p, omega_s,
                                            base.detuning)
        expected = -1j * (ham @ rho.as_matrix() - rho.as_matrix() @ ham)
        got = model.rhs(t, rho, lossless, table, base.pulses,
                        base.detuning).as_matrix()
        worst = max(worst, float(np.abs(got - expected).max()))
    return worst < 1e-12, f"max elementwise residual = {worst:.2e}"


def check_dark_state_nullity(n=100, seed=17):
    """Both dark states are annihilated by H at unit ratios and midpoint tuning."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        omega_p = rng.uniform(0.1, 10.0)
        omega_s = rng.uniform(0.1, 10.0)
        omega43 = rng.uniform(0.1, 30.0)
        system = model.SystemParams(
            k=1.0, q=1.0, omega43=omega43, gamma31=0.0, gamma32=0.0,
            gamma41=0.0, gamma42=0.0, gamma2=0.0, dph12=0.0, dph13=0.0,
            dph14=0.0, dph23=0.0, dph24=0.0, dph34=0.0)
        det = model.Detuning(omega43 / 2.0, omega43 / 2.0)
        ham = analysis.coherent_hamiltonian(system, omega_p, omega_s, det)
        theta = analysis.mixing_theta(omega_p, omega_s)
        phi = analysis.mixing_phi(omega_p, omega_s, omega43)
        for state in (analysis.dark_state_phi0(theta),
                      analysis.dark_state_phi1(theta, phi)):
            worst = max(worst, float(np.linalg.norm(ham @ state)))
    return worst < 1e-10, f"max |H v| = {worst:.2e}"


def check_preset_trace_drift():
    """Default-integrator evolutions keep the trace to 1e-9 on all presets."""
    worst = 0.0
    for name in sweep.PRESET_NAMES:
        base = sweep.preset(name).base
        traj = integrator.integrate(
            model.DensityMatrix.ground_state(), base.system, base.pulses,
            base.detuning, base.integrator)
        worst = max(worst, traj.stats.max_trace_drift)
    return worst < 1e-9, f"max trace drift = {worst:.2e}"


def check_config_round_trip():
    """serialize/parse is the identity on resolved configs."""
    for name in ("fig2a", "fig4b", "fig5"):
        cfg = config_mod.parse_config(f"preset = {name}")
        if config_mod.parse_config(config_mod.serialize(cfg)) != cfg:
            return False, f"round trip failed for preset {name}"
    return True, "3 presets round-tripped"


def run_all():
    battery = (
        ("trace_conservation", check_trace_conservation),
        ("linearity", check_linearity),
        ("commutator_equivalence", check_commutator_equivalence),
        ("dark_state_nullity", check_dark_state_nullity),
        ("preset_trace_drift", check_preset_trace_drift),
        ("config_round_trip", check_config_round_trip),
    )
    results = []
    for name, fn in battery:
        ok, detail = fn()
        results.append((name, ok, detail))
    return results
