import math

import numpy as np
import pytest
import scipy.linalg

from dotcavity.errors import InputError
from dotcavity.gates import cnot
from dotcavity.noise import (
    NoiseChannels,
    TimedPulse,
    cnot_fidelity_under_noise,
    cnot_pulse_plan,
    fidelity_inputs,
    lindblad_evolve,
    noise_layout,
    pulse_hamiltonian,
    run_plan,
    suggested_dt,
)
from dotcavity.qspace import DensityOp, Ket, OperatorM, SpaceLayout
from dotcavity.threelevel import ThreeLevelParams, build_rwa_hamiltonian
from dotcavity.units import HBAR_MEV_PS


@pytest.fixture(scope="module")
def plan():
    return cnot_pulse_plan(omega1=0.01, omega_eff=0.01)


def trace_distance(a, b):
    return 0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum()


def test_channels_validate_and_scale():
    with pytest.raises(InputError):
        NoiseChannels(rate_e_to_v=-1.0)
    ch = NoiseChannels(1.0, 2.0, 3.0, 0.5).scaled(1e-3)
    assert (ch.rate_e_to_v, ch.rate_e_to_etilde_rad, ch.rate_e_to_etilde_ph) == pytest.approx((1e-3, 2e-3, 3e-3))
    assert ch.kappa_cavity == 0.5


def test_closed_system_limit_matches_exact_propagation():
    p = ThreeLevelParams(0.1, 0.1, 1.0)
    h = build_rwa_hamiltonian(p)
    psi = Ket.basis(h.layout, (0, 1))
    t = 80.0
    rho = lindblad_evolve(h, NoiseChannels(), psi.density(), t, suggested_dt(h, NoiseChannels()))
    u = scipy.linalg.expm(-1j * h.entries * t / HBAR_MEV_PS)
    exact = u @ psi.density().entries @ u.conj().T
    assert trace_distance(rho.entries, exact) <= 1e-8


def test_single_channel_decay_oracle():
    lay = SpaceLayout.of(("q", 2), ("cav", 2))
    gamma = 0.02
    rho0 = Ket.basis(lay, (1, 0)).density()
    h = OperatorM(lay, np.zeros((4, 4)))
    ch = NoiseChannels(rate_e_to_v=gamma)
    for t in (10.0, 50.0, 120.0):
        rho = lindblad_evolve(h, ch, rho0, t, 0.05 / gamma)
        p_e = rho.entries[2, 2].real + rho.entries[3, 3].real
        assert p_e == pytest.approx(math.exp(-gamma * t), abs=1e-6)


def test_maximally_mixed_unchanged():
    lay = SpaceLayout.of(("q", 3), ("cav", 3))
    rho0 = DensityOp.maximally_mixed(lay)
    rho = lindblad_evolve(OperatorM(lay, np.zeros((9, 9))), NoiseChannels(), rho0, 5.0, 1.0)
    assert np.abs(rho.entries - rho0.entries).max() < 1e-15


def test_stability_guard():
    lay = SpaceLayout.of(("q", 2), ("cav", 2))
    h = OperatorM(lay, np.zeros((4, 4)))
    with pytest.raises(InputError, match="dt <="):
        lindblad_evolve(h, NoiseChannels(rate_e_to_v=1.0), Ket.basis(lay, (1, 0)).density(), 1.0, 0.5)
    with pytest.raises(InputError):
        lindblad_evolve(h, NoiseChannels(), Ket.basis(lay, (1, 0)).density(), 1.0, 2.0)


def test_etilde_channels_need_three_levels():
    lay = SpaceLayout.of(("q", 2), ("cav", 2))
    h = OperatorM(lay, np.zeros((4, 4)))
    with pytest.raises(InputError):
        lindblad_evolve(h, NoiseChannels(rate_e_to_etilde_ph=0.1), Ket.basis(lay, (1, 0)).density(), 1.0, 0.1)


def test_trace_and_positivity_under_all_channels():
    lay = noise_layout()
    ch = NoiseChannels(0.01, 0.005, 0.005, 0.02)
    h = pulse_hamiltonian(lay, cnot_pulse_plan(0.01, 0.01)[0])
    psi = fidelity_inputs(lay, "j", "k")[-1][0]
    rho = lindblad_evolve(h, ch, DensityOp(lay, np.outer(psi, psi.conj())), 150.0, suggested_dt(h, ch))
    assert abs(rho.trace() - 1) <= 1e-6
    assert rho.min_eigenvalue() >= -1e-6


def test_pulse_hamiltonian_reproduces_unitary(plan):
    lay = noise_layout()
    for tp in plan:
        if tp.duration == 0:
            continue
        h = pulse_hamiltonian(lay, tp)
        u = scipy.linalg.expm(-1j * h.entries * tp.duration / HBAR_MEV_PS)
        assert np.abs(u - tp.spec.unitary(lay).entries).max() < 1e-10


def test_noiseless_plan_is_cnot_up_to_global_phase(plan):
    lay = noise_layout()
    u = np.eye(lay.dim, dtype=complex)
    for tp in plan:
        u = tp.spec.unitary(lay).entries @ u
    ideal = cnot(lay, "j", "k").entries
    for psi_in, psi_out in fidelity_inputs(lay, "j", "k"):
        assert abs(np.vdot(psi_out, u @ psi_in)) == pytest.approx(1.0, abs=1e-10)
        assert abs(np.vdot(psi_out, ideal @ psi_in)) == pytest.approx(1.0, abs=1e-10)


def test_noiseless_fidelity(plan):
    assert cnot_fidelity_under_noise(1.0, NoiseChannels(), plan) >= 1 - 1e-6


@pytest.mark.parametrize("field", ["rate_e_to_v", "rate_e_to_etilde_rad", "rate_e_to_etilde_ph", "kappa_cavity"])
def test_fidelity_non_increasing_in_each_rate(plan, field):
    fids = [cnot_fidelity_under_noise(1.0, NoiseChannels(**{field: r}), plan) for r in (0.0, 2e-4, 1e-3)]
    assert fids[0] >= fids[1] >= fids[2]
    assert fids[2] < fids[0]


def test_smaller_gamma_improves_fidelity(plan):
    ch = NoiseChannels(1e-3, 5e-4, 5e-4)
    assert cnot_fidelity_under_noise(1e-2, ch, plan) > cnot_fidelity_under_noise(1.0, ch, plan)


def test_run_plan_trace_preserved(plan):
    lay = noise_layout()
    psi = fidelity_inputs(lay, "j", "k")[1][0]
    rho = run_plan(lay, plan, NoiseChannels(1e-3, 1e-3, 1e-3, 1e-3), np.outer(psi, psi.conj()))
    assert abs(np.trace(rho).real - 1) <= 1e-6
    assert np.linalg.eigvalsh(rho).min() >= -1e-6


def test_timed_pulse_durations(plan):
    red = [tp for tp in plan if tp.spec.kind.value == "red_sideband"]
    first = red[0]
    assert first.duration == pytest.approx(math.pi * HBAR_MEV_PS / (2 * 0.01))
    assert all(tp.duration == 0 for tp in plan if tp.spec.kind.value == "phase_z")
    assert isinstance(plan[0], TimedPulse)
