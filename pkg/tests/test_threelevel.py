import math

import numpy as np
import pytest

from dotcavity.errors import InputError
from dotcavity.qspace import Ket, OperatorM, SpaceLayout
from dotcavity.threelevel import (
    E,
    ETILDE,
    TRAJECTORY_HEADER,
    V,
    ThreeLevelParams,
    build_rwa_hamiltonian,
    effective_rabi,
    excitation_number,
    propagate,
    trajectory_csv,
    validate_elimination,
)
from dotcavity.units import HBAR_MEV_PS


def test_effective_rabi_examples():
    assert effective_rabi(ThreeLevelParams(0.1, 0.01, 1.0)) == pytest.approx(0.001, rel=1e-15)
    assert effective_rabi(ThreeLevelParams(0.1, 0.0, 1.0)) == 0.0
    assert effective_rabi(ThreeLevelParams(0.1, 0.1, 1.0)) == pytest.approx(0.01, rel=1e-15)
    with pytest.raises(InputError):
        effective_rabi(ThreeLevelParams(0.1, 0.1, 0.0))


def test_hamiltonian_structure():
    p = ThreeLevelParams(0.0, 0.0, 1.0)
    h = build_rwa_hamiltonian(p)
    lay = p.layout()
    want = np.zeros(lay.dim)
    for n in range(lay.radix("cav")):
        want[ETILDE * lay.radix("cav") + n] = -1.0
    assert np.array_equal(h.entries, np.diag(want))

    p = ThreeLevelParams(0.1, 0.07, 1.0, phi=0.4)
    h = build_rwa_hamiltonian(p)
    assert np.abs(h.entries - h.entries.conj().T).max() == 0
    assert h.block([(E, 0)], [(V, 1)])[0, 0] == 0
    assert h.block([(ETILDE, 1)], [(V, 1)])[0, 0] == pytest.approx(0.1 * np.exp(0.4j))
    assert h.block([(E, 0)], [(ETILDE, 1)])[0, 0] == pytest.approx(0.07)


def test_hamiltonian_rejects_wrong_layout():
    p = ThreeLevelParams(0.1, 0.1, 1.0)
    with pytest.raises(InputError):
        build_rwa_hamiltonian(p, SpaceLayout.of(("dot", 2), ("cav", 3)))


def test_propagate_zero_hamiltonian():
    lay = SpaceLayout.of(("dot", 3), ("cav", 3))
    psi = Ket.normalized(lay, np.arange(lay.dim) + 1j)
    traj = propagate(OperatorM(lay, np.zeros((9, 9))), psi, 10.0, 5)
    assert len(traj.states) == 6 and traj.times[-1] == pytest.approx(10.0)
    for s in traj.states:
        assert np.abs(s.amplitudes - psi.amplitudes).max() < 1e-15


def test_propagate_eigenstate_populations_constant():
    p = ThreeLevelParams(0.1, 0.1, 1.0)
    h = build_rwa_hamiltonian(p)
    w, v = np.linalg.eigh(h.entries)
    psi = Ket.normalized(h.layout, v[:, 3])
    traj = propagate(h, psi, 200.0, 50)
    p0 = np.abs(psi.amplitudes) ** 2
    for s in traj.states:
        assert np.abs(np.abs(s.amplitudes) ** 2 - p0).max() < 1e-10


def test_propagate_two_level_rabi_oracle():
    lay = SpaceLayout.of(("q", 2))
    omega = 0.05
    h = OperatorM(lay, omega * np.array([[0, 1], [1, 0]]))
    t_flip = math.pi * HBAR_MEV_PS / (2 * omega)
    traj = propagate(h, Ket.basis(lay, (0,)), t_flip, 40)
    for t, s in zip(traj.times, traj.states):
        assert abs(s.amplitude((1,))) ** 2 == pytest.approx(math.sin(omega * t / HBAR_MEV_PS) ** 2, abs=1e-12)
    assert abs(traj.states[-1].amplitude((1,))) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_propagate_preconditions():
    lay = SpaceLayout.of(("q", 2))
    h = OperatorM(lay, np.zeros((2, 2)))
    with pytest.raises(InputError):
        propagate(h, Ket.basis(lay, (0,)), 0.0, 3)
    with pytest.raises(InputError):
        propagate(h, Ket.basis(lay, (0,)), 1.0, 0)


def test_excitation_number_conserved_along_trajectory():
    p = ThreeLevelParams(0.15, 0.08, 1.0, phi=0.3, fock_cutoff=3)
    h = build_rwa_hamiltonian(p)
    n = excitation_number(h.layout).entries
    rng = np.random.default_rng(1)
    psi = Ket.normalized(h.layout, rng.normal(size=h.layout.dim) + 1j * rng.normal(size=h.layout.dim))
    traj = propagate(h, psi, 300.0, 60)
    vals = [np.vdot(s.amplitudes, n @ s.amplitudes).real for s in traj.states]
    assert max(vals) - min(vals) < 1e-8


def test_validate_elimination_reference_params():
    rep = validate_elimination(ThreeLevelParams(0.1, 0.1, 1.0))
    assert rep.max_pop_etilde <= 0.05
    assert rep.rel_deviation <= 0.05
    assert rep.duration == pytest.approx(math.pi * HBAR_MEV_PS / (2 * 0.01))


def test_validate_elimination_weak_coupling():
    assert validate_elimination(ThreeLevelParams(0.02, 0.02, 1.0)).max_pop_etilde <= 0.002


def test_validate_elimination_decoupled():
    rep = validate_elimination(ThreeLevelParams(0.1, 0.0, 1.0), duration=500.0)
    assert rep.max_pop_e0 <= 1e-6
    with pytest.raises(InputError):
        validate_elimination(ThreeLevelParams(0.1, 0.0, 1.0))


def test_validate_elimination_regime_guard():
    with pytest.raises(InputError):
        validate_elimination(ThreeLevelParams(0.3, 0.1, 1.0))
    with pytest.raises(InputError):
        validate_elimination(ThreeLevelParams(0.1, 0.1, 0.0))


def test_etilde_population_scales_as_ratio_squared():
    for omega in (0.1, 0.05):
        a = validate_elimination(ThreeLevelParams(omega, omega, 1.0)).max_pop_etilde
        b = validate_elimination(ThreeLevelParams(omega, omega, 4.0)).max_pop_etilde
        assert 8 <= a / b <= 32


def test_frequency_agreement_improves_down_the_ladder():
    devs = [validate_elimination(ThreeLevelParams(r, r, 1.0)).rel_deviation for r in (0.1, 0.05, 0.02)]
    assert devs[0] > devs[1] > devs[2]


def test_trajectory_csv_contract():
    rep = validate_elimination(ThreeLevelParams(0.1, 0.1, 1.0), steps=20)
    lines = trajectory_csv(rep.trajectory).splitlines()
    assert lines[0].split(",") == list(TRAJECTORY_HEADER)
    assert len(lines) == 22
    row = [float(x) for x in lines[-1].split(",")]
    assert len(row) == 5
    assert row[1] + row[2] + row[3] == pytest.approx(1.0, abs=1e-10)
