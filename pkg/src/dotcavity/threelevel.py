"""Three-level dot coupled to the cavity, in the rotating frame.

Levels of the dot slot are ordered ``(|v>, |e~>, |e>)``.  The frame puts the
two-photon transition ``|v, n+1> <-> |e, n>`` exactly on resonance, so the only
energy left in the Hamiltonian is the one-photon detuning of ``|e~>``::

    H = -delta |e~><e~| + Omega_2 (|e~><v| e^{i phi} + H.c.) + Omega_c (|e><e~| a + H.c.)

For ``Omega << delta`` the intermediate level is only virtually occupied and
``|v, 1> <-> |e, 0>`` oscillates with the effective coupling
``Omega_2 Omega_c / delta``.  AC-Stark shifts of order ``Omega^2/delta`` are
kept in the full model, so comparisons use transfer frequency only.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from dotcavity.errors import InputError
from dotcavity.qspace import (
    Ket,
    OperatorM,
    SpaceLayout,
    annihilation,
    digit_probabilities,
    embed,
)
from dotcavity.units import HBAR_MEV_PS

V, ETILDE, E = 0, 1, 2
DOT = "dot"
CAV = "cav"


@dataclass(frozen=True)
class ThreeLevelParams:
    """Couplings and detuning in meV; ``phi`` is the laser phase."""

    omega2: float
    omegac: float
    detuning: float
    phi: float = 0.0
    fock_cutoff: int = 2

    def __post_init__(self):
        if self.omega2 < 0 or self.omegac < 0:
            raise InputError("couplings must be >= 0")
        if self.fock_cutoff < 2:
            raise InputError("three-level model needs fock_cutoff >= 2")
        if not all(math.isfinite(x) for x in (self.omega2, self.omegac, self.detuning, self.phi)):
            raise InputError("parameters must be finite")

    def layout(self) -> SpaceLayout:
        return SpaceLayout.of((DOT, 3), (CAV, self.fock_cutoff + 1))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple[Ket, ...] = field(repr=False)
    populations_etilde: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise InputError("trajectory times must increase")


@dataclass(frozen=True)
class EliminationReport:
    params: ThreeLevelParams
    omega_eff: float
    omega_fit: float
    rel_deviation: float
    max_pop_etilde: float
    max_pop_e0: float
    duration: float
    trajectory: Trajectory = field(repr=False)

    def summary(self) -> str:
        return "\n".join(
            [
                f"omega_eff       = {self.omega_eff!r} meV",
                f"omega_fit       = {self.omega_fit!r} meV",
                f"rel_deviation   = {self.rel_deviation!r}",
                f"max_pop_etilde  = {self.max_pop_etilde!r}",
                f"max_pop_e0      = {self.max_pop_e0!r}",
                f"duration        = {self.duration!r} ps",
            ]
        )


def effective_rabi(p: ThreeLevelParams) -> float:
    """``Omega_2 * Omega_c / delta`` in meV."""
    if p.detuning == 0:
        raise InputError("effective coupling undefined at zero detuning")
    return p.omega2 * p.omegac / p.detuning


def build_rwa_hamiltonian(p: ThreeLevelParams, layout: SpaceLayout | None = None) -> OperatorM:
    layout = layout or p.layout()
    if len(layout.slots) != 2 or layout.slots[0].radix != 3:
        raise InputError("layout must be (3-level dot, cavity)")
    dot, cav = layout.labels
    h_dot = np.zeros((3, 3), dtype=complex)
    h_dot[ETILDE, ETILDE] = -p.detuning
    h_dot[ETILDE, V] = p.omega2 * np.exp(1j * p.phi)
    h_dot[V, ETILDE] = np.conj(h_dot[ETILDE, V])
    up = np.zeros((3, 3))
    up[E, ETILDE] = 1.0
    x = p.omegac * np.kron(up, annihilation(layout.radix(cav)))
    h = embed(layout, h_dot, [dot]).entries + embed(layout, x + x.T, [dot, cav]).entries
    return OperatorM(layout, h)


def excitation_number(layout: SpaceLayout) -> OperatorM:
    """``a^dag a + |e><e|``: conserved by the rotating-frame Hamiltonian."""
    dot, cav = layout.labels
    n_e = np.zeros((3, 3))
    n_e[E, E] = 1.0
    n = np.diag(np.arange(layout.radix(cav), dtype=float))
    return embed(layout, n_e, [dot]) + embed(layout, n, [cav])


def propagate(h: OperatorM, ket: Ket, duration: float, steps: int) -> Trajectory:
    """Sample ``exp(-i H t / hbar) |ket>`` at ``steps + 1`` uniform times (ps)."""
    if duration <= 0 or steps < 1:
        raise InputError("need duration > 0 and steps >= 1")
    if h.layout != ket.layout:
        raise InputError("Hamiltonian and state live on different layouts")
    w, v = np.linalg.eigh(h.entries)
    dt = duration / steps
    step = (v * np.exp(-1j * w * dt / HBAR_MEV_PS)) @ v.conj().T
    times = np.linspace(0.0, duration, steps + 1)

    three = [s.label for s in ket.layout.slots if s.radix == 3]
    psi = ket.amplitudes
    states = [ket]
    for _ in range(steps):
        psi = step @ psi
        psi = psi / np.linalg.norm(psi)
        states.append(Ket(ket.layout, psi))
    if three:
        pops = np.array(
            [digit_probabilities(ket.layout, np.abs(s.amplitudes) ** 2, three[0])[ETILDE] for s in states]
        )
    else:
        pops = np.zeros(0)
    return Trajectory(times, tuple(states), pops)


def trajectory_rows(traj: Trajectory) -> list[tuple[float, float, float, float, float]]:
    """``(time_ps, pop_v, pop_etilde, pop_e, photon_mean)`` per sample."""
    rows = []
    for t, s in zip(traj.times, traj.states):
        lay = s.layout
        probs = np.abs(s.amplitudes) ** 2
        dot_p = digit_probabilities(lay, probs, lay.labels[0])
        cav_p = digit_probabilities(lay, probs, lay.cavity)
        n_mean = float(np.dot(np.arange(cav_p.size), cav_p))
        rows.append((float(t), float(dot_p[V]), float(dot_p[ETILDE]), float(dot_p[E]), n_mean))
    return rows


TRAJECTORY_HEADER = ("time_ps", "pop_v", "pop_etilde", "pop_e", "photon_mean")


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJECTORY_HEADER)
    for row in trajectory_rows(traj):
        w.writerow([repr(x) for x in row])
    return buf.getvalue()


def fit_transfer_frequency(times: np.ndarray, pop: np.ndarray, guess: float) -> float:
    """Least-squares fit of ``pop(t) = sin^2(Omega t / hbar)``; returns Omega in meV."""

    def resid(x):
        return np.sin(x[0] * times / HBAR_MEV_PS) ** 2 - pop

    res = least_squares(resid, x0=[guess], x_scale=[abs(guess)], xtol=1e-14, ftol=1e-14)
    return float(abs(res.x[0]))


def validate_elimination(p: ThreeLevelParams, steps: int = 2000, duration: float | None = None) -> EliminationReport:
    """Propagate ``|v, 1>`` under the full model for one effective half period
    ``pi hbar / (2 Omega_eff)`` and compare with the eliminated coupling."""
    if p.detuning == 0:
        raise InputError("zero detuning: adiabatic elimination does not apply")
    if max(p.omega2, p.omegac) > abs(p.detuning) / 5:
        raise InputError("outside the perturbative regime: need omega2, omegac <= |detuning| / 5")
    omega_eff = effective_rabi(p)
    if duration is None:
        if omega_eff == 0:
            raise InputError("zero effective coupling: pass an explicit duration")
        duration = math.pi * HBAR_MEV_PS / (2 * abs(omega_eff))

    layout = p.layout()
    h = build_rwa_hamiltonian(p, layout)
    traj = propagate(h, Ket.basis(layout, (V, 1)), duration, steps)
    pop_e0 = np.array([abs(s.amplitude((E, 0))) ** 2 for s in traj.states])

    if omega_eff == 0:
        omega_fit, dev = 0.0, math.nan
    else:
        omega_fit = fit_transfer_frequency(traj.times, pop_e0, abs(omega_eff))
        dev = abs(omega_fit - abs(omega_eff)) / abs(omega_eff)
    return EliminationReport(
        params=p,
        omega_eff=omega_eff,
        omega_fit=omega_fit,
        rel_deviation=dev,
        max_pop_etilde=float(traj.populations_etilde.max()),
        max_pop_e0=float(pop_e0.max()),
        duration=duration,
        trajectory=traj,
    )
