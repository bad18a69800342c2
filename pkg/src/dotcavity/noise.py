"""Lindblad evolution with dot relaxation and cavity loss; CNOT fidelity vs gamma.

Jump operators, per dot slot (``e`` = top level, ``e~`` = middle level of a
radix-3 dot)::

    L1 = sqrt(G1) |v><e|          radiative e -> v
    L2 = sqrt(G2 + G3) |e~><e|    radiative + phonon e -> e~ (same final state)
    Lc = sqrt(kappa) a            cavity photon loss

The integrator is a fixed-step RK4 on the dissipator in the interaction picture
of the (piecewise constant) Hamiltonian, so the coherent part is propagated
exactly and the closed-system limit is exact to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from dotcavity.errors import InputError
from dotcavity.gates import (
    CNOT_TABLE,
    PHI0,
    PulseKind,
    PulseSpec,
    cnot_sequence,
    logic_digits,
)
from dotcavity.qspace import DensityOp, OperatorM, SpaceLayout, annihilation, basis_index, embed
from dotcavity.units import HBAR_MEV_PS

STABILITY_LIMIT = 0.05


@dataclass(frozen=True)
class NoiseChannels:
    """Rates in 1/ps."""

    rate_e_to_v: float = 0.0
    rate_e_to_etilde_rad: float = 0.0
    rate_e_to_etilde_ph: float = 0.0
    kappa_cavity: float = 0.0

    def __post_init__(self):
        for name in ("rate_e_to_v", "rate_e_to_etilde_rad", "rate_e_to_etilde_ph", "kappa_cavity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be finite and >= 0, got {v!r}")

    def scaled(self, gamma: float) -> "NoiseChannels":
        """Dot channels times ``gamma``; cavity loss unchanged."""
        return replace(
            self,
            rate_e_to_v=gamma * self.rate_e_to_v,
            rate_e_to_etilde_rad=gamma * self.rate_e_to_etilde_rad,
            rate_e_to_etilde_ph=gamma * self.rate_e_to_etilde_ph,
        )


def jump_operators(layout: SpaceLayout, ch: NoiseChannels) -> list[np.ndarray]:
    """Jump operators (rates folded in) for every dot slot plus the cavity."""
    ops = []
    for slot in layout.slots[:-1]:
        r = slot.radix
        if r not in (2, 3):
            raise InputError(f"dot slot {slot.label!r} must have radix 2 or 3")
        e = r - 1
        if ch.rate_e_to_v > 0:
            m = np.zeros((r, r))
            m[0, e] = math.sqrt(ch.rate_e_to_v)
            ops.append(embed(layout, m, [slot.label]).entries)
        to_et = ch.rate_e_to_etilde_rad + ch.rate_e_to_etilde_ph
        if to_et > 0:
            if r != 3:
                raise InputError(f"e -> e~ channels need a 3-level dot, slot {slot.label!r} has radix {r}")
            m = np.zeros((3, 3))
            m[1, 2] = math.sqrt(to_et)
            ops.append(embed(layout, m, [slot.label]).entries)
    if ch.kappa_cavity > 0:
        a = annihilation(layout.radix(layout.cavity))
        ops.append(embed(layout, math.sqrt(ch.kappa_cavity) * a, [layout.cavity]).entries)
    return ops


def max_rate(layout: SpaceLayout, ch: NoiseChannels) -> float:
    dot = ch.rate_e_to_v + ch.rate_e_to_etilde_rad + ch.rate_e_to_etilde_ph
    return max(dot, ch.kappa_cavity * layout.fock_cutoff)


def _spectral_norm(m: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(m)).max()) if m.size else 0.0


def _evolve(h: np.ndarray, jumps: list[np.ndarray], rho: np.ndarray, duration: float, n_steps: int) -> np.ndarray:
    w, v = np.linalg.eigh(h / HBAR_MEV_PS)
    vd = v.conj().T
    rho_i = vd @ rho @ v
    if jumps:
        ls = np.stack([vd @ L @ v for L in jumps])
        ldl = np.einsum("kji,kjl->il", ls.conj(), ls)
        omega = w[:, None] - w[None, :]

        def rhs(ph, r):
            a = ldl * ph
            lt = ls * ph
            return (lt @ r @ lt.conj().transpose(0, 2, 1)).sum(axis=0) - 0.5 * (a @ r + r @ a)

        hstep = duration / n_steps
        half = np.exp(1j * omega * hstep / 2)
        ph = np.ones_like(omega, dtype=complex)
        for n in range(n_steps):
            if n % 64 == 0:  # refresh to keep phase roundoff from accumulating
                ph = np.exp(1j * omega * (n * hstep))
            ph_mid = ph * half
            ph_end = ph_mid * half
            k1 = rhs(ph, rho_i)
            k2 = rhs(ph_mid, rho_i + hstep / 2 * k1)
            k3 = rhs(ph_mid, rho_i + hstep / 2 * k2)
            k4 = rhs(ph_end, rho_i + hstep * k3)
            rho_i = rho_i + hstep / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            rho_i = 0.5 * (rho_i + rho_i.conj().T)
            ph = ph_end
    ph = np.exp(-1j * w * duration)
    rho_s = (ph[:, None] * rho_i) * ph.conj()[None, :]
    out = v @ rho_s @ vd
    return 0.5 * (out + out.conj().T)


def suggested_dt(h: OperatorM, channels: NoiseChannels, limit: float = STABILITY_LIMIT) -> float:
    scale = max_rate(h.layout, channels) + _spectral_norm(h.entries) / HBAR_MEV_PS
    return math.inf if scale == 0 else limit / scale


def lindblad_evolve(
    h: OperatorM, channels: NoiseChannels, rho0: DensityOp, duration: float, dt: float
) -> DensityOp:
    """Integrate the master equation for ``duration`` ps with steps of at most ``dt``."""
    if h.layout != rho0.layout:
        raise InputError("Hamiltonian and density matrix live on different layouts")
    if not (duration > 0 and dt > 0) or dt > duration * (1 + 1e-12):
        raise InputError("need 0 < dt <= duration")
    if h.hermiticity_error() > 1e-12 * max(1.0, float(np.abs(h.entries).max())):
        raise InputError("Hamiltonian is not Hermitian")
    limit = suggested_dt(h, channels)
    if dt > limit:
        raise InputError(f"dt = {dt!r} ps violates the stability guard; use dt <= {limit!r} ps")
    n_steps = max(1, math.ceil(duration / dt - 1e-9))
    out = _evolve(h.entries, jump_operators(h.layout, channels), rho0.entries, duration, n_steps)
    return DensityOp(rho0.layout, out)


# -- timed CNOT -------------------------------------------------------------------


@dataclass(frozen=True)
class TimedPulse:
    """A pulse held for ``duration`` ps; zero duration means an instantaneous
    (frame-change) gate."""

    spec: PulseSpec
    duration: float


def pulse_duration(spec: PulseSpec, omega1: float, omega_eff: float) -> float:
    """Square-pulse duration for Rabi angle ``theta`` at coupling Omega (meV):
    ``|theta| hbar / (2 Omega)``.  Phase gates are frame changes (0 ps)."""
    if spec.kind is PulseKind.PHASE_Z:
        return 0.0
    omega = omega_eff if spec.kind is PulseKind.RED_SIDEBAND else omega1
    if omega <= 0:
        raise InputError("pulse couplings must be > 0")
    return abs(spec.theta) * HBAR_MEV_PS / (2 * omega)


def cnot_pulse_plan(
    omega1: float, omega_eff: float, control: str = "j", target: str = "k", phi: float = 0.0
) -> list[TimedPulse]:
    """Timed CNOT.  Each Hadamard is a phase frame change followed by a
    carrier pi/2 pulse, equal to the ideal Hadamard up to a global phase."""
    specs = []
    for step in cnot_sequence(control, target, phi, PHI0):
        if isinstance(step, str):
            label = step.partition(":")[2]
            specs += [
                PulseSpec(PulseKind.PHASE_Z, label, phi0=math.pi / 2),
                PulseSpec(PulseKind.CARRIER, label, theta=math.pi / 2, phi=math.pi / 2),
            ]
        else:
            specs.append(step)
    return [TimedPulse(s, pulse_duration(s, omega1, omega_eff)) for s in specs]


def pulse_hamiltonian(layout: SpaceLayout, tp: TimedPulse) -> OperatorM:
    """Constant H with ``exp(-i H T / hbar)`` equal to the pulse unitary."""
    g, s = tp.spec.generator(layout)
    return g * (-HBAR_MEV_PS * s / tp.duration)


def noise_layout(control: str = "j", target: str = "k", fock_cutoff: int = 3) -> SpaceLayout:
    return SpaceLayout.dots_and_cavity((control, target), fock_cutoff=fock_cutoff, levels=3)


def fidelity_inputs(layout: SpaceLayout, control: str, target: str) -> list[tuple[np.ndarray, np.ndarray]]:
    """(input, ideal output) pairs: four logic basis states and their uniform superposition."""
    digits = logic_digits(layout, control, target)
    basis = []
    for d in digits:
        v = np.zeros(layout.dim, dtype=complex)
        v[basis_index(layout, d)] = 1.0
        basis.append(v)
    outs = [sum(CNOT_TABLE[r, c] * basis[r] for r in range(4)) for c in range(4)]
    pairs = list(zip(basis, outs))
    pairs.append((sum(basis) / 2, sum(outs) / 2))
    return pairs


def run_plan(layout: SpaceLayout, plan: Sequence[TimedPulse], channels: NoiseChannels, rho: np.ndarray) -> np.ndarray:
    jumps = jump_operators(layout, channels)
    rate = max_rate(layout, channels)
    for tp in plan:
        if tp.duration == 0:
            u = tp.spec.unitary(layout).entries
            rho = u @ rho @ u.conj().T
            continue
        h = pulse_hamiltonian(layout, tp)
        scale = rate + _spectral_norm(h.entries) / HBAR_MEV_PS
        n_steps = max(1, math.ceil(tp.duration * scale / (0.8 * STABILITY_LIMIT)))
        rho = _evolve(h.entries, jumps, rho, tp.duration, n_steps)
    return rho


def cnot_fidelity_under_noise(
    gamma: float,
    intra_channels: NoiseChannels,
    pulse_plan: Sequence[TimedPulse],
    layout: SpaceLayout | None = None,
    control: str = "j",
    target: str = "k",
) -> float:
    """Mean output fidelity of the timed CNOT over five fixed inputs, with the
    dot channels scaled by ``gamma``."""
    if not 0 < gamma <= 1:
        raise InputError("gamma must lie in (0, 1]")
    layout = layout or noise_layout(control, target)
    channels = intra_channels.scaled(gamma)
    fids = []
    for psi_in, psi_ideal in fidelity_inputs(layout, control, target):
        rho = run_plan(layout, pulse_plan, channels, np.outer(psi_in, psi_in.conj()))
        fids.append(float(np.real(psi_ideal.conj() @ rho @ psi_ideal)))
    return float(min(1.0, max(0.0, np.mean(fids))))


def fidelity_table(
    gammas: Sequence[float], intra_channels: NoiseChannels, pulse_plan: Sequence[TimedPulse]
) -> list[tuple[float, float]]:
    return [(float(g), cnot_fidelity_under_noise(g, intra_channels, pulse_plan)) for g in gammas]
