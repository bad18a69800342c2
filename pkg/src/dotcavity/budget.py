"""Gate-time versus decoherence-time budget for spatially separated qubits.

Putting the qubit excitation ``|e>`` mostly in the other dot reduces every
intra-dot relaxation rate by ``gamma`` and every optical coupling to ``|e>``
by ``sqrt(gamma)``.  Decoherence time grows as ``1/gamma`` while gate time
grows only as ``1/sqrt(gamma)``, so the ratio ``rho = tau_d / tau_G`` improves
by ``gamma**-0.5``.  Within these formulas that improvement is exact; for a
real device it is a rough scaling estimate.

Couplings quoted as a frequency (the cavity coupling is usually given in MHz)
become energies through ``2 pi hbar f`` by default; ``freq_convention="hbar"``
uses ``hbar f`` instead.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Sequence

from dotcavity.dotmodel import separation_factor
from dotcavity.errors import InputError
from dotcavity.units import (
    FREQ_CONVENTIONS,
    HBAR_MEV_PS,
    Quantity,
    UnitError,
    as_energy,
    require,
)

PAPER_T_COUPLING = Quantity(0.01, "meV")
PAPER_DELTA_E = Quantity(10.0, "meV")
PAPER_OMEGA2 = Quantity(0.1, "meV")
PAPER_OMEGAC_INTRA = Quantity(300.0, "MHz")
PAPER_DETUNING = Quantity(1.0, "meV")


@dataclass(frozen=True)
class BudgetParams:
    """Inputs of the budget.  Every dimensional field must be a Quantity.

    ``tau_d_intra`` (intra-dot decoherence time) has no default; when it is
    missing, ``1 / sum(intra_rates)`` is used if rates are given.  1 ns is a
    typical intra-dot exciton lifetime.
    """

    gamma: float
    omega1_intra: Quantity
    omega2: Quantity
    omegac_intra: Quantity
    detuning: Quantity
    tau_d_intra: Quantity | None = None
    intra_rates: tuple[Quantity, Quantity, Quantity] | None = None
    freq_convention: str = "h"

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise InputError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        require(self.omega1_intra, "energy", "omega1_intra")
        require(self.omega2, "energy", "omega2")
        require(self.detuning, "energy", "detuning")
        if not isinstance(self.omegac_intra, Quantity) or self.omegac_intra.dimension not in ("energy", "frequency"):
            raise UnitError(f"omegac_intra: expected an energy or frequency quantity, got {self.omegac_intra!r}")
        if self.tau_d_intra is not None:
            require(self.tau_d_intra, "time", "tau_d_intra")
            if self.tau_d_intra.value <= 0:
                raise InputError("tau_d_intra must be > 0")
        if self.intra_rates is not None:
            if len(self.intra_rates) != 3:
                raise InputError("intra_rates needs exactly three channel rates")
            for i, r in enumerate(self.intra_rates):
                require(r, "rate", f"intra_rates[{i}]")
                if r.value < 0:
                    raise InputError("rates must be >= 0")
        for name in ("omega1_intra", "omega2", "omegac_intra"):
            if getattr(self, name).value < 0:
                raise InputError(f"{name} must be >= 0")
        if self.freq_convention not in FREQ_CONVENTIONS:
            raise UnitError(f"freq_convention must be one of {FREQ_CONVENTIONS}")


@dataclass(frozen=True)
class BudgetReport:
    gamma: float
    omega1: float
    omegac: float
    omega_eff: float
    t_gate_direct: float
    t_gate_cavity: float
    tau_d: float
    rho_direct: float
    rho_cavity: float
    enhancement: float
    enhancement_direct: float

    UNITS = {
        "gamma": "",
        "omega1": "meV",
        "omegac": "meV",
        "omega_eff": "meV",
        "t_gate_direct": "ps",
        "t_gate_cavity": "ps",
        "tau_d": "ps",
        "rho_direct": "",
        "rho_cavity": "",
        "enhancement": "",
        "enhancement_direct": "",
    }

    def items(self):
        for name in self.UNITS:
            yield name, getattr(self, name), self.UNITS[name]


def scale_couplings(gamma: float, omega1_intra: float, omegac_intra: float) -> tuple[float, float]:
    s = math.sqrt(gamma)
    return s * omega1_intra, s * omegac_intra


def scale_rates(gamma: float, intra_rates: Sequence[float]) -> list[float]:
    return [gamma * w for w in intra_rates]


def decoherence_time(gamma: float, tau_d_intra: float) -> float:
    if gamma <= 0:
        raise InputError("gamma must be > 0")
    return tau_d_intra / gamma


def gate_times(omega1: float, omega_eff: float) -> tuple[float, float]:
    """Flip times ``(pi hbar / Omega_1, pi hbar / Omega_eff)`` in ps for couplings in meV."""
    if omega1 <= 0 or omega_eff <= 0:
        raise InputError("gate times need couplings > 0")
    return math.pi * HBAR_MEV_PS / omega1, math.pi * HBAR_MEV_PS / omega_eff


def gate_ratio(tau_d: float, t_gate: float) -> float:
    if t_gate <= 0:
        raise InputError("gate time must be > 0")
    return tau_d / t_gate


def _tau_d_intra_ps(p: BudgetParams) -> float:
    if p.tau_d_intra is not None:
        return p.tau_d_intra.in_("ps")
    if p.intra_rates is not None:
        total = sum(r.in_("1/ps") for r in p.intra_rates)
        if total > 0:
            return 1.0 / total
    raise InputError("intra-dot decoherence time is required (tau_d_intra, or nonzero intra_rates)")


def _raw(p: BudgetParams, gamma: float) -> tuple[float, float, float, float, float, float, float]:
    omega1, omegac = scale_couplings(gamma, p.omega1_intra.in_("meV"), as_energy(p.omegac_intra, p.freq_convention).value)
    delta = p.detuning.in_("meV")
    if delta == 0:
        raise InputError("detuning must be nonzero")
    omega_eff = abs(p.omega2.in_("meV") * omegac / delta)
    t_direct, t_cavity = gate_times(omega1, omega_eff)
    tau_d = decoherence_time(gamma, _tau_d_intra_ps(p))
    return omega1, omegac, omega_eff, t_direct, t_cavity, tau_d, gamma


def compute_budget(p: BudgetParams) -> BudgetReport:
    omega1, omegac, omega_eff, t_direct, t_cavity, tau_d, _ = _raw(p, p.gamma)
    _, _, _, t_direct1, t_cavity1, tau_d1, _ = _raw(p, 1.0)
    rho_d, rho_c = gate_ratio(tau_d, t_direct), gate_ratio(tau_d, t_cavity)
    return BudgetReport(
        gamma=p.gamma,
        omega1=omega1,
        omegac=omegac,
        omega_eff=omega_eff,
        t_gate_direct=t_direct,
        t_gate_cavity=t_cavity,
        tau_d=tau_d,
        rho_direct=rho_d,
        rho_cavity=rho_c,
        enhancement=rho_c / gate_ratio(tau_d1, t_cavity1),
        enhancement_direct=rho_d / gate_ratio(tau_d1, t_direct1),
    )


def paper_preset(
    tau_d_intra: Quantity | None = None,
    intra_rates: tuple[Quantity, Quantity, Quantity] | None = None,
    omega1_intra: Quantity | None = None,
    freq_convention: str = "h",
) -> BudgetParams:
    """t = 0.01 meV, Delta = 10 meV, Omega_2 = 0.1 meV, Omega_c~ = 300 MHz, delta = 1 meV.

    The intra-dot laser coupling defaults to Omega_2 (same intra-dot interband
    transition strength).  No intra-dot decoherence time is assumed.
    """
    gamma = separation_factor(PAPER_T_COUPLING.in_("meV"), PAPER_DELTA_E.in_("meV"))
    return BudgetParams(
        gamma=gamma,
        omega1_intra=omega1_intra if omega1_intra is not None else PAPER_OMEGA2,
        omega2=PAPER_OMEGA2,
        omegac_intra=PAPER_OMEGAC_INTRA,
        detuning=PAPER_DETUNING,
        tau_d_intra=tau_d_intra,
        intra_rates=intra_rates,
        freq_convention=freq_convention,
    )


SWEEP_HEADER = ("t_meV", "delta_meV", "gamma", "omega_eff_meV", "tau_G_ps", "tau_d_ps", "rho")


def sweep(t_range: Sequence[float], delta_range: Sequence[float], fixed: BudgetParams) -> list[tuple[float, ...]]:
    """Budget over a (t, Delta) grid in meV; rows in t-major order.

    ``tau_G`` and ``rho`` refer to the cavity-assisted gate.
    """
    rows = []
    for t in t_range:
        for d in delta_range:
            g = separation_factor(t, d)
            if g <= 0:
                raise InputError(f"gamma vanishes at t={t!r}, Delta={d!r}")
            r = compute_budget(replace(fixed, gamma=g))
            rows.append((float(t), float(d), g, r.omega_eff, r.t_gate_cavity, r.tau_d, r.rho_cavity))
    return rows


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()
