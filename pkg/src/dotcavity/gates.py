"""Pulse unitaries and the cavity-mediated CNOT.

All gates act on a layout of dot slots followed by one cavity slot.  A dot slot
of radix 2 holds the logic pair ``(|0~> = |v>, |1~> = |e>)``; radix 3 holds
``(|v>, |e~>, |e>)`` and every gate here acts as identity on ``|e~>``.

Pulse products are matrix products: the rightmost factor acts first.

    >>> lay = SpaceLayout.dots_and_cavity(("j", "k"), fock_cutoff=3)
    >>> u = cnot(lay, "j", "k")
    >>> amp = u.block([(1, 1, 0)], [(1, 0, 0)])[0, 0]  # <1~1~;0| U |1~0~;0>
    >>> bool(abs(amp - 1) < 1e-12)
    True
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from dotcavity.errors import InputError
from dotcavity.qspace import (
    OperatorM,
    SpaceLayout,
    annihilation,
    basis_index,
    digit_probabilities,
    embed,
    expm_hermitian,
)

PHI0 = math.pi / (2 * math.sqrt(2))
DELTA_G = complex(math.cos(PHI0), math.sin(PHI0))
CHECK_TOL = 1e-9

HADAMARD = np.array([[-1.0, 1.0], [1.0, 1.0]]) / math.sqrt(2)
CNOT_TABLE = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
"""Zero-photon CNOT block in basis order (00, 10, 01, 11) = (control, target)."""


@dataclass(frozen=True)
class GateConstants:
    phi0: float = PHI0

    @property
    def delta_g(self) -> complex:
        return complex(math.cos(self.phi0), math.sin(self.phi0))


class PulseKind(str, enum.Enum):
    RED_SIDEBAND = "red_sideband"
    CARRIER = "carrier"
    PHASE_Z = "phase_z"


@dataclass(frozen=True)
class PulseSpec:
    """One square pulse.  ``theta`` and ``phi`` are read by RED_SIDEBAND and
    CARRIER, ``phi0`` only by PHASE_Z."""

    kind: PulseKind
    target: str
    theta: float = 0.0
    phi: float = 0.0
    phi0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PulseKind(self.kind))
        for name in ("theta", "phi", "phi0"):
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"pulse {name} must be finite")

    def generator(self, layout: SpaceLayout) -> tuple[OperatorM, float]:
        """``(G, s)`` with the pulse unitary equal to ``exp(i * s * G)``."""
        if self.kind is PulseKind.RED_SIDEBAND:
            return red_sideband_generator(layout, self.target, self.phi), self.theta / 2
        if self.kind is PulseKind.CARRIER:
            return carrier_generator(layout, self.target, self.phi), self.theta / 2
        return embed(layout, _lift(layout, self.target, np.diag([1.0, -1.0])), [self.target]), self.phi0

    def unitary(self, layout: SpaceLayout) -> OperatorM:
        g, s = self.generator(layout)
        return expm_hermitian(g, s)


def _qubit_levels(layout: SpaceLayout, target: str) -> tuple[int, int]:
    if target == layout.cavity:
        raise InputError(f"{target!r} is the cavity slot, not a dot")
    r = layout.radix(target)
    if r not in (2, 3):
        raise InputError(f"dot slot {target!r} must have radix 2 or 3, got {r}")
    return 0, r - 1


def _lift(layout: SpaceLayout, target: str, m2) -> np.ndarray:
    """Place a 2x2 logic-pair matrix on the (v, e) levels of a dot slot."""
    v, e = _qubit_levels(layout, target)
    out = np.eye(layout.radix(target), dtype=complex)
    idx = [v, e]
    out[np.ix_(idx, idx)] = m2
    return out


def _raise_op(layout: SpaceLayout, target: str) -> np.ndarray:
    v, e = _qubit_levels(layout, target)
    s = np.zeros((layout.radix(target),) * 2)
    s[e, v] = 1.0
    return s


def red_sideband_generator(layout: SpaceLayout, target: str, phi: float) -> OperatorM:
    """``|e><v| a e^{i phi} + H.c.`` on (target dot, cavity)."""
    a = annihilation(layout.radix(layout.cavity))
    x = np.kron(_raise_op(layout, target), a) * np.exp(1j * phi)
    return embed(layout, x + x.conj().T, [target, layout.cavity])


def carrier_generator(layout: SpaceLayout, target: str, phi: float) -> OperatorM:
    """``|e><v| e^{i phi} + H.c.`` on the target dot."""
    x = _raise_op(layout, target) * np.exp(1j * phi)
    return embed(layout, x + x.conj().T, [target])


def red_sideband(layout: SpaceLayout, target: str, theta: float, phi: float) -> OperatorM:
    """``R(theta, phi) = exp[i theta/2 (|e><v| a e^{i phi} + H.c.)]``.

    ``|v, 0>`` is dark; the pair ``(|v, n+1>, |e, n>)`` rotates with angle
    ``sqrt(n + 1) * theta``.
    """
    if layout.fock_cutoff < 1:
        raise InputError("red-sideband pulses need a cavity cutoff >= 1 (one photon)")
    return PulseSpec(PulseKind.RED_SIDEBAND, target, theta, phi).unitary(layout)


def carrier_rotation(layout: SpaceLayout, target: str, theta: float, phi: float) -> OperatorM:
    return PulseSpec(PulseKind.CARRIER, target, theta, phi).unitary(layout)


def hadamard(layout: SpaceLayout, target: str) -> OperatorM:
    return embed(layout, _lift(layout, target, HADAMARD), [target])


def phase_z(layout: SpaceLayout, target: str, phi0: float) -> OperatorM:
    """``diag(e^{i phi0}, e^{-i phi0})`` on the logic pair of ``target``."""
    z = np.diag([np.exp(1j * phi0), np.exp(-1j * phi0)])
    return embed(layout, _lift(layout, target, z), [target])


def _require_two_photons(layout: SpaceLayout) -> None:
    if layout.fock_cutoff < 2:
        raise InputError(
            "cavity cutoff must be >= 2: the sqrt(2)-Rabi pair |e,1> <-> |v,2> "
            f"must be representable (got cutoff {layout.fock_cutoff})"
        )


P_SEQUENCE = ((-math.pi / 2, 0.0), (math.sqrt(2) * math.pi, -math.pi / 2), (math.pi / 2, 0.0))
"""(theta, phi) of the red-sideband factors of P, written left to right."""


def p_gate(layout: SpaceLayout, target: str) -> OperatorM:
    _require_two_photons(layout)
    u = OperatorM.identity(layout)
    for theta, phi in P_SEQUENCE:
        u = u @ red_sideband(layout, target, theta, phi)
    return u


def g_gate(layout: SpaceLayout, target: str, phi0: float = PHI0) -> OperatorM:
    h = hadamard(layout, target)
    return h @ p_gate(layout, target) @ phase_z(layout, target, phi0) @ h


def cnot(layout: SpaceLayout, control: str, target: str, phi: float = 0.0, phi0: float = PHI0) -> OperatorM:
    """``Z_j(-phi0) R_j(pi, phi) G_k R_j(pi, phi)``; exact CNOT on the zero-photon sector."""
    if control == target:
        raise InputError("control and target must be different dots")
    r = red_sideband(layout, control, math.pi, phi)
    return phase_z(layout, control, -phi0) @ r @ g_gate(layout, target, phi0) @ r


def cnot_sequence(control: str, target: str, phi: float = 0.0, phi0: float = PHI0) -> list:
    """The CNOT as a time-ordered list of gate steps.

    Each entry is a PulseSpec or the string ``"hadamard:<label>"``.
    """
    had = f"hadamard:{target}"
    p_pulses = [PulseSpec(PulseKind.RED_SIDEBAND, target, th, ph) for th, ph in reversed(P_SEQUENCE)]
    return [
        PulseSpec(PulseKind.RED_SIDEBAND, control, math.pi, phi),
        had,
        PulseSpec(PulseKind.PHASE_Z, target, phi0=phi0),
        *p_pulses,
        had,
        PulseSpec(PulseKind.RED_SIDEBAND, control, math.pi, phi),
        PulseSpec(PulseKind.PHASE_Z, control, phi0=-phi0),
    ]


def step_unitary(layout: SpaceLayout, step) -> OperatorM:
    if isinstance(step, PulseSpec):
        return step.unitary(layout)
    kind, _, label = step.partition(":")
    if kind != "hadamard":
        raise InputError(f"unknown gate step {step!r}")
    return hadamard(layout, label)


# -- verification -------------------------------------------------------------


def logic_block(u: OperatorM, control: str, target: str) -> np.ndarray:
    """Zero-photon 4x4 block in order (00, 10, 01, 11) of (control, target)."""
    return u.block(logic_digits(u.layout, control, target))


def logic_digits(layout: SpaceLayout, control: str, target: str, photons: int = 0) -> list[tuple[int, ...]]:
    out = []
    for b in (0, 1):
        for a in (0, 1):
            d = [0] * len(layout.slots)
            d[layout.position(control)] = _qubit_levels(layout, control)[a]
            d[layout.position(target)] = _qubit_levels(layout, target)[b]
            d[-1] = photons
            out.append(tuple(d))
    return out


def _qubit_photon_digits(layout: SpaceLayout, target: str) -> list[tuple[int, ...]]:
    """Basis (|0~;0>, |0~;1>, |1~;0>, |1~;1>) for ``target`` with other dots in |v>."""
    out = []
    for q in _qubit_levels(layout, target):
        for n in (0, 1):
            d = [0] * len(layout.slots)
            d[layout.position(target)] = q
            d[-1] = n
            out.append(tuple(d))
    return out


def p_diagonal_expected() -> np.ndarray:
    w = math.pi / math.sqrt(2)
    return np.array([1.0, np.exp(-1j * w), np.exp(1j * w), -1.0])


def g_action_expected(delta_g: complex = DELTA_G) -> np.ndarray:
    """Matrix of G on (|0~;0>, |0~;1>, |1~;0>, |1~;1>); column = input."""
    g = np.zeros((4, 4), dtype=complex)
    g[0, 0] = delta_g
    g[3, 1] = -delta_g.conjugate()
    g[2, 2] = delta_g
    g[1, 3] = -delta_g.conjugate()
    return g


def subspace_leakage(u: OperatorM, digits: list[tuple[int, ...]]) -> float:
    """Largest matrix element connecting the listed subspace to its complement."""
    idx = [basis_index(u.layout, d) for d in digits]
    rest = np.setdiff1d(np.arange(u.layout.dim), idx)
    m = u.entries
    if rest.size == 0:
        return 0.0
    return float(max(np.abs(m[np.ix_(rest, idx)]).max(), np.abs(m[np.ix_(idx, rest)]).max()))


def max_photon_population(layout: SpaceLayout, steps, ket_amps: np.ndarray, above: int) -> float:
    """Peak population on photon numbers > ``above`` while running ``steps``."""
    psi = np.asarray(ket_amps, dtype=complex)
    peak = 0.0
    for s in steps:
        psi = step_unitary(layout, s).entries @ psi
        p = digit_probabilities(layout, np.abs(psi) ** 2, layout.cavity)
        peak = max(peak, float(p[above + 1 :].sum()))
    return peak


@dataclass(frozen=True)
class CheckResult:
    check: str
    deviation: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [{"check": c.check, "deviation": c.deviation, "pass": c.passed} for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        width = max(len(c.check) for c in self.checks)
        lines = [
            f"{c.check:<{width}}  max_dev={c.deviation:.3e}  {'PASS' if c.passed else 'FAIL'}" for c in self.checks
        ]
        lines.append(f"{'overall':<{width}}  {'PASS' if self.all_passed else 'FAIL'}")
        return "\n".join(lines)


def _basis_amps(layout: SpaceLayout, digits) -> np.ndarray:
    v = np.zeros(layout.dim, dtype=complex)
    v[basis_index(layout, digits)] = 1.0
    return v


VERIFY_PHIS = (0.0, math.pi / 3, 1.7)


def verify_protocol(layout: SpaceLayout | None = None, control: str | None = None, target: str | None = None,
                    tol: float = CHECK_TOL) -> VerificationReport:
    """Check the swap, P, G and CNOT identities of the protocol on ``layout``."""
    layout = layout or SpaceLayout.dots_and_cavity(("j", "k"), fock_cutoff=3)
    _require_two_photons(layout)
    dots = [lbl for lbl in layout.labels if lbl != layout.cavity]
    if len(dots) < 2:
        raise InputError("verification needs two dot slots")
    control = control or dots[0]
    target = target or dots[1]
    results: list[CheckResult] = []

    def add(name, dev, limit=tol):
        results.append(CheckResult(name, float(dev), bool(dev <= limit)))

    # swap identities: R_j(pi, phi)|1~;0> = i e^{-i phi}|0~;1>, and the reverse
    dev = 0.0
    lv, le = _qubit_levels(layout, control)
    cpos = layout.position(control)
    for phi in VERIFY_PHIS:
        r = red_sideband(layout, control, math.pi, phi)
        for b in _qubit_levels(layout, target):
            d = [0] * len(layout.slots)
            d[layout.position(target)] = b
            d10 = list(d); d10[cpos] = le
            d01 = list(d); d01[cpos] = lv; d01[-1] = 1
            out = r.entries @ _basis_amps(layout, d10)
            dev = max(dev, np.abs(out - 1j * np.exp(-1j * phi) * _basis_amps(layout, d01)).max())
            out = r.entries @ _basis_amps(layout, d01)
            dev = max(dev, np.abs(out - 1j * np.exp(1j * phi) * _basis_amps(layout, d10)).max())
    add("swap_identities", dev)

    p = p_gate(layout, target)
    sub = _qubit_photon_digits(layout, target)
    blk = p.block(sub)
    add("p_diagonal", np.abs(blk - np.diag(p_diagonal_expected())).max())
    add("p_leakage", subspace_leakage(p, sub), 1e-10)

    g = g_gate(layout, target)
    add("g_action", np.abs(g.block(sub) - g_action_expected()).max())

    dev = 0.0
    unit_dev = 0.0
    for phi in VERIFY_PHIS:
        u = cnot(layout, control, target, phi)
        dev = max(dev, np.abs(logic_block(u, control, target) - CNOT_TABLE).max())
        unit_dev = max(unit_dev, u.unitarity_error())
    add("cnot_truth_table", dev)
    add("unitarity", max(unit_dev, p.unitarity_error(), g.unitarity_error()), 1e-10)

    if layout.fock_cutoff >= 3:
        peak = 0.0
        for d in logic_digits(layout, control, target):
            peak = max(peak, max_photon_population(layout, cnot_sequence(control, target), _basis_amps(layout, d), 2))
        add("fock_leakage", peak, 1e-10)

    return VerificationReport(tuple(results))
