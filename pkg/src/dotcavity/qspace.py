"""Dense finite-dimensional Hilbert-space algebra.

Composite spaces are tensor products of labelled slots.  Basis states are
indexed in mixed radix with the *leftmost slot most significant*, so for a
layout ``[q:2, q:2, cav:3]`` the digits ``(1, 0, 1)`` map to ``1*6 + 0*3 + 1``.
Every gate truth table in the package depends on this ordering.

By convention the last slot is the cavity mode (radix ``fock_cutoff + 1``) and
the preceding slots are dots, radix 2 (logic levels ``v, e``) or radix 3
(``v, e~, e``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from dotcavity.errors import InputError

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class Slot:
    label: str
    radix: int


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered tensor factors of a composite Hilbert space."""

    slots: tuple[Slot, ...]

    def __post_init__(self):
        slots = tuple(s if isinstance(s, Slot) else Slot(*s) for s in self.slots)
        object.__setattr__(self, "slots", slots)
        if not slots:
            raise InputError("layout needs at least one slot")
        labels = [s.label for s in slots]
        if len(set(labels)) != len(labels):
            raise InputError(f"slot labels must be unique, got {labels}")
        for s in slots:
            if int(s.radix) != s.radix or s.radix < 2:
                raise InputError(f"slot {s.label!r}: radix must be an integer >= 2")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "SpaceLayout":
        return cls(tuple(Slot(label, radix) for label, radix in pairs))

    @classmethod
    def dots_and_cavity(
        cls,
        dots: Sequence[str] = ("j", "k"),
        fock_cutoff: int = 3,
        levels: int = 2,
        cavity: str = "cav",
    ) -> "SpaceLayout":
        """Dots of ``levels`` levels each followed by one cavity slot."""
        if fock_cutoff < 0:
            raise InputError("fock cutoff must be non-negative")
        if fock_cutoff == 0:
            raise InputError("fock cutoff 0 gives a radix-1 cavity slot")
        return cls.of(*[(d, levels) for d in dots], (cavity, fock_cutoff + 1))

    @property
    def radices(self) -> tuple[int, ...]:
        return tuple(s.radix for s in self.slots)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.slots)

    @property
    def dim(self) -> int:
        return int(np.prod(self.radices))

    @property
    def cavity(self) -> str:
        return self.slots[-1].label

    @property
    def fock_cutoff(self) -> int:
        return self.slots[-1].radix - 1

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"no slot labelled {label!r} in {self.labels}") from None

    def radix(self, label: str) -> int:
        return self.slots[self.position(label)].radix


def basis_index(layout: SpaceLayout, digits: Sequence[int]) -> int:
    if len(digits) != len(layout.slots):
        raise InputError(f"expected {len(layout.slots)} digits, got {len(digits)}")
    index = 0
    for d, s in zip(digits, layout.slots):
        if not 0 <= d < s.radix:
            raise InputError(f"digit {d} out of range for slot {s.label!r} (radix {s.radix})")
        index = index * s.radix + int(d)
    return index


def basis_digits(layout: SpaceLayout, index: int) -> tuple[int, ...]:
    if not 0 <= index < layout.dim:
        raise InputError(f"index {index} out of range for dimension {layout.dim}")
    digits = []
    for r in reversed(layout.radices):
        index, d = divmod(index, r)
        digits.append(d)
    return tuple(reversed(digits))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Ket:
    layout: SpaceLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape != (self.layout.dim,):
            raise InputError(f"ket length {amps.size} != layout dimension {self.layout.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InputError(f"ket not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, layout: SpaceLayout, digits: Sequence[int]) -> "Ket":
        amps = np.zeros(layout.dim, dtype=complex)
        amps[basis_index(layout, digits)] = 1.0
        return cls(layout, amps)

    @classmethod
    def normalized(cls, layout: SpaceLayout, amplitudes) -> "Ket":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise InputError("cannot normalize the zero vector")
        return cls(layout, amps / norm)

    @classmethod
    def superpose(cls, layout: SpaceLayout, terms: Iterable[tuple[complex, Sequence[int]]]) -> "Ket":
        amps = np.zeros(layout.dim, dtype=complex)
        for c, digits in terms:
            amps[basis_index(layout, digits)] += c
        return cls.normalized(layout, amps)

    def amplitude(self, digits: Sequence[int]) -> complex:
        return complex(self.amplitudes[basis_index(self.layout, digits)])

    def density(self) -> "DensityOp":
        return DensityOp(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class OperatorM:
    layout: SpaceLayout
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.entries)
        d = self.layout.dim
        if m.shape != (d, d):
            raise InputError(f"operator shape {m.shape} != ({d}, {d})")
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls, layout: SpaceLayout) -> "OperatorM":
        return cls(layout, np.eye(layout.dim))

    def __matmul__(self, other):
        if isinstance(other, OperatorM):
            _same_layout(self.layout, other.layout)
            return OperatorM(self.layout, self.entries @ other.entries)
        if isinstance(other, Ket):
            return apply(self, other)
        return NotImplemented

    def __add__(self, other: "OperatorM") -> "OperatorM":
        _same_layout(self.layout, other.layout)
        return OperatorM(self.layout, self.entries + other.entries)

    def __mul__(self, c: complex) -> "OperatorM":
        return OperatorM(self.layout, self.entries * c)

    __rmul__ = __mul__

    def dagger(self) -> "OperatorM":
        return OperatorM(self.layout, self.entries.conj().T)

    def unitarity_error(self) -> float:
        m = self.entries
        return float(np.abs(m.conj().T @ m - np.eye(len(m))).max())

    def hermiticity_error(self) -> float:
        m = self.entries
        return float(np.abs(m - m.conj().T).max())

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_error() <= tol

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() <= tol

    def block(self, rows: Sequence[Sequence[int]], cols: Sequence[Sequence[int]] | None = None) -> np.ndarray:
        """Sub-matrix between the listed basis states (given as digit tuples)."""
        cols = rows if cols is None else cols
        r = [basis_index(self.layout, d) for d in rows]
        c = [basis_index(self.layout, d) for d in cols]
        return self.entries[np.ix_(r, c)]


@dataclass(frozen=True)
class DensityOp:
    layout: SpaceLayout
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.entries)
        d = self.layout.dim
        if m.shape != (d, d):
            raise InputError(f"density matrix shape {m.shape} != ({d}, {d})")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise InputError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-8:
            raise InputError(f"density matrix trace {tr!r} != 1")
        if np.linalg.eigvalsh(m).min() < -1e-8:
            raise InputError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", m)

    @classmethod
    def maximally_mixed(cls, layout: SpaceLayout) -> "DensityOp":
        return cls(layout, np.eye(layout.dim) / layout.dim)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())


def _same_layout(a: SpaceLayout, b: SpaceLayout) -> None:
    if a != b:
        raise InputError(f"layout mismatch: {a.labels}/{a.radices} vs {b.labels}/{b.radices}")


def embed(layout: SpaceLayout, local_op, slot_labels: Sequence[str]) -> OperatorM:
    """Act with ``local_op`` on the named slots and identity on the rest.

    ``local_op`` is written in the order the slots are *named*, which may differ
    from (and be non-adjacent in) the layout order.
    """
    local = np.asarray(local_op, dtype=complex)
    if isinstance(slot_labels, str):
        slot_labels = [slot_labels]
    pos = [layout.position(lbl) for lbl in slot_labels]
    if len(set(pos)) != len(pos):
        raise InputError("slot labels passed to embed must be distinct")
    radices = layout.radices
    local_dim = int(np.prod([radices[p] for p in pos]))
    if local.shape != (local_dim, local_dim):
        raise InputError(
            f"local operator shape {local.shape} does not match slots {list(slot_labels)} (dim {local_dim})"
        )
    rest = [p for p in range(len(radices)) if p not in pos]
    order = pos + rest
    full = np.kron(local, np.eye(int(np.prod([radices[p] for p in rest]))))
    n = len(radices)
    tensor = full.reshape([radices[p] for p in order] * 2)
    inv = list(np.argsort(order))
    tensor = tensor.transpose(inv + [n + i for i in inv])
    return OperatorM(layout, tensor.reshape(layout.dim, layout.dim))


def expm_hermitian(generator: OperatorM, scale: float) -> OperatorM:
    """``exp(i * scale * G)`` for Hermitian ``G`` by spectral decomposition."""
    err = generator.hermiticity_error()
    if err > HERMITIAN_TOL * max(1.0, float(np.abs(generator.entries).max())):
        raise InputError(f"generator is not Hermitian (max |G - G^dag| = {err:.3e})")
    g = generator.entries
    w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
    u = (v * np.exp(1j * scale * w)) @ v.conj().T
    return OperatorM(generator.layout, u)


def apply(op: OperatorM, ket: Ket) -> Ket:
    _same_layout(op.layout, ket.layout)
    out = op.entries @ ket.amplitudes
    # absorb roundoff so repeated application keeps the norm invariant
    return Ket(ket.layout, out / np.linalg.norm(out))


def fidelity(a: Ket, b: Ket) -> float:
    _same_layout(a.layout, b.layout)
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def digit_probabilities(layout: SpaceLayout, probs: np.ndarray, slot_label: str) -> np.ndarray:
    """Marginal distribution over one slot from a full probability vector."""
    p = layout.position(slot_label)
    axes = tuple(i for i in range(len(layout.slots)) if i != p)
    return np.asarray(probs).reshape(layout.radices).sum(axis=axes)


def population(ket: Ket, slot_label: str, digit: int) -> float:
    radix = ket.layout.radix(slot_label)
    if not 0 <= digit < radix:
        raise InputError(f"digit {digit} out of range for slot {slot_label!r} (radix {radix})")
    probs = np.abs(ket.amplitudes) ** 2
    return float(digit_probabilities(ket.layout, probs, slot_label)[digit])


def number_operator(layout: SpaceLayout, slot_label: str) -> OperatorM:
    return embed(layout, np.diag(np.arange(layout.radix(slot_label), dtype=float)), [slot_label])


def annihilation(n_levels: int) -> np.ndarray:
    """Truncated bosonic annihilation operator on ``n_levels`` Fock states."""
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), 1)
