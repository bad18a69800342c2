"""Unit-tagged scalars for the energy/time budget.

Only the handful of units the budget needs are supported.  Quantities of the
same dimension convert freely (``ns`` <-> ``ps``); crossing dimensions
(frequency -> energy, energy -> time) goes through explicit functions that
name the physical convention.  Adding or comparing quantities with different
units raises :class:`UnitError` instead of silently converting.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from dotcavity.errors import UnitError

HBAR_MEV_PS = 0.6582119569

# unit -> (dimension, factor to the dimension's base unit)
_UNITS = {
    "meV": ("energy", 1.0),
    "ueV": ("energy", 1e-3),
    "MHz": ("frequency", 1.0),
    "GHz": ("frequency", 1e3),
    "ps": ("time", 1.0),
    "ns": ("time", 1e3),
    "us": ("time", 1e6),
    "1/ps": ("rate", 1.0),
    "1/ns": ("rate", 1e-3),
    "1": ("dimensionless", 1.0),
}
BASE = {"energy": "meV", "frequency": "MHz", "time": "ps", "rate": "1/ps", "dimensionless": "1"}

FREQ_CONVENTIONS = ("h", "hbar")
"""How a quoted frequency f becomes an energy: ``h`` gives 2*pi*hbar*f, ``hbar`` gives hbar*f."""


def dimension_of(unit: str) -> str:
    try:
        return _UNITS[unit][0]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}; known: {sorted(_UNITS)}") from None


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: str

    def __post_init__(self):
        dimension_of(self.unit)
        if isinstance(self.value, Quantity):
            raise UnitError("nested quantity")
        object.__setattr__(self, "value", float(self.value))

    @property
    def dimension(self) -> str:
        return dimension_of(self.unit)

    def to(self, unit: str) -> "Quantity":
        if dimension_of(unit) != self.dimension:
            raise UnitError(f"cannot convert {self.unit} ({self.dimension}) to {unit} ({dimension_of(unit)})")
        return Quantity(self.value * _UNITS[self.unit][1] / _UNITS[unit][1], unit)

    def in_(self, unit: str) -> float:
        return self.to(unit).value

    def _check_same(self, other) -> None:
        if not isinstance(other, Quantity):
            raise UnitError(f"cannot combine {self.unit} quantity with bare number {other!r}")
        if other.unit != self.unit:
            raise UnitError(f"unit mismatch: {self.unit} vs {other.unit}; convert explicitly first")

    def __add__(self, other: "Quantity") -> "Quantity":
        self._check_same(other)
        return Quantity(self.value + other.value, self.unit)

    def __sub__(self, other: "Quantity") -> "Quantity":
        self._check_same(other)
        return Quantity(self.value - other.value, self.unit)

    def __mul__(self, c: float) -> "Quantity":
        if isinstance(c, Quantity):
            raise UnitError("products of quantities are not supported; work in base units")
        return Quantity(self.value * c, self.unit)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Quantity):
            self._check_same(other)
            return self.value / other.value
        return Quantity(self.value / other, self.unit)

    def __lt__(self, other: "Quantity") -> bool:
        self._check_same(other)
        return self.value < other.value

    def __str__(self) -> str:
        return f"{self.value!r} {self.unit}"


def require(q, dimension: str, name: str) -> Quantity:
    """Validate that ``q`` is a Quantity of ``dimension``; bare numbers are rejected."""
    if not isinstance(q, Quantity):
        raise UnitError(f"{name}: expected a {dimension} quantity with a unit, got {q!r}")
    if q.dimension != dimension:
        raise UnitError(f"{name}: expected {dimension}, got {q.unit} ({q.dimension})")
    return q


def frequency_to_energy(f: Quantity, convention: str = "h") -> Quantity:
    """Energy of a coupling quoted as an ordinary frequency."""
    require(f, "frequency", "frequency")
    if convention not in FREQ_CONVENTIONS:
        raise UnitError(f"unknown frequency convention {convention!r}; use one of {FREQ_CONVENTIONS}")
    per_ps = f.in_("MHz") * 1e-6
    scale = 2 * math.pi if convention == "h" else 1.0
    return Quantity(scale * HBAR_MEV_PS * per_ps, "meV")


def as_energy(q: Quantity, convention: str = "h") -> Quantity:
    """Energy in meV from either an energy or a frequency quantity."""
    if isinstance(q, Quantity) and q.dimension == "frequency":
        return frequency_to_energy(q, convention)
    return require(q, "energy", "coupling").to("meV")


_QTY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z1/]+)?\s*$")


def parse_quantity(text: str, dimension: str | None = None) -> Quantity:
    """Parse ``"1ns"``, ``"0.1 meV"``, ``"300MHz"``.  The unit suffix is mandatory."""
    m = _QTY_RE.match(str(text))
    if not m:
        raise UnitError(f"cannot parse quantity {text!r}")
    value, unit = m.groups()
    if unit is None:
        raise UnitError(f"{text!r} has no unit suffix")
    if unit.startswith("/"):
        unit = "1" + unit
    q = Quantity(float(value), unit)
    if dimension is not None:
        require(q, dimension, text)
    return q
