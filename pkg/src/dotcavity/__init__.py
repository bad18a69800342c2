"""Coupled-quantum-dot / microcavity gate simulator.

Exact pulse-operator construction, cavity-mediated CNOT verification,
three-level adiabatic-elimination checks, spatial-separation budgets and a
small Lindblad solver for gate fidelity under relaxation.
"""

from dotcavity.errors import InputError, UnitError
from dotcavity.units import HBAR_MEV_PS

__all__ = ["HBAR_MEV_PS", "InputError", "UnitError"]
