"""Two-dot tight-binding pair and the spatial-separation factor.

Two isolated dot levels ``E_d`` (small dot) and ``E_dtilde`` (large dot),
coupled by ``t``, hybridize into the qubit level ``|e>`` (mostly on ``d``) and
the intermediate level ``|e~>`` (mostly on ``d~``).  ``gamma`` is the weight of
``|e>`` on the wrong dot.

The closed-form energies kept here are reported next to an exact 2x2
diagonalization.  The closed form omits the factor 1/2 in front of the square
root that a direct diagonalization gives, and ``gamma = t^2/(Delta^2 + t^2)``
only agrees with the exact weight for ``t << Delta``.  Both are reported; no
silent correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dotcavity.errors import InputError


@dataclass(frozen=True)
class DotPairParams:
    e_d: float
    e_dtilde: float
    t_coupling: float

    def __post_init__(self):
        if self.t_coupling < 0:
            raise InputError("inter-dot coupling t must be >= 0")

    @property
    def delta_e(self) -> float:
        return self.e_d - self.e_dtilde


@dataclass(frozen=True)
class MixedPair:
    """Hybridized pair.  ``e_plus``/``e_minus`` follow the closed form as
    printed; the ``*_exact`` fields come from diagonalizing the 2x2 matrix."""

    e_plus: float
    e_minus: float
    gamma: float
    amp_e_on_d: float
    amp_e_on_dtilde: float
    e_plus_exact: float
    e_minus_exact: float
    gamma_exact: float
    eigvecs_exact: np.ndarray

    @property
    def gamma_rel_error(self) -> float:
        """``|gamma - gamma_exact| / gamma_exact``; 0 when both vanish."""
        if self.gamma_exact == 0:
            return 0.0 if self.gamma == 0 else math.inf
        return abs(self.gamma - self.gamma_exact) / self.gamma_exact


def separation_factor(t: float, delta_e: float) -> float:
    """``t^2 / (Delta^2 + t^2)``."""
    denom = delta_e * delta_e + t * t
    if denom == 0:
        raise InputError("separation factor undefined for t = Delta = 0")
    return t * t / denom


def exact_pair(p: DotPairParams) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of ``[[E_d, t], [t, E_d~]]``
    in the isolated-dot basis ``(|d>, |d~>)``."""
    h = np.array([[p.e_d, p.t_coupling], [p.t_coupling, p.e_dtilde]], dtype=float)
    return np.linalg.eigh(h)


def mix_pair(p: DotPairParams) -> MixedPair:
    mean = 0.5 * (p.e_d + p.e_dtilde)
    root = math.sqrt(p.delta_e**2 + 4 * p.t_coupling**2)
    # fully degenerate and uncoupled: no mixing to speak of
    degenerate = p.delta_e**2 + p.t_coupling**2 == 0
    gamma = 0.0 if degenerate else separation_factor(p.t_coupling, p.delta_e)

    w, v = exact_pair(p)
    # |e> is the branch that connects to |d> as t -> 0: upper if E_d >= E_d~
    e_col = 1 if p.delta_e >= 0 else 0
    gamma_exact = float(v[1, e_col] ** 2)
    if degenerate:
        gamma_exact = 0.0

    return MixedPair(
        e_plus=mean + root,
        e_minus=mean - root,
        gamma=gamma,
        amp_e_on_d=math.sqrt(1.0 - gamma),
        amp_e_on_dtilde=math.sqrt(gamma),
        e_plus_exact=float(w[1]),
        e_minus_exact=float(w[0]),
        gamma_exact=gamma_exact,
        eigvecs_exact=v,
    )
