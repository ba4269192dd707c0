"""Dark/bright basis of the V doublet.

With pump weights (u, v) = (sqrt(r_b), sqrt(r_a)) / sqrt(r_a + r_b) the
collision-induced states are ``|D> = u|a> - v|b>`` and ``|B> = v|a> + u|b>``.
Equal pumping gives the familiar ``(|a> -+ |b>) / sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivisionByZero, NonRealCoherence
from .model import RateSet

IMAG_TOL = 1e-9


@dataclass(frozen=True)
class DressedPopulations:
    rho_dd_dark: float
    rho_bb_bright: float
    rho_db: float

    def scaled(self, factor: float) -> "DressedPopulations":
        return DressedPopulations(self.rho_dd_dark * factor, self.rho_bb_bright * factor,
                                  self.rho_db * factor)

    def as_tuple(self) -> tuple:
        return (self.rho_dd_dark, self.rho_bb_bright, self.rho_db)


def _weights(weights):
    if weights is None:
        return math.sqrt(0.5), math.sqrt(0.5)
    u, v = (float(w) for w in weights)
    norm = math.hypot(u, v)
    if norm == 0.0:
        raise ValueError("dressed-basis weights must not both vanish")
    return u / norm, v / norm


def pump_weights(rates: RateSet) -> tuple:
    """(sqrt(r_b), sqrt(r_a)), the weight pair for unequal pumping."""
    return (math.sqrt(rates.r_b), math.sqrt(rates.r_a))


def to_dressed(pop_a: float, pop_b: float, coh_ab: complex, weights=None) -> DressedPopulations:
    """Bare upper-doublet block -> dark/bright populations and their coherence.

    Only valid for a real two-photon coherence (zero detuning); raises
    NonRealCoherence otherwise.
    """
    coh_ab = complex(coh_ab)
    if abs(coh_ab.imag) > IMAG_TOL:
        raise NonRealCoherence(f"Im rho_ab = {coh_ab.imag:.3g}; dressed map needs a real coherence")
    x = coh_ab.real
    u, v = _weights(weights)
    uv = u * v
    dark = u * u * pop_a + v * v * pop_b - 2.0 * uv * x
    bright = v * v * pop_a + u * u * pop_b + 2.0 * uv * x
    db = uv * (pop_a - pop_b) + (u * u - v * v) * x
    return DressedPopulations(dark, bright, db)


def from_dressed(d: DressedPopulations, weights=None) -> tuple:
    """Inverse of :func:`to_dressed`; returns ``(pop_a, pop_b, coh_ab)``."""
    u, v = _weights(weights)
    uv = u * v
    dd, bb, db = d.rho_dd_dark, d.rho_bb_bright, d.rho_db
    pop_a = u * u * dd + v * v * bb + 2.0 * uv * db
    pop_b = v * v * dd + u * u * bb - 2.0 * uv * db
    coh = uv * (bb - dd) + (u * u - v * v) * db
    return pop_a, pop_b, complex(coh)


def asymptotic_dressed(rates: RateSet) -> DressedPopulations:
    """Deep-pumping steady state per unit rho_cc, in the usual closed form.

    ``(r_e / gamma_uv, 1 + r_e / (4 r_vis), r_e / r_vis)``. These assume
    pump rates far above every decay rate and ``gamma_uv >> gamma_vis``;
    no validity check is made here. Its dark-bright coherence term
    disagrees in sign and size with the exact steady state, which tends to
    ``-(gamma_uv / (4 r_vis)) rho_DD``; see :func:`asymptotic_db_exact`.
    """
    if rates.gamma_uv == 0.0 or rates.r_vis == 0.0:
        raise DivisionByZero("asymptotic dressed populations need gamma_uv > 0 and r_vis > 0")
    return DressedPopulations(rates.r_e / rates.gamma_uv,
                              1.0 + rates.r_e / (4.0 * rates.r_vis),
                              rates.r_e / rates.r_vis)


def asymptotic_db_exact(rates: RateSet, rho_dd_dark: float, rho_bb_bright: float) -> float:
    """Stationary rho_DB implied by its own equation of motion for given DD, BB."""
    r, g, guv = rates.r_vis, rates.gamma_vis, rates.gamma_uv
    denom = r + g + 0.5 * guv
    if denom == 0.0:
        raise DivisionByZero("rho_DB relaxation rate vanishes")
    return -0.25 * guv * (rho_dd_dark + rho_bb_bright) / denom


def dressed_rhs(d: DressedPopulations, rho_cc: float, rates: RateSet) -> tuple:
    """Time derivatives of (rho_DD, rho_BB, rho_DB) for p = 1, zero detuning.

    This is the reduced-model bare dynamics rewritten in the dressed basis,
    so the auxiliary-level pump appears as ``r_e / 2`` in both dark and
    bright feeds (each bare upper state receives ``r_e / 2``).
    """
    r, g, guv, re_ = rates.r_vis, rates.gamma_vis, rates.gamma_uv, rates.r_e
    dd, bb, db = d.rho_dd_dark, d.rho_bb_bright, d.rho_db
    d_dd = -g * dd - 0.5 * guv * (dd + db) + 0.5 * re_ * rho_cc
    d_bb = -(2.0 * r + g) * bb - 0.5 * guv * (bb + db) + (2.0 * r + 0.5 * re_) * rho_cc
    d_db = -(r + g + 0.5 * guv) * db - 0.25 * guv * (dd + bb)
    return d_dd, d_bb, d_db
