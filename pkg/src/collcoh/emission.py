"""Emission spectra, line intensities and branching ratios.

Spectra are stationary Lorentzians centred on zero detuning. Common
prefactors (the field constant and the dipole moments) are set to one;
they cancel in every ratio computed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisionByZero, NegativeWeight, TruncationError
from .model import DensityMatrix, RateSet

WEIGHT_TOL = 1e-9
MIN_SPAN_WIDTHS = 50.0


@dataclass(frozen=True, eq=False)
class Spectrum:
    omega: np.ndarray
    values: np.ndarray
    width: float


def correlation_widths(rates: RateSet) -> tuple:
    """Half-widths ``(r0, w_uv)`` of the visible and UV Lorentzians."""
    r = rates.r_vis
    return 2.0 * r + rates.r_uv + rates.r_e, rates.r_uv + r


def emission_weight(state: DensityMatrix, p: float) -> float:
    """Visible emission weight ``rho_aa + rho_bb + 2 p Re rho_ab``.

    For p = 1 this is twice the bright-state population.
    """
    return state.pop_a + state.pop_b + 2.0 * p * state.coh_ab.real


def lorentzian(omega, weight: float, width: float) -> np.ndarray:
    """Area-``weight`` Lorentzian of half-width ``width``."""
    if width <= 0.0:
        raise ValueError(f"Lorentzian half-width must be positive, got {width!r}")
    omega = np.asarray(omega, dtype=float)
    return weight * width / (np.pi * (omega * omega + width * width))


def _as_grid(grid) -> np.ndarray:
    omega = np.asarray(grid, dtype=float)
    if omega.ndim != 1 or omega.size < 2:
        raise ValueError("frequency grid must be a 1-D array with at least two points")
    if np.any(np.diff(omega) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    return omega


def visible_spectrum(rates: RateSet, state: DensityMatrix, grid) -> Spectrum:
    omega = _as_grid(grid)
    weight = emission_weight(state, rates.p)
    if weight < -WEIGHT_TOL:
        raise NegativeWeight(f"visible emission weight {weight:.3g} < 0; state is not physical")
    r0, _ = correlation_widths(rates)
    return Spectrum(omega, lorentzian(omega, max(weight, 0.0), r0), r0)


def uv_spectrum(rates: RateSet, state: DensityMatrix, grid) -> Spectrum:
    omega = _as_grid(grid)
    _, w_uv = correlation_widths(rates)
    return Spectrum(omega, lorentzian(omega, state.pop_a, w_uv), w_uv)


def line_intensity(spec: Spectrum, omega_line: float) -> float:
    """Photon-count line intensity: ``omega_line**3`` times the area under ``spec``.

    The grid must extend at least 50 half-widths to each side of the line
    centre; ``+-200`` widths keeps the truncated tail below 0.5 %.
    """
    half_span = min(-spec.omega[0], spec.omega[-1])
    if half_span < MIN_SPAN_WIDTHS * spec.width:
        raise TruncationError(
            f"grid reaches only {half_span:.3g} from line centre, "
            f"need >= {MIN_SPAN_WIDTHS:g} x width = {MIN_SPAN_WIDTHS * spec.width:.3g}")
    return float(omega_line) ** 3 * float(np.trapezoid(spec.values, spec.omega))


def branching_ratio_from_spectra(vis: Spectrum, uv: Spectrum, rates: RateSet) -> float:
    """Intensity ratio with the squared dipole moments restored from the decay rates.

    Each decay rate scales as ``omega**3 * dipole**2``, so
    ``dipole_vis**2 / dipole_uv**2 = (gamma_vis / omega_vis**3) / (gamma_uv / omega_uv**3)``.
    """
    i_vis = line_intensity(vis, rates.omega_vis)
    i_uv = line_intensity(uv, rates.omega_uv)
    if i_uv == 0.0:
        raise DivisionByZero("UV line intensity is zero")
    dipole_ratio = (rates.gamma_vis / rates.omega_vis ** 3) / (rates.gamma_uv / rates.omega_uv ** 3)
    return dipole_ratio * i_vis / i_uv


def branching_ratio_operational(state: DensityMatrix, rates: RateSet) -> float:
    """Visible/UV intensity ratio for a stationary state."""
    if state.pop_a <= 1e-300:
        raise DivisionByZero("rho_aa vanishes; the UV line is dark")
    if rates.gamma_uv == 0.0:
        raise DivisionByZero("gamma_uv = 0")
    return rates.gamma_vis / rates.gamma_uv * emission_weight(state, rates.p) / state.pop_a


def branching_ratio_maxcoh(rates: RateSet) -> float:
    """Deep-pumping, maximal-coherence limit ``gamma_vis (4 / r_e + 1 / r_vis)``."""
    if rates.r_e == 0.0 or rates.r_vis == 0.0:
        raise DivisionByZero("maximal-coherence ratio needs r_e > 0 and r_vis > 0")
    return rates.gamma_vis * (4.0 / rates.r_e + 1.0 / rates.r_vis)


def branching_ratio_nocoh(rates: RateSet) -> float:
    """Exact p = 0 ratio ``g (g_uv + 2 (g + r)) / (g_uv (g + r))``."""
    g, guv, r = rates.gamma_vis, rates.gamma_uv, rates.r_vis
    if guv == 0.0 or g + r == 0.0:
        raise DivisionByZero("no-coherence ratio needs gamma_uv > 0 and gamma_vis + r_vis > 0")
    return g * (guv + 2.0 * (g + r)) / (guv * (g + r))


def branching_ratio_limits(rates: RateSet) -> tuple:
    """``(low-density, high-density)`` limits ``(1 + 2 g / g_uv, 2 g / g_uv)``."""
    if rates.gamma_uv == 0.0:
        raise DivisionByZero("gamma_uv = 0")
    high = 2.0 * rates.gamma_vis / rates.gamma_uv
    return 1.0 + high, high


def suppression_factor(rates: RateSet) -> tuple:
    """Coherent over incoherent deep-pumping ratio, as ``(closed_form, recomputed)``.

    The closed form is ``gamma_uv (4 / r_e + 1 / r_vis)``. Dividing
    the maximal-coherence ratio by ``2 gamma_vis / gamma_uv`` gives half of
    that; both are returned so the discrepancy stays visible.
    """
    if rates.r_e == 0.0 or rates.r_vis == 0.0:
        raise DivisionByZero("suppression factor needs r_e > 0 and r_vis > 0")
    closed_form = rates.gamma_uv * (4.0 / rates.r_e + 1.0 / rates.r_vis)
    return closed_form, 0.5 * closed_form


def enhancement_ratio(rates: RateSet) -> float:
    """Ratio with the auxiliary pump switched off: ``4 gamma_vis / gamma_uv``."""
    if rates.gamma_uv == 0.0:
        raise DivisionByZero("gamma_uv = 0")
    return 4.0 * rates.gamma_vis / rates.gamma_uv
