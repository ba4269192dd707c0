"""Electron-impact pump rates for a Maxwellian plasma.

A channel with threshold ``E_i`` and cross-section scale ``k_bar`` is pumped
at ``r_i = 2 N k_bar sqrt(2 kT / (pi M)) exp(-E_i / kT)``. The prefactor
``2 sqrt(2 kT / (pi M))`` is the Maxwellian mean speed; the Boltzmann factor
is what a cross-section rising as ``k_bar (1 - E_i / E)`` above threshold
yields after averaging over the energy distribution.

Units: ``n_e`` in cm^-3, energies and ``kT`` in eV, mass in eV/c^2. The
``speed_unit`` (default c in cm/s) converts ``sqrt(kT / M)`` into a velocity,
so ``k_bar`` in cm^2 gives rates in 1/s. Setting ``speed_unit=1`` and
``mass`` in matching units gives a fully normalised mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .emission import branching_ratio_maxcoh
from .errors import DivisionByZero, UnknownChannel
from .model import RateSet

ELECTRON_MASS_EV = 510_998.95
SPEED_OF_LIGHT_CM_S = 2.99792458e10
CHANNELS = ("vis", "e", "uv")


@dataclass(frozen=True)
class Channel:
    cross_section: float
    energy: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.cross_section) and self.cross_section >= 0.0):
            raise ValueError(f"cross_section must be finite and >= 0, got {self.cross_section!r}")
        if not (math.isfinite(self.energy) and self.energy >= 0.0):
            raise ValueError(f"energy must be finite and >= 0, got {self.energy!r}")


@dataclass(frozen=True)
class PlasmaConditions:
    n_e: float
    temperature: float
    channels: Mapping[str, Channel] = field(default_factory=dict)
    mass: float = ELECTRON_MASS_EV
    speed_unit: float = SPEED_OF_LIGHT_CM_S

    def __post_init__(self):
        for name in ("n_e", "temperature", "mass", "speed_unit"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        chans = {}
        for label, ch in dict(self.channels).items():
            if label not in CHANNELS:
                raise UnknownChannel(f"channel label must be one of {CHANNELS}, got {label!r}")
            chans[label] = ch if isinstance(ch, Channel) else Channel(*ch)
        object.__setattr__(self, "channels", MappingProxyType(chans))

    def with_density(self, n_e: float) -> "PlasmaConditions":
        return PlasmaConditions(n_e, self.temperature, dict(self.channels), self.mass, self.speed_unit)

    def with_temperature(self, temperature: float) -> "PlasmaConditions":
        return PlasmaConditions(self.n_e, temperature, dict(self.channels), self.mass, self.speed_unit)


def mean_speed(cond: PlasmaConditions) -> float:
    """Maxwellian mean speed ``sqrt(8 kT / (pi M))``."""
    return 2.0 * math.sqrt(2.0 * cond.temperature / (math.pi * cond.mass)) * cond.speed_unit


def _channel(cond: PlasmaConditions, label: str) -> Channel:
    try:
        return cond.channels[label]
    except KeyError:
        raise UnknownChannel(f"no {label!r} channel in plasma conditions "
                             f"(have {sorted(cond.channels)})") from None


def rate_coefficient(cond: PlasmaConditions, label: str) -> float:
    """Pump rate per unit electron density, ``k_i(T)``."""
    ch = _channel(cond, label)
    return ch.cross_section * mean_speed(cond) * math.exp(-ch.energy / cond.temperature)


def collision_rate(cond: PlasmaConditions, label: str) -> float:
    return cond.n_e * rate_coefficient(cond, label)


def rates_from_plasma(cond: PlasmaConditions, gamma_vis: float, gamma_uv: float,
                      p: float = 1.0, gamma_e: float = 0.0, delta: float = 0.0) -> RateSet:
    """Simplified-scheme RateSet with pumps taken from ``cond``; missing channels pump at zero."""
    def rate(label):
        return collision_rate(cond, label) if label in cond.channels else 0.0
    return RateSet.simplified(gamma_vis, gamma_uv, rate("vis"), r_e=rate("e"), r_uv=rate("uv"),
                              gamma_e=gamma_e, p=p, delta=delta)


def thermal_branching_ratio(cond: PlasmaConditions, gamma_vis: float) -> float:
    """Maximal-coherence branching ratio at the plasma's density and temperature."""
    r_vis = collision_rate(cond, "vis")
    r_e = collision_rate(cond, "e")
    if r_vis == 0.0 or r_e == 0.0:
        raise DivisionByZero("thermal branching ratio needs non-zero vis and e pump rates")
    rates = RateSet.simplified(gamma_vis, 1.0, r_vis, r_e=r_e)
    return branching_ratio_maxcoh(rates)
