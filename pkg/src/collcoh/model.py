"""Rate constants and the five-level density matrix.

Level labels follow the usual V-scheme picture: ``a`` and ``b`` are the
upper states of the visible doublet, ``c`` their common lower state, ``d``
the lower state of the UV line from ``a`` and ``e`` the auxiliary upper
level that feeds ``a`` and ``b``.

The state vector used by the generators is real and has 13 entries::

    [aa, bb, cc, dd, ee, Re ab, Im ab, Re ca, Im ca, Re cb, Im cb, Re ad, Im ad]
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

N_STATE = 13
POPULATIONS = ("a", "b", "c", "d", "e")
POP_INDEX = {name: i for i, name in enumerate(POPULATIONS)}
# (Re index, Im index, first level, second level)
COHERENCES = {
    "ab": (5, 6, "a", "b"),
    "ca": (7, 8, "c", "a"),
    "cb": (9, 10, "c", "b"),
    "ad": (11, 12, "a", "d"),
}

POSITIVITY_SLACK = 1e-9

_RATE_FIELDS = ("gamma_a", "gamma_b", "gamma_uv", "gamma_e", "r_a", "r_b", "r_e", "r_uv")


@dataclass(frozen=True)
class RateSet:
    """Decay and collisional pump rates for one model instance.

    All rates share one time unit. ``omega_vis`` and ``omega_uv`` only enter
    intensity prefactors.
    """

    gamma_a: float
    gamma_b: float
    gamma_uv: float
    gamma_e: float = 0.0
    r_a: float = 0.0
    r_b: float = 0.0
    r_e: float = 0.0
    r_uv: float = 0.0
    p: float = 1.0
    delta: float = 0.0
    omega_vis: float = 1.0
    omega_uv: float = 1.0

    def __post_init__(self):
        for name in _RATE_FIELDS + ("p", "delta", "omega_vis", "omega_uv"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in _RATE_FIELDS:
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if abs(self.p) > 1.0:
            raise ValueError(f"alignment factor p must lie in [-1, 1], got {self.p!r}")

    @classmethod
    def simplified(cls, gamma_vis, gamma_uv, r_vis, r_e=0.0, r_uv=0.0,
                   gamma_e=0.0, p=1.0, delta=0.0, omega_vis=1.0, omega_uv=1.0):
        """Pairwise-equal scheme: gamma_a = gamma_b = gamma_vis, r_a = r_b = r_vis."""
        return cls(gamma_a=gamma_vis, gamma_b=gamma_vis, gamma_uv=gamma_uv,
                   gamma_e=gamma_e, r_a=r_vis, r_b=r_vis, r_e=r_e, r_uv=r_uv,
                   p=p, delta=delta, omega_vis=omega_vis, omega_uv=omega_uv)

    @property
    def is_simplified(self) -> bool:
        return self.gamma_a == self.gamma_b and self.r_a == self.r_b

    def _require_simplified(self):
        if not self.is_simplified:
            raise ValueError(
                "operation needs gamma_a == gamma_b and r_a == r_b "
                f"(got gamma=({self.gamma_a}, {self.gamma_b}), r=({self.r_a}, {self.r_b}))"
            )

    @property
    def gamma_vis(self) -> float:
        self._require_simplified()
        return self.gamma_a

    @property
    def r_vis(self) -> float:
        self._require_simplified()
        return self.r_a

    def replace(self, **changes) -> "RateSet":
        return dataclasses.replace(self, **changes)

    def scaled(self, factor: float) -> "RateSet":
        """All rates and the detuning multiplied by ``factor`` (a change of time unit)."""
        changes = {name: getattr(self, name) * factor for name in _RATE_FIELDS}
        changes["delta"] = self.delta * factor
        return dataclasses.replace(self, **changes)

    def max_rate(self) -> float:
        return max(getattr(self, name) for name in _RATE_FIELDS)


@dataclass(frozen=True)
class DensityMatrix:
    """Populations of the five levels plus the tracked coherences.

    Conjugate partners (``rho_ba`` and so on) are implied by hermiticity.
    """

    pop_a: float = 0.0
    pop_b: float = 0.0
    pop_c: float = 0.0
    pop_d: float = 0.0
    pop_e: float = 0.0
    coh_ab: complex = 0j
    coh_ca: complex = 0j
    coh_cb: complex = 0j
    coh_ad: complex = 0j

    def __post_init__(self):
        for name in ("pop_a", "pop_b", "pop_c", "pop_d", "pop_e"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("coh_ab", "coh_ca", "coh_cb", "coh_ad"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def population(self, level: str) -> float:
        return getattr(self, f"pop_{level}")

    @property
    def populations(self) -> np.ndarray:
        return np.array([self.pop_a, self.pop_b, self.pop_c, self.pop_d, self.pop_e])

    def to_vector(self) -> np.ndarray:
        x = np.zeros(N_STATE)
        x[:5] = self.populations
        for key, (re, im, _, _) in COHERENCES.items():
            z = getattr(self, f"coh_{key}")
            x[re] = z.real
            x[im] = z.imag
        return x

    @classmethod
    def from_vector(cls, x) -> "DensityMatrix":
        x = np.asarray(x, dtype=float)
        if x.shape != (N_STATE,):
            raise ValueError(f"state vector must have shape ({N_STATE},), got {x.shape}")
        cohs = {f"coh_{key}": complex(x[re], x[im]) for key, (re, im, _, _) in COHERENCES.items()}
        return cls(*(float(v) for v in x[:5]), **cohs)

    def to_matrix(self) -> np.ndarray:
        """Full 5x5 Hermitian matrix; untracked coherences are zero."""
        rho = np.diag(self.populations).astype(complex)
        for key, (_, _, i, j) in COHERENCES.items():
            z = getattr(self, f"coh_{key}")
            rho[POP_INDEX[i], POP_INDEX[j]] = z
            rho[POP_INDEX[j], POP_INDEX[i]] = z.conjugate()
        return rho


@dataclass(frozen=True)
class StateDiagnostics:
    trace_defect: float
    min_population: float
    max_coherence_slack: float

    def is_valid(self, tol: float = POSITIVITY_SLACK) -> bool:
        return (self.trace_defect <= tol and self.min_population >= -tol
                and self.max_coherence_slack <= tol)


def initial_state(kind: Literal["ground_d", "ground_c", "uniform"] = "ground_d") -> DensityMatrix:
    if kind == "ground_d":
        return DensityMatrix(pop_d=1.0)
    if kind == "ground_c":
        return DensityMatrix(pop_c=1.0)
    if kind == "uniform":
        return DensityMatrix(*([0.2] * 5))
    raise ValueError(f"unknown initial state kind {kind!r}")


def trace(state: DensityMatrix) -> float:
    return state.pop_a + state.pop_b + state.pop_c + state.pop_d + state.pop_e


def diagnose(state: DensityMatrix) -> StateDiagnostics:
    """Trace defect, smallest population and worst Cauchy-Schwarz slack.

    The slack of a coherence is ``|rho_ij|**2 - rho_ii * rho_jj``; it is
    positive only for states that cannot be density matrices.
    """
    slacks = [
        abs(getattr(state, f"coh_{key}")) ** 2 - state.population(i) * state.population(j)
        for key, (_, _, i, j) in COHERENCES.items()
    ]
    return StateDiagnostics(
        trace_defect=abs(trace(state) - 1.0),
        min_population=float(min(state.populations)),
        max_coherence_slack=float(max(slacks)),
    )
