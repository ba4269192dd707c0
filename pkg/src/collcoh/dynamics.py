"""Master-equation generators, time evolution and steady states.

Three assemblies share the 13-component real state vector from
:mod:`collcoh.model`:

* ``v_subsystem``: the closed a-b-c V scheme with general rates;
* ``five_level``: the V scheme closed through levels d and e;
* ``reduced``: level e adiabatically eliminated, its pump entering a and b
  as ``r_e / 2`` each.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SingularSystem, StiffnessFailure
from .model import N_STATE, DensityMatrix, RateSet

AA, BB, CC, DD, EE = 0, 1, 2, 3, 4
AB_RE, AB_IM, CA_RE, CA_IM, CB_RE, CB_IM, AD_RE, AD_IM = range(5, 13)
POP = slice(0, 5)


class Variant(str, enum.Enum):
    V_SUBSYSTEM = "v_subsystem"
    FIVE_LEVEL = "five_level"
    REDUCED = "reduced"


# components that carry dynamics in each variant; the rest are identically zero
_ACTIVE = {
    Variant.V_SUBSYSTEM: (AA, BB, CC, AB_RE, AB_IM, CA_RE, CA_IM, CB_RE, CB_IM),
    Variant.FIVE_LEVEL: tuple(range(N_STATE)),
    Variant.REDUCED: tuple(i for i in range(N_STATE) if i != EE),
}


@dataclass(frozen=True, eq=False)
class Generator:
    matrix: np.ndarray
    variant: Variant

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (N_STATE, N_STATE):
            raise ValueError(f"generator must be {N_STATE}x{N_STATE}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def active(self) -> tuple:
        return _ACTIVE[self.variant]

    def rhs(self, state: DensityMatrix) -> DensityMatrix:
        """Time derivative of ``state`` packed as a DensityMatrix."""
        return DensityMatrix.from_vector(self.matrix @ state.to_vector())

    def population_column_sums(self) -> np.ndarray:
        return self.matrix[POP].sum(axis=0)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    vectors: np.ndarray
    n_accepted: int = 0
    n_rejected: int = 0

    @property
    def states(self) -> list:
        return [DensityMatrix.from_vector(v) for v in self.vectors]

    @property
    def final(self) -> DensityMatrix:
        return DensityMatrix.from_vector(self.vectors[-1])

    def __len__(self):
        return len(self.times)


def _check_finite(rates: RateSet):
    # RateSet already rejects non-finite values; this guards hand-built objects.
    vals = np.array([rates.gamma_a, rates.gamma_b, rates.gamma_uv, rates.gamma_e,
                     rates.r_a, rates.r_b, rates.r_e, rates.r_uv, rates.p, rates.delta])
    if not np.all(np.isfinite(vals)):
        raise ValueError("rates must be finite")


def _add_ab_block(M, decay, delta):
    """Decay and detuning rotation of rho_ab; population sources are added by the caller."""
    M[AB_RE, AB_RE] -= decay
    M[AB_IM, AB_IM] -= decay
    M[AB_RE, AB_IM] += delta
    M[AB_IM, AB_RE] -= delta


def _add_pair_block(M, d_ca, d_cb, cross):
    """Coupled optical polarisations: rho_ca' = -d_ca rho_ca - cross rho_cb, and vice versa."""
    for re_ca, re_cb in ((CA_RE, CB_RE), (CA_IM, CB_IM)):
        M[re_ca, re_ca] -= d_ca
        M[re_cb, re_cb] -= d_cb
        M[re_ca, re_cb] -= cross
        M[re_cb, re_ca] -= cross


def assemble_v_subsystem(rates: RateSet) -> Generator:
    """Closed a-b-c V scheme with possibly unequal rates.

    Pump interference enters through ``s = p * sqrt(r_a * r_b)``; with
    ``rho_ab + rho_ba = 2 Re rho_ab`` the population rows pick up ``-s Re
    rho_ab`` for a and b and ``+2 s Re rho_ab`` for c.
    """
    _check_finite(rates)
    ga, gb, ra, rb = rates.gamma_a, rates.gamma_b, rates.r_a, rates.r_b
    s = rates.p * np.sqrt(ra * rb)
    M = np.zeros((N_STATE, N_STATE))

    M[AA, AA] = -(ra + ga)
    M[AA, CC] = ra
    M[AA, AB_RE] = -s

    M[BB, BB] = -(rb + gb)
    M[BB, CC] = rb
    M[BB, AB_RE] = -s

    M[CC, AA] = ra + ga
    M[CC, BB] = rb + gb
    M[CC, CC] = -(ra + rb)
    M[CC, AB_RE] = 2.0 * s

    _add_ab_block(M, 0.5 * (ra + rb + ga + gb), rates.delta)
    M[AB_RE, CC] += s
    M[AB_RE, AA] -= 0.5 * s
    M[AB_RE, BB] -= 0.5 * s

    _add_pair_block(M, 0.5 * (2.0 * ra + rb + ga), 0.5 * (2.0 * rb + ra + gb), 0.5 * s)
    return Generator(M, Variant.V_SUBSYSTEM)


def assemble_five_level(rates: RateSet) -> Generator:
    """V scheme closed through the UV ground state d and the auxiliary level e."""
    _check_finite(rates)
    r, g = rates.r_vis, rates.gamma_vis
    guv, ge, re_, ruv, p = rates.gamma_uv, rates.gamma_e, rates.r_e, rates.r_uv, rates.p
    half_pr = 0.5 * p * r
    M = np.zeros((N_STATE, N_STATE))

    M[AA, AA] = -(r + g + guv)
    M[AA, CC] = r
    M[AA, AB_RE] = -p * r
    M[AA, EE] = ge

    M[BB, BB] = -(r + g)
    M[BB, CC] = r
    M[BB, AB_RE] = -p * r
    M[BB, EE] = ge

    M[CC, AA] = r + g
    M[CC, BB] = r + g
    M[CC, CC] = -(2.0 * r + re_ + ruv)
    M[CC, AB_RE] = 2.0 * p * r
    M[CC, EE] = re_
    M[CC, DD] = ruv

    M[DD, CC] = ruv
    M[DD, DD] = -ruv
    M[DD, AA] = guv

    M[EE, CC] = re_
    M[EE, EE] = -(re_ + 2.0 * ge)

    _add_ab_block(M, r + g + 0.5 * guv, rates.delta)
    M[AB_RE, CC] += p * r
    M[AB_RE, AA] -= half_pr
    M[AB_RE, BB] -= half_pr

    _add_pair_block(M, 0.5 * (3.0 * r + g + guv + re_ + ruv), 0.5 * (3.0 * r + g + re_ + ruv), half_pr)
    M[AD_RE, AD_RE] = M[AD_IM, AD_IM] = -0.5 * (guv + ruv)
    return Generator(M, Variant.FIVE_LEVEL)


def assemble_reduced(rates: RateSet) -> Generator:
    """Four-level scheme with level e eliminated.

    Each upper state receives ``(r_vis + r_e / 2) rho_cc``; c loses
    ``(2 r_vis + r_e + r_uv) rho_cc`` and is refilled from d at ``r_uv``.
    The ca/cb and ad polarisation blocks are the same as in the five-level
    assembly.
    """
    _check_finite(rates)
    r, g = rates.r_vis, rates.gamma_vis
    guv, re_, ruv, p = rates.gamma_uv, rates.r_e, rates.r_uv, rates.p
    half_pr = 0.5 * p * r
    feed = r + 0.5 * re_
    M = np.zeros((N_STATE, N_STATE))

    M[AA, AA] = -(r + g + guv)
    M[AA, CC] = feed
    M[AA, AB_RE] = -p * r

    M[BB, BB] = -(r + g)
    M[BB, CC] = feed
    M[BB, AB_RE] = -p * r

    M[CC, AA] = r + g
    M[CC, BB] = r + g
    M[CC, CC] = -(2.0 * r + re_ + ruv)
    M[CC, AB_RE] = 2.0 * p * r
    M[CC, DD] = ruv

    M[DD, CC] = ruv
    M[DD, DD] = -ruv
    M[DD, AA] = guv

    _add_ab_block(M, r + g + 0.5 * guv, rates.delta)
    M[AB_RE, CC] += p * r
    M[AB_RE, AA] -= half_pr
    M[AB_RE, BB] -= half_pr

    _add_pair_block(M, 0.5 * (3.0 * r + g + guv + re_ + ruv), 0.5 * (3.0 * r + g + re_ + ruv), half_pr)
    M[AD_RE, AD_RE] = M[AD_IM, AD_IM] = -0.5 * (guv + ruv)
    return Generator(M, Variant.REDUCED)


ASSEMBLERS = {
    Variant.V_SUBSYSTEM: assemble_v_subsystem,
    Variant.FIVE_LEVEL: assemble_five_level,
    Variant.REDUCED: assemble_reduced,
}


def assemble(rates: RateSet, variant="reduced") -> Generator:
    return ASSEMBLERS[Variant(variant)](rates)


def evolve(gen: Generator, initial: DensityMatrix, t_final: float, dt_max: float = np.inf,
           tol: float = 1e-10, *, max_steps: int = 50_000_000, save_every: int = 1) -> Trajectory:
    """Integrate the master equation with Dormand-Prince 5(4) steps.

    Every ``save_every``-th accepted step is recorded, plus the first and last
    samples. The last sample sits exactly at ``t_final``.

    Raises StiffnessFailure if the step size drops below ``1e-14 * t_final``
    or ``max_steps`` attempts are exhausted.
    """
    if not t_final > 0:
        raise ValueError(f"t_final must be positive, got {t_final!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if not dt_max > 0:
        raise ValueError(f"dt_max must be positive, got {dt_max!r}")
    if save_every < 1:
        raise ValueError("save_every must be >= 1")
    G = np.ascontiguousarray(gen.matrix, dtype=np.float64)
    x0 = np.ascontiguousarray(initial.to_vector(), dtype=np.float64)
    times, vectors, status, n_acc, n_rej = _kernels.dopri_integrate(
        G, x0, float(t_final), float(min(dt_max, t_final)), float(tol),
        1e-14 * float(t_final), int(max_steps), int(save_every))
    if status == _kernels.STATUS_UNDERFLOW:
        raise StiffnessFailure(
            f"step size fell below {1e-14 * t_final:.3g} at t={times[-1]:.6g}; "
            "rate disparity too large for explicit integration, use steady_state")
    if status == _kernels.STATUS_MAX_STEPS:
        raise StiffnessFailure(f"gave up after {max_steps} step attempts at t={times[-1]:.6g}")
    return Trajectory(times, vectors, n_acc, n_rej)


COND_LIMIT = 1e14


def steady_state_vector(gen: Generator) -> np.ndarray:
    idx = np.array(gen.active)
    A = gen.matrix[np.ix_(idx, idx)].copy()
    pop_mask = idx < 5
    # population rows are linearly dependent (columns sum to zero), so one
    # of them can carry the trace condition instead
    A[0, :] = pop_mask.astype(float)
    b = np.zeros(len(idx))
    b[0] = 1.0
    svals = np.linalg.svd(A, compute_uv=False)
    if svals[-1] <= svals[0] / COND_LIMIT:
        raise SingularSystem(
            f"trace-constrained {gen.variant.value} generator is rank deficient "
            f"(condition number {svals[0] / max(svals[-1], 1e-300):.3g}); "
            "the rate graph is disconnected or all rates vanish")
    y = np.linalg.solve(A, b)
    y += np.linalg.solve(A, b - A @ y)
    x = np.zeros(N_STATE)
    x[idx] = y
    return x


def steady_state(gen: Generator) -> DensityMatrix:
    """Trace-one stationary state of ``gen`` by a constrained dense solve."""
    return DensityMatrix.from_vector(steady_state_vector(gen))


def spectral_gap(gen: Generator) -> float:
    """Slowest nonzero relaxation rate, ``min |Re lambda|`` over the active block."""
    idx = np.array(gen.active)
    ev = np.linalg.eigvals(gen.matrix[np.ix_(idx, idx)])
    scale = max(np.abs(ev).max(), 1e-300)
    rates = np.abs(ev.real)
    nonzero = rates[np.abs(ev) > 1e-12 * scale]
    if nonzero.size == 0:
        return 0.0
    return float(nonzero.min())
