import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from collcoh.dynamics import (AB_RE, EE, Generator, Variant, assemble, assemble_five_level,
                              assemble_reduced, assemble_v_subsystem, evolve, spectral_gap,
                              steady_state, steady_state_vector)
from collcoh.errors import SingularSystem, StiffnessFailure
from collcoh.model import DensityMatrix, RateSet, diagnose, initial_state, trace

from conftest import log_rate, random_valid_state, simplified_rates

ALL_ASSEMBLERS = [assemble_v_subsystem, assemble_five_level, assemble_reduced]


def v_oracle_matrix(rates):
    """Complex 7x7 generator for y = [aa, bb, cc, ab, ba, ca, cb], typed in
    directly from the three-level equations of motion."""
    ra, rb, ga, gb, p, dl = rates.r_a, rates.r_b, rates.gamma_a, rates.gamma_b, rates.p, rates.delta
    s = p * np.sqrt(ra * rb)
    L = np.zeros((7, 7), dtype=complex)
    aa, bb, cc, ab, ba, ca, cb = range(7)
    L[aa, [aa, cc, ab, ba]] = [-(ra + ga), ra, -s / 2, -s / 2]
    L[bb, [bb, cc, ab, ba]] = [-(rb + gb), rb, -s / 2, -s / 2]
    L[cc, [aa, bb, cc, ab, ba]] = [ra + ga, rb + gb, -(ra + rb), s, s]
    L[ab, [ab, cc, aa, bb]] = [-(ra + rb + ga + gb) / 2 - 1j * dl, s, -s / 2, -s / 2]
    L[ba, [ba, cc, aa, bb]] = [-(ra + rb + ga + gb) / 2 + 1j * dl, s, -s / 2, -s / 2]
    L[ca, [ca, cb]] = [-(2 * ra + rb + ga) / 2, -s / 2]
    L[cb, [cb, ca]] = [-(2 * rb + ra + gb) / 2, -s / 2]
    return L


def nullspace_state(L, pop_idx):
    ns = scipy.linalg.null_space(L)
    assert ns.shape[1] == 1
    y = ns[:, 0]
    return y / y[pop_idx].sum()


# --- assembly ---------------------------------------------------------------

@pytest.mark.parametrize("assembler", ALL_ASSEMBLERS)
@given(rates=simplified_rates(delta=0.3))
@settings(max_examples=40, deadline=None)
def test_population_columns_sum_to_zero(assembler, rates):
    gen = assembler(rates)
    scale = max(1.0, np.abs(gen.matrix).max())
    assert np.abs(gen.population_column_sums()).max() <= 1e-12 * scale


def test_v_subsystem_leaves_d_e_ad_empty():
    gen = assemble_v_subsystem(RateSet(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, p=0.4, delta=0.2))
    for i in (3, 4, 11, 12):
        assert not gen.matrix[i].any() and not gen.matrix[:, i].any()


def test_reduced_leaves_e_empty():
    gen = assemble_reduced(RateSet.simplified(1.0, 2.0, 3.0, r_e=4.0, r_uv=0.5, gamma_e=9.0))
    assert not gen.matrix[EE].any() and not gen.matrix[:, EE].any()


@pytest.mark.parametrize("assembler", [assemble_five_level, assemble_reduced])
def test_asymmetric_rates_rejected(assembler):
    with pytest.raises(ValueError):
        assembler(RateSet(1.0, 1.5, 1.0, r_a=1.0, r_b=1.0))
    with pytest.raises(ValueError):
        assembler(RateSet(1.0, 1.0, 1.0, r_a=1.0, r_b=2.0))


def test_generator_matrix_is_read_only():
    gen = assemble_reduced(RateSet.simplified(1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        gen.matrix[0, 0] = 3.0


def test_five_level_rows_match_hand_entries():
    r = RateSet.simplified(1.3, 0.7, 2.1, r_e=0.9, r_uv=0.4, gamma_e=3.3, p=0.6, delta=0.25)
    rho = random_valid_state(np.random.default_rng(5))
    d = assemble_five_level(r).rhs(rho)
    g, gu, rv, re, ru, ge, p, dl = 1.3, 0.7, 2.1, 0.9, 0.4, 3.3, 0.6, 0.25
    aa, bb, cc, dd, ee = rho.populations
    ab, ca, cb, ad = rho.coh_ab, rho.coh_ca, rho.coh_cb, rho.coh_ad
    two_re = 2 * ab.real
    assert d.pop_a == pytest.approx(-(rv + g + gu) * aa + rv * cc - p * rv / 2 * two_re + ge * ee)
    assert d.pop_b == pytest.approx(-(rv + g) * bb + rv * cc - p * rv / 2 * two_re + ge * ee)
    assert d.pop_c == pytest.approx((rv + g) * (aa + bb) - 2 * rv * cc + p * rv * two_re
                                    + re * (ee - cc) + ru * (dd - cc))
    assert d.pop_d == pytest.approx(ru * (cc - dd) + gu * aa)
    assert d.pop_e == pytest.approx(re * (cc - ee) - 2 * ge * ee)
    assert d.coh_ab == pytest.approx(-(rv + g + gu / 2) * ab - 1j * dl * ab
                                     + p * rv / 2 * (2 * cc - aa - bb))
    assert d.coh_ca == pytest.approx(-(3 * rv + g + gu + re + ru) / 2 * ca - p * rv / 2 * cb)
    assert d.coh_cb == pytest.approx(-(3 * rv + g + re + ru) / 2 * cb - p * rv / 2 * ca)
    assert d.coh_ad == pytest.approx(-(gu + ru) / 2 * ad)


def test_reduced_rows_match_hand_entries():
    r = RateSet.simplified(1.1, 0.3, 2.5, r_e=1.7, r_uv=0.6, p=-0.8)
    rho = random_valid_state(np.random.default_rng(7))
    d = assemble_reduced(r).rhs(rho)
    g, gu, rv, re, ru, p = 1.1, 0.3, 2.5, 1.7, 0.6, -0.8
    aa, bb, cc, dd, _ = rho.populations
    x = rho.coh_ab.real
    assert d.pop_a == pytest.approx(-(rv + g + gu) * aa + (rv + re / 2) * cc - p * rv * x)
    assert d.pop_b == pytest.approx(-(rv + g) * bb + (rv + re / 2) * cc - p * rv * x)
    assert d.pop_c == pytest.approx((rv + g) * (aa + bb) - (2 * rv + re + ru) * cc
                                    + 2 * p * rv * x + ru * dd)
    assert d.pop_d == pytest.approx(ru * (cc - dd) + gu * aa)
    assert d.pop_e == 0.0
    assert d.coh_ab.real == pytest.approx(-(rv + g + gu / 2) * x + p * rv / 2 * (2 * cc - aa - bb))


# --- steady state -----------------------------------------------------------

def test_v_subsystem_p0_has_no_coherence():
    s = steady_state(assemble_v_subsystem(RateSet(1.0, 2.0, 0.0, r_a=3.0, r_b=0.5, p=0.0)))
    assert s.coh_ab == 0


def test_v_subsystem_without_pumps_relaxes_to_c():
    s = steady_state(assemble_v_subsystem(RateSet(1.0, 2.0, 0.0, p=1.0)))
    assert s.pop_c == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("rates", [
    RateSet(0.01, 0.01, 0.0, r_a=1.0, r_b=1.0, p=1.0),
    RateSet(0.3, 1.7, 0.0, r_a=2.0, r_b=0.4, p=-0.6, delta=0.9),
    RateSet(1.0, 1.0, 0.0, r_a=0.1, r_b=5.0, p=0.95, delta=-2.0),
])
def test_v_subsystem_matches_hand_assembled_nullspace(rates):
    y = nullspace_state(v_oracle_matrix(rates), [0, 1, 2])
    s = steady_state(assemble_v_subsystem(rates))
    np.testing.assert_allclose([s.pop_a, s.pop_b, s.pop_c], y[:3].real, atol=1e-12)
    assert s.coh_ab == pytest.approx(y[3], abs=1e-12)
    assert np.conj(s.coh_ab) == pytest.approx(y[4], abs=1e-12)


@given(rates=simplified_rates(delta=0.4))
@settings(max_examples=40, deadline=None)
def test_five_level_matches_scipy_nullspace(rates):
    gen = assemble_five_level(rates)
    x = steady_state_vector(gen)
    ns = scipy.linalg.null_space(gen.matrix, rcond=1e-13)
    # ca/cb/ad decay, so the kernel is one-dimensional
    assert ns.shape[1] == 1
    y = ns[:, 0] / ns[:5, 0].sum()
    np.testing.assert_allclose(x, y, atol=1e-8)


def test_reduced_steady_state_p0_closed_form():
    r = RateSet.simplified(0.7, 1.9, 2.3, r_e=0.8, r_uv=0.05, p=0.0)
    s = steady_state(assemble_reduced(r))
    feed = (2.3 + 0.4) * s.pop_c
    assert s.pop_a == pytest.approx(feed / (2.3 + 0.7 + 1.9), rel=1e-12)
    assert s.pop_b == pytest.approx(feed / (2.3 + 0.7), rel=1e-12)
    assert s.coh_ab == 0


@pytest.mark.parametrize("variant", ["reduced", "five_level"])
@pytest.mark.parametrize("eps", [1e-3, 1e-5])
def test_vanishing_pumps_drain_into_d(variant, eps):
    # c is refilled from d only at r_uv, so the limit needs r_uv << r_vis
    r = RateSet.simplified(1.0, 2.0, eps, r_e=eps, r_uv=eps ** 2, gamma_e=3.0)
    s = steady_state(assemble(r, variant))
    assert s.pop_d == pytest.approx(1.0, abs=10 * eps)


@pytest.mark.parametrize("variant", ["reduced", "five_level"])
def test_exactly_zero_pumps_leave_two_sinks(variant):
    # a, b decay into c and d, and nothing leaves either: no unique steady state
    with pytest.raises(SingularSystem):
        steady_state(assemble(RateSet.simplified(1.0, 2.0, 0.0, gamma_e=3.0), variant))


def test_deep_pumping_traps_dark_state(deep_pump_rates):
    s = steady_state(assemble_reduced(deep_pump_rates))
    assert s.pop_a / s.pop_b == pytest.approx(1.0, abs=0.01)
    assert s.coh_ab.real < 0


def test_five_level_e_population_from_fast_decay():
    r = RateSet.simplified(1.0, 1.0, 2.0, r_e=1.0, r_uv=0.5, gamma_e=1e4)
    s = steady_state(assemble_five_level(r))
    assert s.pop_e == pytest.approx(r.r_e * s.pop_c / (r.r_e + 2 * r.gamma_e), rel=1e-10)
    assert s.pop_e == pytest.approx(r.r_e * s.pop_c / (2 * r.gamma_e), rel=1e-4)


def test_five_level_agrees_with_reduced():
    r = RateSet.simplified(1.0, 1.0, 30.0, r_e=10.0, r_uv=0.1, gamma_e=1e5, p=1.0)
    a = steady_state(assemble_five_level(r)).to_vector()
    b = steady_state(assemble_reduced(r)).to_vector()
    keep = [0, 1, 2, 3, AB_RE]
    np.testing.assert_allclose(a[keep], b[keep], rtol=1e-3)


@given(rates=simplified_rates(p=1.0))
@settings(max_examples=30, deadline=None)
def test_adiabatic_elimination_error_bound(rates):
    others = rates.max_rate()
    rates = rates.replace(gamma_e=1e4 * others)
    a = steady_state(assemble_five_level(rates))
    b = steady_state(assemble_reduced(rates))
    bound = 10.0 * others / rates.gamma_e
    np.testing.assert_allclose(a.populations[:4], b.populations[:4], rtol=bound)
    assert a.pop_e <= bound


@pytest.mark.parametrize("variant", ["reduced", "five_level"])
@given(rates=simplified_rates())
@settings(max_examples=30, deadline=None)
def test_parity_in_p(variant, rates):
    plus = steady_state(assemble(rates, variant))
    minus = steady_state(assemble(rates.replace(p=-rates.p), variant))
    np.testing.assert_allclose(plus.populations, minus.populations, rtol=1e-12, atol=1e-15)
    assert plus.coh_ab.real == pytest.approx(-minus.coh_ab.real, rel=1e-12, abs=1e-15)


@given(rates=simplified_rates(delta=0.2), scale=log_rate)
@settings(max_examples=30, deadline=None)
def test_steady_state_invariant_under_time_rescaling(rates, scale):
    a = steady_state(assemble_reduced(rates)).to_vector()
    b = steady_state(assemble_reduced(rates.scaled(scale))).to_vector()
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-14)


@given(rates=simplified_rates(delta=0.5))
@settings(max_examples=40, deadline=None)
def test_steady_state_residual(rates):
    for variant in ("reduced", "five_level"):
        gen = assemble(rates, variant)
        x = steady_state_vector(gen)
        norm = np.abs(gen.matrix).sum(axis=1).max()
        assert np.abs(gen.matrix @ x).max() <= 1e-10 * norm
        assert abs(x[:5].sum() - 1.0) < 1e-12


def test_all_rates_zero_is_singular():
    zero = RateSet.simplified(0.0, 0.0, 0.0)
    for variant in Variant:
        with pytest.raises(SingularSystem):
            steady_state(assemble(zero, variant))


def test_disconnected_ground_state_is_singular():
    # d is reachable but never refilled into c, and not fed either
    r = RateSet.simplified(1.0, 0.0, 1.0, r_uv=0.0)
    with pytest.raises(SingularSystem):
        steady_state(assemble_reduced(r))


# --- evolve -----------------------------------------------------------------

def test_zero_generator_trajectory_is_constant():
    gen = Generator(np.zeros((13, 13)), Variant.REDUCED)
    start = initial_state("uniform")
    traj = evolve(gen, start, t_final=5.0, dt_max=0.5)
    assert traj.times[-1] == 5.0
    assert np.all(np.diff(traj.times) > 0)
    for v in traj.vectors:
        np.testing.assert_array_equal(v, start.to_vector())


@pytest.mark.parametrize("p", [1.0, 0.0, -0.7])
def test_five_level_trace_conserved_at_every_sample(p):
    r = RateSet.simplified(1.0, 2.0, 3.0, r_e=1.5, r_uv=0.2, gamma_e=20.0, p=p, delta=0.3)
    traj = evolve(assemble_five_level(r), initial_state("ground_d"), t_final=20.0, tol=1e-10)
    traces = traj.vectors[:, :5].sum(axis=1)
    assert np.abs(traces - 1.0).max() <= 1e-9
    for state in traj.states[::25]:
        assert diagnose(state).trace_defect <= 1e-7


def test_evolve_matches_matrix_exponential():
    r = RateSet.simplified(1.0, 0.5, 2.0, r_e=1.0, r_uv=0.3, p=0.9, delta=0.7)
    gen = assemble_reduced(r)
    start = random_valid_state(np.random.default_rng(3)).to_vector()
    start[4] = 0.0
    start[:5] /= start[:5].sum()
    x0 = DensityMatrix.from_vector(start)
    traj = evolve(gen, x0, t_final=3.0, tol=1e-12)
    for t, v in zip(traj.times[::7], traj.vectors[::7]):
        np.testing.assert_allclose(v, scipy.linalg.expm(gen.matrix * t) @ start, atol=1e-9)


def test_evolve_reaches_steady_state_reduced_p1():
    r = RateSet.simplified(1.0, 1.0, 3.0, r_e=1.0, r_uv=0.5, p=1.0)
    gen = assemble_reduced(r)
    gap = spectral_gap(gen)
    traj = evolve(gen, initial_state("ground_d"), t_final=50.0 / gap, tol=1e-11, save_every=100)
    diff = traj.vectors[-1] - steady_state(gen).to_vector()
    assert np.abs(diff).max() <= 1e-6


def test_evolve_is_deterministic():
    r = RateSet.simplified(1.0, 2.0, 5.0, r_e=2.0, r_uv=0.1, p=1.0)
    gen = assemble_reduced(r)
    a = evolve(gen, initial_state("ground_c"), t_final=10.0)
    b = evolve(gen, initial_state("ground_c"), t_final=10.0)
    np.testing.assert_array_equal(a.times, b.times)
    np.testing.assert_array_equal(a.vectors, b.vectors)
    assert (a.n_accepted, a.n_rejected) == (b.n_accepted, b.n_rejected)


def test_dt_max_is_respected():
    gen = assemble_reduced(RateSet.simplified(1.0, 1.0, 1.0, r_uv=1.0))
    traj = evolve(gen, initial_state("ground_d"), t_final=4.0, dt_max=0.1)
    assert np.diff(traj.times).max() <= 0.1 + 1e-15


def test_save_every_thins_but_keeps_final():
    gen = assemble_reduced(RateSet.simplified(1.0, 1.0, 1.0, r_uv=1.0))
    full = evolve(gen, initial_state("ground_d"), t_final=4.0, dt_max=0.01)
    thin = evolve(gen, initial_state("ground_d"), t_final=4.0, dt_max=0.01, save_every=10)
    assert len(thin) < len(full) / 5
    assert thin.times[-1] == 4.0
    np.testing.assert_array_equal(thin.vectors[-1], full.vectors[-1])


def test_step_exhaustion_raises_stiffness_failure():
    gen = assemble_five_level(RateSet.simplified(1.0, 1.0, 1.0, r_e=1.0, r_uv=1.0, gamma_e=1e7))
    with pytest.raises(StiffnessFailure):
        evolve(gen, initial_state("ground_d"), t_final=10.0, max_steps=1000)


@pytest.mark.parametrize("kwargs", [dict(t_final=0.0), dict(t_final=1.0, tol=0.0),
                                    dict(t_final=1.0, dt_max=-1.0)])
def test_evolve_argument_checks(kwargs):
    gen = assemble_reduced(RateSet.simplified(1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        evolve(gen, initial_state("ground_d"), **kwargs)


def test_spectral_gap_of_pure_decay():
    # c <-> d exchange at r_uv is the slowest mode when everything else is fast
    gen = assemble_reduced(RateSet.simplified(10.0, 10.0, 0.0, r_uv=0.05))
    assert spectral_gap(gen) == pytest.approx(0.1, rel=1e-6)
