import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from collcoh.model import RateSet

# rates spanning six decades, as in the acceptance checks
log_rate = st.floats(min_value=-3.0, max_value=3.0).map(lambda x: 10.0 ** x)
alignment = st.floats(min_value=-1.0, max_value=1.0)


@st.composite
def simplified_rates(draw, p=None, delta=0.0):
    return RateSet.simplified(
        gamma_vis=draw(log_rate), gamma_uv=draw(log_rate), r_vis=draw(log_rate),
        r_e=draw(log_rate), r_uv=draw(log_rate), gamma_e=draw(log_rate),
        p=draw(alignment) if p is None else p, delta=delta)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def deep_pump_rates():
    """Deep-pumping point used in several examples (gamma_vis = gamma_uv = 1)."""
    return RateSet.simplified(1.0, 1.0, 300.0, r_e=100.0, r_uv=1.0, p=1.0)


def random_valid_state(rng, coherent=True):
    """Random 5x5 density matrix projected onto the tracked elements."""
    z = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    rho = z @ z.conj().T
    rho /= np.trace(rho).real
    from collcoh.model import DensityMatrix
    scale = 1.0 if coherent else 0.0
    return DensityMatrix(*np.diag(rho).real,
                         coh_ab=scale * rho[0, 1], coh_ca=scale * rho[2, 0],
                         coh_cb=scale * rho[2, 1], coh_ad=scale * rho[0, 3])


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in sorted(results):
            terminalreporter.write_line(line)
