import numpy as np
import pytest
from hypothesis import strategies as st

from spinpair.physsys import SpinPairSystem
from spinpair.spectral import SpectralSamples

GAMMA_H = 267.52218744e6
GAMMA_F = 251.815e6
HF_B0 = 0.705
HF_R = 96.098e-12
# published dipolar constant for HF at this distance, s^-2
REFERENCE_KAPPA = 47.9898e10
REFERENCE_TAU_C = 0.2391e-12

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def hf_system():
    return SpinPairSystem(gamma_I=GAMMA_F, gamma_S=GAMMA_H, B0=HF_B0, r=HF_R)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian_state(rng, scale=1.0):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = scale * (a + a.conj().T) / 2
    h[np.diag_indices(4)] += (1.0 - np.trace(h).real) / 4
    return h


sample_value = st.one_of(st.just(0.0), st.floats(min_value=1e-6, max_value=1.0))
samples_strategy = st.builds(SpectralSamples, sample_value, sample_value, sample_value, sample_value, sample_value)
positive_samples = st.builds(
    SpectralSamples, *[st.floats(min_value=1e-3, max_value=1.0) for _ in range(5)]
)


@pytest.fixture
def acceptance():
    def record(label: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
