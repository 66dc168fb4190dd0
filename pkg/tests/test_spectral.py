import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinpair.physsys import larmor_frequencies
from spinpair.spectral import (
    Isotropic,
    ModelFree,
    SpectralSamples,
    collective_rates,
    evaluate,
    sample_at_transitions,
    slow_longitudinal_rate,
)

from conftest import REFERENCE_TAU_C, samples_strategy

taus = st.floats(1e-14, 1e-6)
omegas = st.floats(-1e11, 1e11)


def test_isotropic_values():
    m = Isotropic(2e-12)
    assert evaluate(m, 0.0) == 4e-12
    assert evaluate(m, 1 / 2e-12) == pytest.approx(2e-12, rel=1e-15)
    assert evaluate(Isotropic(REFERENCE_TAU_C), 1e-4 / REFERENCE_TAU_C) == pytest.approx(0.4782e-12, rel=1e-7)


def test_vectorized():
    out = evaluate(Isotropic(1e-9), np.array([0.0, 1e9, -1e9]))
    assert out.shape == (3,)
    assert out[1] == out[2] == pytest.approx(1e-9)


@pytest.mark.parametrize("bad", [dict(tau_c=0.0), dict(tau_c=-1e-12)])
def test_isotropic_rejects(bad):
    with pytest.raises(ValueError):
        Isotropic(**bad)


@pytest.mark.parametrize("s2,tm,te", [(0.0, 1e-9, 1e-12), (1.5, 1e-9, 1e-12), (0.5, -1e-9, 1e-12), (0.5, 1e-9, 0.0)])
def test_model_free_rejects(s2, tm, te):
    with pytest.raises(ValueError):
        ModelFree(s2, tm, te)


def test_sampling_extreme_narrowing(hf_system):
    s = sample_at_transitions(Isotropic(1e-16), larmor_frequencies(hf_system))
    assert np.allclose(s.as_tuple(), 2e-16, rtol=1e-12, atol=0)


def test_sampling_slow_motion(hf_system):
    f = larmor_frequencies(hf_system)
    tc = 1e-6
    s = sample_at_transitions(Isotropic(tc), f)
    assert s.jI == pytest.approx(2 / (f.omega_I**2 * tc), rel=1e-9)
    assert s.jI < s.j0


def test_sampling_uses_absolute_difference(hf_system):
    f = larmor_frequencies(hf_system)
    s = sample_at_transitions(Isotropic(1e-9), f)
    assert s.jMinus == evaluate(Isotropic(1e-9), f.omega_S - f.omega_I)
    assert s.jMinus == evaluate(Isotropic(1e-9), f.omega_I - f.omega_S)


def test_samples_reject_negative():
    with pytest.raises(ValueError):
        SpectralSamples(1.0, -1e-3, 1.0, 1.0, 1.0)


def test_collective_rates_equal_samples():
    tc = REFERENCE_TAU_C
    r = collective_rates(SpectralSamples.uniform(2 * tc))
    assert r.jp == pytest.approx(20 * tc / 3, rel=1e-15)
    assert r.jn == pytest.approx(10 * tc / 3, rel=1e-15)
    assert r.jn / r.jp == pytest.approx(0.5, rel=1e-15)


def test_collective_rates_vanishing_splitting():
    r = collective_rates(SpectralSamples(1.0, 0.75, 0.75, 0.125, 0.75))
    assert r.jn == 0.0


@given(samples_strategy)
def test_jn_bounded_by_jp(s):
    r = collective_rates(s)
    assert 0 <= r.jn <= r.jp * (1 + 1e-15)


@given(samples_strategy)
def test_slow_rate_identity(s):
    r = collective_rates(s)
    assert slow_longitudinal_rate(s) == pytest.approx(r.jp - r.jn, rel=1e-9, abs=1e-15 * r.jp)
    assert slow_longitudinal_rate(s) >= 0


@given(tau=taus, w=omegas)
def test_isotropic_even(tau, w):
    m = Isotropic(tau)
    assert evaluate(m, w) == evaluate(m, -w)


@given(s2=st.floats(1e-6, 1.0), tm=taus, te=taus, w1=omegas, w2=omegas)
def test_model_free_even_and_monotone(s2, tm, te, w1, w2):
    m = ModelFree(s2, tm, te)
    assert evaluate(m, w1) == evaluate(m, -w1)
    lo, hi = sorted((abs(w1), abs(w2)))
    assert evaluate(m, hi) <= evaluate(m, lo) * (1 + 1e-15)


@given(tau=taus, tm=taus, te=taus, w=omegas)
def test_isotropic_monotone_and_nested(tau, tm, te, w):
    assert evaluate(Isotropic(tau), 2 * w) <= evaluate(Isotropic(tau), w)
    assert evaluate(ModelFree(1.0, tm, te), w) == evaluate(Isotropic(tm), w)


def test_prefactor_scales_linearly():
    a = ModelFree(0.3, 1e-9, 1e-11)
    b = ModelFree(0.3, 1e-9, 1e-11, prefactor=0.4)
    assert evaluate(b, 1e9) == pytest.approx(0.2 * evaluate(a, 1e9), rel=1e-15)
