"""Longitudinal (Solomon) and transverse relaxation experiments.

Longitudinal results are reported as

    upsilon_X(t) = (<X_z>(t) - <X_z>_eq) / <S_z>_eq,   X in {I, S}

for three preparations of the S spin (or of both spins). Each curve has a
closed form in the two longitudinal rates and the h coefficients; the same
curves can also be obtained by propagating the prepared density matrix, which
is how the closed forms are verified.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .physsys import CODATA, PhysicalConstants, SpinPairSystem, dipolar_constant, larmor_frequencies
from .propagator import (
    DegenerateSpectrum,
    DensityState,
    HCoefficients,
    evolve_first_order,
    evolve_zero_order,
    h_coefficients_any,
)
from .spectral import (
    CollectiveRates,
    SpectralDensityModel,
    SpectralSamples,
    collective_rates,
    sample_at_transitions,
)
from .superop import closed_form_rates

HIGH_TEMPERATURE_LIMIT = 0.01


class ExperimentKind(enum.Enum):
    SATURATION_S = "saturation-s"
    INVERSION_S = "inversion-s"
    INVERSION_BOTH = "inversion-both"

    @classmethod
    def parse(cls, text: str) -> "ExperimentKind":
        key = text.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        choices = ", ".join(k.value for k in cls)
        raise ValueError(f"unknown experiment kind {text!r} (expected one of {choices})")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    upsilon_I: np.ndarray
    upsilon_S: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        ui = np.asarray(self.upsilon_I, dtype=float)
        us = np.asarray(self.upsilon_S, dtype=float)
        if t.ndim != 1 or ui.shape != t.shape or us.shape != t.shape:
            raise ValueError("trajectory arrays must be 1-D with equal lengths")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(ui)) and np.all(np.isfinite(us))):
            raise ValueError("trajectory contains non-finite values")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "upsilon_I", ui)
        object.__setattr__(self, "upsilon_S", us)


# ------------------------------------------------------------------ states

def _polarizations(system: SpinPairSystem, consts: PhysicalConstants) -> tuple[float, float]:
    """hbar*w/(2 kB T) for I and S."""
    freqs = larmor_frequencies(system)
    kt = consts.kB * system.temperature
    x_i = consts.hbar * freqs.omega_I / (2.0 * kt)
    x_s = consts.hbar * freqs.omega_S / (2.0 * kt)
    if 2.0 * max(abs(x_i), abs(x_s)) > HIGH_TEMPERATURE_LIMIT:
        warnings.warn(
            "hbar*omega/kT exceeds 0.01; the linear high-temperature expansion is inaccurate",
            RuntimeWarning,
            stacklevel=3,
        )
    return x_i, x_s


def equilibrium_state(system: SpinPairSystem, consts: PhysicalConstants = CODATA) -> DensityState:
    """High-temperature thermal state, linear in hbar*w/kT, partition function 4."""
    x_i, x_s = _polarizations(system, consts)
    return DensityState.from_diagonal(
        [(1 + x_i + x_s) / 4, (1 + x_i - x_s) / 4, (1 - x_i + x_s) / 4, (1 - x_i - x_s) / 4]
    )


def prepare_initial_state(kind: ExperimentKind, system: SpinPairSystem,
                          consts: PhysicalConstants = CODATA) -> DensityState:
    x_i, x_s = _polarizations(system, consts)
    if kind is ExperimentKind.SATURATION_S:
        diag = [(1 + x_i) / 4, (1 + x_i) / 4, (1 - x_i) / 4, (1 - x_i) / 4]
    elif kind is ExperimentKind.INVERSION_S:
        diag = [(1 + x_i - x_s) / 4, (1 + x_i + x_s) / 4, (1 - x_i - x_s) / 4, (1 - x_i + x_s) / 4]
    elif kind is ExperimentKind.INVERSION_BOTH:
        diag = [(1 - x_i - x_s) / 4, (1 - x_i + x_s) / 4, (1 + x_i - x_s) / 4, (1 + x_i + x_s) / 4]
    else:
        raise ValueError(f"unsupported experiment kind {kind!r}")
    return DensityState.from_diagonal(diag)


class Expectations(NamedTuple):
    Iz: float
    Sz: float
    Ix: float
    Sx: float


def _expectations_from(rho) -> Expectations:
    rho = np.asarray(rho)
    p = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    return Expectations(
        Iz=(p[..., 0] + p[..., 1] - p[..., 2] - p[..., 3]) / 2,
        Sz=(p[..., 0] - p[..., 1] + p[..., 2] - p[..., 3]) / 2,
        Ix=np.real(rho[..., 0, 2] + rho[..., 1, 3]),
        Sx=np.real(rho[..., 0, 1] + rho[..., 2, 3]),
    )


def expectation_values(state: DensityState) -> Expectations:
    return Expectations(*(float(v) for v in _expectations_from(state.rho)))


# ------------------------------------------------------- closed-form curves

def _check_times(times) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    if t.size and t[0] < 0:
        raise ValueError("times must be >= 0")
    return t


def _h_or_zero(samples: SpectralSamples) -> HCoefficients:
    try:
        return h_coefficients_any(samples)
    except DegenerateSpectrum:
        # equal longitudinal rates: every h term multiplies e_g - e_f = 0
        return HCoefficients(0.0, 0.0, 0.0)


def _mode_exponentials(samples: SpectralSamples, kappa: float, t: np.ndarray):
    """exp(-R_g t) - exp(-R_f t) and exp(-R_g t) + exp(-R_f t), without cancellation."""
    rs = closed_form_rates(samples, kappa)
    r_f, r_g = rs.rate("0_f"), rs.rate("0_g")
    e_g = np.exp(-r_g * t)
    diff = -e_g * np.expm1(-(r_f - r_g) * t)
    return diff, e_g + np.exp(-r_f * t)


def longitudinal_curves(kind: ExperimentKind, samples: SpectralSamples, kappa: float,
                        omega_I: float, omega_S: float, times) -> Trajectory:
    """Closed-form upsilon_I, upsilon_S from spectral samples and rates."""
    t = _check_times(times)
    h = _h_or_zero(samples)
    diff, total = _mode_exponentials(samples, kappa, t)
    if kind is ExperimentKind.SATURATION_S:
        ui = -h.h1 * diff
        us = h.h2 * diff - 0.5 * total
    elif kind is ExperimentKind.INVERSION_S:
        ui = -2.0 * h.h1 * diff
        us = 2.0 * h.h2 * diff - total
    elif kind is ExperimentKind.INVERSION_BOTH:
        ratio = omega_I / omega_S
        ui = -2.0 * (h.h1 + h.h2 * ratio) * diff - ratio * total
        us = (2.0 * h.h2 + 2.0 * h.h3 * ratio) * diff - total
    else:
        raise ValueError(f"unsupported experiment kind {kind!r}")
    return Trajectory(t, ui, us)


def _setup(system, model, consts, kappa):
    freqs = larmor_frequencies(system)
    samples = sample_at_transitions(model, freqs)
    k = dipolar_constant(system, consts) if kappa is None else float(kappa)
    return freqs, samples, k


def longitudinal_trajectory(kind: ExperimentKind, system: SpinPairSystem, model: SpectralDensityModel,
                            consts: PhysicalConstants = CODATA, times=(0.0,), kappa: float | None = None
                            ) -> Trajectory:
    """Closed-form longitudinal response. ``kappa`` overrides the computed dipolar constant."""
    freqs, samples, k = _setup(system, model, consts, kappa)
    return longitudinal_curves(kind, samples, k, freqs.omega_I, freqs.omega_S, times)


def longitudinal_trajectory_propagated(kind: ExperimentKind, system: SpinPairSystem,
                                       model: SpectralDensityModel, consts: PhysicalConstants = CODATA,
                                       times=(0.0,), kappa: float | None = None) -> Trajectory:
    """Same curves obtained by evolving the prepared density matrix."""
    t = _check_times(times)
    _, samples, k = _setup(system, model, consts, kappa)
    eq = equilibrium_state(system, consts)
    rho0 = prepare_initial_state(kind, system, consts)
    block = evolve_zero_order(rho0, eq, samples, k, t)
    p = np.real(block[..., [0, 1, 4, 5]])
    iz = (p[:, 0] + p[:, 1] - p[:, 2] - p[:, 3]) / 2
    sz = (p[:, 0] - p[:, 1] + p[:, 2] - p[:, 3]) / 2
    ref = expectation_values(eq)
    return Trajectory(t, (iz - ref.Iz) / ref.Sz, (sz - ref.Sz) / ref.Sz)


def transverse_trajectory(state0: DensityState, system: SpinPairSystem, model: SpectralDensityModel,
                          consts: PhysicalConstants = CODATA, times=(0.0,), kappa: float | None = None
                          ) -> tuple[np.ndarray, np.ndarray]:
    """<Ix>(t) and <Sx>(t) in the rotating frame; single exponentials in R1_f and R1_a."""
    t = _check_times(times)
    _, samples, k = _setup(system, model, consts, kappa)
    coh = evolve_first_order(state0, samples, k, t)
    ix = np.real(coh[:, 1] + coh[:, 2])
    sx = np.real(coh[:, 0] + coh[:, 3])
    return ix, sx


# --------------------------------------------------------------- peak time

class PeakTime(NamedTuple):
    t_m: float
    degenerate_limit: bool


def enhancement_peak_time(kappa: float, rates: CollectiveRates) -> PeakTime:
    """Time of the extremum of the transient enhancement of spin I.

    t_m = atanh(Jn/Jp) / (kappa Jn); as Jn -> 0 this tends to 1/(kappa Jp).
    """
    jp, jn = rates.jp, rates.jn
    if not (kappa > 0 and jp > 0):
        raise ValueError("kappa and Jp must be positive")
    if jn < 0 or jn >= jp:
        raise ValueError("peak time requires 0 <= Jn < Jp")
    if jn == 0:
        return PeakTime(1.0 / (kappa * jp), True)
    return PeakTime(math.atanh(jn / jp) / (kappa * jn), False)


def peak_time_for(system: SpinPairSystem, model: SpectralDensityModel,
                  consts: PhysicalConstants = CODATA, kappa: float | None = None) -> PeakTime:
    _, samples, k = _setup(system, model, consts, kappa)
    return enhancement_peak_time(k, collective_rates(samples))
