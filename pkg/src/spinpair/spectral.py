"""Spectral-density models and the samples the relaxation matrices need."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .physsys import EigenFrequencies


@dataclass(frozen=True)
class Isotropic:
    """Rigid isotropic tumbling: J(w) = 2 tau_c / (1 + (w tau_c)^2)."""

    tau_c: float

    def __post_init__(self):
        if not (math.isfinite(self.tau_c) and self.tau_c > 0):
            raise ValueError(f"tau_c must be > 0 s, got {self.tau_c!r}")

    def __call__(self, omega):
        return evaluate(self, omega)


@dataclass(frozen=True)
class ModelFree:
    """Two-timescale (Lipari-Szabo) spectral density.

    J(w) = prefactor * [S2 tau_M / (1 + (w tau_M)^2) + (1 - S2) tau / (1 + (w tau)^2)]
    with 1/tau = 1/tau_M + 1/tau_e.

    The default prefactor 2 matches :class:`Isotropic`, so ``order_param_sq=1``
    reduces exactly to isotropic tumbling with ``tau_c = tau_m``. Use
    ``prefactor=0.4`` for the conventional 2/5 normalisation.
    """

    order_param_sq: float
    tau_m: float
    tau_e: float
    prefactor: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.order_param_sq <= 1.0):
            raise ValueError(f"order_param_sq must lie in (0, 1], got {self.order_param_sq!r}")
        for name in ("tau_m", "tau_e", "prefactor"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")

    @property
    def tau_eff(self) -> float:
        return 1.0 / (1.0 / self.tau_m + 1.0 / self.tau_e)

    def __call__(self, omega):
        return evaluate(self, omega)


SpectralDensityModel = Union[Isotropic, ModelFree]


def _lorentzian(omega, tau):
    return tau / (1.0 + (omega * tau) ** 2)


def evaluate(model: SpectralDensityModel, omega):
    """Spectral density at angular frequency ``omega`` (rad/s), in seconds.

    Even in ``omega``; accepts scalars or arrays.
    """
    w = np.abs(omega)
    if isinstance(model, Isotropic):
        out = 2.0 * _lorentzian(w, model.tau_c)
    elif isinstance(model, ModelFree):
        s2 = model.order_param_sq
        out = model.prefactor * (
            s2 * _lorentzian(w, model.tau_m) + (1.0 - s2) * _lorentzian(w, model.tau_eff)
        )
    else:
        raise TypeError(f"unsupported spectral density model: {type(model).__name__}")
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SpectralSamples:
    """J(0), J(w_S), J(w_I), J(w_S + w_I) and J(w_S - w_I), all in seconds."""

    j0: float
    jS: float
    jI: float
    jPlus: float
    jMinus: float

    def __post_init__(self):
        for name, value in zip(("j0", "jS", "jI", "jPlus", "jMinus"), self.as_tuple()):
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.j0, self.jS, self.jI, self.jPlus, self.jMinus)

    @classmethod
    def uniform(cls, value: float) -> "SpectralSamples":
        return cls(value, value, value, value, value)


def sample_at_transitions(model: SpectralDensityModel, freqs: EigenFrequencies) -> SpectralSamples:
    w_i, w_s = freqs.omega_I, freqs.omega_S
    return SpectralSamples(
        j0=evaluate(model, 0.0),
        jS=evaluate(model, w_s),
        jI=evaluate(model, w_i),
        jPlus=evaluate(model, w_s + w_i),
        jMinus=evaluate(model, abs(w_s - w_i)),
    )


@dataclass(frozen=True)
class CollectiveRates:
    """Mean (jp) and half-splitting (jn) of the two longitudinal eigenrates, in s."""

    jp: float
    jn: float


def collective_rates(samples: SpectralSamples) -> CollectiveRates:
    half_diff = 0.5 * (samples.jS - samples.jI)
    cross = (6.0 * samples.jPlus - samples.jMinus) / 3.0
    jp = 0.5 * (samples.jS + samples.jI) + (6.0 * samples.jPlus + samples.jMinus) / 3.0
    return CollectiveRates(jp=jp, jn=math.hypot(half_diff, cross))


def slow_longitudinal_rate(samples: SpectralSamples) -> float:
    """jp - jn evaluated without cancellation.

    Uses jp^2 - jn^2 = jS jI + (jS + jI)(2 j+ + j-/3) + 8 j+ j- / 3, a sum of
    nonnegative terms, so small slow rates keep full relative precision.
    """
    s, i, p, m = samples.jS, samples.jI, samples.jPlus, samples.jMinus
    rates = collective_rates(samples)
    total = rates.jp + rates.jn
    if total == 0.0:
        return 0.0
    product = s * i + (s + i) * (2.0 * p + m / 3.0) + 8.0 * p * m / 3.0
    return product / total
