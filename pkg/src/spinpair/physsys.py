"""Physical description of a heteronuclear spin-1/2 pair.

Holds the constants, the pair itself (two gyromagnetic ratios, field,
distance, temperature), the Zeeman level frequencies, and the dipolar
prefactor ``kappa`` that turns spectral densities (s) into rates (1/s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as _codata


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants used by the model. Defaults are CODATA values."""

    hbar: float = _codata.hbar
    mu0_over_4pi: float = _codata.mu_0 / (4.0 * math.pi)
    kB: float = _codata.k

    def __post_init__(self):
        for name in ("hbar", "mu0_over_4pi", "kB"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class SpinPairSystem:
    """Two unlike spin-1/2 nuclei I and S coupled by the dipolar interaction.

    Args:
        gamma_I: gyromagnetic ratio of spin I (rad s^-1 T^-1).
        gamma_S: gyromagnetic ratio of spin S (rad s^-1 T^-1).
        B0: static field (T).
        r: internuclear distance (m).
        temperature: lattice temperature (K).
    """

    gamma_I: float
    gamma_S: float
    B0: float
    r: float
    temperature: float = 300.0

    def __post_init__(self):
        for name in ("gamma_I", "gamma_S", "B0", "r", "temperature"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.B0 <= 0:
            raise ValueError(f"B0 must be > 0 T, got {self.B0!r}")
        if self.r <= 0:
            raise ValueError(f"r must be > 0 m, got {self.r!r}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be > 0 K, got {self.temperature!r}")
        if self.gamma_I == 0 or self.gamma_S == 0:
            raise ValueError("gyromagnetic ratios must be nonzero")
        if self.gamma_I == self.gamma_S:
            raise ValueError("gamma_I == gamma_S: the model requires an unlike spin pair")


@dataclass(frozen=True)
class EigenFrequencies:
    """Larmor frequencies and the four Zeeman level frequencies (rad/s).

    Levels are ordered |uu>, |ud>, |du>, |dd> (first arrow is spin I).
    """

    omega_I: float
    omega_S: float
    omega_1: float
    omega_2: float
    omega_3: float
    omega_4: float

    @property
    def levels(self) -> tuple[float, float, float, float]:
        return (self.omega_1, self.omega_2, self.omega_3, self.omega_4)


def larmor_frequencies(system: SpinPairSystem) -> EigenFrequencies:
    w_i = system.gamma_I * system.B0
    w_s = system.gamma_S * system.B0
    w_sum = 0.5 * (w_i + w_s)
    w_diff = 0.5 * (w_i - w_s)
    return EigenFrequencies(
        omega_I=w_i,
        omega_S=w_s,
        omega_1=-w_sum,
        omega_2=-w_diff,
        omega_3=w_diff,
        omega_4=w_sum,
    )


def dipolar_constant(system: SpinPairSystem, consts: PhysicalConstants = CODATA) -> float:
    """Dipolar prefactor kappa in s^-2, so that rate = kappa * J.

    kappa = (mu0/4pi * hbar * gamma_I * gamma_S / r^3)^2 * S(S+1) with S = 1/2.
    A single power of hbar keeps the bracket in rad/s.
    """
    coupling = consts.mu0_over_4pi * consts.hbar * system.gamma_I * system.gamma_S / system.r**3
    return coupling**2 * 0.5 * (0.5 + 1.0)
