"""Redfield superoperators of coherence order 0, 1, 2 and their closed-form eigenvalues.

Matrices are generators in units of seconds: d/dt v = kappa * m @ v. The
eigenvalues of ``m`` are therefore the negatives of the decay rates ``iota``.

Zero-order vector ordering: (d11, d22, r23, r32, d33, d44), where dii are
population deviations from equilibrium and r23/r32 are the zero-quantum
coherences in the interaction picture. First-order ordering:
(r12, r13, r24, r34).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .spectral import SpectralSamples, collective_rates, slow_longitudinal_rate

ZERO_ORDER_LABELS = ("d11", "d22", "r23", "r32", "d33", "d44")
FIRST_ORDER_LABELS = ("r12", "r13", "r24", "r34")


def build_zero_order(samples: SpectralSamples) -> np.ndarray:
    s, i, p, m = samples.jS, samples.jI, samples.jPlus, samples.jMinus
    a = (s + i) / 4.0
    d = -(3.0 * s + 3.0 * i + 2.0 * m) / 6.0
    corner = -(s + i + 4.0 * p) / 2.0
    zq = m / 3.0
    return np.array(
        [
            [corner, s / 2, a, a, i / 2, 2 * p],
            [s / 2, d, -a, -a, zq, i / 2],
            [a, -a, d, zq, -a, a],
            [a, -a, zq, d, -a, a],
            [i / 2, zq, -a, -a, d, s / 2],
            [2 * p, i / 2, a, a, s / 2, corner],
        ],
        dtype=float,
    )


def build_first_order(samples: SpectralSamples) -> np.ndarray:
    j0, s, i, p, m = samples.as_tuple()
    diag = -(4.0 * j0 + 3.0 * s + 3.0 * i + m + 6.0 * p) / 6.0
    out = np.diag([diag] * 4)
    out[0, 3] = out[3, 0] = -i / 2.0
    out[1, 2] = out[2, 1] = -s / 2.0
    return out


def build_second_order(samples: SpectralSamples) -> float:
    return -(samples.jS + samples.jI + 4.0 * samples.jPlus) / 2.0


@dataclass(frozen=True)
class RateSet:
    """Closed-form decay constants (s) and the dipolar constant kappa (s^-2).

    Zero order: a (zero-quantum antisymmetric), b, c = e = 0 (conserved),
    f = Jp + Jn and g = Jp - Jn (longitudinal pair). First order: a, b act on
    r12/r34, f, g on r13/r24. Second order: a on r14.
    """

    iota0_a: float
    iota0_b: float
    iota0_c: float
    iota0_e: float
    iota0_f: float
    iota0_g: float
    iota1_a: float
    iota1_b: float
    iota1_f: float
    iota1_g: float
    iota2_a: float
    kappa: float

    def iotas(self) -> dict[str, float]:
        out = asdict(self)
        out.pop("kappa")
        return out

    def rates(self) -> dict[str, float]:
        """Physical rates R = kappa * iota in s^-1, keyed like ``R0_f``."""
        return {"R" + k[len("iota"):]: self.kappa * v for k, v in self.iotas().items()}

    def rate(self, name: str) -> float:
        return self.kappa * getattr(self, "iota" + name)

    def as_dict(self) -> dict[str, float]:
        out = asdict(self)
        out.update(self.rates())
        return out


def closed_form_rates(samples: SpectralSamples, kappa: float) -> RateSet:
    if not (math.isfinite(kappa) and kappa > 0):
        raise ValueError(f"kappa must be > 0, got {kappa!r}")
    j0, s, i, p, m = samples.as_tuple()
    coll = collective_rates(samples)
    first_common = 2.0 * j0 / 3.0 + m / 6.0 + p
    return RateSet(
        iota0_a=(3.0 * s + 3.0 * i + 4.0 * m) / 6.0,
        iota0_b=1.5 * (s + i),
        iota0_c=0.0,
        iota0_e=0.0,
        iota0_f=coll.jp + coll.jn,
        iota0_g=slow_longitudinal_rate(samples),
        iota1_a=first_common + s / 2.0 + i,
        iota1_b=first_common + s / 2.0,
        iota1_f=first_common + s + i / 2.0,
        iota1_g=first_common + i / 2.0,
        iota2_a=(s + i + 4.0 * p) / 2.0,
        kappa=kappa,
    )
