"""Closed-form time evolution of the spin-pair density matrix.

Zero-order elements (populations and the zero-quantum coherence) evolve as a
sum of four decaying exponentials plus two conserved modes. First-order
coherences are bi-exponential, and the double-quantum coherence decays as a
single exponential.

The longitudinal pair mixes populations through coefficients built from four
quartic polynomials A, B, C, D in the spectral samples. These are evaluated
exactly (rational arithmetic with one symbolic square root); see ``_surd``.

All coherences are in the interaction picture. :func:`to_lab_frame` restores
the Zeeman phases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import oracle
from ._surd import Surd
from .physsys import EigenFrequencies
from .spectral import SpectralSamples
from .superop import build_first_order, build_second_order, build_zero_order, closed_form_rates

DEGENERACY_EPS = 1e-9
_STATE_TOL = 1e-12


class DegenerateSpectrum(ArithmeticError):
    """The A/B/C/D closed forms divide by AD - BC = 0 for these samples."""


# ------------------------------------------------------------------ states

@dataclass(frozen=True, eq=False)
class DensityState:
    """4x4 density matrix in the basis |uu>, |ud>, |du>, |dd> (spin I first)."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix has non-finite entries")
        if np.max(np.abs(rho - rho.conj().T)) > _STATE_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > _STATE_TOL:
            raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_diagonal(cls, diag) -> "DensityState":
        return cls(np.diag(np.asarray(diag, dtype=complex)))

    @property
    def populations(self) -> np.ndarray:
        return np.diagonal(self.rho).real.copy()

    def is_physical(self, tol: float = 1e-12) -> bool:
        diag = self.populations
        if np.any(diag < -tol) or np.any(diag > 1 + tol):
            return False
        return bool(np.min(np.linalg.eigvalsh(self.rho)) >= -tol)

    def zero_order_vector(self, equilibrium: "DensityState") -> np.ndarray:
        """(d11, d22, r23, r32, d33, d44) relative to ``equilibrium``."""
        r, e = self.rho, equilibrium.rho
        return np.array(
            [r[0, 0] - e[0, 0], r[1, 1] - e[1, 1], r[1, 2], r[2, 1], r[2, 2] - e[2, 2], r[3, 3] - e[3, 3]]
        )

    def first_order_vector(self) -> np.ndarray:
        r = self.rho
        return np.array([r[0, 1], r[0, 2], r[1, 3], r[2, 3]])


# ------------------------------------------------------------ A, B, C, D

@dataclass(frozen=True)
class _ExactAbcd:
    """A, C rational; B = bq sqrt(R), D = dq sqrt(R). Values are scaled by 2^(-4 e)."""

    a: Fraction
    bq: Fraction
    c: Fraction
    dq: Fraction
    radicand: Fraction
    exponent: int

    def surds(self) -> tuple[Surd, Surd, Surd, Surd]:
        r = self.radicand
        return Surd(self.a, 0, r), Surd(0, self.bq, r), Surd(self.c, 0, r), Surd(0, self.dq, r)

    @property
    def reduced_det(self) -> Fraction:
        """(AD - BC) / sqrt(R)."""
        return self.a * self.dq - self.bq * self.c


@lru_cache(maxsize=4096)
def _exact_abcd(s_f: float, i_f: float, p_f: float, m_f: float) -> _ExactAbcd:
    big = max(s_f, i_f, p_f, m_f)
    exponent = math.frexp(big)[1] if big > 0 else 0
    s, i, p, m = (Fraction(math.ldexp(x, -exponent)) for x in (s_f, i_f, p_f, m_f))
    diff = 6 * p - m
    summ = 6 * p + m
    radicand = (s - i) ** 2 + Fraction(4, 9) * diff**2
    a = (s - i) * (27 * (s + i) ** 3 + summ * (12 * s * i - 16 * diff**2 + 96 * (s * i - p * m)))
    bq = 3 * (s - i) * (9 * (s + i) ** 2 + 18 * s * i - 8 * summ**2 + 48 * p * m)
    c = (
        27 * (s + i) * (s**3 + i**3)
        + 18 * (s + i) ** 3 * diff
        - 288 * (s**2 + i**2) * p * m
        + 108 * s**2 * i**2
        - 12 * (s - i) ** 2 * m**2
        + 9 * (32 * p * summ + 24 * (s * i - 16 * p**2) - 3 * (s - i) ** 2) * (16 * p**2 - s * i)
    )
    dq = 27 * (s + i) ** 3 + 18 * ((s + i) ** 2 + 4 * s * i) * diff + 144 * (s * i * m - 48 * p**3 + 3 * s * i * p)
    return _ExactAbcd(a, bq, c, dq, radicand, exponent)


def _exact(samples: SpectralSamples) -> _ExactAbcd:
    return _exact_abcd(samples.jS, samples.jI, samples.jPlus, samples.jMinus)


def _is_degenerate(ex: _ExactAbcd) -> bool:
    if ex.radicand == 0:
        return True
    k = ex.reduced_det
    if k == 0:
        return True
    scale = max(abs(ex.a * ex.dq), abs(ex.bq * ex.c))
    return abs(k) < DEGENERACY_EPS * scale


@dataclass(frozen=True)
class AbcdParameters:
    """The four quartic parameters (s^4), AD - BC (s^8), and a degeneracy flag.

    ``degenerate`` is True when AD - BC vanishes relative to its two terms,
    which happens exactly when jS = jI or when both longitudinal rates
    coincide. The analytic coefficients are then undefined.
    """

    a: float
    b: float
    c: float
    d: float
    det_scale: float
    degenerate: bool
    _exact: _ExactAbcd = field(repr=False, compare=False)


def abcd(samples: SpectralSamples) -> AbcdParameters:
    ex = _exact(samples)
    root = math.sqrt(ex.radicand)
    e4 = 4 * ex.exponent
    return AbcdParameters(
        a=math.ldexp(float(ex.a), e4),
        b=math.ldexp(float(ex.bq) * root, e4),
        c=math.ldexp(float(ex.c), e4),
        d=math.ldexp(float(ex.dq) * root, e4),
        det_scale=math.ldexp(float(ex.reduced_det) * root, 2 * e4),
        degenerate=_is_degenerate(ex),
        _exact=ex,
    )


# -------------------------------------------------------------- h values

@dataclass(frozen=True)
class HCoefficients:
    h1: float
    h2: float
    h3: float


def h_coefficients(samples: SpectralSamples) -> HCoefficients:
    """Amplitudes of the hyperbolic terms in the longitudinal experiments.

    Raises DegenerateSpectrum where the closed forms are 0/0; use
    :func:`h_coefficients_numeric` there.
    """
    ex = _exact(samples)
    if _is_degenerate(ex):
        raise DegenerateSpectrum("AD - BC vanishes; h coefficients need the numeric route")
    a, b, c, d = ex.surds()
    den = 4 * (a * d - b * c)
    h1 = ((a - c) * (a - c) - (b - d) * (b - d)) / den
    h2 = (a * a - b * b - c * c + d * d) / den
    h3 = ((a + c) * (a + c) - (b + d) * (b + d)) / den
    return HCoefficients(float(h1), float(h2), float(h3))


# Observables and initial directions in zero-order vector space
_C_IZ = np.array([1, 1, 0, 0, -1, -1]) / 2.0
_C_SZ = np.array([1, -1, 0, 0, 1, -1]) / 2.0
_S_DIR = np.array([-1, 1, 0, 0, -1, 1]) / 2.0
_I_DIR = np.array([-1, -1, 0, 0, 1, 1], dtype=float)


# Orthonormal basis of the sector odd under d11<->d44, d22<->d33. It is
# invariant under the zero-order generator and holds exactly the two
# longitudinal modes, so they can be split without interference from the
# other modes (the zero-quantum rate equals the slow rate in extreme narrowing).
_ODD_SECTOR = np.array(
    [[1, 0, 0, 0, 0, -1], [0, 1, 0, 0, -1, 0]], dtype=float
).T / math.sqrt(2.0)


def h_coefficients_numeric(samples: SpectralSamples, backend: str | None = None) -> HCoefficients:
    """h values from numeric eigenprojectors of the zero-order generator.

    Raises DegenerateSpectrum when the two longitudinal rates coincide.
    """
    gen = build_zero_order(samples)
    block = _ODD_SECTOR.T @ gen @ _ODD_SECTOR
    block = 0.5 * (block + block.T)
    w, v = oracle.eig_symmetric(block, backend=backend)
    if w[0] == w[1]:
        raise DegenerateSpectrum("the two longitudinal rates coincide")
    # ascending eigenvalues: index 0 is the fast mode (-iota_f)
    p_f = _ODD_SECTOR @ np.outer(v[:, 0], v[:, 0]) @ _ODD_SECTOR.T
    p_g = _ODD_SECTOR @ np.outer(v[:, 1], v[:, 1]) @ _ODD_SECTOR.T
    h1 = 0.5 * (_C_IZ @ p_f @ _S_DIR - _C_IZ @ p_g @ _S_DIR)
    h2 = 0.5 * (_C_SZ @ p_g @ _S_DIR - _C_SZ @ p_f @ _S_DIR)
    h3 = 0.25 * (_C_SZ @ p_g @ _I_DIR - _C_SZ @ p_f @ _I_DIR)
    return HCoefficients(float(h1), float(h2), float(h3))


def h_coefficients_any(samples: SpectralSamples) -> HCoefficients:
    """Closed forms when defined, numeric projectors otherwise."""
    try:
        return h_coefficients(samples)
    except DegenerateSpectrum:
        return h_coefficients_numeric(samples)


# ---------------------------------------------------- zero-order solution

@dataclass(frozen=True)
class ZeroOrderCoefficients:
    """Mode amplitudes: A zero-quantum, B symmetric, C/E conserved, F/G/H/J longitudinal."""

    rhoA: complex
    rhoB: complex
    rhoC: complex
    rhoE: complex
    rhoF: complex
    rhoG: complex
    rhoH: complex
    rhoJ: complex


@lru_cache(maxsize=4096)
def _longitudinal_weights(s_f, i_f, p_f, m_f) -> np.ndarray:
    """Rows give rhoF, rhoG, rhoH, rhoJ as linear forms in (d11, d22, d33, d44)."""
    ex = _exact_abcd(s_f, i_f, p_f, m_f)
    a, b, c, d = ex.surds()
    den = 4 * (a * d - b * c)
    x_form = [-(a - b), -(c - d), c - d, a - b]
    y_form = [a + b, c + d, -(c + d), -(a + b)]
    rows = [
        [(a + b) * k / den for k in x_form],
        [(a - b) * k / den for k in y_form],
        [(c + d) * k / den for k in x_form],
        [(c - d) * k / den for k in y_form],
    ]
    return np.array([[float(v) for v in row] for row in rows])


def zero_order_coefficients(vector0, samples: SpectralSamples) -> ZeroOrderCoefficients:
    """Coefficients for the deviation vector (d11, d22, r23, r32, d33, d44)."""
    ex = _exact(samples)
    if _is_degenerate(ex):
        raise DegenerateSpectrum("AD - BC vanishes; use the numeric propagator")
    d11, d22, r23, r32, d33, d44 = (complex(v) for v in vector0)
    w = _longitudinal_weights(samples.jS, samples.jI, samples.jPlus, samples.jMinus)
    f, g, h, j = w @ np.array([d11, d22, d33, d44])
    return ZeroOrderCoefficients(
        rhoA=(r32 - r23) / 2,
        rhoB=(d11 - d22 - r23 - r32 - d33 + d44) / 6,
        rhoC=(d11 + 2 * d22 - r23 - r32 + 2 * d33 + d44) / 6,
        rhoE=(2 * d11 + d22 + r23 + r32 + d33 + 2 * d44) / 6,
        rhoF=complex(f),
        rhoG=complex(g),
        rhoH=complex(h),
        rhoJ=complex(j),
    )


def _elapsed(dt) -> np.ndarray:
    dt = np.asarray(dt, dtype=float)
    if not np.all(np.isfinite(dt)):
        raise ValueError("elapsed time must be finite")
    if np.any(dt < 0):
        raise ValueError("t must be >= t0; backward evolution is not supported")
    return dt


def _zero_order_deviation(vector0, samples, kappa, dt) -> np.ndarray:
    dt = _elapsed(dt)
    vector0 = np.asarray(vector0, dtype=complex)
    if _is_degenerate(_exact(samples)):
        gen = kappa * build_zero_order(samples)
        flat = dt.reshape(-1)
        out = np.array([oracle.expm(gen, t) @ vector0 for t in flat])
        return out.reshape(dt.shape + (6,))
    co = zero_order_coefficients(vector0, samples)
    rs = closed_form_rates(samples, kappa)
    ea = np.exp(-rs.rate("0_a") * dt)
    eb = np.exp(-rs.rate("0_b") * dt)
    ef = np.exp(-rs.rate("0_f") * dt)
    eg = np.exp(-rs.rate("0_g") * dt)
    cols = [
        eb * co.rhoB + co.rhoE - ef * co.rhoH - eg * co.rhoJ,
        -eb * co.rhoB + co.rhoC + ef * co.rhoF + eg * co.rhoG,
        -ea * co.rhoA - eb * co.rhoB - co.rhoC + co.rhoE,
        ea * co.rhoA - eb * co.rhoB - co.rhoC + co.rhoE,
        -eb * co.rhoB + co.rhoC - ef * co.rhoF - eg * co.rhoG,
        eb * co.rhoB + co.rhoE + ef * co.rhoH + eg * co.rhoJ,
    ]
    return np.stack([np.broadcast_to(c, dt.shape) for c in cols], axis=-1).astype(complex)


def evolve_zero_order(state0: DensityState, equilibrium: DensityState, samples: SpectralSamples,
                      kappa: float, dt) -> np.ndarray:
    """Zero-order block after elapsed time ``dt`` (scalar or array, s).

    Returns (..., 6) complex: absolute populations rho11, rho22, rho33, rho44
    at indices 0, 1, 4, 5 and interaction-picture r23, r32 at 2, 3.
    """
    dev = _zero_order_deviation(state0.zero_order_vector(equilibrium), samples, kappa, dt)
    e = np.diagonal(equilibrium.rho)
    dev[..., 0] += e[0]
    dev[..., 1] += e[1]
    dev[..., 4] += e[2]
    dev[..., 5] += e[3]
    return dev


# ---------------------------------------------------- first/second order

@dataclass(frozen=True)
class FirstOrderCoefficients:
    rhoK: complex
    rhoL: complex
    rhoM: complex
    rhoN: complex


def first_order_coefficients(vector0) -> FirstOrderCoefficients:
    r12, r13, r24, r34 = (complex(v) for v in vector0)
    return FirstOrderCoefficients(
        rhoK=(r12 + r34) / 2,
        rhoL=(r13 + r24) / 2,
        rhoM=(r34 - r12) / 2,
        rhoN=(r24 - r13) / 2,
    )


def evolve_first_order(state0: DensityState, samples: SpectralSamples, kappa: float, dt) -> np.ndarray:
    """Single-quantum coherences (r12, r13, r24, r34) after ``dt``, shape (..., 4)."""
    dt = _elapsed(dt)
    co = first_order_coefficients(state0.first_order_vector())
    rs = closed_form_rates(samples, kappa)
    ea = np.exp(-rs.rate("1_a") * dt)
    eb = np.exp(-rs.rate("1_b") * dt)
    ef = np.exp(-rs.rate("1_f") * dt)
    eg = np.exp(-rs.rate("1_g") * dt)
    cols = [
        ea * co.rhoK - eb * co.rhoM,
        ef * co.rhoL - eg * co.rhoN,
        ef * co.rhoL + eg * co.rhoN,
        ea * co.rhoK + eb * co.rhoM,
    ]
    return np.stack(cols, axis=-1).astype(complex)


def evolve_second_order(rho14_0: complex, samples: SpectralSamples, kappa: float, dt):
    dt = _elapsed(dt)
    rate = -kappa * build_second_order(samples)
    out = np.exp(-rate * dt) * complex(rho14_0)
    return complex(out) if out.ndim == 0 else out


def evolve(state0: DensityState, equilibrium: DensityState, samples: SpectralSamples,
           kappa: float, dt: float) -> DensityState:
    """Full interaction-picture state after a scalar elapsed time."""
    z = evolve_zero_order(state0, equilibrium, samples, kappa, dt)
    f = evolve_first_order(state0, samples, kappa, dt)
    q = evolve_second_order(state0.rho[0, 3], samples, kappa, dt)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3] = z[0].real, z[1].real, z[4].real, z[5].real
    rho[1, 2], rho[2, 1] = z[2], z[3]
    rho[0, 1], rho[0, 2], rho[1, 3], rho[2, 3] = f
    rho[0, 3] = q
    lower = np.tril_indices(4, -1)
    rho[lower] = rho.T.conj()[lower]
    return DensityState(rho)


def evolve_numeric(state0: DensityState, equilibrium: DensityState, samples: SpectralSamples,
                   kappa: float, dt: float, backend: str | None = None) -> DensityState:
    """Reference evolution by matrix exponentials of the three generators."""
    dt = float(_elapsed(dt))
    z = oracle.expm(kappa * build_zero_order(samples), dt, backend=backend) @ state0.zero_order_vector(equilibrium)
    f = oracle.expm(kappa * build_first_order(samples), dt, backend=backend) @ state0.first_order_vector()
    q = math.exp(kappa * build_second_order(samples) * dt) * state0.rho[0, 3]
    e = np.diagonal(equilibrium.rho)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3] = (z[0] + e[0]).real, (z[1] + e[1]).real, (z[4] + e[2]).real, (z[5] + e[3]).real
    rho[1, 2], rho[2, 1] = z[2], z[3]
    rho[0, 1], rho[0, 2], rho[1, 3], rho[2, 3] = f
    rho[0, 3] = q
    lower = np.tril_indices(4, -1)
    rho[lower] = rho.T.conj()[lower]
    return DensityState(rho)


def to_lab_frame(rho_tilde, freqs: EigenFrequencies, dt: float) -> np.ndarray:
    """Restore Zeeman phases: rho_jk = rho~_jk exp(-i (w_j - w_k) dt).

    For the zero-quantum element this is r23 * exp(-i (w_S - w_I) dt).
    """
    rho_tilde = rho_tilde.rho if isinstance(rho_tilde, DensityState) else np.asarray(rho_tilde)
    w = np.array(freqs.levels)
    phase = np.exp(-1j * (w[:, None] - w[None, :]) * dt)
    return rho_tilde * phase
