"""Synthetic Solomon datasets and spectral-density fits to transient enhancement data.

The forward model is the saturation-experiment response of spin I,

    y(t) = -h1 * (exp(-kappa iota_g t) - exp(-kappa iota_f t)),

with every quantity computed from the spectral-density parameters. Fits are
multi-start in log10 parameter space followed by a bounded trust-region
least-squares refinement.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .experiment import ExperimentKind, longitudinal_curves
from .physsys import CODATA, PhysicalConstants, SpinPairSystem, dipolar_constant, larmor_frequencies
from .propagator import DegenerateSpectrum
from .spectral import Isotropic, ModelFree, SpectralDensityModel, sample_at_transitions

MIN_POINTS = 4
FTOL = 1e-10
XTOL = 1e-8
MAX_NFEV = 500
GRAD_RTOL = 1e-6

ISOTROPIC_STARTS = np.logspace(-14, -8, 13)
MF_S2_STARTS = np.logspace(-5, 0, 5)
MF_TAU_M_STARTS = np.logspace(-10, -7, 5)
MF_TAU_E_STARTS = np.logspace(-13, -11, 5)

# log10 search box
_ISO_BOUNDS = ([-16.0], [-4.0])
_MF_BOUNDS = ([-12.0, -14.0, -16.0], [0.0, -4.0, -6.0])


class InvalidTimes(ValueError):
    pass


class TooFewPoints(ValueError):
    pass


class AllStartsFailed(RuntimeError):
    pass


class ModelFamily(enum.Enum):
    ISOTROPIC = "isotropic"
    MODEL_FREE = "model-free"

    @classmethod
    def parse(cls, text: str) -> "ModelFamily":
        key = text.strip().lower().replace("_", "-")
        for fam in cls:
            if fam.value == key:
                return fam
        raise ValueError(f"unknown model family {text!r} (expected isotropic or model-free)")


@dataclass(frozen=True, eq=False)
class DataSet:
    times: np.ndarray
    upsilon: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        y = np.asarray(self.upsilon, dtype=float)
        if t.ndim != 1 or y.shape != t.shape:
            raise InvalidTimes("times and values must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
            raise InvalidTimes("dataset contains non-finite values")
        if t.size and t[0] < 0:
            raise InvalidTimes("times must be >= 0")
        if np.any(np.diff(t) <= 0):
            raise InvalidTimes("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "upsilon", y)

    def __len__(self):
        return self.times.size


def generate_solomon_dataset(T1: float, D1: float, amplitude: float = 0.5, times=None,
                             noise: float = 0.0, seed: int | None = None, label: str = "") -> DataSet:
    """y(t) = amplitude * (exp(-t/D1) - exp(-t/T1)), optionally with Gaussian noise.

    T1 and D1 are the inverse fast and slow longitudinal rates. The default
    grid is 50 points on [0, 10] s.
    """
    if not (0 < T1 < D1):
        raise InvalidTimes(f"need 0 < T1 < D1, got T1={T1!r}, D1={D1!r}")
    t = np.linspace(0.0, 10.0, 50) if times is None else np.asarray(times, dtype=float)
    y = amplitude * (np.exp(-t / D1) - np.exp(-t / T1))
    if noise:
        y = y + np.random.default_rng(seed).normal(0.0, noise, size=t.shape)
    return DataSet(t, y, label or f"solomon T1={T1:g} D1={D1:g}")


@dataclass(frozen=True)
class FitResult:
    model: SpectralDensityModel
    sse: float
    iterations: int
    converged: bool
    family: str
    parameters: dict[str, float]
    gradient_norm: float
    kappa: float
    starts: list[dict] = field(default_factory=list, repr=False)


# ------------------------------------------------------------------ forward

def _model_from(family: ModelFamily, log_params, prefactor: float) -> SpectralDensityModel:
    p = 10.0 ** np.asarray(log_params, dtype=float)
    if family is ModelFamily.ISOTROPIC:
        return Isotropic(float(p[0]))
    return ModelFree(min(float(p[0]), 1.0), float(p[1]), float(p[2]), prefactor=prefactor)


def forward_model(model: SpectralDensityModel, system: SpinPairSystem, times, kappa: float,
                  ) -> np.ndarray:
    """Transient enhancement of spin I after saturating spin S."""
    freqs = larmor_frequencies(system)
    samples = sample_at_transitions(model, freqs)
    traj = longitudinal_curves(ExperimentKind.SATURATION_S, samples, kappa, freqs.omega_I, freqs.omega_S, times)
    return traj.upsilon_I


def _start_grid(family: ModelFamily, prefactor: float, iso_hint: float | None) -> list[np.ndarray]:
    if family is ModelFamily.ISOTROPIC:
        return [np.log10([tc]) for tc in ISOTROPIC_STARTS]
    starts = [
        np.log10([s2, tm, te])
        for s2 in MF_S2_STARTS
        for tm in MF_TAU_M_STARTS
        for te in MF_TAU_E_STARTS
    ]
    if iso_hint is not None and prefactor == 2.0:
        # order parameter 1 reproduces the isotropic optimum exactly
        starts.insert(0, np.log10([1.0, iso_hint, min(iso_hint, 1e-11)]))
    return starts


def fit_relaxation_model(data: DataSet, system: SpinPairSystem, consts: PhysicalConstants = CODATA,
                         family: ModelFamily | str = ModelFamily.ISOTROPIC, kappa: float | None = None,
                         prefactor: float = 2.0) -> FitResult:
    """Least-squares fit of a spectral-density model to an enhancement curve.

    For the model-free family the isotropic optimum is fitted first and used
    as an extra start, so the model-free SSE never exceeds the isotropic one.
    """
    family = ModelFamily.parse(family) if isinstance(family, str) else family
    if len(data) < MIN_POINTS:
        raise TooFewPoints(f"need at least {MIN_POINTS} points, got {len(data)}")
    k = dipolar_constant(system, consts) if kappa is None else float(kappa)
    t, y = data.times, data.upsilon

    iso_hint = None
    if family is ModelFamily.MODEL_FREE and prefactor == 2.0:
        iso_hint = fit_relaxation_model(data, system, consts, ModelFamily.ISOTROPIC, kappa=k).parameters["tau_c"]

    def residual(x):
        return forward_model(_model_from(family, x, prefactor), system, t, k) - y

    lb, ub = _ISO_BOUNDS if family is ModelFamily.ISOTROPIC else _MF_BOUNDS
    best = None
    log = []
    total_nfev = 0
    for x0 in _start_grid(family, prefactor, iso_hint):
        x0 = np.clip(x0, lb, ub)
        try:
            with np.errstate(over="raise", invalid="raise"):
                res = least_squares(residual, x0, bounds=(lb, ub), method="trf",
                                    ftol=FTOL, xtol=XTOL, max_nfev=MAX_NFEV)
        except (FloatingPointError, ValueError, DegenerateSpectrum, OverflowError) as exc:
            log.append({"start": (10.0 ** x0).tolist(), "error": str(exc)})
            continue
        sse = float(res.fun @ res.fun)
        total_nfev += res.nfev
        log.append({"start": (10.0 ** x0).tolist(), "end": (10.0 ** res.x).tolist(), "sse": sse,
                    "status": int(res.status)})
        if np.isfinite(sse) and (best is None or sse < best[1]):
            best = (res, sse)
    if best is None:
        raise AllStartsFailed("no start produced a finite fit")

    res, sse = best
    grad = res.jac.T @ res.fun
    # projected gradient: components pushing against an active bound do not count
    at_lower = np.isclose(res.x, lb) & (grad > 0)
    at_upper = np.isclose(res.x, ub) & (grad < 0)
    grad = np.where(at_lower | at_upper, 0.0, grad)
    gnorm = float(np.linalg.norm(grad))
    scale = max(float(y @ y), np.finfo(float).tiny)
    converged = bool(res.status > 0 and gnorm <= GRAD_RTOL * scale)

    model = _model_from(family, res.x, prefactor)
    if family is ModelFamily.ISOTROPIC:
        params = {"tau_c": model.tau_c}
    else:
        params = {"order_param_sq": model.order_param_sq, "tau_m": model.tau_m, "tau_e": model.tau_e}
    return FitResult(model=model, sse=sse, iterations=total_nfev, converged=converged, family=family.value,
                     parameters=params, gradient_norm=gnorm, kappa=k, starts=log)
