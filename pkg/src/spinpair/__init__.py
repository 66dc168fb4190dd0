"""Analytic Redfield relaxation of a dipole-coupled unlike spin-1/2 pair."""
from .experiment import (
    ExperimentKind,
    PeakTime,
    Trajectory,
    enhancement_peak_time,
    equilibrium_state,
    expectation_values,
    longitudinal_trajectory,
    longitudinal_trajectory_propagated,
    prepare_initial_state,
    transverse_trajectory,
)
from .fitting import DataSet, FitResult, ModelFamily, fit_relaxation_model, generate_solomon_dataset
from .physsys import CODATA, PhysicalConstants, SpinPairSystem, dipolar_constant, larmor_frequencies
from .propagator import (
    DegenerateSpectrum,
    DensityState,
    abcd,
    evolve,
    evolve_first_order,
    evolve_second_order,
    evolve_zero_order,
    h_coefficients,
    h_coefficients_numeric,
)
from .spectral import Isotropic, ModelFree, SpectralSamples, collective_rates, evaluate, sample_at_transitions
from .superop import RateSet, build_first_order, build_second_order, build_zero_order, closed_form_rates

__version__ = "0.1.0"
