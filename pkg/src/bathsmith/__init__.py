"""Effective harmonic environments from structured spectral densities.

Construct coarse-grained (effective) phonon environments whose bath
correlation function reproduces a structured target over a finite time
horizon, and validate them with absorption-spectrum and chain-mapping
engines.
"""

from .bcf import (
    BathParameters,
    CorrelationFunction,
    FilteredSpectrum,
    bcf_distance,
    bcf_quadrature,
    count_peaks,
    ft_spectrum,
    gaussian_filter,
)
from .chainmap import (
    ChainCoefficients,
    DiscreteEnvironment,
    chain_for_model,
    chain_length_for_horizon,
    chain_to_star,
    discrete_bcf,
    recurrence_coefficients,
)
from .coarsegrain import EffectiveEnvironment, conventional_coarse_grain, fit_effective
from .dynamics import (
    AbsorptionSpectrum,
    DipoleCorrelation,
    Pseudomode,
    PseudomodeConfig,
    absorption_from_correlation,
    cumulant_lineshape,
    dimer_scan,
    disorder_ensemble,
    monomer_absorption,
    pseudomode_propagate,
    spectral_overlap,
)
from .estimator import HeomCostQuery, heom_count, heom_memory
from .model import (
    ARComponent,
    DeltaComponent,
    DisorderSpec,
    ElectronicSystem,
    LorentzianComponent,
    SpectralDensityModel,
    fmo_conventional_model,
    fmo_effective_model,
    fmo_electronic_system,
    fmo_phonon_model,
    huang_rhys_total,
    load_model,
    parse_model,
    reorganization_energy,
    thermalized_density,
)

__version__ = "0.1.0"
