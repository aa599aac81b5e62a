"""Casimir energy, free energy, entropy and pressure between parallel plates.

A massless scalar field in N spatial dimensions between two hyperplanes a
distance d apart, with Dirichlet or Neumann conditions on each plate.
Three engines cross-check each other: the closed-form Bessel series
(:mod:`casimir.closed_form`), a damped mode sum (:mod:`casimir.mode_sum`)
and an image-path sum (:mod:`casimir.optical`).
"""

from .core import (
    BoundaryPair,
    CasimirReport,
    ClassicalScale,
    Engine,
    ErrorBounds,
    PlateConfig,
    SeriesControl,
    ThermalState,
    classical_limit_ratio,
    default_control,
    make_config,
)
from .closed_form import (
    Estimate,
    casimir_report,
    energy_finite_T,
    energy_zero_T,
    entropy,
    entropy_high_T,
    free_energy_finite_T,
    high_T_pressure_coefficient,
    pressure_finite_T,
    pressure_zero_T,
)
from .errors import (
    CasimirError,
    ConvergenceError,
    CutoffError,
    DegeneratePathError,
    DomainError,
    ExtrapolationError,
    KernelDecayError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPair",
    "CasimirReport",
    "ClassicalScale",
    "Engine",
    "ErrorBounds",
    "PlateConfig",
    "SeriesControl",
    "ThermalState",
    "classical_limit_ratio",
    "default_control",
    "make_config",
    "Estimate",
    "casimir_report",
    "energy_finite_T",
    "energy_zero_T",
    "entropy",
    "entropy_high_T",
    "free_energy_finite_T",
    "high_T_pressure_coefficient",
    "pressure_finite_T",
    "pressure_zero_T",
    "CasimirError",
    "ConvergenceError",
    "CutoffError",
    "DegeneratePathError",
    "DomainError",
    "ExtrapolationError",
    "KernelDecayError",
    "ValidationError",
]
