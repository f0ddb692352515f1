"""Out-of-time-order correlators for bound states of 1D diatomic potentials."""

__version__ = "0.1.0"

from .dvr import BoundStateBasis, RadialGrid, build_grid, kinetic_matrix, solve_bound_states
from .potentials import (
    HarmonicPotential,
    InvertedHarmonicPotential,
    LennardJonesPotential,
    TabulatedPotential,
    TurningPoint,
    curvature_inflection,
    dissociation_limit,
    evaluate_with_derivs,
    lj_c12_for_depth,
    load_tabulated,
    outer_turning_point,
    potential_minimum,
)
from .sensitivity import (
    ExponentialFit,
    GrowthWindow,
    SensitivityReport,
    classical_quadratic_trajectory,
    classical_sensitivity,
    detect_growth_window,
    fit_exponential,
    semiclassical_sensitivity,
)
from .spectral import (
    MatrixElements,
    OtocSeries,
    momentum_direct,
    momentum_from_position,
    otoc_series,
    otoc_truncation_error,
    position_matrix,
)

__all__ = [
    "__version__",
    "BoundStateBasis",
    "RadialGrid",
    "build_grid",
    "kinetic_matrix",
    "solve_bound_states",
    "HarmonicPotential",
    "InvertedHarmonicPotential",
    "LennardJonesPotential",
    "TabulatedPotential",
    "TurningPoint",
    "curvature_inflection",
    "dissociation_limit",
    "evaluate_with_derivs",
    "lj_c12_for_depth",
    "load_tabulated",
    "outer_turning_point",
    "potential_minimum",
    "ExponentialFit",
    "GrowthWindow",
    "SensitivityReport",
    "classical_quadratic_trajectory",
    "classical_sensitivity",
    "detect_growth_window",
    "fit_exponential",
    "semiclassical_sensitivity",
    "MatrixElements",
    "OtocSeries",
    "momentum_direct",
    "momentum_from_position",
    "otoc_series",
    "otoc_truncation_error",
    "position_matrix",
]
