"""Dicke superradiance cascade with skew-information diagnostics."""

from ._stepper import BACKEND, IntegrationError
from .cascade import (
    DickeDistribution,
    RateGenerator,
    SystemParams,
    Trajectory,
    analytic_two_level,
    auto_t_end,
    build_generator,
    evolve,
    initial_all_excited,
)
from .observables import PowerBreakdown, jz_moments, power_breakdown
from .qinfo import (
    DetectionError,
    ExtremaReport,
    SuddenChangeError,
    SuddenChangeReport,
    SymmetricOperator,
    WMatrix,
    build_jx,
    build_jy,
    build_jz,
    detect_double_sudden_change,
    local_sigma_matrix_elements,
    locate_extrema,
    lqu,
    w_matrix,
    wysi_local_pauli,
    wysi_sigma_z_local,
    wysi_symmetric,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DetectionError",
    "DickeDistribution",
    "ExtremaReport",
    "IntegrationError",
    "PowerBreakdown",
    "RateGenerator",
    "SuddenChangeError",
    "SuddenChangeReport",
    "SymmetricOperator",
    "SystemParams",
    "Trajectory",
    "WMatrix",
    "analytic_two_level",
    "auto_t_end",
    "build_generator",
    "build_jx",
    "build_jy",
    "build_jz",
    "detect_double_sudden_change",
    "evolve",
    "initial_all_excited",
    "jz_moments",
    "local_sigma_matrix_elements",
    "locate_extrema",
    "lqu",
    "power_breakdown",
    "w_matrix",
    "wysi_local_pauli",
    "wysi_sigma_z_local",
    "wysi_symmetric",
    "__version__",
]
