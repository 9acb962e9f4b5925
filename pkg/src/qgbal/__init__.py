"""Pseudo-spectral rotating stratified flow on a periodic box, with a
higher-order quasi-geostrophic balance hierarchy.

Library layout:

* ``grid``, ``field``, ``ops``, ``norms`` — spectral representation and calculus
* ``state`` — prognostic states and the potential-vorticity decomposition
* ``pesolver`` — full-equation time stepping (exact stiff propagator + IF-RK)
* ``balance`` — the slaving hierarchy with exact tangent propagation
* ``qgen`` — the truncated slow equation at any slaving level
* ``diagnostics`` — residuals, balance errors, spectrum fits
* ``experiment`` / ``cli`` — reproducible experiment harness
"""

from .balance import (
    BalanceHierarchy,
    BalanceSet,
    g_slow,
    iterate_balance,
    slaved_fields,
    tangent_balance,
    well_prepared_init,
)
from .diagnostics import (
    ErrorReport,
    GevreyFit,
    ResidualTriple,
    balance_error,
    gevrey_fit,
    mode_split,
    residual_direct,
    residual_from_levels,
)
from .field import EVEN, NONE, ODD, SpectralField
from .grid import Grid
from .norms import NormReport, gevrey_norm, l2_norm, sobolev_norm
from .pesolver import (
    Propagator,
    SolverBlowupError,
    Trajectory,
    TransformedState,
    integrate,
    rhs_primitive,
    rhs_qxf,
    step,
    to_primitive,
    to_transformed,
)
from .qgen import SlowTrajectory, integrate_qgen, qgen_rhs
from .schedule import Schedule, StepperConfig, default_dt, make_schedule
from .state import (
    ForcingSet,
    PrimitiveState,
    QGDecomposition,
    decompose,
    derive_forcings,
    geostrophic_state,
    reconstruct,
)

__version__ = "0.1.0"

__all__ = [
    "BalanceHierarchy",
    "BalanceSet",
    "ErrorReport",
    "EVEN",
    "ForcingSet",
    "GevreyFit",
    "Grid",
    "NONE",
    "NormReport",
    "ODD",
    "PrimitiveState",
    "Propagator",
    "QGDecomposition",
    "ResidualTriple",
    "Schedule",
    "SlowTrajectory",
    "SolverBlowupError",
    "SpectralField",
    "StepperConfig",
    "Trajectory",
    "TransformedState",
    "balance_error",
    "decompose",
    "default_dt",
    "derive_forcings",
    "g_slow",
    "geostrophic_state",
    "gevrey_fit",
    "gevrey_norm",
    "integrate",
    "integrate_qgen",
    "iterate_balance",
    "l2_norm",
    "make_schedule",
    "mode_split",
    "qgen_rhs",
    "reconstruct",
    "residual_direct",
    "residual_from_levels",
    "rhs_primitive",
    "rhs_qxf",
    "slaved_fields",
    "sobolev_norm",
    "step",
    "tangent_balance",
    "to_primitive",
    "to_transformed",
    "well_prepared_init",
]
