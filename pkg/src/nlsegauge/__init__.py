"""Weakly local nonlinear gauge transformations of a sixth-order family of
nonlinear Schroedinger equations: coefficient algebra, field-space maps,
spectral evolution and numerical verification."""

from .coeffs import (
    COEFFICIENT_NAMES,
    INVARIANT_NAMES,
    ClassificationReport,
    CoefficientVector,
    GaugeParams,
    InvariantVector,
    classify,
    compose,
    identity_gauge,
    invariants,
    inverse,
    linearizing_gauge,
    schrodinger,
    time_reverse,
    transform,
)
from .errors import (
    DensityFloorError,
    EvolutionAborted,
    GaugeError,
    InstabilityError,
    InvalidGaugeError,
    NotLinearizable,
    PreconditionError,
    StabilityGuardError,
    TorusIncompatibleVelocity,
    WindingObstructionError,
)
from .fields import Grid, WaveField, functionals, laplacian_identity_residual
from .gauge import ExtendedGaugeParams, apply, phase_functional, separation_check
from .evolution import EvolutionConfig, Trajectory, evolve
from .oracle import transformation_law_residual

__version__ = "0.1.0"
