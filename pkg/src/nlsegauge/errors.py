"""Exception hierarchy shared by all modules."""


class GaugeError(Exception):
    """Base class for every error raised by nlsegauge."""


class PreconditionError(GaugeError, ValueError):
    """An input violates a documented precondition (e.g. nu1 == 0)."""


class InvalidGaugeError(PreconditionError):
    """Gauge parameters with lambda_cap == 0."""


class NotLinearizable(GaugeError):
    """The equation is not on the gauge orbit of the free Schroedinger equation."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DensityFloorError(GaugeError):
    """The density drops to or below the regularization floor somewhere on the grid."""

    def __init__(self, min_density, floor):
        super().__init__(
            f"density minimum {min_density:.3e} is not above the floor {floor:.3e}; "
            "phase and 1/rho functionals are undefined there"
        )
        self.min_density = min_density
        self.floor = floor


class WindingObstructionError(GaugeError):
    """Lambda times the phase winding is not an integer, so psi' would not be periodic."""


class StabilityGuardError(GaugeError):
    """The requested time step exceeds the explicit-integrator guard."""


class TorusIncompatibleVelocity(GaugeError):
    """A Galilean boost whose phase factor is not periodic on the grid."""


class EvolutionAborted(GaugeError):
    """A run stopped early; the partial trajectory is attached."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class InstabilityError(EvolutionAborted):
    """max|psi| grew past the blow-up threshold."""
