"""Exception types shared across the package."""


class ThermobeamError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(ThermobeamError, ValueError):
    """A caller-supplied argument violates a precondition."""


class CoefficientPositivityError(InvalidArgumentError):
    """A sampled coefficient is non-positive at some node."""

    def __init__(self, name: str, node: int, x: float, value: float):
        self.name, self.node, self.x, self.value = name, node, x, value
        super().__init__(
            f"coefficient {name!r} must be > 0 everywhere; "
            f"sampled {value:.6g} at node {node} (x = {x:.6g})"
        )


class DimensionMismatchError(ThermobeamError, ValueError):
    """States or operators built on different grids were combined."""


class StateCorruptionError(ThermobeamError):
    """A state vector contains NaN or Inf entries."""


class SingularSystemError(ThermobeamError):
    """A direct solve hit a zero pivot; signals an assembly bug."""


class InstabilityError(ThermobeamError):
    """Energy grew between records beyond the instability sentinel."""


class DegenerateFitError(ThermobeamError):
    """Decay fit impossible (zero energy in window); shrink the window."""


class InsufficientDataError(ThermobeamError):
    """Too few records inside the fit window."""


class CapacityError(ThermobeamError):
    """Problem size exceeds a method's supported range."""


class ConfigError(ThermobeamError):
    """Scenario configuration could not be parsed."""


class ConfigValidationError(ConfigError):
    """One or more configuration values are invalid; aggregates all of them."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__(
            "invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems)
        )
