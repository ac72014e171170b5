"""Exception types shared across the package."""


class BalancingError(Exception):
    """Base class for all crowbal errors."""


class DomainError(BalancingError):
    """A time or parameter query outside a model's validity window."""


class NotUnderdamped(BalancingError):
    """The damping network has real characteristic roots; the oscillatory
    closed forms do not apply (the numeric oracle still does)."""


class InfeasibleStatic(BalancingError):
    """Requested steady-state voltage is unreachable with any static resistor."""


class InfeasibleRR(BalancingError):
    """Recovery-charge capacitor sizing has no positive solution."""


class TargetUnreachable(BalancingError):
    """The overvoltage target cannot be met by any capacitance."""


class StepTooLarge(BalancingError):
    """Integrator step exceeds the resolution bound."""


class EmptyGrid(BalancingError):
    """A sweep grid axis is empty."""


class ConfigError(BalancingError):
    """Configuration file is malformed or violates the schema."""
