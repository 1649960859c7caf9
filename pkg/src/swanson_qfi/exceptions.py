"""Exception types raised across the package."""


class SwansonQfiError(ValueError):
    """Base class for all domain errors raised by this package."""


class StateError(SwansonQfiError):
    """A Gaussian state is non-finite, degenerate or unphysical."""


class DomainError(SwansonQfiError):
    """A parameter lies outside the domain where an operation is defined."""


class PhaseError(DomainError):
    """The Swanson oscillator is at or beyond its exceptional point."""


class SingularityError(SwansonQfiError):
    """A formula hits a genuine singularity (vanishing denominator)."""


class DysonMapError(SwansonQfiError):
    """The Dyson map cannot be represented at the requested truncation."""
