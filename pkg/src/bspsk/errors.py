"""Exception types raised across the package."""


class BspskError(Exception):
    """Base class for all library errors."""


class ConfigError(BspskError, ValueError):
    """Parameters violate an invariant (sampling rule, grid alignment, ...)."""


class DimensionError(BspskError, ValueError):
    """Signals that must share a time base do not."""


class FramingError(BspskError, ValueError):
    """Bit/sample counts do not divide into whole symbols or sweeps."""


class RangeError(BspskError, ValueError):
    """A requested frequency lies outside the representable band."""


class DomainError(BspskError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ApproximationDomainError(DomainError):
    """Narrowband-FM approximation requested outside its validity range."""


class InsufficientDataError(BspskError, ValueError):
    """Not enough samples or valid points to run an operation."""


class EmptyReportError(BspskError, ValueError):
    """A run was requested that would produce no trials."""


class StageError(BspskError, RuntimeError):
    """Wraps a failure inside the simulation pipeline with the stage name."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
