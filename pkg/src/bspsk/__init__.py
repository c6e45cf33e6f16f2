"""Band-sweeping M-ary PSK: sweep synthesis, envelope channel estimation, fading and BER."""

__version__ = "0.1.0"

from . import channel, kernels, receiver, signal, spectrum, sweep
from .errors import (ApproximationDomainError, BspskError, ConfigError, DimensionError,
                     DomainError, EmptyReportError, FramingError, InsufficientDataError,
                     RangeError, StageError)
from .signal import FrequencyGrid, SampledSignal
from .sweep import ModulationParams, SweepParams

__all__ = [
    "__version__", "channel", "kernels", "receiver", "signal", "spectrum", "sweep",
    "ApproximationDomainError", "BspskError", "ConfigError", "DimensionError", "DomainError",
    "EmptyReportError", "FramingError", "InsufficientDataError", "RangeError", "StageError",
    "FrequencyGrid", "SampledSignal", "ModulationParams", "SweepParams",
]
