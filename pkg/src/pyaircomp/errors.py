"""
Exceptions raised by PyAirComp.
"""


class AirCompError(Exception):
    """Base exception for PyAirComp errors."""
    pass


class ConfigError(AirCompError):
    """Raised when a configuration file, override or name cannot be resolved."""
    pass


class SingularChannelError(AirCompError):
    """Raised when a channel gain is too small to be inverted."""
    pass


class EstimationError(AirCompError):
    """Raised when a function cannot be estimated from a type or measured against its truth."""
    pass


class TrainingError(AirCompError):
    """Raised when local training diverges."""
    pass
