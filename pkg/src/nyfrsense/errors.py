"""Exception types shared across the package."""


class NyfrError(Exception):
    """Base class for all package errors."""


class SpanError(NyfrError):
    """A frequency falls outside the covered acquisition span."""


class ShapeError(NyfrError):
    """Array lengths or operator shapes do not agree."""


class ConfigError(NyfrError):
    """A scenario or experiment configuration is invalid."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class CapacityError(NyfrError):
    """A dense materialization would exceed the configured memory cap."""


class MetricError(NyfrError):
    """A metric is undefined for the given inputs."""
