"""Exception hierarchy shared by all radarlab stages."""


class RadarLabError(Exception):
    """Base class for every error raised by radarlab."""


class DomainError(RadarLabError, ValueError):
    """An argument is outside the domain an operation accepts."""


class DegenerateGeometryError(RadarLabError):
    """Circle fitting input has too few points or is collinear."""


class NonConvergenceError(RadarLabError):
    """An iterative solver gave up before reaching a usable answer."""


class UndefinedPhaseError(RadarLabError):
    """An I/Q sample is too close to the origin to carry a phase."""

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"undefined phase at sample {self.index} (I^2 + Q^2 < 1e-24)")


class ConfigError(RadarLabError):
    """A configuration file or field is malformed."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)


class StageError(RadarLabError):
    """Wraps a failure inside one pipeline stage, recording which stage it was."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
