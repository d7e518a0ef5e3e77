"""Exception hierarchy shared by all modules."""


class StationaryLightError(Exception):
    """Base class for every error raised by this package."""


class PhasematchingError(StationaryLightError, ValueError):
    """Wavevector mismatch is not positive, so no waveguiding is possible."""


class UndefinedCoefficientsError(StationaryLightError, ValueError):
    """Both control intensities vanish; alpha and eta are undefined."""


class NoConfinedModeError(StationaryLightError, ValueError):
    pass


class OracleDivergenceError(StationaryLightError, RuntimeError):
    """Radial eigen-oracle did not converge under grid refinement."""


class UndefinedMomentsError(StationaryLightError, ValueError):
    pass


class SolverError(StationaryLightError, RuntimeError):
    """Non-finite field values; carries a diagnostics snapshot."""

    def __init__(self, message, snapshot=None):
        super().__init__(message)
        self.snapshot = snapshot


class InfiniteTimeError(StationaryLightError, ValueError):
    """Zero group velocity: the drag never completes."""


class ConfigError(StationaryLightError, ValueError):
    """Configuration problem, tagged with ``section.key`` and an optional line."""

    def __init__(self, message, where=None, line=None):
        self.where = where
        self.line = line
        prefix = ""
        if where:
            prefix = f"[{where}] "
        if line is not None:
            prefix = f"line {line}: " + prefix
        super().__init__(prefix + message)
