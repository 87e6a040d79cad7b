"""Exception types raised by the simulation layers.

Everything derives from :class:`SimulationError` so callers can catch the
whole family at once; the CLI maps these onto exit codes.
"""


class SimulationError(Exception):
    """Base class for all domain errors raised by this package."""


class LeakageExceeded(SimulationError):
    """Truncation-boundary weight grew past the configured tolerance."""


class ZeroNorm(SimulationError):
    """A state collapsed to (numerical) zero, e.g. photon subtraction from vacuum."""


class CutoffCapExceeded(SimulationError):
    """No cutoff below the configured cap reaches the requested leakage tolerance."""


class InvalidTransmittance(SimulationError):
    """Transmittance outside [0, 1]."""


class DerivativeVanished(SimulationError):
    """Parity slope and noise vanished together; sensitivity is 0/0 at this phase."""


class ZeroInformation(SimulationError):
    """Quantum Fisher information is numerically zero; no QCRB exists."""


class NoPeak(SimulationError):
    """Signal curve has no resolvable peak above its baseline."""


class GridTooCoarse(SimulationError):
    """Phase-space or phase grid too coarse for the requested feature."""


class TargetUnreachable(SimulationError):
    """Requested mean photon number lies outside the reachable range."""


class DegenerateState(SimulationError):
    """Closed-form expression evaluated outside its domain of validity."""


class ConfigError(SimulationError):
    """Sweep configuration failed validation; message carries the field path."""


class IoError(SimulationError):
    """Result table could not be written to the requested destination."""
