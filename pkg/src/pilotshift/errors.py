"""Exception types raised by pilotshift."""


class PilotShiftError(Exception):
    """Base class for all library errors."""


class ConfigurationError(PilotShiftError, ValueError):
    """Invalid sizes, offsets, powers or thresholds."""


class InputError(PilotShiftError, ValueError):
    """Malformed data handed to an operation (wrong length, bad indices, zero signal)."""


class InsufficientCandidatesError(PilotShiftError):
    """Fewer threshold survivors than pilots; the soft-gamma driver retries on this."""
