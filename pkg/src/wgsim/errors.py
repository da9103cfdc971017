"""Exception types raised across the simulator."""


class WgsimError(Exception):
    """Base class for all simulator errors."""


class DomainError(WgsimError, ValueError):
    """A physical parameter lies outside its allowed range."""


class PhotonNumberError(WgsimError, ValueError):
    """A transition was requested between states of different photon number."""


class ResourceLimitError(WgsimError, RuntimeError):
    """The requested Fock basis is too large to enumerate."""


class UnitarityError(WgsimError, ValueError):
    """A mode matrix failed the unitarity check."""


class UndefinedVisibilityError(WgsimError, ValueError):
    """Visibility requested where the two-photon dip is degenerate."""


class InconsistentDataError(WgsimError, ValueError):
    """Count rates cannot come from any physical two-photon state."""


class ParseError(WgsimError, ValueError):
    """Malformed netlist text. Carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.reason = message
