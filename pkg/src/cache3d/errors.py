"""Exception hierarchy shared by every cache3d module."""


class Cache3DError(Exception):
    """Base class for all package errors."""


class DomainError(Cache3DError, ValueError):
    """An input lies outside the domain of a closed-form model."""


class SaturationError(Cache3DError):
    """The NoC queue model was driven at or past its saturation rate."""

    def __init__(self, m_s, m_saturation):
        super().__init__(
            f"NoC saturated: shared access rate {m_s:.6g} >= saturation {m_saturation:.6g}"
        )
        self.m_s = m_s
        self.m_saturation = m_saturation


class FitError(Cache3DError, ValueError):
    """Power-law fitting could not be performed on the given samples."""


class NoViableConfiguration(Cache3DError):
    """No hierarchy depth admits a point satisfying every constraint."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(Cache3DError, ValueError):
    """A run configuration file is malformed or holds out-of-range values."""
