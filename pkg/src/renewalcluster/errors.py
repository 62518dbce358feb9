"""Exception types shared across the package."""


class RenewalClusterError(Exception):
    """Base class for all package-specific errors."""


class WindowError(RenewalClusterError):
    """Requested interval is not contained in the pattern's window."""


class LawError(RenewalClusterError, ValueError):
    """Invalid distribution parameters."""


class RunawayGenerationError(RenewalClusterError):
    """Arrival count exceeded the configured cap (mean interarrival ~ 0?)."""


class UnboundedLawError(RenewalClusterError):
    """Size-biased sampling requested for an unbounded law without a pool."""


class AccessorUnavailableError(RenewalClusterError):
    """Closed-form moment accessor is not available for this model."""


class NoPointAfterError(RenewalClusterError):
    """No process point found after t even with the extended window."""


class SupportRangeError(RenewalClusterError):
    """Step-function support exceeds the tabulated range."""


class QuadratureError(RenewalClusterError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


class ConfigError(RenewalClusterError):
    """Malformed or unknown experiment configuration."""
