"""Exception hierarchy shared by all modules."""


class HetNetError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HetNetError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(HetNetError, ValueError):
    """Invalid or unknown configuration value."""


class PreconditionError(HetNetError, ValueError):
    """Required input data is missing or inconsistent."""


class InfeasibleError(HetNetError):
    """The switching problem has no feasible decision."""


class InstanceTooLargeError(HetNetError):
    """Exhaustive enumeration refused for an oversized instance."""


class OutputError(HetNetError, OSError):
    """Result file could not be written or read."""


class SweepError(HetNetError):
    """A sweep cell failed; the message names the (value, method, seed)."""
