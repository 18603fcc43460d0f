"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class ConfigError(ValueError):
    """A run configuration is inconsistent or incomplete."""


class TruncationError(RuntimeError):
    """A Fock-space computation is not converged at the current cutoff."""
