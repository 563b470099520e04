"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters, sweep specs, or config files."""


class NumericsError(RuntimeError):
    """Numerical invariant violated (rank loss, non-finite state, ...)."""


class TapeError(RuntimeError):
    """Randomness tape malformed or inconsistent with the replaying run."""
