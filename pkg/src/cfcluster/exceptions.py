"""Exception hierarchy used across the package."""


class CFClusterError(Exception):
    """Base class for all errors raised by cfcluster."""


class ConfigError(CFClusterError, ValueError):
    """Invalid or inconsistent simulation configuration."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class DegenerateChannelError(CFClusterError, ArithmeticError):
    """A precoder batch has zero energy, so it cannot be normalized."""


class FactorizationError(CFClusterError, ArithmeticError):
    """The regularized Gram matrix was not numerically positive definite."""


class SimulationError(CFClusterError, RuntimeError):
    """Failure inside the Monte Carlo loop, tagged with where it happened."""

    def __init__(self, message, setup=None, realization=None):
        self.setup = setup
        self.realization = realization
        super().__init__(f"setup={setup} realization={realization}: {message}")
