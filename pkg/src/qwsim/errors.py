"""Exception types shared across the simulator."""


class QwsimError(Exception):
    """Base class for all simulator errors."""


class StepUnderflow(QwsimError):
    """Adaptive step size shrank below the hard floor (1e-12 meV^-1)."""


class InvariantBreach(QwsimError):
    """A physical invariant (unit trace, population bounds) was violated."""


class QuadratureNonconvergence(QwsimError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class UnknownPreset(QwsimError, KeyError):
    """Requested preset name is not defined."""


class SweepAborted(QwsimError):
    """A grid point failed; carries the partial results computed so far."""

    def __init__(self, value, partial, cause):
        super().__init__(f"sweep aborted at grid value {value!r}: {cause}")
        self.value = value
        self.partial = partial
        self.cause = cause


class ConfigError(QwsimError):
    """Base class for configuration problems (CLI exit code 1)."""


class ParseError(ConfigError):
    """Malformed config line."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownKey(ConfigError):
    """Config key not in the canonical key list."""


class RangeError(ConfigError):
    """Config value outside its allowed range."""
