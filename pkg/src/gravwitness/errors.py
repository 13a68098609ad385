"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class InvalidGeometryError(ValueError):
    """Superposition split is not smaller than the mass separation."""


class ConfigError(ValueError):
    """Missing or malformed configuration (config file, calibration table)."""


class UnsupportedError(InvalidArgumentError):
    """Request exceeds a hard size limit."""


class MustDecomposeError(ValueError):
    """A Diag4 block reached the QASM emitter without being decomposed."""


class QasmParseError(ValueError):
    """Structured OpenQASM parse failure carrying the 1-based source line."""

    def __init__(self, message, line=None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)
