"""Exception hierarchy shared by all spinbus modules."""


class SpinbusError(Exception):
    """Base class for every error raised by this package."""


class InvalidSizeError(SpinbusError, ValueError):
    pass


class InvalidInputError(SpinbusError, ValueError):
    pass


class GraphValidationError(InvalidInputError):
    """A graph violates one of its structural invariants."""


class ConfigParseError(SpinbusError, ValueError):
    """A graph document could not be parsed.

    ``line`` and ``field`` locate the problem when known.
    """

    def __init__(self, message, line=None, field=None):
        context = []
        if line is not None:
            context.append(f"line {line}")
        if field is not None:
            context.append(f"field {field!r}")
        if context:
            message = f"{message} ({', '.join(context)})"
        super().__init__(message)
        self.line = line
        self.field = field


class ResourceError(SpinbusError, RuntimeError):
    """A size guard was exceeded."""


class BlockLeakageError(SpinbusError, ValueError):
    def __init__(self, max_leak):
        super().__init__(
            f"Hamiltonian couples the single-excitation sector to other sectors "
            f"(max off-sector element {max_leak:.3e})"
        )
        self.max_leak = max_leak


class InvalidTargetError(InvalidInputError):
    pass


class InvalidStateError(InvalidInputError):
    pass


class InvalidClassificationError(InvalidInputError):
    pass


class PreconditionError(InvalidInputError):
    pass


class RequiresMEEncodingError(SpinbusError, ValueError):
    """The target pair sits on a mirror line through no site.

    Fixed-site disentangled targeting cannot reach it; a maximally
    entangled encoding of two counterpart sites is needed instead.
    """
