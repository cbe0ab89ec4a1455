"""Exception types shared across the package."""


class EventRecError(Exception):
    """Base class for errors raised by eventrec."""


class DataError(EventRecError, ValueError):
    """Malformed or inconsistent input data.

    When the problem is tied to a file line, ``path`` and ``lineno`` are set
    and included in the message.
    """

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        if path is not None and lineno is not None:
            message = f"{path}:{lineno}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class ModelFormatError(EventRecError, ValueError):
    """A serialized model could not be read."""
