"""Exception types shared across the package."""


class GraphError(ValueError):
    """Invalid graph input (bad ids, negative weights, empty edge lists)."""


class DisconnectedGraphError(GraphError):
    """Raised when an operation needs a connected graph and did not get one."""


class ParseError(ValueError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class NumericalError(RuntimeError):
    """A solver or eigensolver failed to meet its accuracy contract."""
